"""Command-line entry points.

Every generator, evolver, and diagnostic is exposed as a subcommand
reading and writing the curve/filament/trajectory/CSV formats from the
storage module.  Each run appends a record (command, parameters,
artifact checksums, wall clock, version) to manifest.jsonl in the
output directory; rerunning into a non-empty directory requires
--force and appends rather than overwrites.

Exit codes: 0 success, 2 configuration error, 3 runtime error.  Every
error path prints a stable machine-readable token as the last line on
standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, csf, csf_solitons, hasimoto, vfe, vfe_solitons
from .errors import ConfigError, CurveFlowError
from .flow import StepOptions
from .geometry import (SampledCurve, frenet, integrate_along,
                       resample_arclength, total_length)
from .storage import (CSF_COLUMNS, VFE_COLUMNS, RunManifest, append_run_manifest,
                      artifact_records, prepare_out_dir, read_curve,
                      read_filament, read_trajectory, write_curve,
                      write_diagnostics, write_filament, write_frenet,
                      write_table, write_trajectory)


def parse_range(text: str):
    """Grid syntax start:end:count -> numpy linspace."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("invalid-range", f"expected start:end:count, got {text!r}")
    try:
        a, b, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError("invalid-range", f"bad range {text!r}: {exc}") from exc
    if count < 1:
        raise ConfigError("invalid-range", "count must be positive")
    return np.linspace(a, b, count)


def parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError("invalid-range", f"bad list {text!r}: {exc}") from exc


def _write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True) + "\n")
    return path


def _table_name(stem: str, output_format: str) -> str:
    return f"{stem}.csv" if output_format == "csv" else f"{stem}.txt"


def _step_options(args) -> StepOptions:
    dt, cfl = args.dt, args.cfl
    if dt is None and cfl is None:
        cfl = 0.25
    return StepOptions(stop_time=args.stop_time, dt=dt, cfl=cfl,
                       n_points=args.n, resample_every=args.resample_every,
                       record_every=args.record_every)


def _load_input_curve(args) -> SampledCurve:
    curve = read_curve(args.input)
    if args.n and curve.n != args.n:
        curve = resample_arclength(curve, args.n)
    return curve


def _map_members(fn, members, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, members))
    return [fn(member) for member in members]


# ---------------------------------------------------------------------------
# csf


def cmd_csf_evolve(args, out: Path) -> list[Path]:
    curve = _load_input_curve(args)
    traj = csf.evolve(curve, _step_options(args))
    summary = {"stop_reason": traj.stop_reason, "steps": traj.steps_taken,
               "final_time": traj.final_time}
    if traj.final.closed:
        x0 = csf.estimate_shrink_point(traj)
        t_sing = csf.estimate_singular_time(traj)
        csf.huisken_series(traj, x0, t_sing)
        csf.distance_ratio_series(traj)
        summary["shrink_point"] = [float(c) for c in x0]
        summary["singular_time_estimate"] = float(t_sing)
    paths = write_trajectory(out, traj)
    paths.append(write_diagnostics(out / _table_name("diagnostics", args.format),
                                   traj.records, CSF_COLUMNS, args.format))
    paths.append(_write_json(out / "summary.json", summary))
    if args.rescale:
        if not traj.final.closed:
            raise ConfigError("invalid-parameter", "--rescale needs a closed curve")
        rows = []
        for rt in csf.parabolic_rescale(traj, x0, t_sing, parse_floats(args.lambdas)):
            rows.append([rt.lam, rt.iso_at_half, rt.centroid_drift,
                         float(rt.drift_flagged), float(rt.skipped)])
            if rt.trajectory is not None:
                paths += write_trajectory(out / f"rescaled_{rt.lam:g}", rt.trajectory)
        paths.append(write_table(out / _table_name("rescaled_report", args.format),
                                 ("lam", "iso_at_half", "centroid_drift",
                                  "drift_flagged", "skipped"), rows, args.format))
    return paths


def _soliton_member(params):
    A, B, x0, y0, s_range, n = params
    try:
        profile = csf_solitons.integrate_profile(
            csf_solitons.CsfSolitonSpec(A, B, x0, y0, s_range=s_range, n=n))
        curve = csf_solitons.reconstruct_curve(profile, A, B)
        closure = csf_solitons.detect_closure(A, B, x0, y0)
    except CurveFlowError as exc:
        return {"A": A, "B": B, "x0": x0, "y0": y0, "error": exc.token}, None
    record = {"A": A, "B": B, "x0": x0, "y0": y0,
              "class": csf_solitons.classify(A, B),
              "s_range": list(s_range), "escaped": bool(profile.escaped),
              "closed": bool(closure.closed), "p": closure.p, "q": closure.q}
    if np.isfinite(closure.delta_phi):
        record["delta_phi"] = float(closure.delta_phi)
    return record, curve


def cmd_csf_soliton(args, out: Path) -> list[Path]:
    if args.grim_reaper:
        curve = csf_solitons.grim_reaper(args.t, parse_range(args.x))
        return [write_curve(out / "grim_reaper.curve", curve)]

    if args.abresch_langer:
        if args.B is None or args.r_min is None:
            raise ConfigError("invalid-parameter",
                              "--abresch-langer needs --B and --r-min")
        partner = csf_solitons.abresch_langer_partner(args.B, args.r_min)
        return [_write_json(out / "abresch_langer.json",
                            {"B": args.B, "r_min": args.r_min, "r_max": partner})]

    if args.A is None or args.B is None:
        raise ConfigError("invalid-parameter", "--A and --B are required")
    s_grid = parse_range(args.s)
    s_range, n = (float(s_grid[0]), float(s_grid[-1])), s_grid.size

    if args.sweep:
        a_vals = parse_range(args.A_range) if args.A_range else [args.A]
        b_vals = parse_range(args.B_range) if args.B_range else [args.B]
        x_vals = parse_range(args.x0_range) if args.x0_range else [args.x0]
        y_vals = parse_range(args.y0_range) if args.y0_range else [args.y0]
        members = [(float(a), float(b), float(x), float(y), s_range, n)
                   for a in a_vals for b in b_vals for x in x_vals for y in y_vals]
        results = _map_members(_soliton_member, members, args.threads)
        paths, atlas = [], []
        for k, (record, curve) in enumerate(results):
            if curve is not None:
                name = f"soliton_{k:04d}.curve"
                paths.append(write_curve(out / name, curve))
                record["file"] = name
            atlas.append(record)
        paths.append(_write_json(out / "atlas.json", atlas))
        return paths

    record, curve = _soliton_member(
        (args.A, args.B, args.x0, args.y0, s_range, n))
    if curve is None:
        raise CurveFlowError(record["error"], "profile integration failed")
    record["file"] = "soliton.curve"
    record["residual_max"] = float(
        csf_solitons.soliton_residual(curve, args.A, args.B).max())
    print(record["class"])
    return [write_curve(out / "soliton.curve", curve),
            _write_json(out / "soliton.json", record)]


# ---------------------------------------------------------------------------
# vfe


def cmd_vfe_evolve(args, out: Path) -> list[Path]:
    curve = _load_input_curve(args)
    traj = vfe.evolve(curve, _step_options(args))
    paths = write_trajectory(out, traj)
    paths.append(write_diagnostics(out / _table_name("diagnostics", args.format),
                                   traj.records, VFE_COLUMNS, args.format))
    paths.append(_write_json(out / "summary.json",
                             {"stop_reason": traj.stop_reason,
                              "steps": traj.steps_taken,
                              "final_time": traj.final_time}))
    if args.residuals:
        res = vfe.frenet_evolution_residuals(traj)
        rows = np.column_stack([res.times, res.res_kappa, res.res_tau,
                                res.res_normal, res.res_binormal])
        paths.append(write_table(
            out / _table_name("frenet_residuals", args.format),
            ("time", "res_kappa", "res_tau", "res_normal", "res_binormal"),
            rows, args.format))
    return paths


def _sign_schedule(x, component) -> list[dict]:
    signs = np.sign(np.diff(component))
    schedule: list[dict] = []
    for j, s in enumerate(signs):
        if s != 0 and (not schedule or schedule[-1]["sign"] != int(s)):
            schedule.append({"from_x": float(x[j]), "sign": int(s)})
    return schedule


def cmd_vfe_soliton(args, out: Path) -> list[Path]:
    grid = parse_range(args.x)
    x_range, n = (float(grid[0]), float(grid[-1])), grid.size
    record: dict = {"case": args.case, "C1": args.C1, "C2": args.C2,
                    "lam": args.lam, "x_range": list(x_range), "n": n}
    if args.case == "transverse-axis":
        curve = vfe_solitons.transverse_rotation_profile(args.C1, args.C2, x_range, n)
        omega = vfe_solitons.TRANSVERSE_OMEGA
        half_width = 2.0 / (1.0 + args.C1**2) - 2.0 * args.C2
        record["admissible_band"] = {"x_squared_below": half_width}
        record["sign_schedule"] = _sign_schedule(curve.points[:, 0], curve.points[:, 1])
    else:
        z0 = args.f0 if (args.case == "planar" and args.f0 is not None) else args.z0
        if z0 is None:
            raise ConfigError("invalid-parameter", "--z0 (or --f0) is required")
        lam = 0.0 if args.case == "planar" else args.lam
        lo, hi = vfe_solitons.z_bounds(lam, args.C1)
        if args.case == "planar":
            curve, omega = vfe_solitons.planar_rotation_profile(
                args.C1, z0, x_range, n, sign=args.sign)
        else:
            spec = vfe_solitons.VfeRotatingSpec(
                case="x-axis", C1=args.C1, lam=args.lam, sign=args.sign,
                z0=z0, x_range=x_range, n=n)
            curve = vfe_solitons.xaxis_rotation_profile(spec)
            omega = vfe_solitons.xaxis_rotation_law(spec)
        record["z0"] = z0
        record["admissible_band"] = {"z_squared_low": lo, "z_squared_high": hi}
        record["sign_schedule"] = _sign_schedule(curve.points[:, 0], curve.points[:, 2])
    record["omega"] = [float(c) for c in omega]
    record["rotation_residual_max"] = float(
        vfe_solitons.rotation_residual(curve, omega).max())
    record["file"] = "profile.curve"
    return [write_curve(out / "profile.curve", curve),
            _write_json(out / "profile.json", record)]


def cmd_vfe_biot_savart(args, out: Path) -> list[Path]:
    curve = read_curve(args.input)
    eps_values = parse_floats(args.eps)
    if not eps_values:
        raise ConfigError("invalid-parameter", "--eps list is empty")
    outer = args.outer if args.outer is not None else total_length(curve) / 4.0
    speeds = []
    for eps in eps_values:
        opts = vfe.BiotSavartOptions(eps, outer, args.quadrature_n)
        speeds.append(float(np.linalg.norm(
            vfe.biot_savart_velocity(curve, args.index, opts))))
    logs = np.log(1.0 / np.asarray(eps_values))
    speeds_arr = np.asarray(speeds)
    slope, intercept = np.polyfit(logs, speeds_arr, 1)
    fitted = slope * logs + intercept
    ss_res = float(np.sum((speeds_arr - fitted) ** 2))
    ss_tot = float(np.sum((speeds_arr - speeds_arr.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    report = {"epsilon": eps_values, "speed": speeds, "outer": float(outer),
              "index": args.index, "slope": float(slope),
              "intercept": float(intercept), "r_squared": r_squared}
    print(f"slope {float(slope):.6g} r_squared {r_squared:.6g}")
    return [_write_json(out / "biot_savart.json", report)]


# ---------------------------------------------------------------------------
# hasimoto


def cmd_hasimoto_transform(args, out: Path) -> list[Path]:
    curve = read_curve(args.input)
    curve = resample_arclength(curve, curve.n)
    fil = hasimoto.hasimoto_transform(frenet(curve), gauge_A=args.gauge_A,
                                      periodic=args.periodic)
    return [write_filament(out / "filament.json", fil)]


def cmd_hasimoto_evolve(args, out: Path) -> list[Path]:
    fil = read_filament(args.input)
    fil = hasimoto.FilamentFunction(fil.grid_start, fil.grid_step, fil.values,
                                    gauge_A=fil.gauge_A, time=fil.time,
                                    periodic=args.periodic)
    evolved = hasimoto.nlcse_evolve(fil, args.dt, args.steps)
    return [write_filament(out / "filament.json", evolved)]


def cmd_hasimoto_reconstruct(args, out: Path) -> list[Path]:
    fil = read_filament(args.input)
    curve, _frames = hasimoto.reconstruct_frame(fil)
    return [write_curve(out / "reconstructed.curve", curve)]


def cmd_hasimoto_soliton(args, out: Path) -> list[Path]:
    spec = hasimoto.HasimotoSolitonSpec(args.nu, args.tau0)
    s_grid = parse_range(args.s)
    curve, fr = hasimoto.hasimoto_soliton(spec, args.t, s_grid)
    fil = hasimoto.hasimoto_soliton_filament(spec, args.t, s_grid)
    return [write_curve(out / "soliton.curve", curve),
            write_frenet(out / "soliton_frame.json", fr),
            write_filament(out / "soliton_filament.json", fil)]


def cmd_hasimoto_dilating(args, out: Path) -> list[Path]:
    grid = parse_range(args.x)
    fil = hasimoto.dilating_filament(args.a, args.t, grid)
    paths = [write_filament(out / "filament.json", fil)]
    if args.check_residual:
        delta = 1e-4
        older = hasimoto.dilating_filament(args.a, args.t - delta, grid)
        newer = hasimoto.dilating_filament(args.a, args.t + delta, grid)
        residual = hasimoto.nlcse_residual(older, fil, newer)
        value = float(np.nanmax(residual))
        print(f"nlcse_residual_max {value!r}")
        paths.append(_write_json(out / "residual.json",
                                 {"a": args.a, "t": args.t, "n": grid.size,
                                  "nlcse_residual_max": value}))
    return paths


# ---------------------------------------------------------------------------
# diagnose


def cmd_diagnose_huisken(args, out: Path) -> list[Path]:
    traj = read_trajectory(args.trajectory)
    x0 = (np.asarray(parse_floats(args.x0)) if args.x0
          else csf.estimate_shrink_point(traj))
    t0 = args.t0 if args.t0 is not None else csf.estimate_singular_time(traj)
    series = csf.huisken_series(traj, x0, t0)
    rows = np.column_stack([series.times, series.values])
    return [write_table(out / _table_name("huisken", args.format),
                        ("time", "huisken"), rows, args.format)]


def cmd_diagnose_distance_ratio(args, out: Path) -> list[Path]:
    if args.input:
        value = csf.distance_ratio(read_curve(args.input))
        print(repr(value))
        return [_write_json(out / "distance_ratio.json", {"distance_ratio": value})]
    if not args.trajectory:
        raise ConfigError("invalid-parameter", "need --input or --trajectory")
    series = csf.distance_ratio_series(read_trajectory(args.trajectory))
    rows = np.column_stack([series.times, series.values])
    return [write_table(out / _table_name("distance_ratio", args.format),
                        ("time", "distance_ratio"), rows, args.format)]


def cmd_diagnose_residuals(args, out: Path) -> list[Path]:
    traj = read_trajectory(args.trajectory)
    paths = []
    if args.flow == "csf":
        for k, frame in enumerate(traj.frames):
            fr = frenet(frame)
            traj.records[k].bending = integrate_along(frame, fr.curvature**2)
        arc = csf.arclength_rate_residual(traj)
        rows = np.column_stack([arc.times, arc.values])
        paths.append(write_table(out / _table_name("arclength_residual", args.format),
                                 ("time", "residual"), rows, args.format))
        curv = csf.curvature_evolution_residual(traj)
        rows = np.column_stack([curv.times, curv.values])
        paths.append(write_table(out / _table_name("curvature_residual", args.format),
                                 ("time", "residual"), rows, args.format))
    else:
        res = vfe.frenet_evolution_residuals(traj)
        rows = np.column_stack([res.times, res.res_kappa, res.res_tau,
                                res.res_normal, res.res_binormal])
        paths.append(write_table(
            out / _table_name("frenet_residuals", args.format),
            ("time", "res_kappa", "res_tau", "res_normal", "res_binormal"),
            rows, args.format))
        comm = vfe.commutator_residual(traj)
        rows = np.column_stack([comm.times, comm.values])
        paths.append(write_table(out / _table_name("commutator_residual", args.format),
                                 ("time", "residual"), rows, args.format))
    return paths


# ---------------------------------------------------------------------------
# parser assembly


class _Parser(argparse.ArgumentParser):
    # keep the machine-readable token as the last stderr line even for
    # argparse's own failures
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        print("invalid-arguments", file=sys.stderr)
        raise SystemExit(2)


def _add_global_flags(parser, top: bool = False):
    # leaves default to SUPPRESS so a flag given before the subcommand
    # is not clobbered by the subparser's defaults
    parser.add_argument("--out", default="out" if top else argparse.SUPPRESS,
                        help="output directory (default: out)")
    parser.add_argument("--force", action="store_true",
                        default=False if top else argparse.SUPPRESS,
                        help="allow writing into a non-empty output directory")
    parser.add_argument("--threads", type=int,
                        default=1 if top else argparse.SUPPRESS,
                        help="worker threads for sweeps")
    parser.add_argument("--format", choices=("csv", "structured-text"),
                        default="csv" if top else argparse.SUPPRESS,
                        help="diagnostics table format")


def _add_evolve_flags(parser):
    parser.add_argument("--input", required=True)
    parser.add_argument("--stop-time", type=float, required=True)
    parser.add_argument("--n", type=int, default=0,
                        help="resample the input to this many points")
    parser.add_argument("--dt", type=float, default=None)
    parser.add_argument("--cfl", type=float, default=None)
    parser.add_argument("--resample-every", type=int, default=10)
    parser.add_argument("--record-every", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curveflow",
                     description="curve shortening and binormal flow laboratory")
    parser.add_argument("--version", action="version", version=__version__)
    _add_global_flags(parser, top=True)
    common = _Parser(add_help=False)
    _add_global_flags(common)

    top = parser.add_subparsers(dest="group", metavar="{csf,vfe,hasimoto,diagnose}")

    csf_group = top.add_parser("csf", help="curve shortening flow").add_subparsers(
        dest="command", metavar="{evolve,soliton}")
    p = csf_group.add_parser("evolve", parents=[common])
    _add_evolve_flags(p)
    p.add_argument("--rescale", action="store_true")
    p.add_argument("--lambdas", default="2,4,8")
    p.set_defaults(handler=cmd_csf_evolve, command_path="csf evolve")
    p = csf_group.add_parser("soliton", parents=[common])
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--B", type=float, default=None)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--s", default="-10:10:1024", help="arclength grid start:end:count")
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--A-range", dest="A_range", default=None)
    p.add_argument("--B-range", dest="B_range", default=None)
    p.add_argument("--x0-range", dest="x0_range", default=None)
    p.add_argument("--y0-range", dest="y0_range", default=None)
    p.add_argument("--grim-reaper", action="store_true")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--x", default="-1.5:1.5:512", help="spatial grid for the grim reaper")
    p.add_argument("--abresch-langer", action="store_true")
    p.add_argument("--r-min", dest="r_min", type=float, default=None)
    p.set_defaults(handler=cmd_csf_soliton, command_path="csf soliton")

    vfe_group = top.add_parser("vfe", help="binormal flow").add_subparsers(
        dest="command", metavar="{evolve,soliton,biot-savart}")
    p = vfe_group.add_parser("evolve", parents=[common])
    _add_evolve_flags(p)
    p.add_argument("--residuals", action="store_true",
                   help="also write the Frenet evolution residual table")
    p.set_defaults(handler=cmd_vfe_evolve, command_path="vfe evolve")
    p = vfe_group.add_parser("soliton", parents=[common])
    p.add_argument("--case", required=True,
                   choices=("transverse-axis", "x-axis", "planar"))
    p.add_argument("--C1", type=float, required=True)
    p.add_argument("--C2", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--z0", type=float, default=None)
    p.add_argument("--f0", type=float, default=None, help="alias of --z0 for the planar case")
    p.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    p.add_argument("--x", default="0:5:1024", help="profile parameter grid")
    p.set_defaults(handler=cmd_vfe_soliton, command_path="vfe soliton")
    p = vfe_group.add_parser("biot-savart", parents=[common])
    p.add_argument("--input", required=True)
    p.add_argument("--eps", default="1e-2,1e-3,1e-4")
    p.add_argument("--outer", type=float, default=None)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--quadrature-n", dest="quadrature_n", type=int, default=256)
    p.set_defaults(handler=cmd_vfe_biot_savart, command_path="vfe biot-savart")

    has_group = top.add_parser("hasimoto", help="filament transform and NLCSE").add_subparsers(
        dest="command", metavar="{transform,evolve,reconstruct,soliton,dilating}")
    p = has_group.add_parser("transform", parents=[common])
    p.add_argument("--input", required=True)
    p.add_argument("--gauge-A", dest="gauge_A", type=float, default=0.0)
    p.add_argument("--periodic", action="store_true")
    p.set_defaults(handler=cmd_hasimoto_transform, command_path="hasimoto transform")
    p = has_group.add_parser("evolve", parents=[common])
    p.add_argument("--input", required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--periodic", action="store_true")
    p.set_defaults(handler=cmd_hasimoto_evolve, command_path="hasimoto evolve")
    p = has_group.add_parser("reconstruct", parents=[common])
    p.add_argument("--input", required=True)
    p.set_defaults(handler=cmd_hasimoto_reconstruct, command_path="hasimoto reconstruct")
    p = has_group.add_parser("soliton", parents=[common])
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--tau0", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--s", default="-20:20:1024")
    p.set_defaults(handler=cmd_hasimoto_soliton, command_path="hasimoto soliton")
    p = has_group.add_parser("dilating", parents=[common])
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", default="-10:10:4096")
    p.add_argument("--check-residual", action="store_true")
    p.set_defaults(handler=cmd_hasimoto_dilating, command_path="hasimoto dilating")

    diag_group = top.add_parser("diagnose", help="post-hoc diagnostics").add_subparsers(
        dest="command", metavar="{huisken,distance-ratio,residuals}")
    p = diag_group.add_parser("huisken", parents=[common])
    p.add_argument("--trajectory", required=True, help="trajectory output directory")
    p.add_argument("--x0", default=None, help="kernel center as x,y")
    p.add_argument("--t0", type=float, default=None)
    p.set_defaults(handler=cmd_diagnose_huisken, command_path="diagnose huisken")
    p = diag_group.add_parser("distance-ratio", parents=[common])
    p.add_argument("--input", default=None)
    p.add_argument("--trajectory", default=None)
    p.set_defaults(handler=cmd_diagnose_distance_ratio,
                   command_path="diagnose distance-ratio")
    p = diag_group.add_parser("residuals", parents=[common])
    p.add_argument("--trajectory", required=True)
    p.add_argument("--flow", choices=("csf", "vfe"), required=True)
    p.set_defaults(handler=cmd_diagnose_residuals, command_path="diagnose residuals")

    return parser


def _manifest_parameters(args) -> dict:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key == "handler" or callable(value):
            continue
        params[key] = value if isinstance(value, (int, float, str, bool,
                                                  type(None))) else str(value)
    return params


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_usage(sys.stderr)
        print("invalid-arguments", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        out = prepare_out_dir(args.out, args.force)
        paths = args.handler(args, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(exc.token, file=sys.stderr)
        return 2
    except CurveFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(exc.token, file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("invalid-parameter", file=sys.stderr)
        return 2
    manifest = RunManifest(command=args.command_path,
                           parameters=_manifest_parameters(args),
                           artifacts=artifact_records(out, paths),
                           wall_clock=time.perf_counter() - start,
                           version=__version__)
    append_run_manifest(out, manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
