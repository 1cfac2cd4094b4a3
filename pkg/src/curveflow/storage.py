"""Reading and writing curve, filament, trajectory, and diagnostics files.

Curves and filament functions are JSON, diagnostics are CSV (or a
fixed-width text table), trajectories are numbered curve files plus a
JSON index.  Floats are written with full repr precision so a
write-then-read round trip stays below 1e-12.  Nothing here stamps
dates or hostnames: a rerun with the same configuration produces
byte-identical artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .flow import DiagnosticRecord, FlowTrajectory
from .geometry import FrenetData, SampledCurve, total_length
from .hasimoto import FilamentFunction

CSF_COLUMNS = ("time", "length", "bending", "huisken",
               "distance_ratio", "max_curvature")
VFE_COLUMNS = ("time", "length", "max_curvature", "max_torsion")


def _dump_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True) + "\n")
    return path


def _load_json(path, kind: str):
    path = Path(path)
    if not path.is_file():
        raise ConfigError("input-not-found", f"no such file: {path}")
    try:
        return json.loads(path.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError("invalid-input",
                          f"cannot parse {kind} file {path}: {exc}") from exc


def write_curve(path, curve: SampledCurve) -> Path:
    return _dump_json(path, {
        "dimension": curve.dimension,
        "closed": curve.closed,
        "label": curve.label,
        "points": curve.points.tolist(),
    })


def read_curve(path) -> SampledCurve:
    payload = _load_json(path, "curve")
    try:
        return SampledCurve(int(payload["dimension"]), bool(payload["closed"]),
                            np.asarray(payload["points"], dtype=float),
                            label=str(payload.get("label", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("invalid-input",
                          f"bad curve file {path}: {exc}") from exc


def write_filament(path, fil: FilamentFunction) -> Path:
    # the periodic flag is a property of a run, not of the samples
    return _dump_json(path, {
        "grid_start": float(fil.grid_start),
        "grid_step": float(fil.grid_step),
        "gauge_A": float(fil.gauge_A),
        "time": float(fil.time),
        "values": np.column_stack([fil.values.real, fil.values.imag]).tolist(),
    })


def read_filament(path) -> FilamentFunction:
    payload = _load_json(path, "filament")
    try:
        pair = np.asarray(payload["values"], dtype=float)
        if pair.ndim != 2 or pair.shape[1] != 2:
            raise ValueError("values must be [re, im] pairs")
        return FilamentFunction(float(payload["grid_start"]),
                                float(payload["grid_step"]),
                                pair[:, 0] + 1j * pair[:, 1],
                                gauge_A=float(payload["gauge_A"]),
                                time=float(payload["time"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("invalid-input",
                          f"bad filament file {path}: {exc}") from exc


def write_frenet(path, fr: FrenetData) -> Path:
    payload = {
        "arclength": fr.arclength.tolist(),
        "tangent": fr.tangent.tolist(),
        "normal": fr.normal.tolist(),
        "curvature": fr.curvature.tolist(),
    }
    if fr.binormal is not None:
        payload["binormal"] = fr.binormal.tolist()
    if fr.torsion is not None:
        payload["torsion"] = fr.torsion.tolist()
        payload["torsion_defined"] = fr.torsion_defined.tolist()
    return _dump_json(path, payload)


def _cell(value) -> str:
    v = float(value)
    return "" if math.isnan(v) else repr(v)


def write_table(path, columns, rows, output_format: str = "csv") -> Path:
    """Write a table of floats; NaN cells come out empty."""
    path = Path(path)
    cells = [[_cell(v) for v in row] for row in rows]
    if output_format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            writer.writerows(cells)
    elif output_format == "structured-text":
        widths = [max([len(col)] + [len(row[j]) for row in cells])
                  for j, col in enumerate(columns)]
        with open(path, "w") as fh:
            fh.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
            for row in cells:
                fh.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    else:
        raise ConfigError("invalid-format", f"unknown output format {output_format!r}")
    return path


def write_diagnostics(path, records: list[DiagnosticRecord],
                      columns=CSF_COLUMNS, output_format: str = "csv") -> Path:
    rows = [[getattr(rec, col) for col in columns] for rec in records]
    return write_table(path, columns, rows, output_format)


def write_trajectory(out_dir, traj: FlowTrajectory, stem: str = "frame") -> list[Path]:
    """Write numbered curve files plus an index of times and file names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for k, frame in enumerate(traj.frames):
        name = f"{stem}_{k:05d}.curve"
        write_curve(out / name, frame)
        files.append(name)
    index = _dump_json(out / f"{stem}_index.json", {
        "times": [float(t) for t in traj.times],
        "files": files,
        "stop_reason": traj.stop_reason,
    })
    return [out / name for name in files] + [index]


def read_trajectory(out_dir, stem: str = "frame") -> FlowTrajectory:
    index = _load_json(Path(out_dir) / f"{stem}_index.json", "trajectory index")
    try:
        times, files = index["times"], index["files"]
        reason = str(index.get("stop_reason", ""))
    except (KeyError, TypeError) as exc:
        raise ConfigError("invalid-input", f"bad trajectory index: {exc}") from exc
    traj = FlowTrajectory(stop_reason=reason)
    for t, name in zip(times, files):
        frame = read_curve(Path(out_dir) / name)
        traj.append(float(t), frame,
                    DiagnosticRecord(float(t), total_length(frame), float("nan")))
    return traj


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Record of one CLI invocation appended to manifest.jsonl."""

    command: str
    parameters: dict
    artifacts: list[dict]
    wall_clock: float
    version: str


def artifact_records(out_dir, paths) -> list[dict]:
    out = Path(out_dir)
    return [{"file": str(Path(p).relative_to(out)), "sha256": file_sha256(p)}
            for p in sorted(Path(p) for p in paths)]


def append_run_manifest(out_dir, manifest: RunManifest) -> Path:
    path = Path(out_dir) / "manifest.jsonl"
    with open(path, "a") as fh:
        fh.write(json.dumps(asdict(manifest), sort_keys=True) + "\n")
    return path


def prepare_out_dir(out_dir, force: bool = False) -> Path:
    out = Path(out_dir)
    if out.exists() and not force and any(out.iterdir()):
        raise ConfigError("output-exists",
                          f"output directory {out} is not empty; pass --force")
    out.mkdir(parents=True, exist_ok=True)
    return out
