"""Rigidly rotating solutions of the binormal flow.

A curve satisfying omega x Gamma = Gamma_s x Gamma_ss evolves by the
rigid rotation Gamma(t) = e^{t M} Gamma_0 with M the skew matrix of
omega.  Three profile families are generated here, all normalized to
unit angular speed:

* transverse: rotation about the y-axis, graph components
  (x, z(x), C1*x) with slope -z'/sqrt(1+C1^2+z'^2) = q(x),
  q = (1+C1^2)(x^2+2*C2)/2, solvable only while |q| < 1;
* x-axis: components (x, lambda*z(x), z(x)) where z obeys
  z'^2 = (4 - (1+lambda^2)^2 (z^2+2*C1)^2) / ((1+lambda^2)^3 (z^2+2*C1)^2),
  oscillating inside an admissible band of z^2;
* planar: the lambda = 0 reduction, emitted as (x, f(x), 0).

The x-axis and planar families rotate about (+-1, 0, 0); the sign is
-sign(z0^2 + 2*C1), fixed along a profile because z^2 + 2*C1 cannot
cross zero without a vertical tangent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import CurveFlowError
from .geometry import SampledCurve, _lagrange_d1_d2, segment_lengths

# z^2 + 2*C1 magnitudes below this trigger the vertical-tangent truncation
W_FLOOR = 1e-9


@dataclass(frozen=True)
class VfeRotatingSpec:
    case: str                      # "transverse-axis" | "x-axis" | "planar"
    C1: float
    C2: float = 0.0
    lam: float = 0.0
    sign: int = 1
    z0: float = 0.0
    x_range: tuple[float, float] = (0.0, 5.0)
    n: int = 1024

    def __post_init__(self):
        if self.case not in ("transverse-axis", "x-axis", "planar"):
            raise ValueError("unknown case")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +-1")
        a, b = self.x_range
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError("x_range must be a finite nonempty interval")
        if self.n < 16:
            raise ValueError("n must be at least 16")


def z_bounds(lam: float, C1: float) -> tuple[float, float]:
    """Admissible open interval for z^2 in the x-axis/planar families."""
    p = 1.0 + lam**2
    hi = 2.0 / p - 2.0 * C1
    if hi <= 0.0:
        raise CurveFlowError("no-admissible-band", "2/(1+lambda^2) - 2*C1 <= 0")
    lo = max(0.0, -2.0 / p - 2.0 * C1)
    return lo, hi


def slope_radicand(z, lam: float, C1: float):
    """z'^2 as a function of z for the x-axis family."""
    p = 1.0 + lam**2
    w = np.asarray(z) ** 2 + 2.0 * C1
    return (4.0 - p**2 * w**2) / (p**3 * w**2)


def _band_profile(p: float, C1: float, z0: float, sign: int,
                  x_range: tuple[float, float], n: int):
    """Integrate the oscillatory band profile as (z, z').

    Differentiating z'^2 = R(z) gives z'' = -8 z / (p^3 (z^2+2C1)^3),
    which is regular at turning points, so the sign switching of the
    first-order form happens automatically; z'^2 - R(z) is an exact
    invariant of the integration.  Truncates at vertical tangents.
    """
    lo, hi = z_bounds(np.sqrt(p - 1.0), C1)
    if not lo <= z0**2 <= hi:
        raise CurveFlowError("outside-admissible-band",
                             f"z0^2 must lie in [{lo:g}, {hi:g}]")
    w0 = z0**2 + 2.0 * C1
    if abs(w0) < W_FLOOR:
        raise CurveFlowError("outside-admissible-band",
                             "initial value sits on the vertical-tangent locus")
    rad0 = (4.0 - p**2 * w0**2) / (p**3 * w0**2)
    zp0 = sign * np.sqrt(max(rad0, 0.0))

    def rhs(_x, u):
        w = u[0] ** 2 + 2.0 * C1
        return (u[1], -8.0 * u[0] / (p**3 * w**3))

    def vertical(_x, u):
        return (u[0] ** 2 + 2.0 * C1) ** 2 - W_FLOOR**2

    vertical.terminal = True
    a, b = x_range
    sol = solve_ivp(rhs, (a, b), [z0, zp0], method="RK45",
                    rtol=1e-10, atol=1e-12, dense_output=True, events=vertical)
    truncated = sol.status == 1
    x = np.linspace(a, float(sol.t[-1]), n)
    z, zp = sol.sol(x)
    return x, z, zp, truncated


def xaxis_rotation_profile(spec: VfeRotatingSpec) -> SampledCurve:
    """Profile curve (x, lambda*z, z) rotating about the x-axis."""
    p = 1.0 + spec.lam**2
    x, z, _, _ = _band_profile(p, spec.C1, spec.z0, spec.sign, spec.x_range, spec.n)
    pts = np.column_stack([x, spec.lam * z, z])
    return SampledCurve(3, False, pts, label="x-axis rotating profile")


def xaxis_rotation_law(spec: VfeRotatingSpec) -> np.ndarray:
    """Unit-speed angular velocity of the x-axis profile."""
    return np.array([-np.sign(spec.z0**2 + 2.0 * spec.C1), 0.0, 0.0])


def planar_rotation_profile(C1: float, f0: float, x_range: tuple[float, float],
                            n: int, sign: int = 1):
    """Planar profile (x, f(x), 0) plus its rotation law omega.

    The lambda = 0 reduction of the x-axis family; the emitted curve
    rotates out of its initial plane about (+-1, 0, 0).
    """
    x, f, _, _ = _band_profile(1.0, C1, f0, sign, x_range, n)
    pts = np.column_stack([x, f, np.zeros_like(x)])
    omega = np.array([-np.sign(f0**2 + 2.0 * C1), 0.0, 0.0])
    return SampledCurve(3, False, pts, label="planar rotating profile"), omega


def transverse_rotation_profile(C1: float, C2: float,
                                x_range: tuple[float, float], n: int) -> SampledCurve:
    """Profile curve (x, z(x), C1*x) rotating about the y-axis (omega = e_y).

    The slope relation -z'/sqrt(1+C1^2+z'^2) = q with
    q = (1+C1^2)(x^2+2C2)/2 is solvable only while |q| < 1; the range is
    truncated at the first violation.
    """
    p = 1.0 + C1**2
    a, b = x_range

    def q_of(x):
        return 0.5 * p * (np.asarray(x) ** 2 + 2.0 * C2)

    margin = 1.0 - 1e-9
    if abs(q_of(a)) >= margin:
        raise CurveFlowError("unsolvable-slope", "|q| >= 1 at the range start")
    probe = np.linspace(a, b, 4096)
    bad = np.nonzero(np.abs(q_of(probe)) >= margin)[0]
    if bad.size:
        j = bad[0]
        b = brentq(lambda x: abs(q_of(x)) - margin, probe[j - 1], probe[j])
    x = np.linspace(a, b, n)

    nodes, weights = np.polynomial.legendre.leggauss(5)

    def slope(xx):
        q = q_of(xx)
        return -q * np.sqrt(p / (1.0 - q**2))

    half = 0.5 * np.diff(x)
    mids = 0.5 * (x[:-1] + x[1:])
    samples = slope(mids[:, None] + half[:, None] * nodes[None, :])
    dz = half * (samples @ weights)
    z = np.concatenate([[0.0], np.cumsum(dz)])
    pts = np.column_stack([x, z, C1 * x])
    return SampledCurve(3, False, pts, label="transverse rotating profile")


TRANSVERSE_OMEGA = np.array([0.0, 1.0, 0.0])


# ---------------------------------------------------------------------------
# residual and the rigid motion


def rotation_residual(curve: SampledCurve, omega) -> np.ndarray:
    """Per-sample norm of omega x Gamma - Gamma_s x Gamma_ss."""
    if curve.dimension != 3:
        raise ValueError("needs a space curve")
    omega = np.asarray(omega, dtype=float)
    h = segment_lengths(curve)
    d1, d2 = _lagrange_d1_d2(curve.points, h, curve.closed)
    speed = np.linalg.norm(d1, axis=1)
    kb = np.cross(d1, d2) / speed[:, None] ** 3
    lhs = np.cross(np.broadcast_to(omega, curve.points.shape), curve.points)
    return np.linalg.norm(lhs - kb, axis=1)


def apply_rotation(curve: SampledCurve, omega, t: float) -> SampledCurve:
    """Rodrigues rotation of the curve by angle |omega|*t about omega."""
    omega = np.asarray(omega, dtype=float)
    speed = np.linalg.norm(omega)
    if speed == 0.0:
        return curve
    axis = omega / speed
    ang = speed * t
    p = curve.points
    cos, sin = np.cos(ang), np.sin(ang)
    dot = p @ axis
    rotated = (p * cos
               + np.cross(np.broadcast_to(axis, p.shape), p) * sin
               + np.outer(dot, axis) * (1.0 - cos))
    return curve.with_points(rotated)
