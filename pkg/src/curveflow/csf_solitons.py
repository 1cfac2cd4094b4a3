"""Self-similar curve shortening solutions from the planar two-parameter ODE.

A curve that evolves by rotation (rate A) and dilation (rate B) has a
profile governed by the autonomous system

    x' = x y + A,      y' = -x^2 - B,      theta' = x,

where x is the curvature, y the tangential support component, and theta
the tangent angle.  The plane curve is recovered from a profile as
X = e^{i theta} (x + i y) / (A - i B), which is arclength-parametrized.
The module also carries the two classical special cases: the translating
grim reaper graph and the closed shrinkers confined to an annulus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import CurveFlowError
from .geometry import SampledCurve, frenet

# |x| or |y| beyond this truncates the profile with the escaped flag set.
ESCAPE_LIMIT = 1e8

SOLITON_CLASSES = (
    "rotating",
    "rotating-expanding",
    "rotating-shrinking",
    "shrinking",
    "expanding",
    "stationary-line",
)


def classify(A: float, B: float) -> str:
    """Sign-dispatch on (rotation, dilation) rates."""
    if A != 0.0:
        if B == 0.0:
            return "rotating"
        return "rotating-expanding" if B > 0 else "rotating-shrinking"
    if B == 0.0:
        return "stationary-line"
    return "expanding" if B > 0 else "shrinking"


@dataclass(frozen=True)
class CsfSolitonSpec:
    A: float
    B: float
    x0: float
    y0: float = 0.0
    theta0: float = 0.0
    s_range: tuple[float, float] = (-10.0, 10.0)
    n: int = 1024

    def __post_init__(self):
        a, b = self.s_range
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError("s_range must be a finite nonempty interval")
        if self.n < 16:
            raise ValueError("n must be at least 16")


@dataclass
class SolitonProfile:
    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    escaped: bool = False


def soliton_ode_rhs(x: float, y: float, A: float, B: float):
    return (x * y + A, -x * x - B)


def _escape(_s, u):
    return max(abs(u[0]), abs(u[1])) - ESCAPE_LIMIT


_escape.terminal = True


def _solve_from_origin(spec: CsfSolitonSpec, s_end: float):
    rhs = lambda s, u: (*soliton_ode_rhs(u[0], u[1], spec.A, spec.B), u[0])
    return solve_ivp(
        rhs,
        (0.0, s_end),
        [spec.x0, spec.y0, spec.theta0],
        method="RK45",
        rtol=1e-10,
        atol=1e-10,
        dense_output=True,
        events=_escape,
    )


def integrate_profile(spec: CsfSolitonSpec) -> SolitonProfile:
    """Integrate the profile system over s_range (initial data sits at s=0).

    The range is truncated where the state escapes ESCAPE_LIMIT, with
    the escaped flag set.
    """
    a, b = spec.s_range
    lo, hi = a, b
    escaped = False
    sol_fwd = sol_bwd = None
    if b > 0:
        sol_fwd = _solve_from_origin(spec, b)
        if sol_fwd.status == 1:
            hi = float(sol_fwd.t[-1])
            escaped = True
    if a < 0:
        sol_bwd = _solve_from_origin(spec, a)
        if sol_bwd.status == 1:
            lo = float(sol_bwd.t[-1])
            escaped = True
    lo = max(lo, a)
    hi = min(hi, b)
    if not lo < hi:
        raise CurveFlowError("profile-escape", "profile escapes before s_range")
    s = np.linspace(lo, hi, spec.n)
    vals = np.empty((3, spec.n))
    fwd = s >= 0
    if np.any(fwd):
        src = sol_fwd if sol_fwd is not None else sol_bwd
        vals[:, fwd] = src.sol(s[fwd])
    if np.any(~fwd):
        vals[:, ~fwd] = sol_bwd.sol(s[~fwd])
    return SolitonProfile(s, vals[0], vals[1], vals[2], escaped)


def reconstruct_curve(profile: SolitonProfile, A: float, B: float) -> SampledCurve:
    """Plane curve X = e^{i theta}(x + i y)/(A - i B) from a profile."""
    if A == 0.0 and B == 0.0:
        raise CurveFlowError("degenerate-family", "(A, B) = (0, 0) has no reconstruction")
    w = np.exp(1j * profile.theta) * (profile.x + 1j * profile.y) / (A - 1j * B)
    return SampledCurve(2, False, np.column_stack([w.real, w.imag]))


def soliton_residual(curve: SampledCurve, A: float, B: float) -> np.ndarray:
    """Per-sample defect of the shape equation A<X,T> + B<X,N> = kappa."""
    fr = frenet(curve)
    xt = np.einsum("ij,ij->i", curve.points, fr.tangent)
    xn = np.einsum("ij,ij->i", curve.points, fr.normal)
    return np.abs(A * xt + B * xn - fr.curvature)


def scaling_functions(A: float, B: float, t: float) -> tuple[float, float]:
    """Rotation angle f(t) and scale g(t) of the similarity motion."""
    radicand = 2.0 * B * t + 1.0
    if radicand <= 0.0:
        raise CurveFlowError("past-singular-time", "similarity motion ends at t = -1/(2B)")
    if B == 0.0:
        return A * t, 1.0
    return (A / (2.0 * B)) * np.log(radicand), float(np.sqrt(radicand))


def apply_similarity(curve: SampledCurve, A: float, B: float, t: float) -> SampledCurve:
    """Rotate by f(t) and scale by g(t) about the origin."""
    f, g = scaling_functions(A, B, t)
    z = (curve.points[:, 0] + 1j * curve.points[:, 1]) * g * np.exp(1j * f)
    return curve.with_points(np.column_stack([z.real, z.imag]))


def grim_reaper(t: float, xs) -> SampledCurve:
    """The translating graph y = t - log cos x on |x| < pi/2."""
    xs = np.asarray(xs, dtype=float)
    if np.any(np.abs(xs) >= np.pi / 2):
        raise ValueError("grim reaper needs |x| < pi/2")
    return SampledCurve(2, False, np.column_stack([xs, t - np.log(np.cos(xs))]))


def abresch_langer_partner(B: float, r_min: float) -> float:
    """The outer annulus radius with equal weighted radius r e^{B r^2/2}.

    The weight function increases on (0, 1/sqrt(-B)] and decreases on
    [1/sqrt(-B), inf); the partner is the root on the outer branch.
    """
    if B >= 0.0:
        raise CurveFlowError("outside-annulus-branch", "needs B < 0")
    r_star = 1.0 / np.sqrt(-B)
    if not 0.0 < r_min <= r_star:
        raise CurveFlowError(
            "outside-annulus-branch", f"r_min must lie in (0, {r_star:g}]"
        )
    weighted = lambda r: r * np.exp(B * r * r / 2.0)
    target = weighted(r_min)
    if r_min == r_star:
        return r_star
    hi = 2.0 * r_star
    while weighted(hi) > target:
        hi *= 2.0
        if hi > 1e12:
            raise CurveFlowError("outside-annulus-branch", "no outer partner found")
    return float(brentq(lambda r: weighted(r) - target, r_star, hi, xtol=1e-15, rtol=8.9e-16))


# ---------------------------------------------------------------------------
# closure detection for sweeps


@dataclass
class ClosureData:
    closed: bool
    p: int | None
    q: int | None
    delta_phi: float
    period: float


def detect_closure(A: float, B: float, x0: float, y0: float = 0.0,
                   max_s: float = 400.0) -> ClosureData:
    """Angle advance of X between consecutive radius minima.

    The radius |X| has d|X|^2/ds proportional to A x - B y, so minima are
    upward zero crossings of that expression.  The curve closes up when
    the advance over one excursion is 2 pi p/q with small q.
    """
    rhs = lambda s, u: (*soliton_ode_rhs(u[0], u[1], A, B), u[0])

    def minimum(_s, u):
        return A * u[0] - B * u[1]

    minimum.direction = 1.0
    sol = solve_ivp(
        rhs,
        (0.0, max_s),
        [x0, y0, 0.0],
        method="RK45",
        rtol=1e-10,
        atol=1e-10,
        dense_output=True,
        events=(minimum, _escape),
    )
    hits = sol.t_events[0]
    if len(hits) < 2:
        return ClosureData(False, None, None, float("nan"), float("nan"))
    s1, s2 = float(hits[0]), float(hits[1])
    fine = np.linspace(s1, s2, 4096)
    xs, ys, thetas = sol.sol(fine)
    args = np.unwrap(np.arctan2(ys, xs))
    delta_phi = (thetas[-1] - thetas[0]) + (args[-1] - args[0])
    ratio = delta_phi / (2.0 * np.pi)
    frac = Fraction(ratio).limit_denominator(40)
    closed = frac.numerator != 0 and abs(ratio - float(frac)) < 1e-6
    if closed:
        return ClosureData(True, frac.numerator, frac.denominator, delta_phi, s2 - s1)
    return ClosureData(False, None, None, delta_phi, s2 - s1)
