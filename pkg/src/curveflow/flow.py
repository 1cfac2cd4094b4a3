"""Shared containers for time-stepped curve evolution.

Both flow engines (curve shortening and binormal) produce a
FlowTrajectory: recorded frames plus per-record scalar diagnostics and
a stop reason.  Frames are recorded immediately before each resampling
pass so the stored geometry is the raw evolved state, not the smoothed
restart data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import SampledCurve


@dataclass
class StepOptions:
    """Time-stepping controls shared by the flow engines.

    Exactly one of ``dt`` (fixed step) or ``cfl`` (step chosen each
    resampling cycle from the current spacing) must be set.  ``n_points``
    fixes the sample count maintained by resampling; 0 keeps the input
    count.  The run stops at ``stop_time``, or earlier when the length
    drops below ``stop_length``, when the singularity proxies fire, or
    after ``max_steps``.
    """

    stop_time: float
    dt: float | None = None
    cfl: float | None = None
    n_points: int = 0
    resample_every: int = 10
    record_every: int = 10
    stop_length: float | None = None
    singular_length_fraction: float = 0.01
    max_steps: int = 2_000_000

    def __post_init__(self):
        if (self.dt is None) == (self.cfl is None):
            raise ValueError("set exactly one of dt and cfl")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.cfl is not None and not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if self.stop_time <= 0:
            raise ValueError("stop_time must be positive")
        if self.resample_every < 1 or self.record_every < 1:
            raise ValueError("resample_every and record_every must be >= 1")


@dataclass
class DiagnosticRecord:
    """Scalar diagnostics attached to one recorded frame."""

    time: float
    length: float
    max_curvature: float
    bending: float = float("nan")        # integral of kappa^2 ds
    huisken: float = float("nan")
    distance_ratio: float = float("nan")
    max_torsion: float = float("nan")


@dataclass
class FlowTrajectory:
    """Recorded history of one flow run."""

    times: list[float] = field(default_factory=list)
    frames: list[SampledCurve] = field(default_factory=list)
    records: list[DiagnosticRecord] = field(default_factory=list)
    stop_reason: str = ""
    steps_taken: int = 0

    def append(self, time: float, frame: SampledCurve, record: DiagnosticRecord):
        self.times.append(time)
        self.frames.append(frame)
        self.records.append(record)

    @property
    def final(self) -> SampledCurve:
        return self.frames[-1]

    @property
    def final_time(self) -> float:
        return self.times[-1]

    def series(self, name: str) -> "ScalarSeries":
        vals = np.array([getattr(r, name) for r in self.records])
        return ScalarSeries(np.array(self.times), vals, name)


@dataclass
class ScalarSeries:
    """A named scalar sampled at the recorded times."""

    times: np.ndarray
    values: np.ndarray
    name: str = ""

    def __len__(self) -> int:
        return len(self.times)
