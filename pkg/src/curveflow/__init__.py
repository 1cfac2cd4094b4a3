"""Numerical laboratory for curve shortening flow and the binormal flow.

Planar curves move by their curvature vector, space curves by the
binormal velocity; the package generates every self-similar solution
family of both flows and checks the evolutions against them.
"""

from .errors import ConfigError, CurveFlowError
from .flow import DiagnosticRecord, FlowTrajectory, ScalarSeries, StepOptions
from .geometry import (FrenetData, SampledCurve, arclength_derivatives,
                       curve_diameter, enclosed_area, frenet, hausdorff_distance,
                       integrate_along, isoperimetric_ratio, resample_arclength,
                       segment_lengths, total_length)
from .hasimoto import (FilamentFunction, FrameState, HasimotoSolitonSpec,
                       dilating_filament, hasimoto_soliton,
                       hasimoto_soliton_filament, hasimoto_transform,
                       nlcse_evolve, nlcse_residual, nlcse_step,
                       reconstruct_frame, standard_seed)
from .vfe import BiotSavartOptions, biot_savart_velocity, binormal_velocity
from .csf_solitons import (ClosureData, CsfSolitonSpec, abresch_langer_partner,
                           apply_similarity, classify, detect_closure,
                           grim_reaper, integrate_profile, reconstruct_curve,
                           scaling_functions, soliton_residual)
from .vfe_solitons import (VfeRotatingSpec, apply_rotation,
                           planar_rotation_profile, rotation_residual,
                           transverse_rotation_profile, xaxis_rotation_law,
                           xaxis_rotation_profile, z_bounds)

__version__ = "0.1.0"
