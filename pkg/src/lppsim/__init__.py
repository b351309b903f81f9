"""Exponential last-passage percolation: deterministic simulation toolkit."""

from .experiments import ExperimentConfig, ExperimentResult, run_config
from .geodesic import (
    GeodesicPath,
    backtrack,
    contained_in,
    line_intersection,
    transversal_fluctuation,
)
from .lattice import (
    AntiDiagonal,
    Corridor,
    LatticePoint,
    LineInterval,
    OutOfConeError,
    ScaledTarget,
    SpaceTimeCoords,
    corridor_contains,
    interval_points,
    phi,
    psi,
    scaled_target,
)
from .passage import (
    UNREACHABLE,
    Profile,
    corridor_passage,
    line_to_point_profile,
    p2p,
    p2p_profile,
)
from .scaling import (
    LIMITS,
    LimitConstants,
    ProfileKind,
    ScaledProfile,
    airy1_normalize,
    center_scale_p2l,
    center_scale_p2p,
    height_unit,
    modulus_of_continuity,
    profile_extrema,
    uncenter_scale_p2l,
)
from .weights import WeightField, exp_inverse_cdf

__all__ = [
    "AntiDiagonal",
    "Corridor",
    "ExperimentConfig",
    "ExperimentResult",
    "GeodesicPath",
    "LIMITS",
    "LatticePoint",
    "LimitConstants",
    "LineInterval",
    "OutOfConeError",
    "Profile",
    "ProfileKind",
    "ScaledProfile",
    "ScaledTarget",
    "SpaceTimeCoords",
    "UNREACHABLE",
    "WeightField",
    "airy1_normalize",
    "backtrack",
    "center_scale_p2l",
    "center_scale_p2p",
    "contained_in",
    "corridor_contains",
    "corridor_passage",
    "exp_inverse_cdf",
    "height_unit",
    "interval_points",
    "line_intersection",
    "line_to_point_profile",
    "modulus_of_continuity",
    "p2p",
    "p2p_profile",
    "phi",
    "profile_extrema",
    "psi",
    "run_config",
    "scaled_target",
    "transversal_fluctuation",
    "uncenter_scale_p2l",
]
