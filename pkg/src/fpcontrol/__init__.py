"""
Iterative solution of A·x = b by fixed-point iterations whose iteration matrix
is corrected by rank-one state feedback, Φ - h·kᵀ.

The gain k comes from eigenvalue placement (deadbeat or real targets) or from a
backward Riccati recursion, optionally on the system scaled by 1/w so that the
corrected iteration contracts at least as fast as w.
"""
from .errors import (
    DegenerateBackTransform,
    DimensionMismatch,
    IterationOverflow,
    NotControllable,
    ParseError,
    SingularMatrix,
    SolverError,
    ZeroDiagonal,
)
from .jacobi import IterationSystem, IterationTrace, JacobiSplit, build_iteration, classic_iterate, jacobi_split
from .linalg import lu_solve, rank_estimate, spectral_radius_estimate
from .placement import controllability_matrix, is_controllable, place_gain, verify_placement
from .riccati import (
    LqrParams,
    RiccatiTrace,
    build_Q,
    check_output_rank,
    cost_evaluate,
    dare_residual,
    gain_from_P,
    riccati_backward,
    riccati_step,
)
from .solver import (
    SolveParams,
    SolveReport,
    back_transform,
    deadbeat_solve,
    extended_iterate,
    lqr_w_solve,
    residual,
    scale_system,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateBackTransform",
    "DimensionMismatch",
    "IterationOverflow",
    "NotControllable",
    "ParseError",
    "SingularMatrix",
    "SolverError",
    "ZeroDiagonal",
    "LqrParams",
    "RiccatiTrace",
    "build_Q",
    "check_output_rank",
    "cost_evaluate",
    "dare_residual",
    "gain_from_P",
    "riccati_backward",
    "riccati_step",
    "SolveParams",
    "SolveReport",
    "back_transform",
    "deadbeat_solve",
    "extended_iterate",
    "lqr_w_solve",
    "residual",
    "scale_system",
    "solve",
    "IterationSystem",
    "IterationTrace",
    "JacobiSplit",
    "build_iteration",
    "classic_iterate",
    "jacobi_split",
    "lu_solve",
    "rank_estimate",
    "spectral_radius_estimate",
    "controllability_matrix",
    "is_controllable",
    "place_gain",
    "verify_placement",
]
