"""
Extended fixed-point iteration x̃ <- (Φ - h·kᵀ)·x̃ + h and the end-to-end solvers.

The extended iteration converges to x̂ rather than to A⁻¹b; the solution is
recovered as x = x̂ / (1 - kᵀx̂).  Gains come from eigenvalue placement
(deadbeat or arbitrary real targets) or from the Riccati recursion, optionally
on the system scaled by 1/w, which bounds the spectral radius of the corrected
iteration matrix by w.
"""
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from .errors import DegenerateBackTransform, IterationOverflow, NotControllable
from .jacobi import IterationSystem, IterationTrace, build_iteration, run_affine_iteration
from .linalg import as_square, as_vector, spectral_radius_estimate
from .placement import closed_loop, is_controllable, place_gain, verify_placement
from .riccati import LqrParams, auto_output_vector, check_output_rank, riccati_backward

MODES = ("jacobi", "deadbeat", "place", "lqr", "lqr_w")
MIN_W = 1e-6


@dataclass
class SolveParams:
    """
    Per-mode settings.  ``M`` defaults to max(2n, 15/log10(1/w)) for lqr_w,
    to the nilpotency index for deadbeat and to 1000 (with stagnation exit)
    otherwise.  ``w`` defaults to 0.1 for lqr_w and is ignored elsewhere.
    ``lqr`` defaults to a seeded random output vector with r = 0.5, S = I
    and N = 10 (lqr_w) or 100 (lqr).

    ``scaled_feedback`` switches lqr_w to iterate with Φ/w - (h/w)·kᵀ instead of
    Φ - h·kᵀ.  It is off by default and its results are not back-transformable
    in general.
    """

    mode: str = "lqr_w"
    w: Optional[float] = None
    M: Optional[int] = None
    x0: Optional[np.ndarray] = None
    targets: Optional[np.ndarray] = None
    lqr: Optional[LqrParams] = None
    fp_tol: float = 1e-14
    seed: Optional[int] = 0
    scaled_feedback: bool = False

    def __post_init__(self):
        self.mode = self.mode.replace("-", "_")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.w is not None and not (0 < self.w <= 1):
            raise ValueError("w must lie in (0, 1]")
        if self.M is not None and self.M < 1:
            raise ValueError("M must be >= 1")
        if self.mode == "place" and self.targets is None:
            raise ValueError("mode 'place' needs target eigenvalues")


@dataclass
class SolveReport:
    mode: str
    x_tilde: np.ndarray
    x: np.ndarray
    residual: np.ndarray
    residual_norm: float
    steps_used: int
    gain: np.ndarray
    spectral_bound: Optional[float] = None
    diagnostics: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    trace: Optional[IterationTrace] = None
    w: Optional[float] = None
    N: Optional[int] = None
    M: Optional[int] = None

    @property
    def n(self):
        return self.x.shape[0]


def extended_iterate(sys, k, x0=None, M=100, fp_tol=0.0):
    """Run x̃_{m+1} = (Φ - h·kᵀ)·x̃_m + h, forming the corrected matrix once."""
    k = as_vector(k, "k")
    if x0 is None:
        x0 = np.zeros(sys.n)
    return run_affine_iteration(closed_loop(sys, k), sys.h, x0, M, fp_tol)


def back_transform(x_tilde, k):
    x_tilde = as_vector(x_tilde, "x_tilde")
    k = as_vector(k, "k")
    s = float(k @ x_tilde)
    denom = 1.0 - s
    if abs(denom) <= 1e-12 * (1.0 + abs(s)):
        raise DegenerateBackTransform(f"kᵀx̂ = {s!r} is 1 to working precision")
    return x_tilde / denom


def residual(A, x, b):
    return np.asarray(A) @ np.asarray(x) - np.asarray(b)


def scale_system(sys, w):
    if not w > 0:
        raise ValueError("w must be positive")
    return IterationSystem(sys.phi / w, sys.h / w, sys.scale_w * w)


def _finish(mode, A, b, trace, k, **extra):
    x_tilde = trace.last
    x = back_transform(x_tilde, k)
    res = residual(A, x, b)
    report = SolveReport(
        mode=mode,
        x_tilde=x_tilde,
        x=x,
        residual=res,
        residual_norm=float(np.linalg.norm(res)),
        steps_used=trace.steps,
        gain=np.asarray(k, dtype=np.float64),
        trace=trace,
        **extra,
    )
    # errors against the final iterate, as a stand-in for the unknown fixed point
    trace.attach_reference(x_tilde)
    return report


def _nilpotency_index(T):
    """Smallest j <= n with T^j exactly zero, else n."""
    n = T.shape[0]
    power = T.copy()
    for j in range(1, n):
        if not np.any(power):
            return j
        power = power @ T
    return n


def deadbeat_solve(A, b, x0=None):
    """Place every eigenvalue at zero and iterate exactly n (or fewer) steps."""
    A = as_square(A, "A")
    sys = build_iteration(A, b)
    n = sys.n
    zeros = np.zeros(n)
    if is_controllable(sys):
        k = place_gain(sys, zeros)
    elif verify_placement(sys, zeros, zeros):
        # Φ is already nilpotent; no correction needed
        k = zeros
    else:
        raise NotControllable("(Φ, h) is not controllable and Φ is not nilpotent")
    T = closed_loop(sys, k)
    M = _nilpotency_index(T)
    if x0 is None:
        x0 = zeros
    trace = run_affine_iteration(T, sys.h, x0, M)
    return _finish("deadbeat", A, b, trace, k, M=M, diagnostics={
        "spectral_radius_estimate": spectral_radius_estimate(T),
    })


def place_solve(A, b, targets, x0=None, M=1000, fp_tol=1e-14):
    A = as_square(A, "A")
    sys = build_iteration(A, b)
    k = place_gain(sys, targets)
    if x0 is None:
        x0 = np.zeros(sys.n)
    trace = extended_iterate(sys, k, x0, M, fp_tol)
    return _finish("place", A, b, trace, k, M=M, diagnostics={
        "spectral_radius_estimate": spectral_radius_estimate(closed_loop(sys, k)),
        "max_abs_target": float(np.max(np.abs(targets))),
    })


def jacobi_solve(A, b, x0=None, M=1000, fp_tol=1e-13):
    """Plain Jacobi; divergence is reported rather than raised."""
    A = as_square(A, "A")
    sys = build_iteration(A, b)
    if x0 is None:
        x0 = np.zeros(sys.n)
    zero = np.zeros(sys.n)
    diagnostics = {"spectral_radius_estimate": spectral_radius_estimate(sys.phi)}
    notes = []
    try:
        trace = run_affine_iteration(sys.phi, sys.h, x0, M, fp_tol)
    except IterationOverflow as exc:
        trace = exc.trace
        diagnostics["overflow_step"] = float(exc.step)
        notes.append(f"iteration diverged: {exc}")
    report = _finish("jacobi", A, b, trace, zero, M=M, diagnostics=diagnostics)
    report.warnings.extend(notes)
    return report


def _lqr_gain(sys, lqr, notes, label):
    if not check_output_rank(sys, lqr.c):
        msg = f"output rank condition fails for c on the {label} system; convergence is not guaranteed"
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        notes.append(msg)
    return riccati_backward(sys, lqr)


def lqr_solve(A, b, lqr=None, x0=None, M=1000, fp_tol=1e-14, seed=0):
    """Riccati gain on the unscaled system; only guarantees a spectral radius below one."""
    A = as_square(A, "A")
    sys = build_iteration(A, b)
    if lqr is None:
        lqr = LqrParams(auto_output_vector(sys, seed), N=100)
    notes = []
    ric = _lqr_gain(sys, lqr, notes, "unscaled")
    k = ric.k0
    if x0 is None:
        x0 = np.zeros(sys.n)
    trace = extended_iterate(sys, k, x0, M, fp_tol)
    report = _finish("lqr", A, b, trace, k, N=lqr.N, M=M, diagnostics={
        "spectral_radius_estimate": spectral_radius_estimate(closed_loop(sys, k)),
        "dare_residual": ric.delta_norm,
        "riccati_steps": float(ric.steps_run),
    })
    report.warnings.extend(notes)
    return report


def lqr_w_solve(A, b, params):
    """
    Solve A·x = b with a Riccati gain computed on the w-scaled system.

    1. (Φ, h) from the Jacobi splitting.
    2./3. Φ_w = Φ/w, h_w = h/w.
    4. N applications of the Riccati map from P = S (identity by default).
    5. k from the last P using Φ_w, h_w.
    6. M steps of x̃ <- (Φ - h·kᵀ)·x̃ + h on the unscaled data.
    7. Back-transform and residual against the original A, b.

    The spectral radius of Φ - h·kᵀ is then below w once the recursion has
    settled; ``spectral_bound`` carries w and the diagnostics carry a Gelfand
    estimate for comparison.
    """
    A = as_square(A, "A")
    b = as_vector(b, "b")
    w = 0.1 if params.w is None else float(params.w)
    if w < MIN_W:
        raise ValueError(f"w must be at least {MIN_W:g}")
    sys = build_iteration(A, b)
    n = sys.n
    lqr = params.lqr if params.lqr is not None else LqrParams(auto_output_vector(scale_system(sys, w), params.seed), N=10)
    if params.M is not None:
        M = params.M
    else:
        # 2n, but at least enough steps for a contraction by w to reach 1e-15
        M = max(2 * n, math.ceil(-15.0 / math.log10(w)) if w < 1 else 2 * n)
    sys_w = scale_system(sys, w)
    notes = []
    # riccati_backward counts a horizon of N as N-1 applications; the algorithm
    # here applies the map N times
    ric = _lqr_gain(sys_w, replace(lqr, N=lqr.N + 1), notes, "scaled")
    k = ric.k0
    x0 = np.zeros(n) if params.x0 is None else params.x0
    if params.scaled_feedback:
        T = closed_loop(sys_w, k)
    else:
        T = closed_loop(sys, k)
    trace = run_affine_iteration(T, sys.h, x0, M, params.fp_tol)
    diagnostics = {
        "spectral_radius_estimate": spectral_radius_estimate(T),
        "dare_residual": ric.delta_norm,
        "dare_residual_relative": ric.delta_norm / max(np.linalg.norm(ric.p_final), 1e-300),
        "riccati_steps": float(ric.steps_run),
    }
    report = _finish("lqr_w", A, b, trace, k, spectral_bound=w, w=w, N=lqr.N, M=M,
                     diagnostics=diagnostics)
    report.warnings.extend(notes)
    return report


def solve(A, b, params):
    """Dispatch on ``params.mode``."""
    mode = params.mode
    if mode == "deadbeat":
        return deadbeat_solve(A, b, params.x0)
    M = params.M if params.M is not None else 1000
    if mode == "jacobi":
        return jacobi_solve(A, b, params.x0, M, params.fp_tol)
    if mode == "place":
        return place_solve(A, b, params.targets, params.x0, M, params.fp_tol)
    if mode == "lqr":
        return lqr_solve(A, b, params.lqr, params.x0, M, params.fp_tol, params.seed)
    return lqr_w_solve(A, b, params)
