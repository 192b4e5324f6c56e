"""
Finite-horizon discrete LQR for the single-input pair (Φ, h).

The matrix Riccati difference equation is iterated backwards from the
terminal weight; its gains converge to the stationary (DARE) gain, which makes
Φ - h·kᵀ a contraction without any eigenvalue computation.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import DimensionMismatch
from .linalg import (
    as_square,
    as_vector,
    check_finite,
    fro,
    is_positive_definite,
    rank_estimate,
    symmetric_pivots,
)


@dataclass
class LqrParams:
    """
    c: output vector, Q = c·cᵀ.  r: control weight.  S: terminal weight
    (identity when None).  N: horizon, the recursion runs P_N = S down to P_1.
    dare_tol: stop early once ||Δ||_F <= dare_tol·||P||_F; 0 disables.
    """

    c: np.ndarray
    r: float = 0.5
    S: Optional[np.ndarray] = None
    N: int = 100
    dare_tol: float = 1e-12

    def __post_init__(self):
        self.c = as_vector(self.c, "c")
        if not self.r > 0:
            raise ValueError("r must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("horizon N must be an integer >= 1")
        self.N = int(self.N)
        if self.dare_tol < 0:
            raise ValueError("dare_tol must be non-negative")
        n = self.c.shape[0]
        if self.S is None:
            self.S = np.eye(n)
        self.S = as_square(self.S, "S")
        if self.S.shape[0] != n:
            raise DimensionMismatch(f"S is {self.S.shape}, c has length {n}")
        if not is_positive_definite(self.S):
            raise ValueError("terminal weight S must be symmetric positive definite")

    @property
    def Q(self):
        return build_Q(self.c)


@dataclass
class RiccatiTrace:
    p_final: np.ndarray
    gains: List[np.ndarray]  # k_{N-1}, ..., k_0 in computation order
    delta_norm: float
    steps_run: int
    p_history: Optional[List[np.ndarray]] = None  # P_N, ..., P_1 when requested

    @property
    def k0(self):
        return self.gains[-1]


@dataclass
class CostEvaluation:
    cost: float
    z_trace: List[np.ndarray]
    u_trace: List[float]


def build_Q(c):
    c = as_vector(c, "c")
    return np.outer(c, c)


def output_matrix(sys, c):
    """Rows cᵀ, cᵀΦ, ..., cᵀΦ^(n-1)."""
    c = as_vector(c, "c")
    if c.shape[0] != sys.n:
        raise DimensionMismatch(f"c has length {c.shape[0]}, system has n = {sys.n}")
    O = np.empty((sys.n, sys.n))
    row = c.copy()
    for j in range(sys.n):
        O[j] = row
        row = row @ sys.phi
    return O


def check_output_rank(sys, c, tol=1e-10):
    return rank_estimate(output_matrix(sys, c), tol) == sys.n


def riccati_step(P, sys, Q, r):
    """
    One backward step
        P_m = Q + Φᵀ [P - P h hᵀ P / (r + hᵀ P h)] Φ,
    symmetrized afterwards.
    """
    h, phi = sys.h, sys.phi
    Ph = P @ h
    denom = r + h @ Ph
    assert denom >= r, "r + hᵀPh fell below r; P is not PSD"
    inner = P - np.outer(Ph, Ph) / denom
    X = Q + phi.T @ inner @ phi
    return 0.5 * (X + X.T)


def gain_from_P(P, sys, r):
    """kᵀ = hᵀ P Φ / (r + hᵀ P h)."""
    Ph = P @ sys.h
    return (Ph @ sys.phi) / (r + sys.h @ Ph)


def dare_residual(P, sys, Q, r):
    return fro(riccati_step(P, sys, Q, r) - P)


def riccati_backward(sys, params, keep_history=False):
    """
    Solve the Riccati difference equation backwards from P_N = S to P_1.

    The gain k_{m} is taken from P_{m+1}, so N-1 steps give N gains ending in
    k_0.  The loop ends early when P already solves the algebraic equation to
    ``params.dare_tol`` (relative, Frobenius norm); its gain is then final.
    """
    if params.c.shape[0] != sys.n:
        raise DimensionMismatch(f"c has length {params.c.shape[0]}, system has n = {sys.n}")
    Q = params.Q
    r = params.r
    P = params.S.copy()
    gains = [gain_from_P(P, sys, r)]
    history = [P] if keep_history else None
    delta = None
    steps = 0
    while steps < params.N - 1:
        P_next = riccati_step(P, sys, Q, r)
        check_finite(P_next, steps + 1)
        delta = fro(P_next - P)
        if params.dare_tol > 0 and delta <= params.dare_tol * fro(P):
            break
        P = P_next
        steps += 1
        gains.append(gain_from_P(P, sys, r))
        if keep_history:
            history.append(P)
        delta = None
    if delta is None:
        delta = dare_residual(P, sys, Q, r)
    return RiccatiTrace(P, gains, delta, steps, history)


def cost_evaluate(sys, gains, z0, params):
    """
    Simulate z_{m+1} = Φ z_m + h u_m with u_m = -k_mᵀ z_m and return
    J_N = ½ z_Nᵀ S z_N + ½ Σ (z_mᵀ Q z_m + r u_m²).

    ``gains`` is in the order produced by riccati_backward (k_{N-1} first).
    """
    if len(gains) != params.N:
        raise DimensionMismatch(f"expected {params.N} gains, got {len(gains)}")
    Q = params.Q
    z = as_vector(z0, "z0")
    zs, us = [z], []
    running = 0.0
    for m, k in enumerate(reversed(gains)):
        u = -float(k @ z)
        running += z @ Q @ z + params.r * u * u
        z = sys.phi @ z + sys.h * u
        check_finite(z, m + 1)
        zs.append(z)
        us.append(u)
    cost = 0.5 * (z @ params.S @ z) + 0.5 * running
    return CostEvaluation(float(cost), zs, us)


def psd_pivots_ok(P, rtol=1e-9):
    """Elimination pivots of P are all >= -rtol·||P||_F."""
    return bool(np.all(symmetric_pivots(P) >= -rtol * fro(P)))


def auto_output_vector(sys, seed=None, max_tries=100, tol=1e-10):
    """Random integer c in [1, n+2]^n satisfying the output rank condition."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        c = rng.integers(1, sys.n + 3, size=sys.n).astype(np.float64)
        if check_output_rank(sys, c, tol):
            return c
    raise ValueError(f"no output vector with full observability rank found in {max_tries} draws")
