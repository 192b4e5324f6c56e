"""Jacobi splitting of A·x = b and the plain stationary iteration x <- Φ·x + h."""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import DimensionMismatch, IterationOverflow, ZeroDiagonal
from .linalg import OVERFLOW_LIMIT, as_square, as_vector, check_finite


@dataclass(frozen=True)
class JacobiSplit:
    L: np.ndarray  # strictly lower part
    D: np.ndarray  # diagonal part
    U: np.ndarray  # strictly upper part


@dataclass(frozen=True)
class IterationSystem:
    """Fixed-point data (phi, h); ``scale_w`` records a prior division by w."""

    phi: np.ndarray
    h: np.ndarray
    scale_w: float = 1.0

    def __post_init__(self):
        phi = as_square(self.phi, "phi")
        h = as_vector(self.h, "h")
        if h.shape[0] != phi.shape[0]:
            raise DimensionMismatch(f"h has length {h.shape[0]}, phi is {phi.shape}")
        if not self.scale_w > 0:
            raise ValueError("scale_w must be positive")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "scale_w", float(self.scale_w))

    @property
    def n(self):
        return self.phi.shape[0]


@dataclass
class IterationTrace:
    iterates: List[np.ndarray]
    error_norms: Optional[List[float]] = None
    stagnated: bool = False

    @property
    def last(self):
        return self.iterates[-1]

    @property
    def steps(self):
        return len(self.iterates) - 1

    def attach_reference(self, x_ref):
        """Fill ``error_norms`` with ||x_m - x_ref|| for every stored iterate."""
        self.error_norms = [float(np.linalg.norm(x - x_ref)) for x in self.iterates]
        return self


def jacobi_split(A):
    A = as_square(A, "A")
    L = np.tril(A, -1)
    U = np.triu(A, 1)
    D = np.diag(np.diag(A))
    return JacobiSplit(L, D, U)


def build_iteration(A, b):
    """Φ = -D⁻¹(L+U), h = D⁻¹b."""
    A = as_square(A, "A")
    b = as_vector(b, "b")
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"b has length {b.shape[0]}, A is {A.shape}")
    split = jacobi_split(A)
    d = np.diag(split.D)
    for i, di in enumerate(d):
        if abs(di) < 1e-300:
            raise ZeroDiagonal(i)
    phi = -(split.L + split.U) / d[:, None]
    h = b / d
    return IterationSystem(phi, h)


def run_affine_iteration(T, h, x0, M, fp_tol=0.0, limit=OVERFLOW_LIMIT):
    """
    Iterate x_{m+1} = T·x_m + h for at most M steps.

    With ``fp_tol > 0`` the loop stops once two consecutive steps both satisfy
    ||x_{m+1} - x_m|| <= fp_tol·||x_{m+1}||.  Raises IterationOverflow (holding
    the partial trace) when any component exceeds ``limit`` in magnitude.
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    x = as_vector(x0, "x0")
    if x.shape[0] != h.shape[0]:
        raise DimensionMismatch(f"x0 has length {x.shape[0]}, system has n = {h.shape[0]}")
    iterates = [x]
    quiet = 0
    for m in range(1, M + 1):
        x_new = T @ x + h
        try:
            check_finite(x_new, m, limit)
        except IterationOverflow as exc:
            exc.trace = IterationTrace(iterates)
            raise
        iterates.append(x_new)
        if fp_tol > 0:
            change = np.linalg.norm(x_new - x)
            if change <= fp_tol * np.linalg.norm(x_new):
                quiet += 1
                if quiet >= 2:
                    return IterationTrace(iterates, stagnated=True)
            else:
                quiet = 0
        x = x_new
    return IterationTrace(iterates)


def classic_iterate(sys, x0=None, M=100, fp_tol=0.0):
    """Unmodified Jacobi iteration; diverging runs end in IterationOverflow."""
    if x0 is None:
        x0 = np.zeros(sys.n)
    return run_affine_iteration(sys.phi, sys.h, x0, M, fp_tol)
