"""
Eigenvalue assignment for the rank-one corrected iteration matrix Φ - h·kᵀ.

The gain is computed with Ackermann's formula and checked against the
characteristic polynomial from the Faddeev-LeVerrier recursion, so no
eigenvalues are ever computed.
"""
import numpy as np

from .errors import DimensionMismatch, NotControllable
from .linalg import as_vector, lu_solve, rank_estimate


def controllability_matrix(sys):
    """Columns h, Φh, ..., Φ^(n-1)h."""
    n = sys.n
    C = np.empty((n, n))
    col = sys.h.copy()
    for j in range(n):
        C[:, j] = col
        col = sys.phi @ col
    return C


def is_controllable(sys, tol=1e-10):
    return rank_estimate(controllability_matrix(sys), tol) == sys.n


def poly_from_roots(roots):
    """
    Monic coefficients [1, a_1, ..., a_n] of prod(λ - r_i) for real roots.

    Roots are sorted first and multiplied as a balanced product tree, so the
    result does not depend on the order the roots were given in.
    """
    factors = [np.array([1.0, -float(r)]) for r in sorted(float(r) for r in roots)]
    if not factors:
        return np.array([1.0])
    while len(factors) > 1:
        paired = [np.convolve(factors[i], factors[i + 1]) for i in range(0, len(factors) - 1, 2)]
        if len(factors) % 2:
            paired.append(factors[-1])
        factors = paired
    return factors[0]


def charpoly(M):
    """Monic characteristic polynomial [1, c_1, ..., c_n] by Faddeev-LeVerrier."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    N = np.zeros_like(M)
    eye = np.eye(n)
    for k in range(1, n + 1):
        N = M @ N + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(M @ N) / k
    return coeffs


def closed_loop(sys, k):
    return sys.phi - np.outer(sys.h, k)


def place_gain(sys, targets, tol=1e-10):
    """
    Gain k such that Φ - h·kᵀ has the requested real eigenvalues.

    kᵀ = e_nᵀ·C⁻¹·p(Φ) with C the controllability matrix and p the monic
    polynomial with roots ``targets``.  The last row of C⁻¹ is obtained from
    Cᵀ·y = e_n and p(Φ) is applied to it by Horner's rule on the row vector.
    """
    targets = as_vector(targets, "targets")
    n = sys.n
    if targets.shape[0] != n:
        raise DimensionMismatch(f"{targets.shape[0]} target eigenvalues for n = {n}")
    C = controllability_matrix(sys)
    rank = rank_estimate(C, tol)
    if rank < n:
        raise NotControllable(f"controllability matrix has rank {rank} < {n}")
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    y = lu_solve(C.T, e_n)
    coeffs = poly_from_roots(targets)
    row = y.copy()
    for a in coeffs[1:]:
        row = row @ sys.phi + a * y
    return row


def verify_placement(sys, k, targets, tol=1e-7):
    """True when charpoly(Φ - h·kᵀ) matches the target polynomial coefficient-wise."""
    k = as_vector(k, "k")
    targets = as_vector(targets, "targets")
    if k.shape[0] != sys.n or targets.shape[0] != sys.n:
        raise DimensionMismatch("gain and targets must have length n")
    got = charpoly(closed_loop(sys, k))
    want = poly_from_roots(targets)
    return bool(np.all(np.abs(got - want) <= tol * (1.0 + np.abs(want))))
