"""
Small dense linear algebra kernels.

Matrices and vectors are plain float64 numpy arrays; numpy supplies storage and
products only.  Factorizations, rank and spectral radius are computed here so
that no eigenvalue routine is ever involved.
"""
import math

import numpy as np

from .errors import DimensionMismatch, IterationOverflow, SingularMatrix

OVERFLOW_LIMIT = 1e150


def as_matrix(a, name="matrix"):
    """Validated float64 copy of a 2-D array with at least one entry, all finite."""
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_vector(v, name="vector"):
    """Validated float64 1-D copy.  Column or row matrices are flattened."""
    x = np.array(v, dtype=np.float64)
    if x.ndim == 2 and 1 in x.shape:
        x = x.reshape(-1)
    if x.ndim != 1 or x.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def as_square(a, name="matrix"):
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def fro(a):
    return float(np.sqrt(np.sum(np.square(a))))


def check_finite(x, step, limit=OVERFLOW_LIMIT):
    if not np.all(np.abs(x) <= limit):
        raise IterationOverflow(step, limit=limit)


def lu_factor(A):
    """
    Doolittle LU with partial pivoting, returning (LU, perm).

    LU holds the unit-lower multipliers below the diagonal and U on and above
    it; row i of P·A is row perm[i] of A.
    """
    A = as_square(A, "A")
    n = A.shape[0]
    lu = A.copy()
    perm = np.arange(n)
    threshold = 1e-14 * fro(A)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < threshold or lu[p, k] == 0.0:
            raise SingularMatrix(f"pivot {k} has magnitude {abs(lu[p, k]):.3e}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm


def lu_substitute(lu, perm, B):
    n = lu.shape[0]
    X = np.array(B, dtype=np.float64)[perm]
    for i in range(1, n):
        X[i] -= lu[i, :i] @ X[:i]
    for i in range(n - 1, -1, -1):
        X[i] -= lu[i, i + 1:] @ X[i + 1:]
        X[i] /= lu[i, i]
    return X


def lu_solve(A, B):
    """Solve A·X = B for a vector or matrix right-hand side."""
    B = np.asarray(B, dtype=np.float64)
    A = as_square(A, "A")
    if B.ndim not in (1, 2) or B.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"right-hand side shape {B.shape} incompatible with A {A.shape}")
    lu, perm = lu_factor(A)
    return lu_substitute(lu, perm, B)


def rank_estimate(M, tol=1e-10):
    """
    Numerical rank by Gaussian elimination with full pivoting.

    A pivot counts when its magnitude exceeds ``tol * ||M||_F``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(M, "M")
    threshold = tol * fro(a)
    rows, cols = a.shape
    rank = 0
    for k in range(min(rows, cols)):
        sub = np.abs(a[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= threshold or sub[i, j] == 0.0:
            break
        i += k
        j += k
        a[[k, i]] = a[[i, k]]
        a[:, [k, j]] = a[:, [j, k]]
        a[k + 1:, k:] -= np.outer(a[k + 1:, k] / a[k, k], a[k, k:])
        rank += 1
    return rank


def symmetric_pivots(S):
    """
    Diagonal pivots of symmetric elimination without pivoting (an LDLᵀ sweep).

    For a symmetric PSD matrix all pivots are >= 0 up to roundoff.  A pivot that
    is not positive is recorded and its column is skipped.
    """
    a = as_square(S, "S")
    n = a.shape[0]
    scale = fro(a)
    pivots = np.empty(n)
    for k in range(n):
        d = a[k, k]
        pivots[k] = d
        if d > 1e-14 * scale and d > 0.0:
            a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:]) / d
    return pivots


def is_symmetric(S, rtol=1e-12):
    S = np.asarray(S)
    return fro(S - S.T) <= rtol * max(fro(S), np.finfo(float).tiny)


def is_positive_definite(S, rtol=1e-12):
    return is_symmetric(S, rtol) and bool(np.all(symmetric_pivots(S) > 0.0))


_SPLITTER = 134217729.0  # 2**27 + 1
DOUBLE_DOUBLE_MAX_N = 64


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_product(a, b):
    """Elementwise p, e with p + e == a*b exactly (Dekker)."""
    p = a * b
    t = _SPLITTER * a
    a_hi = t - (t - a)
    a_lo = a - a_hi
    t = _SPLITTER * b
    b_hi = t - (t - b)
    b_lo = b - b_hi
    return p, ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    s, e = _fast_two_sum(s, e + t)
    return _fast_two_sum(s, e + f)


def _dd_square(hi, lo):
    """(hi + lo) @ (hi + lo) in double-double arithmetic, about 32 digits."""
    n = hi.shape[0]
    ch = np.zeros_like(hi)
    cl = np.zeros_like(hi)
    for k in range(n):
        a_h, a_l = hi[:, k:k + 1], lo[:, k:k + 1]
        b_h, b_l = hi[k:k + 1, :], lo[k:k + 1, :]
        p, e = _two_product(a_h, b_h)
        e = e + (a_h * b_l + a_l * b_h)
        p, e = _fast_two_sum(p, e)
        ch, cl = _dd_add(ch, cl, p, e)
    return ch, cl


def spectral_radius_estimate(M, tol=1e-10, max_doublings=64, full_output=False):
    """
    Spectral radius from Gelfand's formula rho = lim ||M^k||^(1/k).

    Powers are formed by repeated squaring, k = 2^j.  After each squaring the
    running matrix is rescaled by an exact power of two and the exponent is
    tracked separately, so neither overflow nor underflow occurs.  Powers of
    matrices whose eigenvalues are small against their norm cancel badly, so
    for n <= 64 the squarings are carried in double-double arithmetic.

    Successive roots approach rho like C^(1/2^j); one Richardson step
    rho_{j+1}^2 / rho_j removes the leading term (exactly so for c·I).
    A dominant complex pair makes ||M^k|| oscillate with the phase, which the
    extrapolation cannot remove; that error decays only like G/2^j, where G
    bounds the oscillation of log ||M^k|| - k·log(rho).  G is tracked from the
    history, and iteration stops when consecutive estimates differ by less
    than ``tol * max(1, rho)`` and the bound 4·rho·G/2^j is below the same
    threshold.  With ``full_output`` a tuple
    ``(rho, converged, doublings)`` is returned; False means the doubling
    budget ran out and the last estimate is reported.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    hi = as_square(M, "M")
    s = fro(hi)
    if s > OVERFLOW_LIMIT:
        raise IterationOverflow(0, limit=OVERFLOW_LIMIT)
    if s == 0.0:
        return (0.0, True, 0) if full_output else 0.0
    extended = hi.shape[0] <= DOUBLE_DOUBLE_MAX_N
    lo = np.zeros_like(hi)

    exponent = 0  # M^(2^j) = (hi + lo) * 2**exponent
    plain_prev = math.log(s)
    est = est_prev = None
    converged = False
    # largest |g_j - 2 g_(j-1)| seen, where log ||M^(2^j)|| = 2^j log rho + g_j
    amplitude = 0.0
    j = 0
    for j in range(1, max_doublings + 1):
        if extended:
            hi, lo = _dd_square(hi, lo)
        else:
            hi = hi @ hi
        s = fro(hi)
        if s == 0.0:
            # nilpotent to working precision
            return (0.0, True, j) if full_output else 0.0
        e = math.frexp(s)[1]
        hi = np.ldexp(hi, -e)
        lo = np.ldexp(lo, -e)
        exponent = 2 * exponent + e
        plain = (math.log(fro(hi)) + exponent * math.log(2.0)) / 2.0 ** j
        est = math.exp(2.0 * plain - plain_prev)
        amplitude = max(amplitude, abs(plain - plain_prev) * 2.0 ** j)
        plain_prev = plain
        settled = 4.0 * est * amplitude / 2.0 ** j <= tol * max(1.0, est)
        if settled and est_prev is not None and abs(est - est_prev) < tol * max(1.0, est_prev):
            converged = True
            break
        est_prev = est
    return (est, converged, j) if full_output else est
