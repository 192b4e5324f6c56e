import numpy as np
import pytest

from fpcontrol import build_iteration, is_controllable, place_gain

# Worked example used throughout: A·x = b with solution (1, 2, 3).
A_EX = np.array([[59.0, -63.0, -2.0], [29.0, 42.0, 51.0], [36.0, 31.0, -67.0]])
B_EX = np.array([-73.0, 266.0, -103.0])
X_EX = np.array([1.0, 2.0, 3.0])
C_EX = np.array([1.0, 4.0, 5.0])


@pytest.fixture
def A():
    return A_EX.copy()


@pytest.fixture
def b():
    return B_EX.copy()


@pytest.fixture
def example_sys():
    return build_iteration(A_EX, B_EX)


def random_system(rng, n):
    """Random A with diagonal magnitudes in [0.3, 1.5], random b, controllable (Φ, h)."""
    while True:
        A = rng.uniform(-1, 1, (n, n))
        np.fill_diagonal(A, rng.choice([-1.0, 1.0], n) * rng.uniform(0.3, 1.5, n))
        b = rng.uniform(-1, 1, n)
        sys = build_iteration(A, b)
        if is_controllable(sys):
            return A, b, sys


def random_deadbeat_system(rng, n, max_amplification=100.0):
    """
    Like random_system, but drops systems whose deadbeat correction h·kᵀ is more
    than ``max_amplification`` times larger than Φ.  For those the n-step
    error is dominated by roundoff amplified through ||Φ - h·kᵀ||^n.
    """
    while True:
        A, b, sys = random_system(rng, n)
        k = place_gain(sys, np.zeros(n))
        if np.linalg.norm(np.outer(sys.h, k)) <= max_amplification * max(1.0, np.linalg.norm(sys.phi)):
            return A, b, sys, k
