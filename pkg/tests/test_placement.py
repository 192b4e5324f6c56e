import numpy as np
import pytest

from fpcontrol import IterationSystem, controllability_matrix, is_controllable, place_gain, verify_placement
from fpcontrol.errors import NotControllable
from fpcontrol.placement import charpoly, closed_loop, poly_from_roots

from conftest import random_system


def test_controllability_columns(example_sys):
    C = controllability_matrix(example_sys)
    np.testing.assert_allclose(C[:, 0], example_sys.h)
    np.testing.assert_allclose(C[:, 2], example_sys.phi @ example_sys.phi @ example_sys.h)
    assert is_controllable(example_sys)


def test_invariant_subspace_not_controllable():
    # h is an eigenvector of Φ, so the Krylov space is one-dimensional
    phi = np.diag([0.5, 2.0, -1.0])
    sys = IterationSystem(phi, np.array([1.0, 0.0, 0.0]))
    assert not is_controllable(sys)
    with pytest.raises(NotControllable):
        place_gain(sys, [0.0, 0.0, 0.0])


def test_poly_from_roots():
    np.testing.assert_allclose(poly_from_roots([1.0, 2.0]), [1.0, -3.0, 2.0])
    np.testing.assert_allclose(poly_from_roots([]), [1.0])


def test_charpoly_matches_numpy():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(5, 5))
    np.testing.assert_allclose(charpoly(M), np.poly(M), atol=1e-10)


def test_deadbeat_nilpotent(example_sys):
    k = place_gain(example_sys, np.zeros(3))
    T = closed_loop(example_sys, k)
    assert np.linalg.norm(np.linalg.matrix_power(T, 3)) < 1e-12 * np.linalg.norm(T) ** 3


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("seed", range(10))
def test_place_verify_roundtrip(n, seed):
    rng = np.random.default_rng(100 + seed)
    _, _, sys = random_system(rng, n)
    targets = rng.uniform(-0.9, 0.9, n)
    k = place_gain(sys, targets)
    assert verify_placement(sys, k, targets)
    got = np.sort(np.linalg.eigvals(closed_loop(sys, k)).real)
    np.testing.assert_allclose(got, np.sort(targets), atol=1e-6)


def test_verify_rejects_wrong_gain(example_sys):
    k = place_gain(example_sys, [0.1, 0.2, 0.3])
    assert not verify_placement(example_sys, k, [0.1, 0.2, 0.4])
