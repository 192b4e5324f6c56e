import numpy as np
import pytest

from fpcontrol import IterationSystem, build_iteration, classic_iterate, jacobi_split
from fpcontrol.errors import DimensionMismatch, IterationOverflow, ZeroDiagonal
from fpcontrol.jacobi import run_affine_iteration

from conftest import A_EX, B_EX


def test_split_parts():
    s = jacobi_split(A_EX)
    np.testing.assert_array_equal(np.diag(s.D), [59.0, 42.0, -67.0])
    np.testing.assert_array_equal(s.L + s.D + s.U, A_EX)
    assert np.all(np.triu(s.L) == 0) and np.all(np.tril(s.U) == 0)


def test_identity_gives_zero_phi():
    sys = build_iteration(np.eye(3), [1.0, 2.0, 3.0])
    assert not np.any(sys.phi)
    np.testing.assert_array_equal(sys.h, [1.0, 2.0, 3.0])


def test_fixed_point_is_solution(example_sys):
    x = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(example_sys.phi @ x + example_sys.h, x, atol=1e-12)


def test_zero_diagonal():
    A = A_EX.copy()
    A[1, 1] = 0.0
    with pytest.raises(ZeroDiagonal) as info:
        build_iteration(A, B_EX)
    assert info.value.index == 1


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        build_iteration(A_EX, [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        IterationSystem(np.zeros((2, 2)), np.zeros(3))


def test_classic_converges_for_dominant_diagonal():
    rng = np.random.default_rng(2)
    A = rng.uniform(-1, 1, (5, 5)) + np.diag(np.full(5, 10.0))
    x_star = rng.normal(size=5)
    trace = classic_iterate(build_iteration(A, A @ x_star), M=200, fp_tol=1e-15)
    np.testing.assert_allclose(trace.last, x_star, atol=1e-10)
    assert trace.stagnated and trace.steps < 200


def test_classic_diverges_on_example(example_sys):
    with pytest.raises(IterationOverflow) as info:
        classic_iterate(example_sys, M=5000)
    exc = info.value
    assert exc.step > 1
    assert exc.trace is not None and exc.trace.steps == exc.step - 1


def test_trace_shape_and_start():
    sys = build_iteration(np.diag([2.0, 4.0]), [2.0, 4.0])
    trace = classic_iterate(sys, x0=[5.0, 5.0], M=3)
    assert trace.steps == 3 and len(trace.iterates) == 4
    np.testing.assert_array_equal(trace.iterates[0], [5.0, 5.0])
    np.testing.assert_array_equal(trace.last, [1.0, 1.0])


def test_attach_reference():
    trace = run_affine_iteration(0.5 * np.eye(2), np.ones(2), np.zeros(2), 4)
    trace.attach_reference(np.full(2, 2.0))
    # error halves every step
    np.testing.assert_allclose(np.diff(np.log2(trace.error_norms)), -1.0)
