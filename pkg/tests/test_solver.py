import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fpcontrol import LqrParams, SolveParams, back_transform, build_iteration, deadbeat_solve, scale_system, solve
from fpcontrol.errors import DegenerateBackTransform, NotControllable
from fpcontrol.solver import lqr_solve, lqr_w_solve, place_solve

from conftest import A_EX, B_EX, C_EX, X_EX, random_deadbeat_system, random_system


def test_back_transform_identity_for_zero_gain():
    x = np.array([1.5, -2.0])
    np.testing.assert_array_equal(back_transform(x, np.zeros(2)), x)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 4, elements=st.floats(-1e3, 1e3)), arrays(np.float64, 4, elements=st.floats(-1, 1)))
def test_back_transform_half(x, v):
    if abs(v @ x) < 1e-6:
        return
    k = 0.5 * v / (v @ x)  # kᵀx = 0.5, so the result is 2x
    np.testing.assert_allclose(back_transform(x, k), 2 * x, rtol=1e-9, atol=1e-9)


def test_back_transform_degenerate():
    with pytest.raises(DegenerateBackTransform):
        back_transform(np.array([1.0, 1.0]), np.array([0.5, 0.5]))


def test_scale_system():
    sys = build_iteration(A_EX, B_EX)
    sw = scale_system(sys, 0.1)
    assert sw.phi[0, 1] == pytest.approx(10.677966102, abs=1e-8)
    np.testing.assert_allclose(sw.h, [-12.372881355932, 63.333333333333, 15.373134328358], atol=1e-11)
    back = scale_system(sw, 10.0)
    np.testing.assert_allclose(back.phi, sys.phi, rtol=1e-15)
    assert scale_system(sys, 1.0).phi is not sys.phi
    np.testing.assert_array_equal(scale_system(sys, 1.0).phi, sys.phi)


def test_deadbeat_example():
    rep = deadbeat_solve(A_EX, B_EX)
    assert rep.steps_used == 3
    np.testing.assert_allclose(rep.x, X_EX, atol=1e-12)
    assert rep.residual_norm <= 1e-12


def test_deadbeat_identity_one_step():
    rep = deadbeat_solve(np.eye(3), [1.0, 2.0, 3.0])
    assert rep.steps_used == 1
    np.testing.assert_array_equal(rep.x, [1.0, 2.0, 3.0])


def test_deadbeat_uncontrollable():
    A = np.array([[1.0, 2.0, 0.0], [3.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(NotControllable):
        deadbeat_solve(A, [0.0, 0.0, 1.0])


@pytest.mark.parametrize("seed", range(10))
def test_deadbeat_construct_then_solve(seed):
    rng = np.random.default_rng(seed)
    A, _, _, _ = random_deadbeat_system(rng, 5)
    x_star = rng.uniform(-1, 1, 5)
    b = A @ x_star
    sys = build_iteration(A, b)
    rep = deadbeat_solve(A, b)
    # b changed, so h and the gain did too; re-apply the amplification filter
    if np.linalg.norm(np.outer(sys.h, rep.gain)) > 100 * max(1.0, np.linalg.norm(sys.phi)):
        pytest.skip("deadbeat gain too large for a 1e-9 residual")
    assert rep.residual_norm <= 1e-9 * np.linalg.norm(b)


def test_place_example_converges():
    rep = place_solve(A_EX, B_EX, [0.1, 0.2, 0.3], x0=np.ones(3))
    np.testing.assert_allclose(rep.x, X_EX, atol=1e-12)
    assert rep.trace.stagnated and rep.steps_used < 1000


def test_lqr_example_converges():
    rep = lqr_solve(A_EX, B_EX, LqrParams(C_EX), x0=np.ones(3))
    assert rep.residual_norm <= 1e-8 * np.linalg.norm(B_EX)
    assert rep.diagnostics["spectral_radius_estimate"] == pytest.approx(0.9008283, abs=1e-6)


def test_jacobi_report_divergence():
    rep = solve(A_EX, B_EX, SolveParams(mode="jacobi", M=5000))
    assert "overflow_step" in rep.diagnostics
    assert rep.warnings
    assert rep.diagnostics["spectral_radius_estimate"] > 1


def test_lqr_w_defaults():
    rep = solve(A_EX, B_EX, SolveParams())
    assert rep.mode == "lqr_w" and rep.w == 0.1 and rep.N == 10 and rep.M == 15
    assert rep.spectral_bound == 0.1
    assert rep.diagnostics["spectral_radius_estimate"] < 0.1
    assert rep.residual_norm <= 1e-8 * np.linalg.norm(B_EX)


def test_lqr_w_rejects_tiny_w():
    with pytest.raises(ValueError):
        solve(A_EX, B_EX, SolveParams(w=1e-8))


def test_lqr_w_output_rank_warning():
    # a left eigenvector of Φ makes the output matrix rank one
    vals, vecs = np.linalg.eig(build_iteration(A_EX, B_EX).phi.T)
    c = vecs[:, np.argmin(np.abs(vals.imag))].real
    params = SolveParams(w=0.1, lqr=LqrParams(c))
    with pytest.warns(RuntimeWarning):
        rep = lqr_w_solve(A_EX, B_EX, params)
    assert rep.warnings


def test_scaled_feedback_flag_changes_iteration():
    base = SolveParams(w=0.1, M=10, lqr=LqrParams(C_EX), fp_tol=0.0)
    plain = lqr_w_solve(A_EX, B_EX, base)
    alt = lqr_w_solve(A_EX, B_EX, SolveParams(w=0.1, M=10, lqr=LqrParams(C_EX), fp_tol=0.0, scaled_feedback=True))
    np.testing.assert_array_equal(plain.gain, alt.gain)
    assert not np.allclose(plain.x_tilde, alt.x_tilde)


@pytest.mark.parametrize("seed", range(6))
def test_start_vector_independence(seed):
    rng = np.random.default_rng(seed)
    A, b, _ = random_system(rng, 4)
    runs = [solve(A, b, SolveParams(mode="lqr_w", w=0.1, M=200, x0=x0, seed=seed))
            for x0 in (np.zeros(4), rng.normal(size=4))]
    np.testing.assert_allclose(runs[0].x, runs[1].x, atol=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_error_contraction(seed):
    rng = np.random.default_rng(seed)
    A, b, _ = random_system(rng, 5)
    rep = solve(A, b, SolveParams(mode="lqr_w", w=0.5, M=300, seed=seed))
    assert rep.diagnostics["spectral_radius_estimate"] < 1
    err = rep.trace.error_norms
    assert err[-1] == 0.0 and err[len(err) // 2] <= err[0]
    # algebraic identity A·x̂ = b - b·(kᵀx̂)
    xt = rep.x_tilde
    np.testing.assert_allclose(A @ xt, b - b * (rep.gain @ xt), atol=1e-8 * max(1, np.linalg.norm(b)))


def test_params_validation():
    with pytest.raises(ValueError):
        SolveParams(mode="bogus")
    with pytest.raises(ValueError):
        SolveParams(mode="place")
    with pytest.raises(ValueError):
        SolveParams(w=1.5)
    assert SolveParams(mode="lqr-w").mode == "lqr_w"
