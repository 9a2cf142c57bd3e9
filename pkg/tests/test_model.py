import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopf_lyap.acceptance import fd_hessians, fd_jacobian, fd_third, random_cases, relative_mismatch
from hopf_lyap.asymptotics import beta_coeffs
from hopf_lyap.errors import DomainError
from hopf_lyap.hopf import MU0, solve_hopf_mu
from hopf_lyap.model import (
    ModelParams,
    derivative_bundle,
    equilibrium,
    eta0,
    eval_field,
    hessians,
    jacobian,
    k_bound,
    third_tensor,
)

mus = st.floats(min_value=0.05, max_value=49.95)
epss = st.floats(min_value=0.0, max_value=0.1)


def test_params_delta_consistency():
    p = ModelParams.from_mu(6.0, 0.01)
    assert p.delta == pytest.approx(5.0 / 18.0, rel=1e-15)
    with pytest.raises(ValueError):
        ModelParams(mu=6.0, delta=0.3, epsilon=0.01)
    with pytest.raises(ValueError):
        ModelParams.from_mu(-1.0, 0.01)
    with pytest.raises(ValueError):
        ModelParams.from_mu(5.0, -0.01)


def test_k_bound_enforced():
    p = ModelParams.from_mu(MU0, 1e-3, k=0.02)
    assert 0.02 > k_bound(MU0, 1e-3)
    with pytest.raises(DomainError):
        p.check_k()
    assert ModelParams.from_mu(MU0, 1e-3, k=0.005).check_k().k == 0.005


def test_field_at_origin_and_unit_x():
    p = ModelParams.from_mu(7.0, 0.03, k=0.004)
    assert np.array_equal(eval_field(np.zeros(4), p), np.zeros(4))
    assert np.array_equal(eval_field([1.0, 0, 0, 0], p), [-2.0, 0, 0, 0])


def test_field_rejects_non_finite():
    p = ModelParams.from_mu(7.0, 0.03)
    with pytest.raises(DomainError):
        eval_field([np.nan, 0, 0, 0], p)
    with pytest.raises(DomainError):
        eval_field([1.0, 2.0, 3.0], p)


def test_equilibrium_examples():
    eq = equilibrium(25.0, 0.0)
    assert np.allclose(eq.point, [375.0, 50.0, 0.0, 250.0], rtol=1e-15)
    assert equilibrium(25.0, 0.01).residual < 1e-12 * (1 + np.max(eq.point))
    for mu in (1.0, MU0, 40.0):
        assert equilibrium(mu, 0.0).point[0] == pytest.approx(0.6 * mu * (50 - mu), rel=1e-14)


@pytest.mark.parametrize("mu", [0.0, 50.0, -3.0, 60.0])
def test_equilibrium_domain(mu):
    with pytest.raises(DomainError):
        equilibrium(mu, 0.01)


@settings(max_examples=200, deadline=None)
@given(mus, epss)
def test_equilibrium_properties(mu, eps):
    eq = equilibrium(mu, eps)
    assert eq.point[2] == 0.0
    assert eq.residual <= 1e-12 * (1.0 + np.max(np.abs(eq.point)))
    assert eq.point[3] == pytest.approx(2.0 / 3.0 * eq.point[0], rel=1e-14)


def test_jacobian_closed_form_entries():
    p = ModelParams.from_mu(MU0, 0.0)
    J = jacobian(equilibrium(MU0, 0.0).point, p)
    assert J[0, 3] == 3.0 and J[0, 0] == -2.0
    assert J[1, 0] == pytest.approx(-10.0 / 3.0, rel=1e-14)


def test_hessian_patterns():
    p = ModelParams.from_mu(MU0, 1e-3, k=0.005)
    s = equilibrium(MU0, 1e-3).point
    H = hessians(s, p)
    assert not np.any(H[0])
    expected = np.zeros((4, 4))
    expected[0, 1] = expected[1, 0] = -p.delta
    expected[1, 1] = -1.0
    assert np.array_equal(H[1], expected)
    for i in range(4):
        assert np.array_equal(H[i], H[i].T)
    H0 = hessians(equilibrium(MU0, 0.0).point, ModelParams.from_mu(MU0, 0.0, k=0.005))
    assert not np.any(H0[2])


def test_third_only_in_z_equation_and_leading_term():
    k = 0.005
    for eps in (1e-4, 1e-5):
        p = ModelParams.from_mu(MU0, eps, k=k)
        b = derivative_bundle(equilibrium(MU0, eps).point, p)
        assert all(i == 2 for i, *_ in b.third)
        T = third_tensor(b)
        assert T[2, 0, 2, 3] == pytest.approx(k * eps, rel=50 * eps * 1e3)
    # the O(eps^2) remainder shrinks linearly
    r = [third_tensor(derivative_bundle(equilibrium(MU0, e).point,
                                        ModelParams.from_mu(MU0, e, k=k)))[2, 0, 2, 3] / (k * e) - 1
         for e in (1e-5, 1e-6)]
    assert abs(r[1]) < abs(r[0]) / 5


def test_third_tensor_symmetric():
    p = ModelParams.from_mu(12.0, 0.05, k=0.003)
    T = third_tensor(derivative_bundle([50.0, 20.0, 7.0, 30.0], p))
    for perm in [(0, 2, 1, 3), (0, 1, 3, 2), (0, 3, 2, 1), (0, 2, 3, 1), (0, 3, 1, 2)]:
        assert np.array_equal(T, np.transpose(T, perm))


def test_derivatives_match_fd_oracles():
    errs = np.zeros(3)
    for s, p in random_cases(100, seed=7):
        b = derivative_bundle(s, p)
        errs[0] = max(errs[0], relative_mismatch(b.jacobian, fd_jacobian(s, p)))
        errs[1] = max(errs[1], relative_mismatch(b.hessians, fd_hessians(s, p)))
        errs[2] = max(errs[2], relative_mismatch(third_tensor(b), fd_third(s, p)))
    assert errs[0] <= 1e-6
    assert errs[1] <= 1e-5
    assert errs[2] <= 1e-4


def test_fd_oracle_detects_a_wrong_derivative():
    s, p = random_cases(1, seed=3)[0]
    J = jacobian(s, p)
    J[1, 1] *= 1.0 + 1e-4
    assert relative_mismatch(J, fd_jacobian(s, p)) > 1e-6


def test_eta0_examples():
    assert eta0(MU0, 0.0, k=0.005) == 0.0
    alpha_T, x_T, *_ = beta_coeffs(0.0)
    eps = 1e-4
    mu = solve_hopf_mu(eps).mu_h
    assert eta0(mu, eps) / eps == pytest.approx(-x_T, rel=1e-2)
    for k in (0.0, 0.005):
        alpha_T = beta_coeffs(k)[0]
        slopes = [eta0(solve_hopf_mu(e, k=k).mu_h, e, k) / e for e in (1e-8, 2e-8)]
        assert 2 * slopes[0] - slopes[1] == pytest.approx(alpha_T, rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(mus, st.floats(min_value=1e-6, max_value=0.1), st.floats(min_value=0.0, max_value=1.0))
def test_eta0_negative_below_k_bound(mu, eps, frac):
    k = frac * k_bound(mu, eps) * 0.999
    assert eta0(mu, eps, k) < 0.0
    assert math.isfinite(eta0(mu, eps, k))
