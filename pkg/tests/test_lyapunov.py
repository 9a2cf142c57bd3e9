import math

import numpy as np
import pytest

from hopf_lyap import linalg
from hopf_lyap.asymptotics import A0_REFERENCE, a0_closed_form
from hopf_lyap.errors import RankStructureError
from hopf_lyap.hopf import MU0, solve_hopf_mu
from hopf_lyap.lyapunov import (
    assemble,
    eigen_data,
    first_lyapunov,
    hopf_matrix,
    inner,
    lyapunov_vs_eps,
    normalize_left,
    solve_decoupled,
)

A0 = a0_closed_form()


def test_inner_is_conjugate_linear_in_first_slot():
    u, v = np.array([1j, 2.0]), np.array([3.0, 1j])
    assert inner(u, v) == pytest.approx(-3j + 2j)
    assert inner(2j * u, v) == pytest.approx(-2j * inner(u, v))


@pytest.mark.parametrize("eps", [0.0, 1e-4, 1e-2])
def test_eigen_invariants(hopf_points, eps):
    hp = hopf_points[eps]
    _, A = hopf_matrix(hp)
    ed = eigen_data(A, hp.omega0)
    nA = linalg.inf_norm(A)
    assert ed.residual_q <= 1e-10 * nA * linalg.inf_norm(ed.q)
    assert ed.residual_p <= 1e-10 * nA * linalg.inf_norm(ed.p)
    assert abs(inner(ed.p, ed.q) - 1) <= 1e-12
    assert abs(inner(ed.p, np.conj(ed.q))) <= 1e-9
    assert abs(ed.q[2]) <= 1e-12
    assert np.allclose(ed.p, ed.raw_p / ed.alpha)


def test_direction_matches_closed_form_at_zero(hopf_points):
    hp = hopf_points[0.0]
    _, A = hopf_matrix(hp)
    q = eigen_data(A, hp.omega0).q
    phi1 = 3 * (MU0 + 1j * math.sqrt(7 * MU0))
    assert q[1] / q[0] == pytest.approx(-10 / phi1, rel=1e-8)
    scaled = first_lyapunov(hp).eigen.q
    assert scaled[0] == pytest.approx(phi1, rel=1e-14)
    assert scaled[1] == pytest.approx(-10, rel=1e-8)


def test_normalize_left():
    rng = np.random.default_rng(0)
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    q = rng.normal(size=4) + 1j * rng.normal(size=4)
    p, alpha = normalize_left(raw, q)
    assert inner(p, q) == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(p * alpha, raw)


def test_breakdown_structure(breakdowns):
    for eps, lb in breakdowns.items():
        assert lb.v[2] == 0 and lb.w[2] == 0
        assert lb.B_qqbar[2] == 0
        assert lb.ip_C == 0 and not np.any(lb.C_qqqbar)
        a = (lb.ip_C - 2 * lb.ip_Bv + lb.ip_Bw).real / (2 * lb.omega0)
        assert lb.a == a


def test_a_close_to_a0_at_small_eps(breakdowns):
    assert abs(breakdowns[1e-4].a - A0_REFERENCE) <= 10 * 1e-4
    assert abs(breakdowns[1e-5].a - A0) <= 1e-3
    assert breakdowns[0.0].a == pytest.approx(A0, abs=1e-12)


def test_v_limit(breakdowns):
    v = breakdowns[1e-6].v
    d = MU0 - 50
    expected = np.array([-30 * MU0 / d, 100 / d, 0.0, -20 * MU0 / d])
    assert v[2] == 0
    idx = [0, 1, 3]
    assert np.allclose(v[idx], expected[idx], rtol=1e-4, atol=0)


def test_solve_matches_explicit_inverse(hopf_points, breakdowns):
    _, A = hopf_matrix(hopf_points[1e-3])
    lb = breakdowns[1e-3]
    v_inv = np.linalg.inv(A) @ lb.B_qqbar
    assert np.max(np.abs(lb.v - v_inv)) <= 1e-9 * np.max(np.abs(v_inv))


def test_solve_decoupled_drops_only_inert_rows():
    m = np.diag([2.0, 3.0, 0.0, 4.0]).astype(complex)
    m[0, 3] = 1.0
    x = solve_decoupled(m, np.array([1.0, 3.0, 0.0, 8.0]))
    assert np.allclose(x, [-0.5, 1.0, 0.0, 2.0]) and x[2] == 0
    with pytest.raises(ArithmeticError):
        solve_decoupled(m, np.array([1.0, 3.0, 1.0, 8.0]))


def test_invariances(hopf_points, breakdowns):
    hp = hopf_points[1e-3]
    base = breakdowns[1e-3]
    bundle, A = hopf_matrix(hp)
    q, p = base.eigen.q, base.eigen.p
    rng = np.random.default_rng(1)
    for theta in rng.uniform(-np.pi, np.pi, 5):
        rot = np.exp(1j * theta)
        assert abs(assemble(bundle, hp.omega0, rot * q, rot * p).a - base.a) <= 1e-10
    for c in rng.normal(size=(5, 2)) @ np.array([1, 1j]):
        # the coefficient is quadratic in the scale of q
        assert assemble(bundle, hp.omega0, c * q, p / np.conj(c)).a == pytest.approx(
            abs(c) ** 2 * base.a, rel=1e-10)
        first = 3 * (hp.mu_h + 1j * hp.omega0)
        ed = eigen_data(A, hp.omega0)
        qc = c * ed.q
        qc = qc * (first / qc[0])
        pc = ed.raw_p / np.conj(inner(ed.raw_p, qc))
        assert abs(assemble(bundle, hp.omega0, qc, pc).a - base.a) <= 1e-10
    assert abs(first_lyapunov(hp, branch=-1).a - base.a) <= 1e-10


def test_unit_scaling_relation(hopf_points, breakdowns):
    hp = hopf_points[1e-3]
    unit = first_lyapunov(hp, scaling="unit")
    q = breakdowns[1e-3].eigen.q
    assert unit.a * np.vdot(q, q).real == pytest.approx(breakdowns[1e-3].a, rel=1e-10)
    with pytest.raises(ValueError):
        first_lyapunov(hp, scaling="other")


def test_sweep_rows():
    assert lyapunov_vs_eps([]) == []
    rows = lyapunov_vs_eps([1e-2, 1e-3, 1e-4])
    assert [r.epsilon for r in rows] == [1e-2, 1e-3, 1e-4]
    assert all(r.ok for r in rows)
    consts = [abs(r.a - A0) / r.epsilon for r in rows]
    assert max(consts) / min(consts) <= 3
    (e1, a1), (e2, a2) = (1e-4, rows[2].a), (1e-3, rows[1].a)
    assert abs(a1 - e1 * (a2 - a1) / (e2 - e1) - A0) <= 1e-6


def test_sweep_collects_errors_and_threads_agree():
    rows = lyapunov_vs_eps([1e-3, 0.5], k=0.0)
    assert rows[0].ok and not rows[1].ok and "DomainError" in rows[1].error
    serial = lyapunov_vs_eps([1e-2, 1e-3, 1e-4])
    threaded = lyapunov_vs_eps([1e-2, 1e-3, 1e-4], workers=3)
    assert [r.a for r in serial] == [r.a for r in threaded]
    bad_k = lyapunov_vs_eps([1e-3], k=0.05)
    assert not bad_k[0].ok


def test_eigen_data_rank_failure():
    with pytest.raises(RankStructureError):
        eigen_data(np.eye(4), 1.0)


def test_hopf_point_params_roundtrip(hopf_points):
    hp = solve_hopf_mu(1e-3, k=0.004)
    assert hp.params.k == 0.004 and hp.params.epsilon == 1e-3
