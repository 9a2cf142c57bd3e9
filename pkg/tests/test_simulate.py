import math

import numpy as np
import pytest

from hopf_lyap.errors import DomainError, InsufficientDataError, IntegrationError
from hopf_lyap.hopf import MU0, solve_hopf_mu
from hopf_lyap.model import ModelParams, equilibrium
from hopf_lyap.simulate import (
    Trajectory,
    amplitude_scan,
    detect_cycle,
    integrate,
    model_rhs,
    solve_ode,
)

TOLS = (1e-6, 1e-8, 1e-10)


def test_exponential_decay():
    errs = []
    for tol in TOLS:
        _, states, _, _ = solve_ode(lambda t, y: (-y[0],), [1.0], 1.0, tol=tol)
        errs.append(abs(states[-1, 0] - math.exp(-1.0)))
    assert errs[1] <= 1e-8 and errs[2] <= 1e-8
    assert errs[0] > errs[1] > errs[2]


def test_harmonic_oscillator_invariant():
    t_final = 20.0
    errs = []
    for tol in TOLS:
        _, states, _, _ = solve_ode(lambda t, y: (-y[1], y[0]), [1.0, 0.0], t_final, tol=tol)
        drift = np.max(np.abs(states[:, 0] ** 2 + states[:, 1] ** 2 - 1.0))
        assert drift <= tol * t_final
        errs.append(drift)
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("tol", TOLS)
def test_equilibrium_is_invariant(tol):
    eps = 1e-3
    mu = solve_hopf_mu(eps).mu_h - 0.05
    p = ModelParams.from_mu(mu, eps)
    p0 = equilibrium(mu, eps).point
    traj = integrate(p, p0, 10.0, tol=tol)
    assert np.max(np.abs(traj.states - p0)) <= 1e-8
    assert np.all(np.diff(traj.times) > 0)


def test_dense_output_spacing():
    p = ModelParams.from_mu(MU0, 1e-3)
    traj = integrate(p, equilibrium(MU0, 1e-3).point * 1.001, 5.0)
    dt = np.diff(traj.times)
    period = 2 * math.pi / math.sqrt(7 * MU0)
    assert np.allclose(dt, dt[0]) and dt[0] <= period / 50 * 1.01


def test_integrate_argument_checks():
    p = ModelParams.from_mu(MU0, 1e-3)
    s = equilibrium(MU0, 1e-3).point
    with pytest.raises(DomainError):
        integrate(p, s, -1.0)
    with pytest.raises(DomainError):
        integrate(p, s, 1.0, tol=1e-2)
    with pytest.raises(DomainError):
        integrate(p, [np.nan, 0, 0, 0], 1.0)


def test_blow_up_raises_integration_error():
    with pytest.raises(IntegrationError) as info:
        solve_ode(lambda t, y: (y[0] * y[0],), [1.0], 2.0, tol=1e-8)
    assert info.value.t_reached == pytest.approx(1.0, abs=1e-3)


def test_model_rhs_matches_field():
    from hopf_lyap.model import eval_field
    p = ModelParams.from_mu(8.0, 0.02, k=0.004)
    s = [30.0, 12.0, 4.0, 18.0]
    assert np.allclose(model_rhs(p)(0.0, s), eval_field(s, p), rtol=1e-15)


def _traj(t, v):
    states = np.zeros((t.size, 4))
    states[:, 1] = v
    return Trajectory(times=t, states=states)


def test_detect_synthetic_sine():
    t = np.linspace(0, 60, 6001)
    est = detect_cycle(_traj(t, 2 * np.sin(3 * t)))
    assert est.amplitude == pytest.approx(2.0, rel=1e-2)
    assert est.period == pytest.approx(2 * math.pi / 3, rel=1e-2)
    assert est.converged and not est.equilibrium


def test_detect_constant_is_equilibrium():
    t = np.linspace(0, 10, 500)
    est = detect_cycle(_traj(t, np.full(t.size, 4.0)))
    assert est.equilibrium and est.amplitude == 0.0 and not est.converged


def test_detect_needs_five_peaks():
    t = np.linspace(0, 10, 1000)
    with pytest.raises(InsufficientDataError):
        detect_cycle(_traj(t, np.sin(t)))


def test_detect_growing_oscillation_not_converged():
    t = np.linspace(0, 60, 6001)
    est = detect_cycle(_traj(t, np.exp(0.05 * t) * np.sin(3 * t)))
    assert not est.converged


def test_normal_form_radius():
    sigma, a, omega = 0.5, -2.0, 4.0

    def f(t, s):
        x, y = s
        r2 = x * x + y * y
        return (sigma * x - omega * y + a * r2 * x, omega * x + sigma * y + a * r2 * y)

    times, states, _, _ = solve_ode(f, [0.01, 0.0], 80.0, tol=1e-9, dense_dt=0.01)
    full = np.zeros((times.size, 4))
    full[:, 1] = states[:, 1]
    est = detect_cycle(Trajectory(times=times, states=full))
    assert est.amplitude == pytest.approx(math.sqrt(-sigma / a), rel=0.03)
    assert est.period == pytest.approx(2 * math.pi / omega, rel=0.01)


def test_amplitude_scan_square_root_law():
    eps = 1e-3
    offsets = [-0.1, -0.0316, -0.01, 0.01, 0.1]
    rows = amplitude_scan(eps, offsets, workers=1)
    assert all(r.error is None for r in rows)
    cyc = [r for r in rows if r.cycle]
    assert {math.copysign(1, r.offset) for r in cyc} == {-1.0}
    for r in rows:
        if r.offset > 0:
            assert r.amplitude == 0.0 and r.growth_rate < 0
    slope = np.polyfit(np.log([-r.offset for r in cyc]), np.log([r.amplitude for r in cyc]), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.1)
    hp = solve_hopf_mu(eps)
    near = min(cyc, key=lambda r: abs(r.offset))
    assert near.period == pytest.approx(2 * math.pi / hp.omega0, rel=0.05)
