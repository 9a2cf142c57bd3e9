"""Direct simulation near the Hopf curve.

An embedded Dormand-Prince 5(4) integrator with PI step-size control, a
peak-based limit-cycle detector, and an amplitude scan across the Hopf point.
"""

from __future__ import annotations

import concurrent.futures
import math
from operator import mul
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DomainError, HopfLyapError, InsufficientDataError, IntegrationError
from .hopf import solve_hopf_mu
from .lyapunov import eigen_data
from .model import ModelParams, equilibrium, jacobian

__all__ = [
    "Trajectory",
    "CycleEstimate",
    "ScanRow",
    "solve_ode",
    "integrate",
    "detect_cycle",
    "amplitude_scan",
    "model_rhs",
]

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6] + (0.0,)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))

SAFETY = 0.9
# PI controller exponents for a 5th-order error estimate
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    params: ModelParams | None = None
    n_steps: int = 0
    n_rejected: int = 0


@dataclass(frozen=True)
class CycleEstimate:
    amplitude: float
    period: float
    converged: bool
    transient_fraction: float
    equilibrium: bool = False
    n_peaks: int = 0
    drift: float = float("nan")
    cycle_amplitudes: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _combine(y, h, coeffs, ks):
    """``y + h * sum_j coeffs[j] * ks[j]`` on plain float sequences."""
    return [yi + h * sum(map(mul, coeffs, col)) for yi, col in zip(y, zip(*ks))]


def solve_ode(f, y0, t_final, tol=1e-8, dense_dt=None, t0=0.0, record_from=None,
              h0=None, h_max=None, max_steps=20_000_000):
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_final``.

    ``f`` receives and may return any float sequence. The local error estimate
    is kept below ``tol * (1 + |y|)`` componentwise. With ``dense_dt`` the
    solution is sampled on a uniform grid from ``record_from`` on (cubic
    Hermite interpolation between steps), otherwise at the accepted steps.
    ``h_max`` caps the step, e.g. to keep an oscillatory linearization inside
    the stability region even when the error estimate is tiny.
    Returns ``(times, states, n_steps, n_rejected)`` with numpy arrays.
    """
    if not t_final > t0:
        raise DomainError("t_final must exceed the initial time")
    if not 1e-14 <= tol <= 1e-3:
        raise DomainError(f"tol {tol} outside the supported range")
    y = [float(v) for v in y0]
    if not all(math.isfinite(v) for v in y):
        raise DomainError("initial state contains non-finite entries")
    t = float(t0)
    start = t0 if record_from is None else max(float(record_from), t0)
    fy = [float(v) for v in f(t, y)]
    if h0 is None:
        d0 = max(abs(v) / (1.0 + abs(v)) for v in y)
        d1 = max(abs(g) / (1.0 + abs(v)) for g, v in zip(fy, y))
        h0 = 0.01 * max(d0, 1e-5) / max(d1, 1e-5)
        h0 = min(h0 * (tol / 1e-6) ** 0.2, 0.1 * (t_final - t0))
    h_max = float("inf") if h_max is None else float(h_max)
    h = min(float(h0), h_max)

    times, states = [], []
    if dense_dt is None:
        if t >= start:
            times.append(t)
            states.append(list(y))
        next_out = None
    else:
        next_out = start
    err_prev = 1e-4
    steps = rejected = 0
    while t < t_final:
        if steps + rejected >= max_steps:
            raise IntegrationError("step budget exhausted", t_reached=t)
        if t + h > t_final:
            h = t_final - t
        if h <= 1e-13 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t = {t}", t_reached=t)
        ks = [fy]
        for i in range(1, 7):
            ks.append(f(t + _C[i] * h, _combine(y, h, _A[i], ks)))
        y_new = _combine(y, h, _B5, ks)
        err = max(
            abs(h * sum(map(mul, _E, col))) / (tol * (1.0 + max(abs(a), abs(b))))
            for a, b, col in zip(y, y_new, zip(*ks))
        )
        if not (math.isfinite(err) and all(map(math.isfinite, y_new))):
            rejected += 1
            h *= 0.2
            continue
        if err <= 1.0:
            t_new = t + h
            f_new = ks[6]
            if next_out is not None:
                while next_out <= t_new + 1e-12 * h:
                    s = (next_out - t) / h
                    h00 = (1 + 2 * s) * (1 - s) ** 2
                    h10 = s * (1 - s) ** 2 * h
                    h01 = s * s * (3 - 2 * s)
                    h11 = s * s * (s - 1) * h
                    times.append(next_out)
                    states.append([h00 * a + h10 * fa + h01 * b + h11 * fb
                                   for a, fa, b, fb in zip(y, fy, y_new, f_new)])
                    next_out = start + len(times) * dense_dt
            elif t_new >= start:
                times.append(t_new)
                states.append(list(y_new))
            t, y, fy = t_new, y_new, f_new
            steps += 1
            err = max(err, 1e-10)
            fac = SAFETY * err ** (-_ALPHA) * err_prev ** _BETA
            h = min(h * min(5.0, max(0.2, fac)), h_max)
            err_prev = err
        else:
            rejected += 1
            h *= max(0.2, SAFETY * err ** (-0.2))
    return np.array(times), np.array(states, dtype=float), steps, rejected


def model_rhs(p: ModelParams):
    """Fast float-only right-hand side ``f(t, s)`` of the model."""
    eps, k, delta = p.epsilon, p.k, p.delta

    def f(t, s):
        x, y, z, w = s
        u = eps * x * w
        return (
            -2.0 * x + 3.0 * w,
            50.0 * y - 0.5 * y * y - delta * x * y,
            -eps * x * z + k * u / (u + 1.0) * z,
            eps * x * z - eps * x * w - 5.0 * w + delta * x * y,
        )

    return f


def _linear_spectrum(p: ModelParams):
    J = jacobian(equilibrium(p.mu, p.epsilon).point, p)
    return linalg.poly_roots(linalg.char_poly(J))


def _oscillatory_pair(spectrum):
    lam = spectrum[int(np.argmax(spectrum.imag))]
    return float(lam.real), float(lam.imag)


def integrate(p: ModelParams, init, t_final, tol=1e-8, points_per_period=50,
              record_from=None) -> Trajectory:
    """Solve the model as an initial value problem with dense sampling.

    The sampling step is ``2 pi / omega / points_per_period`` with ``omega``
    the oscillation frequency of the linearization at P0; the integration
    step is capped at a tenth of that period.
    """
    if not t_final > 0:
        raise DomainError(f"t_final must be positive, got {t_final}")
    if not 1e-12 <= tol <= 1e-4:
        raise DomainError(f"tol must lie in [1e-12, 1e-4], got {tol}")
    _, omega = _oscillatory_pair(_linear_spectrum(p))
    if omega <= 0:
        omega = math.sqrt(7.0 * p.mu)
    period = 2.0 * math.pi / omega
    dense_dt = period / points_per_period
    # |h lambda| <= 2 pi / 10 keeps the oscillatory pair inside the stability region
    times, states, steps, rejected = solve_ode(
        model_rhs(p), init, t_final, tol=tol, dense_dt=dense_dt, record_from=record_from,
        h_max=period / 10.0,
    )
    return Trajectory(times=times, states=states, params=p, n_steps=steps, n_rejected=rejected)


def _refine(t, v, i):
    """Vertex of the parabola through samples ``i-1, i, i+1`` (uniform grid)."""
    a, b, c = v[i - 1], v[i], v[i + 1]
    den = a - 2.0 * b + c
    if den == 0.0:
        return t[i], b
    d = 0.5 * (a - c) / den
    return t[i] + d * (t[i + 1] - t[i]), b - 0.25 * (a - c) * d


def detect_cycle(traj: Trajectory, transient_fraction=0.5, coordinate=1,
                 drift_tol=0.02, flat_rtol=1e-9) -> CycleEstimate:
    """Amplitude and period of the oscillation in one coordinate after a transient.

    A flat signal is reported as an equilibrium (amplitude 0). Otherwise at
    least 5 maxima are required. ``converged`` requires the per-cycle
    amplitude to vary by at most ``drift_tol`` over the last 5 cycles and
    over the whole window.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise DomainError("transient_fraction must lie in [0, 1)")
    t = np.asarray(traj.times)
    v = np.asarray(traj.states)[:, coordinate]
    cut = t[0] + transient_fraction * (t[-1] - t[0])
    keep = t >= cut
    t, v = t[keep], v[keep]
    if v.size < 3 or np.ptp(v) <= flat_rtol * (1.0 + np.max(np.abs(v))):
        return CycleEstimate(amplitude=0.0, period=float("nan"), converged=False,
                             transient_fraction=transient_fraction, equilibrium=True)
    inner = np.arange(1, v.size - 1)
    is_max = (v[inner - 1] < v[inner]) & (v[inner] >= v[inner + 1])
    is_min = (v[inner - 1] > v[inner]) & (v[inner] <= v[inner + 1])
    peaks = [_refine(t, v, i) for i in inner[is_max]]
    troughs = [_refine(t, v, i) for i in inner[is_min]]
    if len(peaks) < 5 or len(troughs) < 1:
        raise InsufficientDataError(
            f"only {len(peaks)} maxima after the transient; need at least 5"
        )
    pt = np.array([p[0] for p in peaks])
    pv = np.array([p[1] for p in peaks])
    tt = np.array([p[0] for p in troughs])
    tv = np.array([p[1] for p in troughs])
    amplitude = 0.5 * (pv.mean() - tv.mean())
    period = float(np.mean(np.diff(pt)))

    cycle_amps = []
    for tp, vp in zip(pt, pv):
        j = np.searchsorted(tt, tp)
        if j < tt.size:
            cycle_amps.append(0.5 * (vp - tv[j]))
    cycle_amps = np.array(cycle_amps)
    converged = False
    drift = float("nan")
    if cycle_amps.size >= 5 and amplitude > 0:
        last = cycle_amps[-5:]
        drift = float(np.ptp(last) / np.mean(last))
        window = float(np.ptp(cycle_amps) / np.mean(cycle_amps))
        converged = drift <= drift_tol and window <= drift_tol
    return CycleEstimate(
        amplitude=float(amplitude),
        period=period,
        converged=bool(converged),
        transient_fraction=transient_fraction,
        n_peaks=len(peaks),
        drift=drift,
        cycle_amplitudes=cycle_amps,
    )


@dataclass(frozen=True)
class ScanRow:
    offset: float
    mu: float
    amplitude: float = 0.0
    period: float = float("nan")
    cycle: bool = False
    growth_rate: float = float("nan")
    t_final: float = float("nan")
    estimate: CycleEstimate | None = None
    error: str | None = None


def _scan_one(hp, offset, k, tol, efolds, perturbation, t_final, min_amplitude):
    mu = hp.mu_h + offset
    try:
        p = ModelParams.from_mu(mu, hp.epsilon, k).check_k()
        sigma, omega = _oscillatory_pair(_linear_spectrum(p))
        period = 2.0 * math.pi / omega
        if t_final is None:
            t_final = max(200.0 * period, efolds / max(abs(sigma), 1e-12))
        p0 = equilibrium(mu, hp.epsilon).point
        A = jacobian(equilibrium(hp.mu_h, hp.epsilon).point, hp.params)
        direction = eigen_data(A, hp.omega0).q.real
        direction = direction / np.max(np.abs(direction))
        init = p0 + perturbation * p0[1] * direction
        traj = integrate(p, init, t_final, tol=tol, record_from=0.5 * t_final)
        est = detect_cycle(traj, transient_fraction=0.0)
        # the integrator alone sustains oscillations of order tol * |y|
        cycle = bool(est.converged and est.amplitude > min_amplitude * abs(p0[1]))
        return ScanRow(
            offset=offset, mu=mu,
            amplitude=est.amplitude if cycle else 0.0,
            period=est.period,
            cycle=cycle, growth_rate=sigma, t_final=t_final, estimate=est,
        )
    except (HopfLyapError, ArithmeticError, ValueError) as exc:
        return ScanRow(offset=offset, mu=mu, error=f"{type(exc).__name__}: {exc}")


def amplitude_scan(epsilon, offsets, k=0.0, tol=1e-8, efolds=20.0, perturbation=1e-3,
                   t_final=None, min_amplitude=1e-5, workers=None) -> list[ScanRow]:
    """Integrate from a perturbed P0 at ``mu_H(eps) + offset`` for each offset.

    The horizon defaults to ``efolds / |Re lambda|`` (at least 200 periods);
    the first half is discarded as transient. Rows whose oscillation does not
    settle onto a cycle, or whose amplitude stays below
    ``min_amplitude * |y0|``, report amplitude 0.
    """
    hp = solve_hopf_mu(epsilon, k=k)
    offsets = [float(o) for o in offsets]
    run = lambda o: _scan_one(hp, o, k, tol, efolds, perturbation, t_final, min_amplitude)  # noqa: E731
    if workers and len(offsets) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, offsets))
    return [run(o) for o in offsets]
