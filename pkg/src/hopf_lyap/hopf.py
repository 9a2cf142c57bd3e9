"""Hopf curve of the model via the Routh-Hurwitz gap of the reduced cubic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ConvergenceError, DomainError
from .model import ModelParams, equilibrium, jacobian

__all__ = [
    "MU0",
    "HopfPoint",
    "reduced_jacobian",
    "reduced_cubic",
    "hurwitz_gap",
    "omega0_of",
    "solve_hopf_mu",
]

# positive root of 7 mu^2 + 59 mu - 500
MU0 = (-59.0 + math.sqrt(17481.0)) / 14.0

_KEEP = [0, 1, 3]


@dataclass(frozen=True)
class HopfPoint:
    epsilon: float
    mu_h: float
    omega0: float
    gap_residual: float
    spectrum: np.ndarray
    k: float = 0.0
    iterations: int = 0

    @property
    def params(self) -> ModelParams:
        return ModelParams.from_mu(self.mu_h, self.epsilon, self.k)


def reduced_jacobian(mu, epsilon) -> np.ndarray:
    """Jacobian at P0 with the decoupled z row and column removed.

    It does not depend on ``k``.
    """
    eq = equilibrium(mu, epsilon)
    J = jacobian(eq.point, ModelParams.from_mu(mu, epsilon))
    return J[np.ix_(_KEEP, _KEEP)]


def reduced_cubic(mu, epsilon):
    """``(a1, a2, a3)`` of ``x**3 + a1 x**2 + a2 x + a3``."""
    a1, a2, a3 = linalg.char_poly(reduced_jacobian(mu, epsilon))
    return float(a1), float(a2), float(a3)


def hurwitz_gap(mu, epsilon):
    a1, a2, a3 = reduced_cubic(mu, epsilon)
    return a1 * a2 - a3


def _gap_and_scale(mu, epsilon):
    a1, a2, a3 = reduced_cubic(mu, epsilon)
    return a1 * a2 - a3, 1.0 + abs(a3)


def omega0_of(mu, epsilon):
    _, a2, _ = reduced_cubic(mu, epsilon)
    return omega_from_a2(a2)


def omega_from_a2(a2):
    if not a2 > 0:
        raise DomainError(f"a2 = {a2} is not positive; no imaginary pair")
    return math.sqrt(a2)


def solve_hopf_mu(epsilon, guess=MU0, k=0.0, max_iter=50, rtol=1e-12) -> HopfPoint:
    """Newton iteration on the Hurwitz gap in ``mu`` at fixed ``epsilon``.

    The derivative is a central difference with step ``1e-7 (1 + |mu|)``.
    """
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 0.1:
        raise DomainError(f"epsilon must lie in [0, 0.1], got {epsilon}")
    mu = float(guess)
    gap, scale = _gap_and_scale(mu, epsilon)
    for it in range(1, max_iter + 1):
        if abs(gap) <= rtol * scale:
            return _hopf_point(epsilon, mu, gap, k, it - 1)
        h = 1e-7 * (1.0 + abs(mu))
        slope = (hurwitz_gap(mu + h, epsilon) - hurwitz_gap(mu - h, epsilon)) / (2.0 * h)
        if slope == 0.0:
            break
        mu_new = mu - gap / slope
        if not 0.0 < mu_new < 50.0:
            mu_new = 0.5 * (mu + (50.0 if mu_new >= 50.0 else 0.0))
        mu = mu_new
        gap, scale = _gap_and_scale(mu, epsilon)
    if abs(gap) <= rtol * scale:
        return _hopf_point(epsilon, mu, gap, k, max_iter)
    raise ConvergenceError(
        f"Newton on the Hurwitz gap did not converge at eps={epsilon} "
        f"(last mu={mu!r}, gap={gap:.3e})",
        last=mu,
        residual=gap,
    )


def _hopf_point(epsilon, mu, gap, k, iterations):
    _, a2, _ = reduced_cubic(mu, epsilon)
    omega0 = omega_from_a2(a2)
    params = ModelParams.from_mu(mu, epsilon, k)
    params.check_k()
    J = jacobian(equilibrium(mu, epsilon).point, params)
    spectrum = linalg.poly_roots(linalg.char_poly(J))
    spectrum = spectrum[np.argsort(-spectrum.imag, kind="stable")]
    return HopfPoint(
        epsilon=epsilon,
        mu_h=mu,
        omega0=omega0,
        gap_residual=gap,
        spectrum=spectrum,
        k=k,
        iterations=iterations,
    )
