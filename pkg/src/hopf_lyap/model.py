"""Four-species fast-slow model: vector field, equilibrium and derivatives.

State ordering is ``(x, y, z, w)``. The vector field reads::

    x' = -2 x + 3 w
    y' = 50 y - y**2 / 2 - delta x y
    z' = -eps x z + k eps x w z / (eps x w + 1)
    w' = eps x z - eps x w - 5 w + delta x y

with ``delta = 5 / (3 mu)``. Only ``z'`` is non-polynomial; it is written as
``z * h(x, w)`` with ``h = -eps x + k phi(eps x w)`` and ``phi(u) = u / (1 + u)``
so that all of its derivatives follow from those of ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .errors import DomainError

__all__ = [
    "ModelParams",
    "EquilibriumPoint",
    "DerivativeBundle",
    "eval_field",
    "equilibrium",
    "jacobian",
    "hessians",
    "third_derivatives",
    "derivative_bundle",
    "eta0",
    "k_bound",
]

MU_MAX = 50.0


@dataclass(frozen=True)
class ModelParams:
    mu: float
    delta: float
    epsilon: float
    k: float = 0.0

    def __post_init__(self):
        for name in ("mu", "delta", "epsilon", "k"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.mu <= 0:
            raise DomainError(f"mu must be positive, got {self.mu}")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be nonnegative, got {self.epsilon}")
        if abs(self.delta - 5.0 / (3.0 * self.mu)) > 1e-14 * self.delta:
            raise DomainError("delta and mu are inconsistent (delta = 5 / (3 mu))")

    @classmethod
    def from_mu(cls, mu, epsilon, k=0.0):
        mu = float(mu)
        if not mu > 0:
            raise DomainError(f"mu must be positive, got {mu}")
        return cls(mu=mu, delta=5.0 / (3.0 * mu), epsilon=float(epsilon), k=float(k))

    def check_k(self):
        """Raise unless ``k`` keeps the decoupled eigenvalue negative at P0."""
        bound = k_bound(self.mu, self.epsilon)
        if not self.k < bound:
            raise DomainError(f"k = {self.k} violates k < 3/(2 x0) = {bound}")
        return self


@dataclass(frozen=True)
class EquilibriumPoint:
    point: np.ndarray
    mu: float
    epsilon: float
    residual: float


@dataclass(frozen=True)
class DerivativeBundle:
    """Derivatives of the field at one state.

    ``hessians[i]`` is the Hessian of component ``i``. ``third`` holds the
    nonzero third derivatives as ``(i, j, k, l, value)`` with ``j <= k <= l``.
    """

    jacobian: np.ndarray
    hessians: np.ndarray
    third: tuple = field(default_factory=tuple)


def _as_state(s):
    s = np.asarray(s, dtype=float)
    if s.shape != (4,):
        raise DomainError(f"state must have 4 components, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise DomainError("state contains non-finite entries")
    return s


def eval_field(s, p: ModelParams) -> np.ndarray:
    x, y, z, w = _as_state(s)
    eps, k, delta = p.epsilon, p.k, p.delta
    u = eps * x * w
    return np.array([
        -2.0 * x + 3.0 * w,
        50.0 * y - 0.5 * y * y - delta * x * y,
        -eps * x * z + k * u / (u + 1.0) * z,
        eps * x * z - eps * x * w - 5.0 * w + delta * x * y,
    ])


def equilibrium(mu, epsilon) -> EquilibriumPoint:
    """Closed-form interior equilibrium P0(mu, eps); requires 0 < mu < 50."""
    mu = float(mu)
    epsilon = float(epsilon)
    if not (0.0 < mu < MU_MAX):
        raise DomainError(f"mu must lie in (0, 50), got {mu}")
    if not epsilon >= 0.0:
        raise DomainError(f"epsilon must be nonnegative, got {epsilon}")
    den = 25.0 + 3.0 * epsilon * mu * mu
    x0 = 15.0 * mu * (MU_MAX - mu) / den
    point = np.array([
        x0,
        50.0 * mu * (6.0 * epsilon * mu + 1.0) / den,
        0.0,
        10.0 * mu * (MU_MAX - mu) / den,
    ])
    residual = float(np.max(np.abs(eval_field(point, ModelParams.from_mu(mu, epsilon)))))
    return EquilibriumPoint(point=point, mu=mu, epsilon=epsilon, residual=residual)


def k_bound(mu, epsilon):
    return 3.0 / (2.0 * equilibrium(mu, epsilon).point[0])


def eta0(mu, epsilon, k=0.0):
    """Eigenvalue of the decoupled z-direction at P0(mu, eps)."""
    x0, _, _, w0 = equilibrium(mu, epsilon).point
    u = epsilon * x0 * w0
    return -epsilon * x0 + k * u / (u + 1.0)


def _phi_derivs(u):
    g = 1.0 + u
    return 1.0 / g**2, -2.0 / g**3, 6.0 / g**4


def jacobian(s, p: ModelParams) -> np.ndarray:
    x, y, z, w = _as_state(s)
    eps, k, delta = p.epsilon, p.k, p.delta
    u = eps * x * w
    d1, _, _ = _phi_derivs(u)
    h = -eps * x + k * u / (1.0 + u)
    hx = -eps + k * d1 * eps * w
    hw = k * d1 * eps * x
    return np.array([
        [-2.0, 0.0, 0.0, 3.0],
        [-delta * y, 50.0 - y - delta * x, 0.0, 0.0],
        [z * hx, 0.0, h, z * hw],
        [eps * z - eps * w + delta * y, delta * x, eps * x, -eps * x - 5.0],
    ])


def hessians(s, p: ModelParams) -> np.ndarray:
    """Array ``H`` with ``H[i, j, k] = d2 F_i / d xi_j d xi_k``."""
    x, _, z, w = _as_state(s)
    eps, k, delta = p.epsilon, p.k, p.delta
    u = eps * x * w
    d1, d2, _ = _phi_derivs(u)
    H = np.zeros((4, 4, 4))

    H[1, 0, 1] = H[1, 1, 0] = -delta
    H[1, 1, 1] = -1.0

    hx = -eps + k * d1 * eps * w
    hw = k * d1 * eps * x
    hxx = k * d2 * eps**2 * w * w
    hxw = k * d2 * eps**2 * x * w + k * d1 * eps
    hww = k * d2 * eps**2 * x * x
    H[2, 0, 0] = z * hxx
    H[2, 0, 2] = H[2, 2, 0] = hx
    H[2, 0, 3] = H[2, 3, 0] = z * hxw
    H[2, 2, 3] = H[2, 3, 2] = hw
    H[2, 3, 3] = z * hww

    H[3, 0, 1] = H[3, 1, 0] = delta
    H[3, 0, 2] = H[3, 2, 0] = eps
    H[3, 0, 3] = H[3, 3, 0] = -eps
    return H


def third_derivatives(s, p: ModelParams) -> tuple:
    """Nonzero third derivatives ``(i, j, k, l, value)`` with ``j <= k <= l``.

    Only the z-equation contributes.
    """
    x, _, z, w = _as_state(s)
    eps, k = p.epsilon, p.k
    u = eps * x * w
    d1, d2, d3 = _phi_derivs(u)
    e2, e3 = eps**2, eps**3
    hxx = k * d2 * e2 * w * w
    hxw = k * d2 * e2 * x * w + k * d1 * eps
    hww = k * d2 * e2 * x * x
    hxxx = k * d3 * e3 * w**3
    hxxw = k * d3 * e3 * x * w * w + 2.0 * k * d2 * e2 * w
    hxww = k * d3 * e3 * x * x * w + 2.0 * k * d2 * e2 * x
    hwww = k * d3 * e3 * x**3
    entries = (
        (0, 0, 2, hxx),
        (0, 2, 3, hxw),
        (2, 3, 3, hww),
        (0, 0, 0, z * hxxx),
        (0, 0, 3, z * hxxw),
        (0, 3, 3, z * hxww),
        (3, 3, 3, z * hwww),
    )
    return tuple((2, j, kk, l, float(v)) for j, kk, l, v in entries if v != 0.0)


def third_tensor(bundle: DerivativeBundle) -> np.ndarray:
    """Dense 4x4x4x4 view of the sparse third-derivative list."""
    T = np.zeros((4, 4, 4, 4))
    for i, j, k, l, v in bundle.third:
        for a, b, c in set(permutations((j, k, l))):
            T[i, a, b, c] = v
    return T


def derivative_bundle(s, p: ModelParams) -> DerivativeBundle:
    return DerivativeBundle(
        jacobian=jacobian(s, p),
        hessians=hessians(s, p),
        third=third_derivatives(s, p),
    )
