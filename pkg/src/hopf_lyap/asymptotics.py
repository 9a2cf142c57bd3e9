"""Closed-form small-epsilon expansion of the Hopf curve and the Lyapunov coefficient.

Every quantity is a function of ``mu0`` (the positive root of
``7 mu^2 + 59 mu - 500``) and, for a few of them, of ``k``. The leading
Lyapunov coefficient ``a0`` does not depend on ``k``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import ConsistencyError
from .hopf import MU0

__all__ = [
    "A0_REFERENCE",
    "AsymptoticCoeffs",
    "b_polys",
    "mu_series",
    "beta_coeffs",
    "normalization_xy",
    "def_constants",
    "re_z",
    "re_z_components",
    "re_z_expanded",
    "a0_closed_form",
    "coefficients",
]

A0_REFERENCE = -0.04869322966

# Expanded rational form of Re(z): coefficients in descending powers of mu0.
REZ_Y_NUMERATOR = (8078.0, 161654.0, 80205.0, -2158750.0, 3125000.0)
REZ_X_NUMERATOR = (1232.0, 86729.0, 245904.0, -1723750.0, 875000.0)
REZ_DENOMINATOR = (196.0, 5971.0, 3609.0, -51500.0, 62500.0)

REZ_RTOL = 1e-9


def _horner(coeffs, x):
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _s(mu0=MU0):
    return math.sqrt(7.0 * mu0)


def b_polys(mu):
    """First-order epsilon coefficients of the reduced cubic ``(a1, a2, a3)`` at fixed mu."""
    # b1 = -(3/25) mu (mu - 50)(mu + 5), b2 = -(6/25) mu (mu - 50)(6 mu + 5)
    b1 = -3.0 / 25.0 * mu * (mu * mu - 45.0 * mu - 250.0)
    b2 = -6.0 / 25.0 * mu * (6.0 * mu * mu - 295.0 * mu - 250.0)
    b3 = 6.0 / 5.0 * mu * (mu - 50.0) ** 2
    return b1, b2, b3


def mu_series(k=0.0):
    """``(mu0, mu1, mu2, mu3)``: Hopf curve slope, a2 slope and omega0 slope along it.

    ``k`` is accepted for interface symmetry; none of these depend on it.
    """
    mu0 = MU0
    b1, b2, b3 = b_polys(mu0)
    mu1 = -(7.0 * mu0 * b1 + (7.0 + mu0) * b2 - b3) / (14.0 * mu0 + 59.0)
    mu2 = 7.0 * mu1 + b2
    mu3 = mu2 / (2.0 * _s(mu0))
    return mu0, mu1, mu2, mu3


def beta_coeffs(k=0.0):
    """``(alpha_T, x_T, beta1, ..., beta5)``."""
    mu0, mu1, _, mu3 = mu_series(k)
    s = _s(mu0)
    x_T = 3.0 / 5.0 * mu0 * (50.0 - mu0)
    alpha_T = (-1.0 + 2.0 / 3.0 * k * x_T) * x_T
    beta1 = -2.0 / 5.0 * mu0 * (50.0 - mu0)
    beta2 = -mu1 - 3.0 / 25.0 * mu0**2 * (50.0 - mu0)
    beta3 = 3.0 / 5.0 * mu0 * (50.0 - mu0)
    beta4 = 2.0 * mu3 * s - beta3 * mu0 + 5.0 * beta2
    beta5 = 5.0 * mu3 + mu0 * mu3 + beta3 * s - beta2 * s
    return alpha_T, x_T, beta1, beta2, beta3, beta4, beta5


def normalization_xy(mu0=MU0):
    """Real and imaginary part of the left-eigenvector normalization factor."""
    x = 3.0 * (21.0 * mu0**2 + 39.0 * mu0 + 500.0)
    y = 6.0 * _s(mu0) * mu0**2
    return x, y


def def_constants(mu0=MU0):
    """``D`` (leading ``det(2 i omega0 I - A)``) and the real constants ``E``, ``F``."""
    s = _s(mu0)
    D = complex(588.0 * mu0**2, 4.0 * s * (-14.0 * mu0**2 - 103.0 * mu0 + 250.0))
    E = 7.0 * (-709.0 * mu0**2 - 3485.0 * mu0 + 12500.0)
    F = 88.0 * mu0**2 - 1897.0 * mu0 - 3500.0
    return D, E, F


def re_z_components(mu0=MU0):
    """``(ell1, k1, ell2, k2, Re z)`` with ``z = (ell1 + i k1) / (ell2 + i k2)``."""
    s = _s(mu0)
    x, y = normalization_xy(mu0)
    D, E, F = def_constants(mu0)
    ell1 = x * E - y * s * F
    k1 = x * s * F + y * E
    ell2 = 588.0 * mu0**2
    k2 = 4.0 * s * (-14.0 * mu0**2 - 103.0 * mu0 + 250.0)
    return ell1, k1, ell2, k2, (ell1 * ell2 + k1 * k2) / (ell2**2 + k2**2)


def re_z_expanded(mu0=MU0, y_numerator=REZ_Y_NUMERATOR,
                  x_numerator=REZ_X_NUMERATOR, denominator=REZ_DENOMINATOR):
    s = _s(mu0)
    x, y = normalization_xy(mu0)
    den = 4.0 * _horner(denominator, mu0)
    return (s * _horner(y_numerator, mu0) / (mu0 * den) * y
            - _horner(x_numerator, mu0) / den * x)


def re_z(mu0=MU0, **expanded_coeffs):
    """Re(z) by the component route, cross-checked against the expanded rational.

    Raises ConsistencyError when the two disagree beyond ``1e-9`` relative.
    """
    *_, via_components = re_z_components(mu0)
    via_rational = re_z_expanded(mu0, **expanded_coeffs)
    if abs(via_components - via_rational) > REZ_RTOL * abs(via_components):
        raise ConsistencyError(
            f"Re(z) routes disagree: components {via_components!r} vs "
            f"expanded rational {via_rational!r}"
        )
    return via_components


def a0_closed_form(k=0.0, mu0=MU0):
    """Leading-order first Lyapunov coefficient (independent of ``k``)."""
    s = _s(mu0)
    x, y = normalization_xy(mu0)
    n2 = x * x + y * y
    bv_term = 1500.0 / n2 * (
        ((2.0 * mu0**2 - 7.0 * mu0) * x - s * y * (4.0 * mu0 - 50.0))
        / (mu0 * (mu0 - 50.0))
    )
    bw_term = 3000.0 * re_z(mu0) / (n2 * mu0)
    return (bv_term + bw_term) / s


@dataclass(frozen=True)
class AsymptoticCoeffs:
    mu0: float
    mu1: float
    mu2: float
    mu3: float
    b1: float
    b2: float
    b3: float
    d1_0: float
    d2_0: float
    alpha_T: float
    x_T: float
    beta1: float
    beta2: float
    beta3: float
    beta4: float
    beta5: float
    x_norm: float
    y_norm: float
    D: complex
    E: float
    F: float
    ell1: float
    ell2: float
    k1: float
    k2: float
    re_z: float
    a0: float

    def as_dict(self):
        return asdict(self)


def coefficients(k=0.0) -> AsymptoticCoeffs:
    mu0, mu1, mu2, mu3 = mu_series(k)
    b1, b2, b3 = b_polys(mu0)
    alpha_T, x_T, beta1, beta2, beta3, beta4, beta5 = beta_coeffs(k)
    x, y = normalization_xy(mu0)
    D, E, F = def_constants(mu0)
    ell1, k1, ell2, k2, _ = re_z_components(mu0)
    return AsymptoticCoeffs(
        mu0=mu0, mu1=mu1, mu2=mu2, mu3=mu3,
        b1=b1, b2=b2, b3=b3,
        d1_0=2.0 / 5.0 * mu0 * (mu0 - 50.0),
        d2_0=3.0 / 25.0 * mu0**2 * (mu0 - 50.0),
        alpha_T=alpha_T, x_T=x_T,
        beta1=beta1, beta2=beta2, beta3=beta3, beta4=beta4, beta5=beta5,
        x_norm=x, y_norm=y,
        D=D, E=E, F=F,
        ell1=ell1, ell2=ell2, k1=k1, k2=k2,
        re_z=re_z(mu0),
        a0=a0_closed_form(k, mu0),
    )
