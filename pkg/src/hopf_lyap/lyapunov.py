"""First Lyapunov coefficient of the Hopf point, assembled numerically.

``a = Re[<p, C(q,q,qb)> - 2 <p, B(q, A^-1 B(q,qb))> + <p, B(qb, (2 i w I - A)^-1 B(q,q))>] / (2 w)``

with ``A q = i w q``, ``A^T p = -i w p`` and ``<p, q> = sum conj(p_i) q_i = 1``.

The coefficient is quadratic in the scale of ``q`` (``q -> c q`` multiplies
it by ``|c|**2``), so a scale for ``q`` has to be fixed. :func:`first_lyapunov`
uses ``q_1 = 3 (mu_H + i w)``, the convention under which ``a`` tends to
:data:`hopf_lyap.asymptotics.A0_REFERENCE` as ``eps -> 0``. ``scaling="unit"``
gives the coefficient for ``<q, q> = 1`` instead.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import HopfLyapError
from .hopf import MU0, HopfPoint, solve_hopf_mu
from .model import derivative_bundle, equilibrium
from .multilinear import bilinear_B, trilinear_C

__all__ = [
    "EigenData",
    "LyapunovBreakdown",
    "SweepRow",
    "inner",
    "hopf_matrix",
    "eigen_data",
    "normalize_left",
    "solve_decoupled",
    "assemble",
    "first_lyapunov",
    "lyapunov_vs_eps",
]


def inner(u, v):
    """``<u, v> = sum conj(u_i) v_i``."""
    return complex(np.vdot(u, v))


@dataclass(frozen=True)
class EigenData:
    q: np.ndarray
    p: np.ndarray
    raw_p: np.ndarray
    alpha: complex
    residual_q: float
    residual_p: float


@dataclass(frozen=True)
class LyapunovBreakdown:
    B_qqbar: np.ndarray
    v: np.ndarray
    B_qv: np.ndarray
    B_qq: np.ndarray
    w: np.ndarray
    B_qbarw: np.ndarray
    C_qqqbar: np.ndarray
    ip_C: complex
    ip_Bv: complex
    ip_Bw: complex
    omega0: float
    a: float
    eigen: EigenData | None = None


def _phase_fix(v):
    """Unit norm, largest-modulus component rotated onto the positive real axis."""
    v = v / np.linalg.norm(v)
    j = int(np.argmax(np.abs(v)))
    return v * (abs(v[j]) / v[j])


def normalize_left(raw_p, q):
    """Scale ``raw_p`` so that ``<p, q> = 1``; returns ``(p, alpha)`` with ``p = raw_p / alpha``."""
    alpha = np.conj(inner(raw_p, q))
    return raw_p / alpha, complex(alpha)


def eigen_data(A, omega0, first_component=None) -> EigenData:
    """Right/left eigenvectors for ``+i omega0`` (``-i omega0`` if omega0 < 0).

    ``first_component`` fixes ``q[0]``; by default ``q`` has unit norm and a
    deterministic phase.
    """
    A = np.asarray(A, dtype=float)
    lam = 1j * omega0
    eye = np.eye(A.shape[0])
    q = linalg.null_vector(A - lam * eye)
    if first_component is None:
        q = _phase_fix(q)
    else:
        q = q * (first_component / q[0])
    raw_p = _phase_fix(linalg.null_vector(A.T + lam * eye))
    p, alpha = normalize_left(raw_p, q)
    return EigenData(
        q=q,
        p=p,
        raw_p=raw_p,
        alpha=alpha,
        residual_q=linalg.inf_norm(A @ q - lam * q),
        residual_p=linalg.inf_norm(A.T @ p + lam * p),
    )


def solve_decoupled(m, rhs):
    """Solve ``m x = rhs`` after eliminating decoupled coordinates.

    A coordinate ``i`` whose row has no off-diagonal entries and whose
    right-hand side is exactly zero gets ``x_i = 0`` and is dropped; the
    remaining block goes through :func:`linalg.lu_solve`. This keeps the
    system solvable where ``m`` is singular only along such a coordinate
    (``A`` at ``eps = 0``) and makes the zero exact.
    """
    m = np.asarray(m)
    rhs = np.asarray(rhs)
    n = m.shape[0]
    off = m - np.diag(np.diag(m))
    drop = [i for i in range(n) if rhs[i] == 0 and not np.any(off[i])]
    keep = [i for i in range(n) if i not in drop]
    out = np.zeros(n, dtype=np.result_type(m.dtype, rhs.dtype, float))
    if keep:
        out[keep] = linalg.lu_solve(m[np.ix_(keep, keep)], rhs[keep])
    return out


def assemble(bundle, omega0, q, p, eigen=None) -> LyapunovBreakdown:
    """Evaluate every term of the coefficient for given eigenvectors.

    ``omega0`` may be negative, meaning the ``-i|omega0|`` branch; the
    prefactor uses ``|omega0|``.
    """
    A = bundle.jacobian
    qb = np.conj(q)
    B_qqbar = bilinear_B(bundle, q, qb)
    v = solve_decoupled(A.astype(complex), B_qqbar)
    B_qv = bilinear_B(bundle, q, v)
    B_qq = bilinear_B(bundle, q, q)
    w = solve_decoupled(2j * omega0 * np.eye(4) - A, B_qq)
    B_qbarw = bilinear_B(bundle, qb, w)
    C = trilinear_C(bundle, q, q, qb)
    ip_C, ip_Bv, ip_Bw = inner(p, C), inner(p, B_qv), inner(p, B_qbarw)
    a = (ip_C - 2.0 * ip_Bv + ip_Bw).real / (2.0 * abs(omega0))
    return LyapunovBreakdown(
        B_qqbar=B_qqbar, v=v, B_qv=B_qv, B_qq=B_qq, w=w, B_qbarw=B_qbarw,
        C_qqqbar=C, ip_C=ip_C, ip_Bv=ip_Bv, ip_Bw=ip_Bw,
        omega0=abs(omega0), a=float(a), eigen=eigen,
    )


def hopf_matrix(hopf: HopfPoint):
    """``(bundle, A)`` at the equilibrium of a Hopf point."""
    bundle = derivative_bundle(equilibrium(hopf.mu_h, hopf.epsilon).point, hopf.params)
    return bundle, bundle.jacobian


def first_lyapunov(hopf: HopfPoint, scaling="fixed", branch=1) -> LyapunovBreakdown:
    """First Lyapunov coefficient at ``hopf``.

    ``branch=-1`` repeats the computation on the conjugate eigenvalue
    ``-i omega0``; the result is the same real number.
    """
    bundle, A = hopf_matrix(hopf)
    omega = branch * hopf.omega0
    if scaling == "fixed":
        first = 3.0 * (hopf.mu_h + 1j * omega)
    elif scaling == "unit":
        first = None
    else:
        raise ValueError(f"unknown scaling {scaling!r}")
    ed = eigen_data(A, omega, first_component=first)
    return assemble(bundle, omega, ed.q, ed.p, eigen=ed)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    mu_h: float = float("nan")
    omega0: float = float("nan")
    a: float = float("nan")
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


def _sweep_one(eps, k, guess):
    try:
        hp = solve_hopf_mu(eps, guess=guess, k=k)
        lb = first_lyapunov(hp)
        return SweepRow(epsilon=eps, mu_h=hp.mu_h, omega0=hp.omega0, a=lb.a)
    except (HopfLyapError, ArithmeticError, ValueError) as exc:
        return SweepRow(epsilon=eps, error=f"{type(exc).__name__}: {exc}")


def lyapunov_vs_eps(eps_list, k=0.0, guess=MU0, workers=None) -> list[SweepRow]:
    """One row per epsilon, in input order; failures are recorded per row."""
    eps_list = [float(e) for e in eps_list]
    if workers and len(eps_list) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda e: _sweep_one(e, k, guess), eps_list))
    return [_sweep_one(e, k, guess) for e in eps_list]
