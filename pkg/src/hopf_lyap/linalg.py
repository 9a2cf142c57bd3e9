"""Dense linear algebra for the small (3x3 / 4x4) matrices of the pipeline.

Everything here works on plain numpy arrays, real or complex. Characteristic
polynomials use the monic convention ``det(x I - M) = x**n + a1 x**(n-1) + ... + an``
and are returned as the array ``[a1, ..., an]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, RankStructureError, SingularMatrixError

__all__ = [
    "char_poly",
    "poly_eval",
    "poly_roots",
    "LUFactors",
    "lu_factor",
    "lu_solve",
    "det",
    "null_vector",
    "inf_norm",
]

PIVOT_RTOL = 1e-13


def inf_norm(m):
    m = np.asarray(m)
    if m.ndim == 1:
        return float(np.max(np.abs(m))) if m.size else 0.0
    return float(np.max(np.sum(np.abs(m), axis=1)))


def _square(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def char_poly(m) -> np.ndarray:
    """Faddeev-LeVerrier recurrence: ``M_k = A M_{k-1} + c_{k-1} I``, ``c_k = -tr(A M_k) / k``."""
    a = _square(m)
    n = a.shape[0]
    eye = np.eye(n, dtype=a.dtype)
    mk = np.zeros_like(a)
    c = a.dtype.type(1)
    coeffs = []
    for k in range(1, n + 1):
        mk = a @ mk + c * eye
        c = -np.trace(a @ mk) / k
        coeffs.append(c)
    return np.array(coeffs)


def poly_eval(coeffs, x):
    """Horner evaluation of the monic polynomial with lower coefficients ``coeffs``."""
    acc = 1.0
    for a in coeffs:
        acc = acc * x + a
    return acc


def _horner_noise(mags, r):
    """Round-off bound of Horner evaluation at modulus ``r``: ``4 n u sum |a_k| r**(n-k)``."""
    acc = 1.0
    for m in mags:
        acc = acc * r + m
    return 4.0 * len(mags) * 2.220446049250313e-16 * acc


def poly_roots(coeffs, max_iter=200, tol=1e-14) -> np.ndarray:
    """All roots of a monic polynomial by Durand-Kerner iteration (Gauss-Seidel sweeps)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = coeffs.size
    if n == 0:
        return np.zeros(0, dtype=complex)
    radius = 1.0 + float(np.max(np.abs(coeffs)))
    cs = [complex(c) for c in coeffs]
    mags = [abs(c) for c in cs]
    # the usual non-symmetric seed avoids starting on a symmetry line of real polynomials
    seed = (0.4 + 0.9j) / abs(0.4 + 0.9j)
    z = [radius * seed**i for i in range(n)]
    for _ in range(max_iter):
        done = True
        for i in range(n):
            zi = z[i]
            denom = 1.0
            for j in range(n):
                if j != i:
                    denom *= zi - z[j]
            val = poly_eval(cs, zi)
            step = val / denom
            z[i] = zi - step
            # a residual at Horner round-off level cannot be improved further
            if abs(step) >= tol * (1.0 + abs(z[i])) and abs(val) > _horner_noise(mags, abs(zi)):
                done = False
        if done:
            return np.array(z)
    z = np.array(z)
    residual = max(abs(poly_eval(coeffs, r)) for r in z)
    raise ConvergenceError(
        f"Durand-Kerner did not converge in {max_iter} iterations "
        f"(max |p(root)| = {residual:.3e})",
        last=z,
        residual=residual,
    )


@dataclass(frozen=True)
class LUFactors:
    """``P A = L U`` with unit-lower ``L`` and ``U`` packed into ``lu``."""

    lu: np.ndarray
    perm: np.ndarray
    sign: int
    scale: float

    @property
    def pivots(self):
        return np.diag(self.lu)


def lu_factor(m) -> LUFactors:
    a = _square(m)
    dtype = np.result_type(a.dtype, float)
    lu = a.astype(dtype, copy=True)
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1
    for col in range(n):
        piv = col + int(np.argmax(np.abs(lu[col:, col])))
        if piv != col:
            lu[[col, piv]] = lu[[piv, col]]
            perm[[col, piv]] = perm[[piv, col]]
            sign = -sign
        if lu[col, col] == 0:
            continue
        for r in range(col + 1, n):
            if lu[r, col] != 0:
                f = lu[r, col] / lu[col, col]
                lu[r, col] = f
                lu[r, col + 1:] -= f * lu[col, col + 1:]
    return LUFactors(lu=lu, perm=perm, sign=sign, scale=inf_norm(a))


def _forward(lu, b):
    y = b.copy()
    for i in range(len(y)):
        y[i] -= lu[i, :i] @ y[:i]
    return y


def _backward(lu, y):
    n = len(y)
    x = np.zeros_like(y)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def lu_solve(m, rhs) -> np.ndarray:
    """Solve ``m x = rhs`` by LU with partial pivoting.

    Raises SingularMatrixError when a pivot falls below ``1e-13 * ||m||_inf``.
    """
    fac = lu_factor(m)
    rhs = np.asarray(rhs)
    if not np.all(np.isfinite(rhs)):
        raise ValueError("right-hand side has non-finite entries")
    small = np.abs(fac.pivots)
    if np.min(small) <= PIVOT_RTOL * fac.scale:
        i = int(np.argmin(small))
        raise SingularMatrixError(
            f"pivot {i} has magnitude {small[i]:.3e} (threshold "
            f"{PIVOT_RTOL * fac.scale:.3e})",
            pivot=float(small[i]),
        )
    dtype = np.result_type(fac.lu.dtype, rhs.dtype)
    b = rhs.astype(dtype)[fac.perm]
    return _backward(fac.lu.astype(dtype), _forward(fac.lu.astype(dtype), b))


def det(m):
    fac = lu_factor(m)
    return fac.sign * np.prod(fac.pivots)


def null_vector(m, gap=1e-6) -> np.ndarray:
    """Unit vector spanning the kernel of a rank ``n-1`` matrix.

    The smallest LU pivot marks the deficient column; its unknown is set to
    one, later unknowns to zero, and earlier ones are back-substituted.
    """
    fac = lu_factor(m)
    piv = np.abs(fac.pivots)
    scale = fac.scale if fac.scale > 0 else 1.0
    order = np.argsort(piv)
    r = int(order[0])
    if piv.size > 1 and piv[order[1]] <= gap * scale:
        raise RankStructureError(
            f"kernel dimension exceeds one (pivots {np.sort(piv)})"
        )
    if piv[r] > gap * scale:
        raise RankStructureError(
            f"matrix is not rank deficient (smallest pivot {piv[r]:.3e})"
        )
    lu = fac.lu
    v = np.zeros(lu.shape[0], dtype=lu.dtype)
    v[r] = 1.0
    for i in range(r - 1, -1, -1):
        v[i] = -(lu[i, i + 1:] @ v[i + 1:]) / lu[i, i]
    return v / np.linalg.norm(v)
