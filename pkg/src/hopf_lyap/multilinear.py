"""Symmetric multilinear forms built from the field derivatives at P0.

``bilinear_B`` and ``trilinear_C`` read a :class:`DerivativeBundle`; the
``fd_*`` functions are independent finite-difference versions acting on any
real field evaluator, used as oracles.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from .model import DerivativeBundle

__all__ = ["bilinear_B", "trilinear_C", "fd_bilinear", "fd_trilinear"]

_UPPER = [(j, k) for j in range(4) for k in range(j, 4)]


def _cvec(v):
    return np.asarray(v, dtype=complex).reshape(4)


def bilinear_B(bundle: DerivativeBundle, x, y) -> np.ndarray:
    """``B_i(x, y) = sum_jk H_ijk x_j y_k``, no conjugation.

    Summed over the upper triangle with ``x_j y_k + x_k y_j`` so that
    ``B(x, y) == B(y, x)`` holds bit for bit.
    """
    x, y = _cvec(x), _cvec(y)
    H = bundle.hessians
    out = np.zeros(4, dtype=complex)
    for i in range(4):
        acc = 0j
        for j, k in _UPPER:
            h = H[i, j, k]
            if h == 0.0:
                continue
            if j == k:
                acc += h * (x[j] * y[j])
            else:
                acc += h * (x[j] * y[k] + x[k] * y[j])
        out[i] = acc
    return out


def trilinear_C(bundle: DerivativeBundle, x, y, z) -> np.ndarray:
    x, y, z = _cvec(x), _cvec(y), _cvec(z)
    out = np.zeros(4, dtype=complex)
    for i, j, k, l, value in bundle.third:
        terms = sorted(set(permutations((j, k, l))))
        out[i] += value * sum(x[a] * y[b] * z[c] for a, b, c in terms)
    return out


def _real_parts(v):
    v = _cvec(v)
    return v.real, v.imag


def fd_bilinear(field, base, x, y, h=None) -> np.ndarray:
    """Polarized second difference of ``field`` at ``base``.

    Complex directions are split into real and imaginary parts and recombined
    by bilinearity.
    """
    base = np.asarray(base, dtype=float)
    if h is None:
        h = 1e-3 * (1.0 + float(np.max(np.abs(base))))

    def real_form(u, v):
        if not (np.any(u) and np.any(v)):
            return np.zeros(4)
        return (
            field(base + h * u + h * v)
            - field(base + h * u - h * v)
            - field(base - h * u + h * v)
            + field(base - h * u - h * v)
        ) / (4.0 * h * h)

    xr, xi = _real_parts(x)
    yr, yi = _real_parts(y)
    re = real_form(xr, yr) - real_form(xi, yi)
    im = real_form(xr, yi) + real_form(xi, yr)
    return re + 1j * im


def fd_trilinear(field, base, x, y, z, h=None) -> np.ndarray:
    """Third mixed central difference, extended to complex arguments by trilinearity.

    The default step ``1e-3 (1 + |base|)`` keeps the truncation error of the
    saturating term below ``1e-4`` relative near the Hopf curve.
    """
    base = np.asarray(base, dtype=float)
    if h is None:
        h = 1e-3 * (1.0 + float(np.max(np.abs(base))))
    signs = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]

    def real_form(u, v, w):
        if not (np.any(u) and np.any(v) and np.any(w)):
            return np.zeros(4)
        acc = np.zeros(4)
        for a, b, c in signs:
            acc += a * b * c * field(base + h * (a * u + b * v + c * w))
        return acc / (8.0 * h**3)

    parts = [_real_parts(v) for v in (x, y, z)]
    out = np.zeros(4, dtype=complex)
    # expand prod_m (re_m + i im_m) over the 8 real/imaginary choices
    for choice in range(8):
        picks = [(choice >> m) & 1 for m in range(3)]
        vecs = [parts[m][picks[m]] for m in range(3)]
        out += (1j ** sum(picks)) * real_form(*vecs)
    return out
