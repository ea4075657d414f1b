"""Numeric kernels for witness validation and the least-squares oracle.

The hot loop is evaluating a polynomial in ``x`` and ``conj(x)`` at many
complex points. A numba version is used when numba imports and the
environment variable ``CCCLOSE_NUMBA`` is not ``0``; otherwise a vectorised
numpy version runs. Both take the same packed arrays and agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised through BACKEND
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _use_numba():
    return _HAVE_NUMBA and os.environ.get("CCCLOSE_NUMBA", "1") != "0"


def pack(poly, nvars, conj_offset=None):
    """Exponent and coefficient arrays for ``poly``.

    ``poly`` is a LaurentPoly over ``nvars`` variables, or over ``2*nvars``
    variables (``x`` then ``conj(x)``) when ``conj_offset == nvars``.
    Returns ``(exps, coeffs)`` with ``exps`` of shape ``(T, 2*nvars)``.
    """
    items = sorted(poly.terms.items())
    T = len(items)
    exps = np.zeros((T, 2 * nvars), dtype=np.int64)
    coeffs = np.zeros(T, dtype=np.complex128)
    for t, (e, c) in enumerate(items):
        if conj_offset is None:
            exps[t, :nvars] = e
        else:
            exps[t, :] = e
        coeffs[t] = complex(c)
    return exps, coeffs


def eval_numpy(exps, coeffs, points):
    """Evaluate at ``points`` (shape ``(P, n)``, complex)."""
    pts = np.asarray(points, dtype=np.complex128)
    P, n = pts.shape
    out = np.zeros(P, dtype=np.complex128)
    if len(coeffs) == 0:
        return out
    base = np.concatenate([pts, np.conj(pts)], axis=1)          # (P, 2n)
    # (P, T): product over variables of base^exps
    logs = np.ones((P, len(coeffs)), dtype=np.complex128)
    for j in range(2 * n):
        col = exps[:, j]
        if not col.any():
            continue
        logs *= base[:, j:j + 1] ** col[None, :]
    return logs @ coeffs


if _HAVE_NUMBA:
    @njit(cache=True)
    def _ipow(z, e):  # pragma: no cover - compiled
        """``z**e`` for ``e >= 0`` by repeated squaring; numba's complex pow is slow."""
        r = 1.0 + 0j
        while e > 0:
            if e & 1:
                r *= z
            z *= z
            e >>= 1
        return r

    @njit(cache=True)
    def _eval_numba(exps, coeffs, points):  # pragma: no cover - compiled
        P, n = points.shape
        T = coeffs.shape[0]
        out = np.zeros(P, dtype=np.complex128)
        for p in range(P):
            acc = 0j
            for t in range(T):
                v = coeffs[t]
                for j in range(n):
                    e = exps[t, j]
                    if e > 0:
                        v *= _ipow(points[p, j], e)
                    elif e < 0:
                        v /= _ipow(points[p, j], -e)
                    ec = exps[t, n + j]
                    if ec > 0:
                        v *= _ipow(points[p, j].conjugate(), ec)
                    elif ec < 0:
                        v /= _ipow(points[p, j].conjugate(), -ec)
                acc += v
            out[p] = acc
        return out
else:  # pragma: no cover
    _eval_numba = None


def eval_numba(exps, coeffs, points):
    if _eval_numba is None:
        raise RuntimeError("numba is not available")
    pts = np.ascontiguousarray(points, dtype=np.complex128)
    return _eval_numba(np.ascontiguousarray(exps), np.ascontiguousarray(coeffs), pts)


def evaluate(exps, coeffs, points):
    if _use_numba():
        return eval_numba(exps, coeffs, points)
    return eval_numpy(exps, coeffs, points)


def backend() -> str:
    return "numba" if _use_numba() else "numpy"
