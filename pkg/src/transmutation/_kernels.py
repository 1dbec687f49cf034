"""Hot inner loops, in a numba flavour and a vectorised numpy flavour.

Both flavours compute exactly the same quantities; which one is bound to the
public names is decided once at import time by ``_accel.USE_NUMBA``.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# --------------------------------------------------------------------------
# cumulative trapezoid outward from a centre index, along one axis

def cumtrapz_center(f, c, h, axis=0):
    """Cumulative trapezoid integral of ``f`` from index ``c`` along ``axis``.

    The result is exactly zero at ``c`` and accumulates outward in both
    directions, so values on the negative side carry the sign of an oriented
    integral (``int_0^x`` with ``x < 0``).
    """
    f = np.moveaxis(np.asarray(f), axis, 0)
    out = np.zeros(f.shape, dtype=np.result_type(f.dtype, np.float64))
    inc = 0.5 * h * (f[1:] + f[:-1])
    out[c + 1:] = np.cumsum(inc[c:], axis=0)
    if c > 0:
        out[:c] = -np.cumsum(inc[:c][::-1], axis=0)[::-1]
    return np.moveaxis(out, 0, axis)


# --------------------------------------------------------------------------
# one successive-approximation term of the Goursat integral equation

def _goursat_term_numpy(qsum, prev, mask, h, c):
    f = qsum * prev
    g = cumtrapz_center(f, c, h, axis=1)
    out = cumtrapz_center(g, c, h, axis=0)
    out[~mask] = 0.0
    return out


@njit
def _goursat_term_numba(qsum, prev, mask, h, c):
    # only diamond nodes are touched: the rectangle [0,u]x[0,v] of a diamond
    # node stays inside the diamond, so nothing outside is ever needed
    m = prev.shape[0]
    half = 0.5 * h
    g = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        w = c - abs(i - c)
        acc = 0.0j
        left = qsum[i, c] * prev[i, c]
        for j in range(c + 1, c + w + 1):
            right = qsum[i, j] * prev[i, j]
            acc += half * (left + right)
            g[i, j] = acc
            left = right
        acc = 0.0j
        right = qsum[i, c] * prev[i, c]
        for j in range(c - 1, c - w - 1, -1):
            left = qsum[i, j] * prev[i, j]
            acc -= half * (left + right)
            g[i, j] = acc
            right = left
    out = np.zeros((m, m), dtype=np.complex128)
    for i in range(c + 1, m):
        w = c - (i - c)
        for j in range(c - w, c + w + 1):
            out[i, j] = out[i - 1, j] + half * (g[i - 1, j] + g[i, j])
    for i in range(c - 1, -1, -1):
        w = c - (c - i)
        for j in range(c - w, c + w + 1):
            out[i, j] = out[i + 1, j] - half * (g[i, j] + g[i + 1, j])
    return out


# --------------------------------------------------------------------------
# row-wise trapezoid over variable index windows: out_i = int_{lo_i}^{hi_i} M[i, .] u

def _trapezoid_rows_numpy(mat, u, lo, hi, h):
    j = np.arange(mat.shape[1])
    lo_ = lo[:, None]
    hi_ = hi[:, None]
    w = ((j >= lo_) & (j <= hi_)).astype(np.float64)
    w -= 0.5 * (j == lo_)
    w -= 0.5 * (j == hi_)
    return h * ((mat * w) @ u)


@njit
def _trapezoid_rows_numba(mat, u, lo, hi, h):
    m = mat.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    for i in range(m):
        a = lo[i]
        b = hi[i]
        if b <= a:
            continue
        acc = 0.5 * (mat[i, a] * u[a] + mat[i, b] * u[b])
        for j in range(a + 1, b):
            acc += mat[i, j] * u[j]
        out[i] = h * acc
    return out


if USE_NUMBA:
    goursat_term = _goursat_term_numba
    trapezoid_rows = _trapezoid_rows_numba
else:
    goursat_term = _goursat_term_numpy
    trapezoid_rows = _trapezoid_rows_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
