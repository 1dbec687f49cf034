"""Spectral-parameter power series for ``v'' - q v = lambda v``.

With a standard L-base ``{phi_k}``,

    v1 = sum_k lambda^k phi_{2k} / (2k)!,    v2 = sum_k lambda^k phi_{2k+1} / (2k+1)!,

both sums starting at ``k = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DegenerateError, TruncationError
from .grid import SampledFunction
from .lbase import SLBase

DEFAULT_TOL = 1e-12
SCAN_SAMPLES = 200
ROOT_XTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SPPSSolution:
    lam: complex
    k_used: int
    v1: SampledFunction
    v2: SampledFunction
    tail_estimate: float


def required_k_max(lam_abs: float, a: float, tol: float = DEFAULT_TOL) -> int:
    """Smallest even ``K`` with ``(|lambda| a^2)^(K/2) / K! <= tol``, plus one
    so that both series can reach that order."""
    z = lam_abs * a * a
    k = 2
    while True:
        if z == 0 or (k // 2) * math.log(z) - math.lgamma(k + 1) <= math.log(tol):
            return k + 1
        k += 2


def _series(mat: np.ndarray, lam: complex, tol: float, a: float):
    """Sum both series on the columns of ``mat`` (rows are L-base members)."""
    kmax = mat.shape[0] - 1
    lam = complex(lam)
    v1 = mat[0].astype(complex)
    v2 = mat[1].astype(complex)
    c_even = c_odd = 1.0 + 0j
    k = 0
    used = 1
    z = abs(lam) * a * a
    last = math.inf
    while True:
        k += 1
        if 2 * k > kmax:
            tail = last
            raise TruncationError(
                f"L-base exhausted at k_max={kmax} before reaching tol={tol:g} (last term {tail:.3e})",
                tail=tail, partial=(v1, v2, used))
        c_even = c_even * lam / ((2 * k - 1) * (2 * k))
        t1 = c_even * mat[2 * k]
        v1 = v1 + t1
        used = 2 * k
        t2 = None
        if 2 * k + 1 <= kmax:
            c_odd = c_odd * lam / ((2 * k) * (2 * k + 1))
            t2 = c_odd * mat[2 * k + 1]
            v2 = v2 + t2
            used = 2 * k + 1
        scale = max(1.0, float(np.max(np.abs(v1))), float(np.max(np.abs(v2))))
        last = float(max(np.max(np.abs(t1)), np.max(np.abs(t2)) if t2 is not None else 0.0))
        # terms keep growing until (2k+1)(2k+2) exceeds |lambda| a^2
        if last <= tol * scale and (2 * k + 1) * (2 * k + 2) > z:
            return v1, v2, used, last


def _require_pair(base: SLBase):
    if base.pair.is_degenerate():
        raise DegenerateError(f"L-base pair has vanishing Wronskian {base.pair.wronskian!r}")


def spps_solve(base: SLBase, lam, tol: float = DEFAULT_TOL) -> SPPSSolution:
    _require_pair(base)
    v1, v2, used, tail = _series(base.matrix, lam, tol, base.grid.a)
    g = base.grid
    return SPPSSolution(complex(lam), used, SampledFunction(g, v1), SampledFunction(g, v2), tail)


def general_solution(base: SLBase, lam, c1, c2, tol: float = DEFAULT_TOL) -> SampledFunction:
    sol = spps_solve(base, lam, tol)
    return c1 * sol.v1 + c2 * sol.v2


def dirichlet_char(base: SLBase, lam, left: float, right: float, tol: float = DEFAULT_TOL) -> complex:
    """``v1(l) v2(r) - v1(r) v2(l)``; ``left``/``right`` snap to the nearest nodes."""
    _require_pair(base)
    il, ir = base.grid.index_of(left), base.grid.index_of(right)
    v1, v2, _, _ = _series(base.matrix[:, [il, ir]], lam, tol, base.grid.a)
    return complex(v1[0] * v2[1] - v1[1] * v2[0])


def find_eigenvalues(base: SLBase, left: float, right: float, lambda_min: float, lambda_max: float,
                     count: int, samples: int = SCAN_SAMPLES, xtol: float = ROOT_XTOL,
                     tol: float = DEFAULT_TOL) -> list[complex]:
    """Dirichlet eigenvalues on ``[left, right]`` inside the real scan window.

    Sign changes of ``Re dirichlet_char`` on a uniform scan are refined by
    bisection.  Returns up to ``count`` roots, largest first; an empty list
    when the window holds none.
    """
    if count < 1:
        return []

    def f(lam):
        return dirichlet_char(base, lam, left, right, tol).real

    lams = np.linspace(lambda_min, lambda_max, samples)
    vals = np.array([f(l) for l in lams])
    roots = []
    for l0, l1, f0, f1 in zip(lams[:-1], lams[1:], vals[:-1], vals[1:]):
        if f0 == 0.0:
            roots.append(l0)
        elif f0 * f1 < 0:
            roots.append(bisect(f, l0, l1, xtol=xtol))
    if vals[-1] == 0.0:
        roots.append(lams[-1])
    roots = sorted(set(roots), reverse=True)
    return [complex(r) for r in roots[:count]]


def write_solution(sol: SPPSSolution, path) -> None:
    from .grid import fmt

    with open(path, "w", newline="") as fh:
        fh.write("x,v1_re,v1_im,v2_re,v2_im\n")
        for x, a, b in zip(sol.v1.grid.nodes, sol.v1.values, sol.v2.values):
            fh.write(f"{fmt(x)},{fmt(a.real)},{fmt(a.imag)},{fmt(b.real)},{fmt(b.imag)}\n")
