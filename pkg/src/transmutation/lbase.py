"""Base solutions of ``phi'' = q phi``, the Green function and standard L-bases.

A standard L-base ``{phi_k}`` satisfies ``phi_k'' - q phi_k = k (k-1) phi_{k-2}``
with ``phi_k(0) = phi_k'(0) = 0`` for ``k >= 2``; it is fixed by its first two
members.  The recursion is evaluated through the factorised Green function,

    phi_k(x) = k (k-1) / W * [phi_1(x) A(phi_0 phi_{k-2})(x) - phi_0(x) A(phi_1 phi_{k-2})(x)],

where ``A`` is the antiderivative from 0, so each member costs O(n).

Cumulative integrals here use the Simpson rule of :func:`grid.cumulative_integral`:
the power-series solutions built on these members feed eigenvalue searches,
whose accuracy is limited by the quadrature order of the recursion.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DegenerateError, DomainError, TruncationError
from .grid import (Grid, SampledFunction, check_same_grid, cumulative_integral, derivative,
                   fmt)

RULE = "simpson"
DEFAULT_TOL = 1e-13
DEFAULT_N_MAX = 200
DEFAULT_K_MAX = 30
DEGENERATE_RTOL = 1e-12


def _antideriv(values, grid):
    return cumulative_integral(SampledFunction(grid, values), rule=RULE).values


def solve_base_solution(q: SampledFunction, u0, u0p, tol: float = DEFAULT_TOL,
                        n_max: int = DEFAULT_N_MAX) -> SampledFunction:
    """Picard iteration for ``phi(x) = u0 + u0p x + int_0^x (x - t) q(t) phi(t) dt``.

    The convolution is split as ``x A(q phi) - A(t q phi)``.  Stops when
    successive iterates differ by at most ``tol`` relative to the iterate's
    sup norm (absolute when that norm is below 1).
    """
    grid = q.grid
    x = grid.nodes
    start = u0 + u0p * x + 0j
    phi = start
    for _ in range(n_max):
        g = q.values * phi
        new = start + x * _antideriv(g, grid) - _antideriv(x * g, grid)
        change = np.max(np.abs(new - phi))
        phi = new
        if change <= tol * max(1.0, np.max(np.abs(phi))):
            return SampledFunction(grid, phi)
    raise TruncationError(f"Picard iteration did not reach tol={tol:g} in {n_max} sweeps",
                          tail=float(change), partial=SampledFunction(grid, phi))


@dataclass(frozen=True, eq=False)
class BaseSolutionPair:
    """Two solutions of ``phi'' = q phi`` with their initial data at 0.

    ``init_data = (phi0(0), phi0'(0), phi1(0), phi1'(0))``.
    """

    phi0: SampledFunction
    phi1: SampledFunction
    init_data: tuple

    @property
    def grid(self) -> Grid:
        return self.phi0.grid

    @property
    def wronskian(self) -> complex:
        p0, d0, p1, d1 = self.init_data
        return complex(p0 * d1 - d0 * p1)

    def scale(self) -> float:
        return self.phi0.sup_norm() * self.phi1.sup_norm()

    def is_degenerate(self) -> bool:
        return abs(self.wronskian) <= DEGENERATE_RTOL * max(self.scale(), 1e-300)

    def wronskian_profile(self) -> SampledFunction:
        """Discrete ``phi0 phi1' - phi0' phi1`` at every node."""
        return wronskian(self.phi0, self.phi1)


def wronskian(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    check_same_grid(f, g)
    return f * derivative(g) - derivative(f) * g


def solution_pair(q: SampledFunction, init_data, tol: float = DEFAULT_TOL,
                  n_max: int = DEFAULT_N_MAX) -> BaseSolutionPair:
    p0, d0, p1, d1 = (complex(v) for v in init_data)
    phi0 = solve_base_solution(q, p0, d0, tol, n_max)
    phi1 = solve_base_solution(q, p1, d1, tol, n_max)
    return BaseSolutionPair(phi0, phi1, (p0, d0, p1, d1))


def canonical_pair(q: SampledFunction, tol: float = DEFAULT_TOL, n_max: int = DEFAULT_N_MAX) -> BaseSolutionPair:
    """Solutions with ``phi0(0) = phi1'(0) = 1``, ``phi0'(0) = phi1(0) = 0``."""
    return solution_pair(q, (1.0, 0.0, 0.0, 1.0), tol, n_max)


def _require_nondegenerate(pair: BaseSolutionPair):
    if pair.is_degenerate():
        raise DegenerateError(f"base pair has vanishing Wronskian W={pair.wronskian!r}")


def green_function(pair: BaseSolutionPair, x, s):
    """``G(x, s) = [phi0(s) phi1(x) - phi0(x) phi1(s)] / W`` (linear interpolation off-grid)."""
    _require_nondegenerate(pair)
    f0x, f1x = pair.phi0(x), pair.phi1(x)
    f0s, f1s = pair.phi0(s), pair.phi1(s)
    return (f0s * f1x - f0x * f1s) / pair.wronskian


def green_matrix(pair: BaseSolutionPair) -> np.ndarray:
    """``G(x_i, x_j)`` on all node pairs."""
    _require_nondegenerate(pair)
    f0, f1 = pair.phi0.values, pair.phi1.values
    return (np.outer(f1, f0) - np.outer(f0, f1)) / pair.wronskian


@dataclass(frozen=True, eq=False)
class SLBase:
    pair: BaseSolutionPair
    members: tuple

    @property
    def grid(self) -> Grid:
        return self.pair.grid

    @property
    def k_max(self) -> int:
        return len(self.members) - 1

    def __getitem__(self, k) -> SampledFunction:
        return self.members[k]

    def __len__(self):
        return len(self.members)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Members stacked row-wise, shape ``(k_max + 1, n + 1)``."""
        m = np.stack([f.values for f in self.members])
        m.setflags(write=False)
        return m


def build_slbase(pair: BaseSolutionPair, k_max: int = DEFAULT_K_MAX) -> SLBase:
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    _require_nondegenerate(pair)
    grid = pair.grid
    f0, f1 = pair.phi0.values, pair.phi1.values
    w = pair.wronskian
    vals = [f0, f1]
    for k in range(2, k_max + 1):
        prev = vals[k - 2]
        a0 = _antideriv(f0 * prev, grid)
        a1 = _antideriv(f1 * prev, grid)
        vals.append(k * (k - 1) / w * (f1 * a0 - f0 * a1))
    members = (pair.phi0, pair.phi1) + tuple(SampledFunction(grid, v) for v in vals[2:])
    return SLBase(pair, members)


def slbase_member_direct(pair: BaseSolutionPair, prev: SampledFunction, k: int) -> SampledFunction:
    """``k (k-1) int_0^x G(x, s) prev(s) ds`` by per-node trapezoid on the full
    Green matrix; the O(n^2) reference for :func:`build_slbase`."""
    grid = pair.grid
    G = green_matrix(pair)
    c, h = grid.center, grid.h
    out = np.zeros(grid.n + 1, dtype=complex)
    for i in range(grid.n + 1):
        lo, hi = sorted((i, c))
        seg = G[i, lo:hi + 1] * prev.values[lo:hi + 1]
        val = np.trapezoid(seg, dx=h) if hi > lo else 0.0
        out[i] = val if i >= c else -val
    return SampledFunction(grid, k * (k - 1) * out)


def polynomial_approx(u: SampledFunction, u0, u0p, degree: int, u_second: SampledFunction | None = None):
    """Polynomial ``P`` with ``P(0) = u0``, ``P'(0) = u0p`` and ``P''`` the
    least-squares fit of ``u''`` of degree ``degree - 2``.

    ``u''`` is taken from ``u_second`` when given, otherwise by second
    differences of ``u``.  Returns monomial coefficients (lowest first).
    """
    grid = u.grid
    if degree < 1:
        raise DomainError(f"degree must be positive, got {degree}")
    if degree > grid.n - 2:
        raise DomainError(f"degree {degree} too large for a grid with n={grid.n}")
    from numpy.polynomial import Polynomial

    if degree == 1:
        return np.array([u0, u0p], dtype=complex)
    if u_second is None:
        from .grid import second_derivative

        u_second = second_derivative(u)
    x = grid.nodes
    d2 = u_second.values
    fit_re = Polynomial.fit(x, d2.real, degree - 2).convert()
    fit_im = Polynomial.fit(x, d2.imag, degree - 2).convert()
    coef = np.zeros(degree + 1, dtype=complex)
    c2 = np.zeros(degree - 1, dtype=complex)
    c2[:len(fit_re.coef)] += fit_re.coef
    c2[:len(fit_im.coef)] += 1j * fit_im.coef
    k = np.arange(degree - 1)
    coef[0], coef[1] = u0, u0p
    coef[2:] = c2 / ((k + 1) * (k + 2))
    return coef


# ---------------------------------------------------------------------------
# CSV I/O

def write_slbase(base: SLBase, path) -> Path:
    """One ``phi<k>_re, phi<k>_im`` column pair per member; returns the ``.meta`` path."""
    path = Path(path)
    cols = ["x"] + [f"phi{k}_{part}" for k in range(len(base)) for part in ("re", "im")]
    data = np.column_stack([base.grid.nodes] + [
        part for m in base.members for part in (m.values.real, m.values.imag)])
    with path.open("w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for row in data:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    meta = path.with_suffix(".meta")
    p0, d0, p1, d1 = base.pair.init_data
    w = base.pair.wronskian
    meta.write_text(
        f"a = {fmt(base.grid.a)}\nn = {base.grid.n}\nk_max = {base.k_max}\n"
        f"init_data = {_cfmt(p0)}, {_cfmt(d0)}, {_cfmt(p1)}, {_cfmt(d1)}\n"
        f"wronskian = {_cfmt(w)}\n")
    return meta


def _cfmt(z) -> str:
    z = complex(z)
    return f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}j"
