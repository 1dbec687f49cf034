"""Uniform symmetric grids on [-a, a], sampled functions and quadrature.

Every sampled quantity in the package lives on a :class:`Grid`: ``n`` even,
so that ``x = 0`` is always a node (index ``n // 2``).  Values are stored as
complex doubles.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from ._kernels import cumtrapz_center
from .errors import DomainError


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``x_i = -a + i h``, ``i = 0..n``, ``h = 2a/n``."""

    a: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise DomainError(f"grid half-width must be positive, got a={self.a!r}")
        if int(self.n) != self.n or self.n <= 0 or self.n % 2:
            raise DomainError(f"grid size must be a positive even integer, got n={self.n!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return 2.0 * self.a / self.n

    @property
    def center(self) -> int:
        """Index of the node at ``x = 0``."""
        return self.n // 2

    @cached_property
    def nodes(self) -> np.ndarray:
        # built from signed integer offsets so that x_i == -x_{n-i} bitwise
        x = (np.arange(self.n + 1) - self.center) * self.h
        x[0], x[-1] = -self.a, self.a
        x.setflags(write=False)
        return x

    def index_of(self, x: float) -> int:
        """Index of the node nearest to ``x`` (must lie within the grid)."""
        if abs(x) > self.a + 0.5 * self.h:
            raise DomainError(f"x={x!r} outside [-{self.a}, {self.a}]")
        return int(np.clip(np.rint((x + self.a) / self.h), 0, self.n))

    def sample(self, func) -> "SampledFunction":
        """Sample a vectorised callable on the nodes."""
        return SampledFunction(self, np.broadcast_to(func(self.nodes), (self.n + 1,)))

    def constant(self, value) -> "SampledFunction":
        return SampledFunction(self, np.full(self.n + 1, value, dtype=complex))

    def refine(self, factor: int = 2) -> "Grid":
        return Grid(self.a, self.n * factor)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex node values of a function on ``grid``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n + 1,):
            raise DomainError(
                f"expected {self.grid.n + 1} values for grid n={self.grid.n}, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, SampledFunction):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return SampledFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return SampledFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return SampledFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return SampledFunction(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)

    def __call__(self, x):
        return interp_linear(self, x)

    # -- convenience -------------------------------------------------------
    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def at_zero(self) -> complex:
        return complex(self.values[self.grid.center])

    def reflected(self) -> "SampledFunction":
        """``x -> f(-x)``; exact on a symmetric grid."""
        return SampledFunction(self.grid, self.values[::-1])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def check_same_grid(*funcs):
    g = funcs[0].grid
    for f in funcs[1:]:
        if f.grid != g:
            raise DomainError(f"grid mismatch: {g} vs {f.grid}")
    return g


# ---------------------------------------------------------------------------
# quadrature

def _cumsimpson_side(g, h):
    # Simpson on node pairs, 3-point quadratic rule for the odd leftover cell
    m = len(g) - 1
    out = np.zeros(m + 1, dtype=complex)
    if m == 0:
        return out
    if m == 1:
        out[1] = 0.5 * h * (g[0] + g[1])
        return out
    pairs = h / 3.0 * (g[0:m - 1:2] + 4.0 * g[1:m:2] + g[2:m + 1:2])
    out[2::2] = np.cumsum(pairs)
    out[1] = h / 12.0 * (5.0 * g[0] + 8.0 * g[1] - g[2])
    k = np.arange(3, m + 1, 2)
    out[k] = out[k - 1] + h / 12.0 * (-g[k - 2] + 8.0 * g[k - 1] + 5.0 * g[k])
    return out


def cumulative_integral(f: SampledFunction, rule: str = "trapezoid") -> SampledFunction:
    """``F(x_i) = int_0^{x_i} f`` accumulated outward from the node at 0.

    ``rule="trapezoid"`` (default) is the composite trapezoid rule: it needs
    no smoothness and is exact on piecewise-linear data.  ``rule="simpson"``
    uses composite Simpson on node pairs with a 3-point rule for an odd final
    cell; fourth order on smooth data, and still convergent (first order) when
    ``f`` jumps at a node.
    """
    grid = f.grid
    c, h = grid.center, grid.h
    if rule == "trapezoid":
        return SampledFunction(grid, cumtrapz_center(f.values, c, h))
    if rule == "simpson":
        v = f.values
        out = np.empty_like(v)
        out[c:] = _cumsimpson_side(v[c:], h)
        out[:c + 1] = _cumsimpson_side(v[c::-1], -h)[::-1]
        return SampledFunction(grid, out)
    raise DomainError(f"unknown quadrature rule {rule!r}")


def integrate(f: SampledFunction) -> complex:
    """Trapezoid integral over the whole interval."""
    return complex(np.trapezoid(f.values, dx=f.grid.h))


def l1_norm(f: SampledFunction) -> float:
    return float(np.trapezoid(np.abs(f.values), dx=f.grid.h))


def l2_norm(f: SampledFunction) -> float:
    return float(np.sqrt(np.trapezoid(np.abs(f.values) ** 2, dx=f.grid.h)))


def pairing(f: SampledFunction, g: SampledFunction) -> complex:
    """Bilinear pairing ``int f g dx`` (no conjugation), trapezoid rule."""
    check_same_grid(f, g)
    return complex(np.trapezoid(f.values * g.values, dx=f.grid.h))


# ---------------------------------------------------------------------------
# interpolation and differences

def interp_linear(f: SampledFunction, x):
    """Piecewise-linear interpolation; exact at nodes.

    ``x`` may overshoot the interval by at most ``h/2`` (rounding slack);
    such points are clamped to the endpoint.
    """
    grid = f.grid
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > grid.a + 0.5 * grid.h):
        raise DomainError(f"interpolation point outside [-{grid.a}, {grid.a}] (+h/2 slack)")
    xa = np.clip(xa, -grid.a, grid.a)
    xs = grid.nodes
    out = np.interp(xa, xs, f.values.real) + 1j * np.interp(xa, xs, f.values.imag)
    return complex(out) if out.ndim == 0 else out


def derivative(f: SampledFunction) -> SampledFunction:
    """Central differences inside, second-order one-sided stencils at the ends."""
    return SampledFunction(f.grid, np.gradient(f.values, f.grid.h, edge_order=2))


def second_derivative(f: SampledFunction) -> SampledFunction:
    """Three-point second difference; four-point one-sided stencils at the ends."""
    v, h = f.values, f.grid.h
    if len(v) < 4:
        raise DomainError("second_derivative needs at least 4 nodes")
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h**2
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h**2
    return SampledFunction(f.grid, out)


# ---------------------------------------------------------------------------
# CSV I/O

def fmt(value: float) -> str:
    """Shortest round-trip decimal for a double."""
    return repr(float(value))


def write_csv(f: SampledFunction, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("x,value_re,value_im\n")
        for x, v in zip(f.grid.nodes, f.values):
            fh.write(f"{fmt(x)},{fmt(v.real)},{fmt(v.imag)}\n")


def grid_from_nodes(x) -> Grid:
    x = np.asarray(x, dtype=float)
    n = len(x) - 1
    if n < 2 or n % 2 or not np.isclose(x[0], -x[-1]):
        raise DomainError("CSV x column is not a symmetric grid with an even number of cells")
    grid = Grid(float(x[-1]), n)
    if not np.allclose(x, grid.nodes, rtol=0, atol=1e-9 * max(1.0, grid.a)):
        raise DomainError("CSV x column is not uniformly spaced")
    return grid


def read_csv(path, grid: Grid | None = None) -> SampledFunction:
    """Read a function written by :func:`write_csv` (imaginary column optional)."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty CSV")
    body = [r for r in rows[1:] if r]
    data = np.array([[float(c) for c in r] for r in body])
    if data.ndim != 2 or data.shape[1] not in (2, 3):
        raise DomainError(f"{path}: expected columns x,value_re[,value_im]")
    file_grid = grid_from_nodes(data[:, 0])
    if grid is not None and grid != file_grid:
        raise DomainError(f"{path}: grid {file_grid} does not match {grid}")
    values = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    return SampledFunction(file_grid, values)
