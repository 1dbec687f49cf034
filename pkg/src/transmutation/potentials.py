"""Sampled potentials and the textual descriptors used by the CLI.

A jump located exactly at a node takes the mean of the one-sided limits.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import DomainError
from .grid import Grid, SampledFunction


def zero(grid: Grid) -> SampledFunction:
    return grid.constant(0.0)


def constant(grid: Grid, value) -> SampledFunction:
    return grid.constant(value)


def step(grid: Grid, value=1.0, jump_at: float = 0.0) -> SampledFunction:
    """``value`` for ``x > jump_at`` and 0 for ``x < jump_at``."""
    x = grid.nodes
    v = np.where(x > jump_at, 1.0, 0.0)
    v[np.isclose(x, jump_at, rtol=0.0, atol=1e-12 * grid.a)] = 0.5
    return SampledFunction(grid, value * v)


def polynomial(grid: Grid, coeffs) -> SampledFunction:
    """``sum_k coeffs[k] x**k``."""
    return SampledFunction(grid, np.polynomial.polynomial.polyval(grid.nodes, np.asarray(coeffs, dtype=complex)))


def smoothed_step(grid: Grid, width: float, value=1.0, jump_at: float = 0.0) -> SampledFunction:
    """Step mollified over ``[jump_at - width/2, jump_at + width/2]``.

    Uses the C^1 cubic smoothstep, which is symmetric about the jump, so the
    mean-at-jump convention of :func:`step` is matched at ``jump_at``.
    """
    s = np.clip((grid.nodes - jump_at) / width + 0.5, 0.0, 1.0)
    return SampledFunction(grid, value * s * s * (3.0 - 2.0 * s))


def from_csv(grid: Grid, path) -> SampledFunction:
    """Linear resampling of a two- or three-column ``x,re[,im]`` table."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]])
    except ValueError as exc:
        raise DomainError(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[1] not in (2, 3) or len(data) < 2:
        raise DomainError(f"{path}: expected columns x,value_re[,value_im]")
    order = np.argsort(data[:, 0])
    data = data[order]
    slack = 1e-9 * grid.a
    if data[0, 0] > -grid.a + slack or data[-1, 0] < grid.a - slack:
        raise DomainError(f"{path}: potential table does not cover [-{grid.a}, {grid.a}]")
    x = grid.nodes
    re = np.interp(x, data[:, 0], data[:, 1])
    im = np.interp(x, data[:, 0], data[:, 2]) if data.shape[1] == 3 else 0.0
    return SampledFunction(grid, re + 1j * im)


def parse_descriptor(grid: Grid, text: str) -> SampledFunction:
    """Build a potential from ``zero``, ``const:v``, ``step:v:loc``, ``poly:c0,c1,..`` or ``csv:path``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "zero" and not rest:
            return zero(grid)
        if kind == "const":
            return constant(grid, complex(rest))
        if kind == "step":
            value, _, loc = rest.partition(":")
            return step(grid, complex(value), float(loc) if loc else 0.0)
        if kind == "poly":
            return polynomial(grid, [complex(c) for c in rest.split(",")])
        if kind == "csv" and rest:
            return from_csv(grid, rest)
    except ValueError as exc:
        raise DomainError(f"potential: cannot parse {text!r} ({exc})") from exc
    raise DomainError(f"potential: unknown descriptor {text!r}")
