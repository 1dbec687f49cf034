"""Goursat kernel of the transmutation operator.

``H(u, v)`` solves

    H(u, v) = 1/2 int_0^u q  +  int_0^u int_0^v q(alpha + beta) H(alpha, beta) dbeta dalpha

on the diamond ``|u| + |v| <= a``.  It is computed by summing successive
approximations on a tensor grid that shares its nodes with the x-grid, so
``q(alpha + beta)`` is always read at a node.  The kernel of the Volterra
operator is ``K(x, t) = H((x + t)/2, (x - t)/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import DomainError, TransmutationError, TruncationError
from .grid import Grid, SampledFunction, cumulative_integral, fmt, l1_norm

DEFAULT_TOL = 1e-12
DEFAULT_N_MAX = 60


def factorial_bound(q_l1: float, a: float, m: int) -> float:
    """``||q||_1 (a ||q||_1)^m / m!``, the a-priori size of the m-th term."""
    if q_l1 == 0.0:
        return 0.0
    return q_l1 * math.exp(m * math.log(a * q_l1) - math.lgamma(m + 1))


def diamond_mask(grid: Grid) -> np.ndarray:
    c = grid.center
    i = np.abs(np.arange(grid.n + 1) - c)
    return (i[:, None] + i[None, :]) <= c


@dataclass(frozen=True, eq=False)
class GoursatKernel:
    """Solved ``H`` on the ``(u, v)`` grid (row index u, column index v).

    ``h_values`` is zero outside the diamond.  ``term_norms[m]`` is the sup
    norm of the m-th successive approximation.
    """

    grid: Grid
    h_values: np.ndarray
    iterations: int
    tail_bound: float
    q_l1: float
    term_norms: tuple = field(default=())

    @property
    def a(self) -> float:
        return self.grid.a

    @cached_property
    def mask(self) -> np.ndarray:
        return diamond_mask(self.grid)

    @cached_property
    def xt_matrix(self) -> np.ndarray:
        """``K(x_i, t_j)`` on the full square of x-grid nodes.

        Where ``i + j`` is even the point is a (u, v) node.  Otherwise it is a
        cell centre: the mean of the four corners, or, on the outer edge of the
        diamond, the mean of the two corners on that edge.
        """
        n, c, H = self.grid.n, self.grid.center, self.h_values
        i = np.arange(n + 1)[:, None]
        j = np.arange(n + 1)[None, :]
        out = np.empty((n + 1, n + 1), dtype=complex)

        even = (i + j) % 2 == 0
        ii, jj = np.broadcast_arrays(i, j)
        ie, je = ii[even], jj[even]
        out[even] = H[(ie + je) // 2, c + (ie - je) // 2]

        io, jo = ii[~even], jj[~even]
        p = (io + jo - 1) // 2
        r = c + (io - jo - 1) // 2
        f00, f10 = H[p, r], H[p + 1, r]
        f01, f11 = H[p, r + 1], H[p + 1, r + 1]
        val = 0.25 * (f00 + f10 + f01 + f11)
        on_x_edge = (io == 0) | (io == n)
        on_t_edge = (jo == 0) | (jo == n)
        val = np.where(on_x_edge, 0.5 * (f10 + f01), val)
        val = np.where(on_t_edge, 0.5 * (f00 + f11), val)
        out[~even] = val
        out.setflags(write=False)
        return out

    def diagonal(self) -> SampledFunction:
        """``K(x, x) = H(x, 0)``."""
        return SampledFunction(self.grid, self.h_values[:, self.grid.center])

    def antidiagonal(self) -> SampledFunction:
        """``K(x, -x) = H(0, x)``."""
        return SampledFunction(self.grid, self.h_values[self.grid.center, :])

    def sup(self) -> float:
        return float(np.max(np.abs(self.h_values)))


def build_kernel(q: SampledFunction, tol: float = DEFAULT_TOL, n_max: int = DEFAULT_N_MAX) -> GoursatKernel:
    """Sum successive approximations until the last term and the factorial
    tail bound are both ``<= tol``.

    Raises :class:`TruncationError` (with ``partial`` set to the kernel built
    so far and ``tail`` to the factorial tail bound) if ``n_max`` terms do
    not suffice.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max!r}")
    grid = q.grid
    n, c, h, a = grid.n, grid.center, grid.h, grid.a
    mask = diamond_mask(grid)

    # q(alpha + beta) on the (u, v) grid: node index i + j - c of the x-grid
    s = np.arange(n + 1)[:, None] + np.arange(n + 1)[None, :] - c
    inside = (s >= 0) & (s <= n)
    qsum = np.zeros((n + 1, n + 1), dtype=complex)
    qsum[inside] = q.values[s[inside]]

    q_l1 = l1_norm(q)
    half_int = 0.5 * cumulative_integral(q).values
    term = np.where(mask, half_int[:, None], 0.0).astype(complex)
    total = term.copy()
    norms = [float(np.max(np.abs(term)))]
    _check_term(norms[0], q_l1, a, 0)

    m = 0
    while True:
        tail = factorial_bound(q_l1, a, m + 1)
        if norms[-1] <= tol and tail <= tol:
            break
        if m + 1 >= n_max:
            partial = GoursatKernel(grid, total, m + 1, tail, q_l1, tuple(norms))
            raise TruncationError(
                f"kernel series truncated at {m + 1} terms: last term {norms[-1]:.3e}, "
                f"tail bound {tail:.3e} > tol {tol:.1e}", tail=tail, partial=partial)
        term = _kernels.goursat_term(qsum, term, mask, h, c)
        m += 1
        total += term
        norms.append(float(np.max(np.abs(term))))
        _check_term(norms[-1], q_l1, a, m)

    total.setflags(write=False)
    return GoursatKernel(grid, total, m + 1, factorial_bound(q_l1, a, m + 1), q_l1, tuple(norms))


def _check_term(norm, q_l1, a, m):
    bound = factorial_bound(q_l1, a, m)
    if norm > bound * (1.0 + 1e-9) + 1e-300:
        raise TransmutationError(
            f"successive approximation {m} has sup norm {norm:.6e} above its factorial bound {bound:.6e}")


# ---------------------------------------------------------------------------
# point evaluation

def _interp_uv(K: GoursatKernel, u: float, v: float) -> complex:
    """Bilinear on interior cells; linear on the inner triangle of cells cut
    by the diamond edge (the outer corner is not part of the solution)."""
    grid = K.grid
    n, h, a = grid.n, grid.h, grid.a
    su = min(max((u + a) / h, 0.0), float(n))
    sv = min(max((v + a) / h, 0.0), float(n))
    p = min(int(math.floor(su)), n - 1)
    r = min(int(math.floor(sv)), n - 1)
    du, dv = su - p, sv - r
    H, mask = K.h_values, K.mask
    corners = [(0, 0), (1, 0), (0, 1), (1, 1)]
    outside = [cr for cr in corners if not mask[p + cr[0], r + cr[1]]]
    if not outside:
        return complex(H[p, r] * (1 - du) * (1 - dv) + H[p + 1, r] * du * (1 - dv)
                       + H[p, r + 1] * (1 - du) * dv + H[p + 1, r + 1] * du * dv)
    if len(outside) > 1:
        raise DomainError(f"(u, v) = ({u}, {v}) lies outside the kernel domain")
    # linear interpolation on the three inside corners
    pts = [cr for cr in corners if cr not in outside]
    A = np.array([[1.0, cu, cv] for cu, cv in pts])
    coef = np.linalg.solve(A, np.array([H[p + cu, r + cv] for cu, cv in pts]))
    return complex(coef[0] + coef[1] * du + coef[2] * dv)


def kernel_at(K: GoursatKernel, x: float, t: float) -> complex:
    """``K(x, t)`` for ``|t| <= |x| <= a``."""
    a = K.a
    slack = 1e-12 * a
    if abs(x) > a + slack or abs(t) > abs(x) + slack:
        raise DomainError(f"(x, t) = ({x}, {t}) outside the support triangle |t| <= |x| <= {a}")
    return _interp_uv(K, 0.5 * (x + t), 0.5 * (x - t))


# ---------------------------------------------------------------------------
# verification

def _check_grid(K: GoursatKernel, q: SampledFunction):
    if K.grid != q.grid:
        raise DomainError(f"kernel grid {K.grid} does not match potential grid {q.grid}")


def verify_goursat_bc(K: GoursatKernel, q: SampledFunction) -> tuple[float, float]:
    """Max residuals of ``K(x,x) = 1/2 int_0^x q`` and ``K(x,-x) = 0`` over nodes."""
    _check_grid(K, q)
    ref = 0.5 * cumulative_integral(q).values
    diag = float(np.max(np.abs(K.diagonal().values - ref)))
    anti = float(np.max(np.abs(K.antidiagonal().values)))
    return diag, anti


def bump_family(a: float, size: int):
    """Deterministic (x0, t0, b) centres/radii of bumps supported inside the square."""
    out = []
    for k in range(size):
        b = a * (0.5 if k == 0 else 0.22 + 0.2 * ((k * 0.6180339887) % 1.0))
        room = 0.95 * (a - b)
        x0 = 0.0 if k == 0 else room * (2.0 * ((k * 0.7548776662) % 1.0) - 1.0)
        t0 = 0.0 if k == 0 else room * (2.0 * ((k * 0.5698402910) % 1.0) - 1.0)
        out.append((x0, t0, b))
    return out


def _bump(z, z0, b):
    s = (z - z0) / b
    inside = np.abs(s) < 1.0
    w = np.where(inside, 1.0 - s * s, 0.0)
    return w**3, np.where(inside, -6.0 * s * w**2 / b, 0.0)


def verify_weak_goursat(K: GoursatKernel, q: SampledFunction, test_family_size: int = 5) -> float:
    """Largest normalised weak-form residual of ``K_xx - q K = K_tt``.

    For each bump ``phi`` the residual is
    ``|int int K_t phi_t - K_x phi_x - q K phi| / ||phi||_{W^{1,1}}``.
    """
    _check_grid(K, q)
    grid = K.grid
    h, x = grid.h, grid.nodes
    km = K.xt_matrix
    k_x, k_t = np.gradient(km, h, edge_order=2)
    qx = q.values[:, None]
    worst = 0.0
    for x0, t0, b in bump_family(grid.a, test_family_size):
        px, dpx = _bump(x, x0, b)
        pt, dpt = _bump(x, t0, b)
        phi = px[:, None] * pt[None, :]
        phi_x = dpx[:, None] * pt[None, :]
        phi_t = px[:, None] * dpt[None, :]
        integrand = k_t * phi_t - k_x * phi_x - qx * km * phi
        val = np.trapezoid(np.trapezoid(integrand, dx=h, axis=1), dx=h)
        norm = np.trapezoid(np.trapezoid(np.abs(phi) + np.abs(phi_x) + np.abs(phi_t), dx=h, axis=1), dx=h)
        worst = max(worst, abs(val) / norm)
    return float(worst)


def kernel_distance(K1: GoursatKernel, K2: GoursatKernel) -> float:
    """Sup norm of ``H1 - H2`` over the diamond nodes."""
    if K1.grid != K2.grid:
        raise DomainError(f"kernel grids differ: {K1.grid} vs {K2.grid}")
    return float(np.max(np.abs(K1.h_values - K2.h_values)[K1.mask]))


def stability_bound(K: GoursatKernel, dq_l1: float, q_tilde_l1: float) -> float:
    """``(1/2 + a sup|H|) ||q~ - q||_1 exp(a ||q~||_1)`` for a perturbed potential q~."""
    a = K.a
    return (0.5 + a * K.sup()) * dq_l1 * math.exp(a * q_tilde_l1)


def coarsen_kernel(K: GoursatKernel, n: int) -> GoursatKernel:
    """Restrict a kernel to the nested coarser grid with ``n`` cells."""
    if n <= 0 or K.grid.n % n:
        raise DomainError(f"grid with n={K.grid.n} does not nest a grid with n={n}")
    step = K.grid.n // n
    grid = Grid(K.grid.a, n)
    if grid.n % 2:
        raise DomainError("coarse grid must have an even number of cells")
    H = np.array(K.h_values[::step, ::step])
    H.setflags(write=False)
    return replace(K, grid=grid, h_values=H)


# ---------------------------------------------------------------------------
# CSV I/O

def write_kernel(K: GoursatKernel, path) -> Path:
    """Write ``u,v,H_re,H_im`` for diamond nodes plus a ``.meta`` sidecar; returns the sidecar path."""
    path = Path(path)
    x = K.grid.nodes
    iu, iv = np.nonzero(K.mask)
    with path.open("w", newline="") as fh:
        fh.write("u,v,H_re,H_im\n")
        for i, j in zip(iu, iv):
            val = K.h_values[i, j]
            fh.write(f"{fmt(x[i])},{fmt(x[j])},{fmt(val.real)},{fmt(val.imag)}\n")
    meta = path.with_suffix(".meta")
    meta.write_text(
        f"a = {fmt(K.a)}\nn = {K.grid.n}\niterations = {K.iterations}\n"
        f"tail_bound = {fmt(K.tail_bound)}\nq_l1 = {fmt(K.q_l1)}\n")
    return meta


def read_kernel(path) -> GoursatKernel:
    from .config import parse_key_values

    path = Path(path)
    meta = parse_key_values(path.with_suffix(".meta").read_text())
    grid = Grid(float(meta["a"]), int(meta["n"]))
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    H = np.zeros((grid.n + 1, grid.n + 1), dtype=complex)
    iu = np.rint((data[:, 0] + grid.a) / grid.h).astype(int)
    iv = np.rint((data[:, 1] + grid.a) / grid.h).astype(int)
    H[iu, iv] = data[:, 2] + 1j * data[:, 3]
    H.setflags(write=False)
    return GoursatKernel(grid, H, int(meta["iterations"]), float(meta["tail_bound"]), float(meta["q_l1"]))


def _transposed(K: GoursatKernel) -> np.ndarray:
    """``K(t_j, x_i)`` laid out by row ``i``, contiguous for the row kernels."""
    cached = K.__dict__.get("_xt_transposed")
    if cached is None:
        cached = np.ascontiguousarray(K.xt_matrix.T)
        cached.setflags(write=False)
        K.__dict__["_xt_transposed"] = cached
    return cached
