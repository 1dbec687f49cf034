"""The transmutation operator, its inverse and transpose, and the
four-operator family ``T P+``, ``T A P+``, ``T d/dx P-``, ``T P-``.

A general standard transmutation is ``T S`` with

    S u = c_plus P+ u + c_a A P+ u + c_d (d/dx) P- u + c_minus P- u,

so every operator here applies ``S`` (cheap, O(n)) and then ``T`` once.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateError, DomainError, PreconditionError
from .grid import SampledFunction, cumulative_integral, derivative
from .kernel import GoursatKernel, _transposed
from .lbase import BaseSolutionPair, wronskian

DET_TOL = 1e-12
FUNDAMENTAL = ("TP+", "TP-", "TAP+", "TDP-")


@dataclass(frozen=True)
class TransmutationSpec:
    """Coefficients of ``T P+``, ``T A P+``, ``T d/dx P-`` and ``T P-``."""

    c_plus: complex = 1.0
    c_a: complex = 0.0
    c_d: complex = 0.0
    c_minus: complex = 1.0

    def __post_init__(self):
        for name in ("c_plus", "c_a", "c_d", "c_minus"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_pair(cls, pair: BaseSolutionPair) -> "TransmutationSpec":
        """``(phi0(0), phi0'(0), phi1(0), phi1'(0))`` of the pair."""
        return cls(*pair.init_data)

    def as_tuple(self):
        return (self.c_plus, self.c_a, self.c_d, self.c_minus)

    @property
    def determinant(self) -> complex:
        return self.c_plus * self.c_minus - self.c_a * self.c_d

    @property
    def invertible(self) -> bool:
        return abs(self.determinant) > DET_TOL


# ---------------------------------------------------------------------------
# projectors

def project_even(u: SampledFunction) -> SampledFunction:
    return SampledFunction(u.grid, 0.5 * (u.values + u.values[::-1]))


def project_odd(u: SampledFunction) -> SampledFunction:
    return SampledFunction(u.grid, 0.5 * (u.values - u.values[::-1]))


# ---------------------------------------------------------------------------
# the Volterra operator

def _check(K: GoursatKernel, u: SampledFunction):
    if K.grid != u.grid:
        raise DomainError(f"function grid {u.grid} does not match kernel grid {K.grid}")


def _symmetric_window(grid):
    # nodes t with |t| <= |x_i|, oriented: int_{-x}^{x} = -int_{x}^{-x} for x < 0
    i = np.arange(grid.n + 1)
    lo = np.minimum(i, grid.n - i)
    hi = np.maximum(i, grid.n - i)
    sign = np.where(i >= grid.center, 1.0, -1.0)
    return lo, hi, sign


def apply_T(K: GoursatKernel, u: SampledFunction) -> SampledFunction:
    """``T u(x) = u(x) + int_{-x}^{x} K(x, t) u(t) dt``."""
    _check(K, u)
    lo, hi, sign = _symmetric_window(u.grid)
    integral = _kernels.trapezoid_rows(K.xt_matrix, u.values, lo, hi, u.grid.h)
    return SampledFunction(u.grid, u.values + sign * integral)


def apply_T_inverse(K: GoursatKernel, u: SampledFunction) -> SampledFunction:
    """``T^{-1} u(x) = u(x) - int_{-x}^{x} K(t, x) u(t) dt``."""
    _check(K, u)
    lo, hi, sign = _symmetric_window(u.grid)
    integral = _kernels.trapezoid_rows(_transposed(K), u.values, lo, hi, u.grid.h)
    return SampledFunction(u.grid, u.values - sign * integral)


def apply_T_transpose(K: GoursatKernel, psi: SampledFunction, support_tol: float = 1e-14) -> SampledFunction:
    """``psi(x) - int_{-a}^{-|x|} K(t, x) psi(t) dt + int_{|x|}^{a} K(t, x) psi(t) dt``.

    ``psi`` must vanish (below ``support_tol``) on the two outermost nodes at
    each end; the formula is only the transpose for compactly supported
    ``psi``.
    """
    _check(K, psi)
    v = psi.values
    edge = np.abs(np.concatenate([v[:2], v[-2:]]))
    if np.any(edge >= support_tol):
        raise PreconditionError("psi must vanish near both endpoints (compact support inside (-a, a))")
    grid = psi.grid
    n = grid.n
    i = np.arange(n + 1)
    inner = np.minimum(i, n - i)
    outer = np.maximum(i, n - i)
    kt = _transposed(K)
    left = _kernels.trapezoid_rows(kt, v, np.zeros_like(i), inner, grid.h)
    right = _kernels.trapezoid_rows(kt, v, outer, np.full_like(i, n), grid.h)
    return SampledFunction(grid, v - left + right)


# ---------------------------------------------------------------------------
# the fundamental family and its combinations

def _pre(which: str, u: SampledFunction) -> SampledFunction:
    if which == "TP+":
        return project_even(u)
    if which == "TP-":
        return project_odd(u)
    if which == "TAP+":
        return cumulative_integral(project_even(u))
    if which == "TDP-":
        return derivative(project_odd(u))
    raise DomainError(f"unknown fundamental operator {which!r}; expected one of {FUNDAMENTAL}")


def fundamental_apply(which: str, K: GoursatKernel, u: SampledFunction) -> SampledFunction:
    """One of ``TP+``, ``TP-``, ``TAP+`` (``T A P+``) or ``TDP-`` (``T d/dx P-``)."""
    return apply_T(K, _pre(which, u))


def combine(spec: TransmutationSpec, u: SampledFunction) -> SampledFunction:
    """The operator ``S`` in front of ``T``: ``T_spec = T S``."""
    even, odd = project_even(u), project_odd(u)
    out = spec.c_plus * even + spec.c_minus * odd
    if spec.c_a != 0:
        out = out + spec.c_a * cumulative_integral(even)
    if spec.c_d != 0:
        out = out + spec.c_d * derivative(odd)
    return out


def general_apply(spec: TransmutationSpec, K: GoursatKernel, u: SampledFunction) -> SampledFunction:
    _check(K, u)
    return apply_T(K, combine(spec, u))


def general_inverse_apply(spec: TransmutationSpec, K: GoursatKernel, u: SampledFunction) -> SampledFunction:
    """``(1/W)[c_minus P+ - c_a A P+ - c_d d/dx P- + c_plus P-] T^{-1} u`` with
    ``W = c_plus c_minus - c_a c_d``."""
    if not spec.invertible:
        raise DegenerateError(f"transmutation spec is not invertible (determinant {spec.determinant!r})")
    w = apply_T_inverse(K, u)
    even, odd = project_even(w), project_odd(w)
    out = spec.c_minus * even + spec.c_plus * odd
    if spec.c_a != 0:
        out = out - spec.c_a * cumulative_integral(even)
    if spec.c_d != 0:
        out = out - spec.c_d * derivative(odd)
    return out / spec.determinant


def _w0(f_data, g_data):
    # Wronskian at 0 from (value, slope) pairs
    return f_data[0] * g_data[1] - f_data[1] * g_data[0]


def relate_bases(phi_pair: BaseSolutionPair, psi_pair: BaseSolutionPair,
                 drift_tol: float | None = None) -> TransmutationSpec:
    """Coefficients expressing ``T_phi`` through ``T_psi``:
    ``T_phi = T_psi S`` with ``S`` the combination returned here.

    The cross-Wronskians are taken from the initial data at 0.  Their
    discrete profiles are checked for constancy; a drift above ``drift_tol``
    (default ``100 h^2`` relative to the solution scale) triggers a
    ``RuntimeWarning``.
    """
    p0, d0, p1, d1 = phi_pair.init_data
    s0, e0, s1, e1 = psi_pair.init_data
    if psi_pair.is_degenerate():
        raise DegenerateError(f"psi pair has vanishing Wronskian {psi_pair.wronskian!r}")
    w = psi_pair.wronskian
    coef = (_w0((p0, d0), (s1, e1)) / w, -_w0((p0, d0), (s0, e0)) / w,
            _w0((p1, d1), (s1, e1)) / w, -_w0((p1, d1), (s0, e0)) / w)

    grid = phi_pair.grid
    if drift_tol is None:
        drift_tol = 100.0 * grid.h**2
    drift = cross_wronskian_drift(phi_pair, psi_pair)
    if drift > drift_tol:
        warnings.warn(f"cross-Wronskians drift by {drift:.2e} (> {drift_tol:.1e}) across the grid",
                      RuntimeWarning, stacklevel=2)
    return TransmutationSpec(*coef)


def cross_wronskian_drift(phi_pair: BaseSolutionPair, psi_pair: BaseSolutionPair) -> float:
    """Largest relative deviation of the four discrete cross-Wronskians from their value at 0."""
    c = phi_pair.grid.center
    worst = 0.0
    for f in (phi_pair.phi0, phi_pair.phi1):
        for g in (psi_pair.phi0, psi_pair.phi1):
            prof = wronskian(f, g).values
            scale = max(f.sup_norm() * g.sup_norm(), 1e-300)
            worst = max(worst, float(np.max(np.abs(prof - prof[c]))) / scale)
    return worst
