"""Self-consistency checks for one potential, as run by ``transmute verify``.

Each check reports a value, the threshold it must not exceed and whether it
passed.  Thresholds are fixed here, not derived from the run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (SampledFunction, cumulative_integral, derivative, l1_norm, l2_norm, pairing,
                   second_derivative)
from .kernel import GoursatKernel, build_kernel, factorial_bound, verify_goursat_bc, verify_weak_goursat
from .lbase import build_slbase, canonical_pair
from .operator import (TransmutationSpec, apply_T, apply_T_inverse, apply_T_transpose,
                       general_apply, general_inverse_apply, project_even, project_odd)
from .spps import required_k_max, spps_solve


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.threshold)


def _powers(grid, k):
    return SampledFunction(grid, grid.nodes.astype(complex) ** k)


def bump(grid, center, radius):
    s = (grid.nodes - center) / radius
    return SampledFunction(grid, np.where(np.abs(s) < 1, (1 - s * s) ** 3, 0.0))


def run_checks(q: SampledFunction, kernel: GoursatKernel | None = None, *, spec=(1, 0, 0, 1),
               lambdas=(1.0,), k_max: int = 30, family_size: int = 5, kernel_tol: float = 1e-12,
               kernel_n_max: int = 60) -> list[Check]:
    grid = q.grid
    h, a = grid.h, grid.a
    K = kernel if kernel is not None else build_kernel(q, kernel_tol, kernel_n_max)
    checks = []

    diag, anti = verify_goursat_bc(K, q)
    checks.append(Check("goursat_bc_diagonal", diag, 1e-6))
    checks.append(Check("goursat_bc_antidiagonal", anti, 1e-6))
    checks.append(Check("weak_goursat_residual", verify_weak_goursat(K, q, family_size), 5e-3))
    bound = K.q_l1 * math.exp(a * K.q_l1)
    checks.append(Check("kernel_bound_excess", max(0.0, K.sup() - bound), 0.0))
    excess = max(max(0.0, nm - factorial_bound(K.q_l1, a, m)) for m, nm in enumerate(K.term_norms))
    checks.append(Check("factorial_term_excess", excess, 0.0))

    pair = canonical_pair(q)
    wprof = pair.wronskian_profile().values
    checks.append(Check("wronskian_drift", float(np.max(np.abs(wprof - 1.0))), 1e-4))

    need = max(k_max, 8, max(required_k_max(abs(complex(l)), a) for l in lambdas))
    base = build_slbase(pair, need)
    c = grid.center
    init = max(max(abs(base[k].values[c]), abs(derivative(base[k]).values[c])) for k in range(2, need + 1))
    # central differences at 0 carry an O(h^2) truncation error
    checks.append(Check("slbase_initial_values", float(init), 10 * h * h))
    cross = max(np.max(np.abs(base[k].values - apply_T(K, _powers(grid, k)).values)) for k in range(9))
    checks.append(Check("slbase_vs_T_powers", float(cross), 0.25 * h))

    u6 = _powers(grid, 6)
    Tu = apply_T(K, u6)
    resid = second_derivative(Tu) - q * Tu - apply_T(K, 30 * _powers(grid, 4))
    checks.append(Check("transmutation_residual_rel", l1_norm(resid) / l1_norm(apply_T(K, 30 * _powers(grid, 4))), 1e-3))

    rt = max(np.max(np.abs(apply_T_inverse(K, apply_T(K, _powers(grid, d))).values - _powers(grid, d).values))
             for d in range(6))
    checks.append(Check("inverse_round_trip", float(rt), 1e-4))

    dual = 0.0
    for j, (x0, r) in enumerate([(0.0, 0.5), (0.3, 0.4), (-0.2, 0.6), (0.5, 0.3), (-0.45, 0.35)]):
        psi = bump(grid, x0 * a, r * a)
        u = SampledFunction(grid, np.cos((j + 1) * grid.nodes) + grid.nodes ** j)
        lhs = pairing(apply_T(K, u), psi)
        rhs = pairing(u, apply_T_transpose(K, psi))
        dual = max(dual, abs(lhs - rhs) / (l2_norm(u) * l2_norm(psi)))
    checks.append(Check("transpose_duality_rel", dual, 1e-5))

    u = _powers(grid, 3) + 1.0
    proj = max(np.max(np.abs(project_even(project_even(u)).values - project_even(u).values)),
               np.max(np.abs(project_odd(project_odd(u)).values - project_odd(u).values)),
               np.max(np.abs(project_even(project_odd(u)).values)),
               np.max(np.abs((project_even(u) + project_odd(u)).values - u.values)))
    checks.append(Check("projector_algebra", float(proj), 1e-14 * max(1.0, u.sup_norm())))

    tspec = TransmutationSpec(*spec)
    if tspec.invertible:
        u4 = _powers(grid, 4)
        back = general_inverse_apply(tspec, K, general_apply(tspec, K, u4))
        checks.append(Check("spec_round_trip", float(np.max(np.abs(back.values - u4.values))), 1e-4))

    for lam in lambdas:
        sol = spps_solve(base, lam)
        d1, d2 = derivative(sol.v1).values[c], derivative(sol.v2).values[c]
        w0 = sol.v1.values[c] * d2 - d1 * sol.v2.values[c]
        checks.append(Check(f"spps_wronskian_at_0[lambda={complex(lam):g}]", float(abs(w0 - 1.0)), 10 * h * h))
        r = second_derivative(sol.v1) - q * sol.v1 - lam * sol.v1
        scale = max(l1_norm(sol.v1), 1.0)
        checks.append(Check(f"spps_ode_residual_rel[lambda={complex(lam):g}]", l1_norm(r) / scale, 1e-3))
    return checks


def format_table(checks) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'value':>12}  {'threshold':>12}  result"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {c.value:>12.4e}  {c.threshold:>12.4e}  {'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
