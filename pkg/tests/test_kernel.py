import math

import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid
from scipy.special import iv, jv

from conftest import kernel_for, potential
from transmutation import potentials as P
from transmutation.errors import DomainError, TruncationError
from transmutation.grid import Grid, l1_norm
from transmutation.kernel import (build_kernel, coarsen_kernel, factorial_bound, kernel_at,
                                  kernel_distance, read_kernel, stability_bound, verify_goursat_bc,
                                  verify_weak_goursat, write_kernel)


def fine_series_oracle(u, v, h):
    """Successive approximations for q = 1 on a private grid over [0,u] x [0,v]."""
    uu = np.linspace(0.0, u, int(round(u / h)) + 1)
    vv = np.linspace(0.0, v, int(round(v / h)) + 1)
    term = np.broadcast_to(0.5 * uu[:, None], (uu.size, vv.size)).copy()
    total = term.copy()
    for _ in range(40):
        term = cumulative_trapezoid(cumulative_trapezoid(term, uu, axis=0, initial=0), vv, axis=1, initial=0)
        total += term
        if np.max(np.abs(term)) < 1e-16:
            break
    return total[-1, -1]


def bessel_h(u, v):
    p = u * v
    if p == 0:
        return u / 2
    z = math.sqrt(abs(p))
    return u / 2 * (iv(1, 2 * z) if p > 0 else jv(1, 2 * z)) / z


class TestBuildKernel:
    def test_zero_potential(self):
        K = kernel_for("zero", 100)
        assert K.iterations == 1
        assert np.all(K.h_values == 0)

    def test_constant_first_row(self, grid1000):
        K = kernel_for("one", 1000)
        np.testing.assert_allclose(K.diagonal().values.real, grid1000.nodes / 2, atol=1e-14)

    def test_constant_bound(self):
        K = kernel_for("one", 1000)
        assert K.sup() <= 2 * math.e**2

    def test_value_vs_fine_oracle(self):
        K = kernel_for("one", 1000)
        ours = K.h_values[K.grid.index_of(0.5), K.grid.index_of(0.25)]
        oracle = fine_series_oracle(0.5, 0.25, K.grid.h / 4)
        assert abs(ours - oracle) <= 5e-4
        assert abs(oracle - bessel_h(0.5, 0.25)) <= 1e-7

    @pytest.mark.parametrize("u, v", [(0.25, 0.25), (-0.3, 0.6), (0.7, -0.2), (-0.4, -0.5)])
    def test_closed_form_constant_potential(self, u, v):
        K = kernel_for("one", 1000)
        g = K.grid
        assert abs(K.h_values[g.index_of(u), g.index_of(v)] - bessel_h(u, v)) <= 1e-6

    def test_tail_bound_recorded(self):
        K = kernel_for("one", 1000)
        assert K.tail_bound <= 1e-12
        assert K.tail_bound == pytest.approx(factorial_bound(K.q_l1, 1.0, K.iterations))

    def test_term_norms_below_factorial_bound(self):
        for name in ("one", "step", "x2"):
            K = kernel_for(name, 1000)
            for m, nm in enumerate(K.term_norms):
                assert nm <= factorial_bound(K.q_l1, 1.0, m)

    def test_truncation_carries_partial(self):
        q = potential("one", 100)
        with pytest.raises(TruncationError) as info:
            build_kernel(q, n_max=3)
        assert info.value.tail > 1e-12
        assert info.value.partial is not None

    def test_odd_grid_rejected(self):
        with pytest.raises(DomainError):
            Grid(1.0, 101)

    def test_zero_outside_diamond(self):
        K = kernel_for("one", 100)
        assert np.all(K.h_values[~K.mask] == 0)


class TestKernelAt:
    def test_zero_potential(self):
        K = kernel_for("zero", 100)
        assert kernel_at(K, 0.3, -0.1) == 0

    @pytest.mark.parametrize("x", [0.0, 0.123, -0.77, 1.0])
    def test_boundary_lines(self, x):
        K = kernel_for("one", 1000)
        assert abs(kernel_at(K, x, -x)) <= 1e-12
        assert abs(kernel_at(K, x, x) - x / 2) <= 1e-6

    def test_off_grid_value(self):
        K = kernel_for("one", 1000)
        x, t = 0.61234, 0.1357
        assert abs(kernel_at(K, x, t) - bessel_h((x + t) / 2, (x - t) / 2)) <= 1e-6

    @pytest.mark.parametrize("x, t", [(0.2, 0.5), (1.2, 0.0), (-0.3, 0.31)])
    def test_outside_triangle(self, x, t):
        with pytest.raises(DomainError):
            kernel_at(kernel_for("one", 100), x, t)


class TestGoursatBC:
    def test_zero(self):
        assert verify_goursat_bc(kernel_for("zero", 100), potential("zero", 100)) == (0.0, 0.0)

    @pytest.mark.parametrize("name, tol", [("one", 1e-6), ("x2", 1e-6), ("step", 1e-4)])
    def test_residuals(self, name, tol):
        d, a = verify_goursat_bc(kernel_for(name, 1000), potential(name, 1000))
        assert d <= tol and a <= tol

    def test_step_diagonal_vs_analytic(self):
        K = kernel_for("step", 1000)
        err = np.max(np.abs(K.diagonal().values - np.maximum(K.grid.nodes, 0) / 2))
        assert err <= K.grid.h

    def test_grid_mismatch(self):
        with pytest.raises(DomainError):
            verify_goursat_bc(kernel_for("one", 100), potential("one", 200))


class TestWeakGoursat:
    def test_zero(self):
        assert verify_weak_goursat(kernel_for("zero", 100), potential("zero", 100), 5) == 0.0

    def test_constant(self):
        assert verify_weak_goursat(kernel_for("one", 500), potential("one", 500), 5) <= 5e-3

    def test_step_decays(self):
        r = [verify_weak_goursat(kernel_for("step", n), potential("step", n), 5) for n in (500, 1000)]
        assert r[0] <= 1e-2
        assert r[1] < r[0]


class TestDistanceAndStability:
    def test_self_distance(self):
        K = kernel_for("one", 100)
        assert kernel_distance(K, K) == 0.0

    def test_perturbed_constant_within_bound(self):
        g = Grid(1.0, 1000)
        K = kernel_for("one", 1000)
        Kt = build_kernel(P.constant(g, 1.01))
        d = kernel_distance(K, Kt)
        assert 0 < d <= (0.5 + K.sup()) * 0.02 * math.exp(2.02)
        assert d <= stability_bound(K, 0.02, 2.02)

    def test_refinement_consistency(self):
        coarse = kernel_for("x2", 500)
        fine = coarsen_kernel(kernel_for("x2", 1000), 500)
        assert kernel_distance(coarse, fine) <= coarse.grid.h ** 2

    def test_grid_mismatch(self):
        with pytest.raises(DomainError):
            kernel_distance(kernel_for("one", 100), kernel_for("one", 200))

    def test_smoothed_step_norms(self):
        g = Grid(1.0, 1000)
        q = P.step(g)
        qm = P.smoothed_step(g, 0.25)
        assert l1_norm(qm - q) == pytest.approx(3 * 0.25 / 16, abs=g.h)


def test_kernel_csv_round_trip(tmp_path):
    K = kernel_for("x2", 40)
    meta = write_kernel(K, tmp_path / "k.csv")
    back = read_kernel(tmp_path / "k.csv")
    assert meta.exists()
    assert back.grid == K.grid and back.iterations == K.iterations
    assert np.array_equal(back.h_values, K.h_values)
