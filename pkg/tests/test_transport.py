import math

import numpy as np
import pytest

from conftest import transport_lp
from sphereot.geometry import SphereSample, sample_uniform
from sphereot.transport import (
    CostKind,
    DualWeights,
    EmptyCellError,
    NonConvergenceError,
    assign,
    assign_all,
    cell_masses,
    mk_distance,
    solve_dual,
)


def cost_matrix(points, sites, kind: CostKind):
    dots = points @ sites.T
    if kind.is_intrinsic:
        d = 2 * np.arctan2(np.sqrt(np.clip(2 - 2 * dots, 0, None)),
                           np.sqrt(np.clip(2 + 2 * dots, 0, None)))
        return d ** kind.p
    return np.clip(2 - 2 * dots, 0, None) ** (kind.p / 2)


class TestAssign:
    def test_single_site(self):
        w = DualWeights(np.array([[0.0, 0.0, 1.0]]), np.zeros(1), CostKind.extrinsic(2.0))
        for omega in sample_uniform(3, 20, 1).points:
            assert assign(omega, w) == 0

    def test_antipodal_hemispheres(self):
        w = DualWeights(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.zeros(2),
                        CostKind.extrinsic(2.0))
        assert assign(np.array([math.cos(0.3), math.sin(0.3)]), w) == 0
        assert assign(np.array([-math.cos(0.3), math.sin(0.3)]), w) == 1

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_equal_weights_is_voronoi(self, p):
        sites = sample_uniform(3, 6, 2).points
        w = DualWeights(sites, np.zeros(6), CostKind.intrinsic(p))
        pts = sample_uniform(3, 200, 3).points
        idx = assign_all(pts, w)
        nearest = np.argmax(pts @ sites.T, axis=1)
        np.testing.assert_array_equal(idx, nearest)

    def test_gauge_invariance(self):
        sites = sample_uniform(4, 5, 7).points
        lam = np.array([0.1, 0.0, 0.3, 0.05, 0.2])
        pts = sample_uniform(4, 500, 8).points
        a = assign_all(pts, DualWeights(sites, lam, CostKind.extrinsic(2.0)))
        b = assign_all(pts, DualWeights(sites, lam + 3.7, CostKind.extrinsic(2.0)))
        np.testing.assert_array_equal(a, b)

    def test_dimension_mismatch(self):
        w = DualWeights(np.eye(3), np.zeros(3), CostKind.extrinsic(2.0))
        with pytest.raises(ValueError):
            assign(np.ones(2), w)


class TestCellMasses:
    def test_single_cell(self):
        w = DualWeights(np.array([[1.0, 0.0]]), np.zeros(1), CostKind.extrinsic(2.0))
        m = cell_masses(w, sample_uniform(2, 100, 0))
        np.testing.assert_array_equal(m, [1.0])

    def test_sums_to_one(self):
        sites = sample_uniform(3, 9, 4).points
        w = DualWeights(sites, np.zeros(9), CostKind.intrinsic(1.5))
        m = cell_masses(w, sample_uniform(3, 5000, 5))
        assert m.sum() == 1.0

    def test_antipodal_split(self):
        w = DualWeights(np.array([[1.0, 0, 0], [-1.0, 0, 0]]), np.zeros(2),
                        CostKind.extrinsic(2.0))
        quad = sample_uniform(3, 40_000, 6)
        m = cell_masses(w, quad)
        band = 3.0 / math.sqrt(quad.count)
        assert abs(m[0] - 0.5) <= band


class TestSolveDual:
    def test_single_direction_circle_oracle(self):
        # MK_2(sigma_1, delta)^2 = (1/pi) int_0^pi t^2 dt = pi^2/3
        quad = sample_uniform(2, 100_000, 3)
        w, rep = solve_dual(sample_uniform(2, 1, 0).points,
                            CostKind.intrinsic(2.0), quad, 1e-6)
        se = math.pi ** 2 * math.sqrt(4.0 / 45.0) / math.sqrt(quad.count)
        assert abs(rep.transport_cost_p - math.pi ** 2 / 3) <= 3 * se
        assert mk_distance(rep, 2.0) == pytest.approx(math.pi / math.sqrt(3), abs=0.01)
        np.testing.assert_array_equal(w.lam, [0.0])

    def test_antipodal_symmetric(self):
        sites = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
        quad = sample_uniform(3, 100_000, 5)
        w, rep = solve_dual(sites, CostKind.extrinsic(2.0), quad, 5e-3)
        assert rep.max_mass_error <= 5e-3
        assert abs(w.lam[0] - w.lam[1]) <= 5e-3

    def test_duplicate_directions_rejected(self):
        sites = np.array([[1.0, 0, 0], [1.0, 0, 0]])
        with pytest.raises(ValueError):
            solve_dual(sites, CostKind.extrinsic(2.0), sample_uniform(3, 200, 1), 1e-2)

    def test_quad_too_small_rejected(self):
        sites = sample_uniform(3, 10, 1).points
        with pytest.raises(ValueError):
            solve_dual(sites, CostKind.extrinsic(2.0), sample_uniform(3, 100, 2), 1e-2)

    def test_empty_cell_at_start(self):
        # all quadrature points near e1, second site's cell starts empty
        pts = sample_uniform(3, 120, 9).points
        pts = pts * np.array([1.0, 0.05, 0.05])
        pts[:, 0] = np.abs(pts[:, 0]) + 1.0
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        quad = SphereSample(points=pts, seed=9, n=3)
        sites = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
        with pytest.raises(EmptyCellError):
            solve_dual(sites, CostKind.extrinsic(2.0), quad, 1e-2)

    def test_nonconvergence_raises(self):
        sites = sample_uniform(3, 4, 1).points
        quad = sample_uniform(3, 200, 2)
        with pytest.raises(NonConvergenceError) as exc:
            solve_dual(sites, CostKind.extrinsic(2.0), quad, 1e-9, max_iter=3)
        assert exc.value.max_mass_error > 0

    def test_determinism_bitwise(self):
        sites = sample_uniform(3, 8, 11).points
        quad = sample_uniform(3, 4000, 12)
        w1, r1 = solve_dual(sites, CostKind.intrinsic(2.0), quad, 2e-2)
        w2, r2 = solve_dual(sites, CostKind.intrinsic(2.0), quad, 2e-2)
        np.testing.assert_array_equal(w1.lam, w2.lam)
        assert r1 == r2

    @pytest.mark.parametrize("trial", range(5))
    def test_lp_oracle_equivalence(self, trial):
        n = 2 + trial % 3
        L = 2 + trial % 3
        N = 50 * L
        quad = sample_uniform(n, N, 100 + trial)
        sites = sample_uniform(n, L, 200 + trial).points
        kind = CostKind.intrinsic([1.5, 2.0, 3.0][trial % 3]) if trial % 2 \
            else CostKind.extrinsic([1.5, 2.0, 3.0][trial % 3])
        w, rep = solve_dual(sites, kind, quad, tol=0.4 / N, validate=False,
                            max_iter=20_000)
        oracle = transport_lp(cost_matrix(quad.points, sites, kind),
                              np.full(N, 1.0 / N), np.full(L, 1.0 / L))
        assert rep.transport_cost_p == pytest.approx(oracle, rel=1e-6)

    def test_weak_duality_and_consistency(self):
        sites = sample_uniform(3, 16, 21).points
        quad = sample_uniform(3, 20_000, 22)
        tol = 8e-3
        w, rep = solve_dual(sites, CostKind.intrinsic(2.0), quad, tol)
        max_cost = math.pi ** 2
        assert rep.transport_cost_p >= rep.dual_value - tol * max_cost
        assert abs(rep.transport_cost_p - rep.dual_value) <= 3 * tol * max_cost

    def test_gauge_fixed_output(self):
        sites = sample_uniform(2, 4, 31).points
        quad = sample_uniform(2, 2000, 32)
        w, _ = solve_dual(sites, CostKind.extrinsic(1.5), quad, 3e-2)
        assert w.lam.min() == 0.0


class TestCostKind:
    def test_invalid(self):
        with pytest.raises(ValueError):
            CostKind("weird", 2.0)
        with pytest.raises(ValueError):
            CostKind("extrinsic", 1.0)
