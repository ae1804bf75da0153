import numpy as np
import pytest

from _geometry_oracle import boundary_distance_2d, strictly_inside_2d
from mubest.hull import (
    INFEASIBLE,
    SimplexIterationError,
    affine_rank,
    in_hull_interior,
    lp_max_min_weight,
)

TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


class TestAffineRank:
    def test_collinear(self):
        assert affine_rank([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], 1e-9) == 1

    def test_triangle(self):
        assert affine_rank(TRIANGLE, 1e-9) == 2

    def test_single_point(self):
        assert affine_rank([[3.0, 4.0]], 1e-9) == 0

    def test_near_degenerate_tolerance(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1e-12]])
        assert affine_rank(pts, 1e-9) == 1
        assert affine_rank(pts, 1e-15) == 2


class TestMaxMinWeightLP:
    def test_segment_midpoint(self):
        t, w = lp_max_min_weight(np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([1.0, 0.0]))
        assert t == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-12)

    def test_outside_segment_is_infeasible(self):
        t, w = lp_max_min_weight(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([2.0, 0.0]))
        assert t == INFEASIBLE and w.size == 0

    def test_square_center(self):
        # 1/4 cross-checked by brute force over the discretized weight simplex
        t, w = lp_max_min_weight(SQUARE, np.array([0.5, 0.5]))
        assert t == pytest.approx(0.25, abs=1e-12)
        np.testing.assert_allclose(w @ SQUARE, [0.5, 0.5], atol=1e-12)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert w.min() >= t - 1e-12

    def test_square_center_brute_force_oracle(self):
        step = 32
        best = -1.0
        for i in range(step + 1):
            for j in range(step + 1 - i):
                for k in range(step + 1 - i - j):
                    w = np.array([i, j, k, step - i - j - k]) / step
                    if np.allclose(w @ SQUARE, [0.5, 0.5], atol=1e-12):
                        best = max(best, w.min())
        assert best == pytest.approx(0.25, abs=1e-12)

    def test_triangle_centroid(self):
        t, _ = lp_max_min_weight(TRIANGLE, np.array([1.0, 1.0]) / 3.0)
        assert t == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_single_generator(self):
        t, w = lp_max_min_weight(np.array([[2.0, 3.0]]), np.array([2.0, 3.0]))
        assert t == pytest.approx(1.0, abs=1e-12)
        t, w = lp_max_min_weight(np.array([[2.0, 3.0]]), np.array([2.0, 3.5]))
        assert t == INFEASIBLE

    def test_iteration_cap_raises(self):
        with pytest.raises(SimplexIterationError):
            lp_max_min_weight(SQUARE, np.array([0.5, 0.5]), max_iter=1)

    def test_scale_free_optimum(self):
        p = np.array([0.4, 0.3])
        t1, _ = lp_max_min_weight(SQUARE, p)
        t2, _ = lp_max_min_weight(1000.0 * SQUARE, 1000.0 * p)
        assert t1 == pytest.approx(t2, abs=1e-12)


class TestInHullInterior:
    def test_centroid_inside(self):
        assert in_hull_interior(np.array([1.0, 1.0]) / 3.0, TRIANGLE)

    def test_vertex_not_interior(self):
        for v in TRIANGLE:
            assert not in_hull_interior(v, TRIANGLE)

    def test_two_generators_no_interior(self):
        assert not in_hull_interior(np.array([0.5, 0.0]), np.array([[0.0, 0.0], [1.0, 0.0]]))

    def test_coincident_generators(self):
        assert not in_hull_interior(np.array([1.0, 1.0]), np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_monotone_in_generators(self):
        rng = np.random.default_rng(123)
        for _ in range(50):
            gens = rng.uniform(-1, 1, size=(4, 2))
            p = gens.mean(axis=0)
            if not in_hull_interior(p, gens):
                continue
            extra = np.vstack([gens, rng.uniform(-1, 1, size=(2, 2))])
            assert in_hull_interior(p, extra)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(456)
        for _ in range(50):
            gens = rng.uniform(-1, 1, size=(5, 2))
            p = rng.uniform(-1, 1, size=2)
            if boundary_distance_2d(p, gens) < 1e-6:
                continue
            theta = rng.uniform(0, 2 * np.pi)
            rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
            shift = rng.uniform(-10, 10, size=2)
            moved = in_hull_interior(p @ rot.T + shift, gens @ rot.T + shift)
            assert moved == in_hull_interior(p, gens)

    def test_scaling_invariance(self):
        rng = np.random.default_rng(789)
        for scale in (1e-6, 1.0, 1e6):
            gens = rng.uniform(-1, 1, size=(5, 2))
            p = gens.mean(axis=0)
            assert in_hull_interior(scale * p, scale * gens) == in_hull_interior(p, gens)

    def test_oracle_agreement_2d(self):
        rng = np.random.default_rng(2023)
        checked = 0
        while checked < 300:
            k = int(rng.integers(3, 5))
            gens = rng.uniform(-1, 1, size=(k, 2))
            if rng.random() < 0.5:
                w = rng.dirichlet(np.ones(k))
                p = w @ gens
            else:
                p = rng.uniform(-1.5, 1.5, size=2)
            diam = float(np.linalg.norm(gens.max(axis=0) - gens.min(axis=0)))
            if boundary_distance_2d(p, gens) < 10 * 1e-9 * diam:
                continue
            assert in_hull_interior(p, gens) == strictly_inside_2d(p, gens)
            checked += 1

    def test_numerical_failure_policy(self, monkeypatch):
        import mubest.hull as hull_mod

        def boom(*args, **kwargs):
            raise SimplexIterationError("forced")

        monkeypatch.setattr(hull_mod, "lp_max_min_weight", boom)
        q = np.array([1.0, 1.0]) / 3.0
        assert hull_mod.in_hull_interior(q, TRIANGLE, on_failure="outside") is False
        with pytest.raises(SimplexIterationError):
            hull_mod.in_hull_interior(q, TRIANGLE)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            in_hull_interior(np.array([0.1]), TRIANGLE)
