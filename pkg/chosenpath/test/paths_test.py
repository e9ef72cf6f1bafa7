import math
import unittest

import numpy as np

from chosenpath import FrontierBlowupError, ParameterError
from chosenpath.core import SparseSet
from chosenpath.hashing import extend_fingerprint, threshold_value, PathFingerprint
from chosenpath.paths import check_thresholds, depth_for, evaluate_map, evaluation_cost_bound, expected_bounds, \
    iter_levels, params_for, sensitivity, stated_collision_bound, survival_probability, ChosenPathParams


class ParametersTest(unittest.TestCase):

    def test_depth_and_width(self):
        params = params_for(22026, 0.5, 1 / math.e)
        self.assertEqual((params.k, params.w), (10, 20))

    def test_single_point(self):
        params = params_for(1, 0.5, 0.25)
        self.assertEqual((params.k, params.w), (1, 2))
        self.assertEqual(depth_for(0, 0.25), 1)

    def test_rho(self):
        params = params_for(10 ** 4, 1 / 3, 2 / 11)
        self.assertAlmostEqual(params.rho, math.log(3) / math.log(5.5), places=12)
        self.assertAlmostEqual(params.rho, 0.6444, places=4)

    def test_threshold_order(self):
        for b1, b2 in ((0.25, 0.5), (0.5, 0.5), (1.0, 0.5), (0.5, 0.0)):
            with self.assertRaises(ParameterError):
                check_thresholds(b1, b2)
        with self.assertRaises(ParameterError):
            params_for(0, 0.5, 0.25)

    def test_invalid_params(self):
        with self.assertRaises(ParameterError):
            ChosenPathParams(b1=0.5, k=0, w=2)
        with self.assertRaises(ParameterError):
            ChosenPathParams(b1=1.5, k=1, w=2)

    def test_level_seeds(self):
        params = ChosenPathParams(b1=0.5, k=3, w=6, master_seed=8)
        self.assertEqual(params.level_seeds, (9, 10, 11))
        self.assertEqual(len(params.hashes), 3)
        self.assertEqual(params.reseeded(0).level_seeds, (1, 2, 3))
        self.assertIsNone(params.rho)

    def test_survival_probability(self):
        params = ChosenPathParams(b1=0.5, k=1, w=2)
        self.assertEqual(survival_probability(params, 0), 0.0)
        self.assertEqual(survival_probability(params, 2), 1.0)
        self.assertEqual(survival_probability(params, 8), 0.25)


class EvaluateMapTest(unittest.TestCase):

    def setUp(self):
        self.params = ChosenPathParams(b1=0.5, k=3, w=4, master_seed=21)

    def test_empty_set(self):
        self.assertEqual(len(evaluate_map(self.params, SparseSet([]))), 0)

    def test_full_branching_for_small_sets(self):
        x = SparseSet([3, 17])
        self.assertEqual(len(evaluate_map(self.params, x)), 4 * 2 ** 3)

    def test_deterministic(self):
        x = SparseSet(range(0, 40, 3))
        first, second = evaluate_map(self.params, x), evaluate_map(self.params, x)
        self.assertTrue(np.array_equal(first.fingerprints, second.fingerprints))
        self.assertEqual(first.depth, 3)

    def test_disjoint_sets_share_no_path(self):
        x, y = SparseSet([1, 2]), SparseSet([3, 4])
        self.assertEqual(evaluate_map(self.params, x).intersection_size(evaluate_map(self.params, y)), 0)

    def test_vertices_come_from_input(self):
        x = SparseSet(range(100, 116))
        for level in iter_levels(self.params, x):
            self.assertTrue(np.all(np.isin(level.vertices, x.dims)))
            self.assertEqual(level.fingerprints.size, level.vertices.size if level.level > 0 else self.params.w)

    def test_mean_size(self):
        # |x| = 8 and b1 = 0.5: survival 1/4, two children per path on average
        params = ChosenPathParams(b1=0.5, k=3, w=6)
        x = SparseSet(range(8))
        sizes = [len(evaluate_map(params.reseeded(seed), x)) for seed in range(200)]
        self.assertAlmostEqual(np.mean(sizes), 6 * 2 ** 3, delta=6)

    def test_matches_scalar_extension(self):
        for size, seed in ((2, 21), (12, 3), (12, 4), (40, 5)):
            params = self.params.reseeded(seed)
            x = SparseSet(range(7, 7 + 5 * size, 5))
            p = survival_probability(params, size)
            paths = [PathFingerprint(i, 0) for i in range(params.w)]
            for h, level in zip(params.hashes, list(iter_levels(params, x))[1:]):
                paths = [extend_fingerprint(h, fp, j) for fp in paths for j in x if threshold_value(h, fp, j) < p]
                self.assertEqual(level.fingerprints.tolist(), [fp.value for fp in paths])
            expected = sorted({fp.value for fp in paths}) if paths and paths[0].depth == params.k else []
            self.assertEqual(evaluate_map(params, x).fingerprints.tolist(), expected)

    def test_frontier_cap(self):
        with self.assertRaises(FrontierBlowupError):
            evaluate_map(self.params, SparseSet([3, 17]), frontier_cap=10)


class BoundsTest(unittest.TestCase):

    def setUp(self):
        self.params = ChosenPathParams(b1=0.5, k=4, w=20, b2=0.25)

    def test_level_zero(self):
        self.assertEqual(tuple(expected_bounds(self.params, 0, 0.3)), (20, 20, 1))

    def test_size_bound(self):
        self.assertAlmostEqual(expected_bounds(self.params, 3, 0.3).size_bound, 160)

    def test_intersection_at_b1(self):
        for level in range(5):
            self.assertAlmostEqual(expected_bounds(self.params, level, 0.5).intersection_bound, 20)

    def test_level_out_of_range(self):
        with self.assertRaises(ParameterError):
            expected_bounds(self.params, 5, 0.5)

    def test_collision_forms(self):
        bounds = expected_bounds(self.params, 4, 0.5)
        self.assertAlmostEqual(bounds.collision_lower_bound, 20 / 24)
        self.assertAlmostEqual(stated_collision_bound(4, 20), 4 / 24)

    def test_sensitivity(self):
        m1, m2 = sensitivity(self.params, 16)
        self.assertAlmostEqual(m1, 16 ** 0.5 * 20 / 0.5)
        self.assertAlmostEqual(m2, 16 ** -0.5 * 20)
        with self.assertRaises(ParameterError):
            sensitivity(ChosenPathParams(b1=0.5, k=1, w=2), 16)

    def test_evaluation_cost(self):
        params = ChosenPathParams(b1=0.5, k=2, w=4)
        self.assertAlmostEqual(evaluation_cost_bound(params, 3), 36)


if __name__ == '__main__':
    unittest.main()
