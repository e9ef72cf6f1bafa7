import math
import unittest

import numpy as np

from chosenpath import notification_signals, EmptyPointError, ParameterError
from chosenpath.core import braun_blanquet, MeasureKind, SparseSet
from chosenpath.index import brute_force, default_repetitions, BucketTable, CPIndex, MinHashIndex
from harness.instances import random_set


def random_points(seed, n, t, universe=2 ** 20):
    rng = np.random.default_rng(seed)
    return [random_set(rng, t, universe) for _ in range(n)]


class BucketTableTest(unittest.TestCase):

    def setUp(self):
        self.table = BucketTable.build([
            (2, np.array([30, 10], dtype=np.uint64)),
            (0, np.array([10], dtype=np.uint64)),
            (1, np.array([20, 30], dtype=np.uint64)),
        ])

    def test_layout(self):
        self.assertEqual(list(self.table.keys), [10, 20, 30])
        self.assertEqual(list(self.table.offsets), [0, 2, 3, 5])
        self.assertEqual(list(self.table.ids), [0, 2, 1, 1, 2])
        self.assertEqual(len(self.table), 3)
        self.assertEqual(self.table.pairs, 5)

    def test_lookup(self):
        self.assertEqual(list(self.table.get(30)), [1, 2])
        self.assertIsNone(self.table.get(25))
        found = [list(ids) for ids in self.table.lookup([40, 30, 5, 10])]
        self.assertEqual(found, [[1, 2], [0, 2]])

    def test_empty(self):
        table = BucketTable.build([])
        self.assertEqual(len(table), 0)
        self.assertEqual(list(table.lookup([1, 2])), [])

    def test_points_without_fingerprints(self):
        empty = np.zeros(0, dtype=np.uint64)
        table = BucketTable.build([(0, empty), (1, np.array([7, 5], dtype=np.uint64)), (2, empty)])
        self.assertEqual(list(table.keys), [5, 7])
        self.assertEqual(list(table.offsets), [0, 1, 2])
        self.assertEqual(list(table.ids), [1, 1])

        table = BucketTable.build([(0, empty), (1, empty)])
        self.assertEqual((len(table), table.pairs), (0, 0))
        self.assertEqual(list(table.offsets), [0])
        self.assertEqual(list(table.lookup([5])), [])

    def test_equal_keys_keep_ids_ascending(self):
        rng = np.random.default_rng(8)
        entries = [(i, rng.integers(0, 4, size=3).astype(np.uint64)) for i in rng.permutation(200)]
        table = BucketTable.build(entries)
        self.assertEqual(table.pairs, 600)
        for start, end in zip(table.offsets[:-1], table.offsets[1:]):
            self.assertTrue(np.all(np.diff(table.ids[start:end].astype(np.int64)) >= 0))

    def test_shares_bucket(self):
        self.assertTrue(self.table.shares_bucket([20], 1))
        self.assertTrue(self.table.shares_bucket([25, 10], 2))
        self.assertFalse(self.table.shares_bucket([20], 2))
        self.assertFalse(self.table.shares_bucket([25], 1))

    def test_insertion_order_irrelevant(self):
        other = BucketTable.build([
            (1, np.array([30, 20], dtype=np.uint64)),
            (0, np.array([10], dtype=np.uint64)),
            (2, np.array([10, 30], dtype=np.uint64)),
        ])
        self.assertEqual(self.table, other)


class CPIndexTest(unittest.TestCase):

    def test_default_repetitions(self):
        self.assertEqual(default_repetitions(1), 2)
        self.assertEqual(default_repetitions(1000), 12)
        self.assertEqual(default_repetitions(1024), 12)

    def test_empty_index(self):
        index = CPIndex.build([], 0.5, 0.25)
        outcome = index.query(SparseSet([1, 2, 3]))
        self.assertIsNone(outcome.found)
        self.assertEqual(outcome.candidates_scanned, 0)
        self.assertEqual(index.stats()["stored_pairs"], 0)

    def test_empty_point_rejected(self):
        with self.assertRaises(EmptyPointError) as cm:
            CPIndex.build([SparseSet([1]), SparseSet([])], 0.5, 0.25)
        self.assertEqual(cm.exception.point_id, 1)

    def test_threshold_order(self):
        with self.assertRaises(ParameterError):
            CPIndex.build([SparseSet([1])], 0.25, 0.5)

    def test_single_point_found(self):
        x = random_points(1, 1, 16)[0]
        found = sum(1 for seed in range(100)
                    if CPIndex.build([x], 0.5, 0.25, master_seed=seed).query(x).found == 0)
        self.assertGreaterEqual(found, 90)

    def test_small_sets_always_found(self):
        points = [SparseSet([1, 2]), SparseSet([5, 6]), SparseSet([9, 10])]
        index = CPIndex.build(points, 0.5, 0.25, master_seed=3)
        outcome = index.query(SparseSet([5, 6]))
        self.assertEqual((outcome.found, outcome.similarity), (1, 1.0))
        self.assertEqual(outcome.repetition, 0)
        self.assertEqual(index.repetition_hits(SparseSet([5, 6]), 1), [True] * index.R)

    def test_disjoint_query(self):
        points = random_points(2, 50, 16)
        index = CPIndex.build(points, 0.5, 0.25, master_seed=2)
        outcome = index.query(SparseSet([2 ** 21 + i for i in range(16)]))
        self.assertIsNone(outcome.found)
        self.assertEqual(outcome.candidates_scanned, 0)
        self.assertEqual(outcome.buckets_probed, 0)

    def test_found_point_passes_filter(self):
        points = random_points(3, 200, 16)
        index = CPIndex.build(points, 0.5, 0.25, master_seed=5)
        for q in points[:20]:
            outcome = index.query(q)
            if outcome.found is not None:
                self.assertGreater(braun_blanquet(q, points[outcome.found]), 0.25)
                self.assertLessEqual(outcome.candidates_scanned, len(points))

    def test_deterministic(self):
        points = random_points(4, 100, 16)
        self.assertEqual(CPIndex.build(points, 0.5, 0.25, master_seed=9),
                         CPIndex.build(points, 0.5, 0.25, master_seed=9))
        self.assertNotEqual(CPIndex.build(points, 0.5, 0.25, master_seed=9),
                            CPIndex.build(points, 0.5, 0.25, master_seed=10))

    def test_stored_pairs_near_size_bound(self):
        n, b1, b2 = 1000, 1 / 3, 2 / 11
        index = CPIndex.build(random_points(5, n, 16), b1, b2, repetitions=1, master_seed=1)
        stats = index.stats()
        rho = math.log(1 / b1) / math.log(1 / b2)
        bound = n ** rho * stats["w"] / b1
        per_point = stats["stored_pairs"] / (n * stats["R"])
        self.assertTrue(bound / 4 <= per_point <= 4 * bound)

    def test_stats_and_signal(self):
        received = list()

        def on_built(sender, stats=None):
            received.append(stats)

        notification_signals.signal('index-built').connect(on_built)
        try:
            index = CPIndex.build(random_points(6, 10, 8), 0.5, 0.25, repetitions=3)
        finally:
            notification_signals.signal('index-built').disconnect(on_built)
        stats = index.stats()
        self.assertEqual(set(stats), {"n", "k", "w", "R", "total_buckets", "stored_pairs", "bytes", "space_bound"})
        self.assertEqual((stats["n"], stats["R"]), (10, 3))
        self.assertEqual(stats["w"], 2 * stats["k"])
        self.assertEqual(received, [stats])


class MinHashIndexTest(unittest.TestCase):

    def setUp(self):
        self.points = random_points(7, 1000, 64)

    def test_shape(self):
        K, L = MinHashIndex.shape_for(1000, 0.5, 0.2)
        self.assertEqual(K, 5)
        self.assertEqual(L, int(math.ceil(3 * 1000 ** (math.log(2) / math.log(5)))))

    def test_identical_point_found(self):
        index = MinHashIndex.build(self.points, 0.5, 0.2, master_seed=1)
        for point_id in (0, 500, 999):
            outcome = index.query(self.points[point_id])
            self.assertEqual(outcome.found, point_id)
            self.assertEqual(outcome.similarity, 1.0)

    def test_disjoint_and_empty_query(self):
        index = MinHashIndex.build(self.points[:100], 0.5, 0.2)
        self.assertIsNone(index.query(SparseSet([2 ** 21 + i for i in range(64)])).found)
        self.assertIsNone(index.query(SparseSet([])).found)

    def test_signature_elements(self):
        index = MinHashIndex.build(self.points[:10], 0.5, 0.2)
        x = self.points[3]
        signature = index.signature(x)
        self.assertEqual(signature.shape, (index.L, index.K))
        self.assertTrue(np.all(np.isin(signature, x.dims)))
        self.assertEqual(len(index.keys(x)), index.L)


class BruteForceTest(unittest.TestCase):

    def test_single_point(self):
        self.assertEqual(brute_force([SparseSet([1, 2])], SparseSet([7])), (0, 0.0))

    def test_member(self):
        points = random_points(8, 20, 8)
        self.assertEqual(brute_force(points, points[13]), (13, 1.0))

    def test_lowest_id_on_ties(self):
        points = [SparseSet([1, 9]), SparseSet([1, 2]), SparseSet([1, 2])]
        self.assertEqual(brute_force(points, SparseSet([1, 2])), (1, 1.0))

    def test_matches_set_arithmetic(self):
        points = random_points(9, 100, 6, universe=40)
        q = random_points(10, 1, 6, universe=40)[0]
        plain = [set(x) for x in points]
        scores = [len(set(q) & s) / max(len(q), len(s)) for s in plain]
        best = max(scores)
        self.assertEqual(brute_force(points, q), (scores.index(best), best))
        jaccard_scores = [len(set(q) & s) / len(set(q) | s) for s in plain]
        self.assertEqual(brute_force(points, q, MeasureKind.JACCARD)[0], jaccard_scores.index(max(jaccard_scores)))

    def test_no_points(self):
        with self.assertRaises(ParameterError):
            brute_force([], SparseSet([1]))


if __name__ == '__main__':
    unittest.main()
