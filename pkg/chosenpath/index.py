"""
Similarity search data structures: the Chosen Path index, a MinHash LSH
baseline and a brute-force oracle.
"""
import math

from dataclasses import dataclass
from typing import Optional

import humanize
import numpy as np

from chosenpath import fail, logger, notification_signals, EmptyPointError, ParameterError
from chosenpath.core import jaccard, braun_blanquet, similarity, MeasureKind
from chosenpath.hashing import derive_seeds, splitmix64_stream
from chosenpath.paths import check_thresholds, depth_for, evaluate_map, params_for, FRONTIER_CAP

index_built = notification_signals.signal('index-built')

# MinHash repetitions are L = ceil(MINHASH_REPETITION_FACTOR * n^rho)
MINHASH_REPETITION_FACTOR = 3


@dataclass(frozen=True)
class QueryOutcome(object):
    """Result of one query

    Attributes:
        found (int): Point id with similarity > s2, or None
        similarity (float): Similarity of the found point, or None
        candidates_scanned (int): Distinct points whose similarity was computed
        buckets_probed (int): Non-empty buckets visited
        repetition (int): Repetition the point was found in, or None
    """
    found: Optional[int]
    similarity: Optional[float]
    candidates_scanned: int
    buckets_probed: int
    repetition: Optional[int] = None


def default_repetitions(n):
    """Return ceil(log2 n) + 2, giving a per-query failure probability of at most 1/(4n)"""
    return int(math.ceil(math.log2(max(n, 1)))) + 2


def _check_points(points):
    for point_id, x in enumerate(points):
        if len(x) == 0:
            fail(EmptyPointError, "EMPTY_POINT", point_id, point_id=point_id)


class BucketTable(object):
    """Map from 64-bit fingerprints to point ids, stored as sorted arrays

    Bucket i holds fingerprint keys[i] and ids[offsets[i]:offsets[i + 1]].
    Buckets are sorted by fingerprint and ids within a bucket ascend, so the
    layout only depends on the (fingerprint, point id) pairs.

    Attributes:
        keys (numpy.ndarray): uint64 fingerprints, strictly increasing
        offsets (numpy.ndarray): int64 bucket boundaries, length len(keys) + 1
        ids (numpy.ndarray): uint32 point ids
    """

    def __init__(self, keys, offsets, ids):
        self.keys = np.asarray(keys, dtype=np.uint64)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.ids = np.asarray(ids, dtype=np.uint32)

    @classmethod
    def build(cls, entries):
        """Build a table from (point id, fingerprint array) pairs

        Args:
            entries: Iterable of (int, numpy.ndarray) pairs

        Returns:
            BucketTable: The merged table
        """
        key_parts = list()
        point_ids = list()
        counts = list()
        for point_id, fingerprints in entries:
            key_parts.append(np.asarray(fingerprints, dtype=np.uint64))
            point_ids.append(point_id)
            counts.append(len(fingerprints))

        if not key_parts:
            return cls(np.zeros(0, np.uint64), np.zeros(1, np.int64), np.zeros(0, np.uint32))

        keys = np.concatenate(key_parts)
        del key_parts[:]
        ids = np.repeat(np.asarray(point_ids, dtype=np.uint32), counts)
        if np.any(np.diff(np.asarray(point_ids, dtype=np.int64)) < 0):
            order = np.argsort(ids, kind="stable")
            keys = keys[order]
            ids = ids[order]
        # ids ascend, so a stable sort by key keeps them ascending inside each bucket
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        ids = ids[order]
        del order
        starts = np.concatenate(([0], np.flatnonzero(np.diff(keys)) + 1))
        if keys.size == 0:
            starts = np.zeros(0, dtype=np.int64)
        offsets = np.append(starts, keys.size).astype(np.int64)
        return cls(keys[starts], offsets, ids)

    def __len__(self):
        return int(self.keys.size)

    def __eq__(self, other):
        if not isinstance(other, BucketTable):
            return NotImplemented
        return (np.array_equal(self.keys, other.keys) and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.ids, other.ids))

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    @property
    def pairs(self):
        """Number of stored (fingerprint, point id) pairs"""
        return int(self.ids.size)

    def get(self, fingerprint):
        """Return the ids stored under fingerprint, or None"""
        for ids in self.lookup(np.array([fingerprint], dtype=np.uint64)):
            return ids
        return None

    def lookup(self, fingerprints):
        """Yield the id arrays of all buckets hit by `fingerprints`, in the given order"""
        fingerprints = np.asarray(fingerprints, dtype=np.uint64)
        if self.keys.size == 0 or fingerprints.size == 0:
            return
        positions = np.searchsorted(self.keys, fingerprints)
        inside = positions < self.keys.size
        hits = np.zeros(fingerprints.size, dtype=bool)
        hits[inside] = self.keys[positions[inside]] == fingerprints[inside]
        for pos in positions[hits]:
            yield self.ids[self.offsets[pos]:self.offsets[pos + 1]]

    def items(self):
        """Yield (fingerprint, ids) for every bucket in fingerprint order"""
        for i in range(self.keys.size):
            yield int(self.keys[i]), self.ids[self.offsets[i]:self.offsets[i + 1]]

    def shares_bucket(self, fingerprints, point_id):
        """Return True if point_id is stored under any of `fingerprints`"""
        return any(np.any(ids == point_id) for ids in self.lookup(fingerprints))


def build_table(params, points, frontier_cap=FRONTIER_CAP):
    """Return the bucket table of one repetition: every point under each fingerprint of its map"""
    return BucketTable.build((point_id, evaluate_map(params, x, frontier_cap=frontier_cap).fingerprints)
                             for point_id, x in enumerate(points))


class QueryScan(object):
    """State of one query across repetitions

    Feeding the repetitions to scan() in order reproduces CPIndex.query, so
    callers may build, scan and drop one repetition at a time.
    """

    def __init__(self, q, points, b2):
        self.q = q
        self.points = points
        self.b2 = b2
        self.visited = np.zeros(len(points), dtype=bool)
        self.scanned = 0
        self.probed = 0
        self.outcome = None

    @property
    def done(self):
        return self.outcome is not None

    def scan(self, repetition, table, fingerprints):
        """Compare q with the unvisited points in the buckets hit by `fingerprints`

        Returns:
            bool: True once a point with B(q, x) > b2 has been found
        """
        if self.done:
            return True
        for ids in table.lookup(fingerprints):
            self.probed += 1
            for point_id in ids:
                if self.visited[point_id]:
                    continue
                self.visited[point_id] = True
                self.scanned += 1
                value = braun_blanquet(self.q, self.points[point_id])
                if value > self.b2:
                    self.outcome = QueryOutcome(int(point_id), value, self.scanned, self.probed, repetition)
                    return True
        return False

    def result(self):
        if self.outcome is not None:
            return self.outcome
        return QueryOutcome(None, None, self.scanned, self.probed)


class CPIndex(object):
    """Chosen Path index for (b1, b2)-approximate Braun-Blanquet similarity search

    Attributes:
        points (list): Stored SparseSets, the list position is the point id
        b1 (float): Upper threshold
        b2 (float): Lower threshold
        repetitions (list): (ChosenPathParams, BucketTable) per repetition
        master_seed (int): Seed the repetition seeds were derived from, None if unknown
    """
    measure = MeasureKind.BRAUN_BLANQUET

    def __init__(self, points, b1, b2, repetitions, master_seed=None):
        self.points = list(points)
        self.b1 = b1
        self.b2 = b2
        self.repetitions = list(repetitions)
        self.master_seed = master_seed

    def __repr__(self):
        return "<CPIndex n={} R={} b1={:.4g} b2={:.4g}>".format(self.n, self.R, self.b1, self.b2)

    @property
    def n(self):
        return len(self.points)

    @property
    def R(self):
        return len(self.repetitions)

    @classmethod
    def build(cls, points, b1, b2, repetitions=None, master_seed=0, frontier_cap=FRONTIER_CAP):
        """Build an index over `points`

        Each repetition r uses params_for(n, b1, b2, seed_r) with seed_r the r-th
        splitmix64 output of master_seed.

        Args:
            points (list): Non-empty SparseSets
            b1 (float): Upper threshold
            b2 (float): Lower threshold, 0 < b2 < b1 < 1
            repetitions (int): Number of independent map instances, default ceil(log2 n) + 2
            master_seed (int): Seed for all randomness
            frontier_cap (int): Frontier cap for each map evaluation

        Returns:
            CPIndex: The index

        Raises:
            ParameterError: If thresholds are invalid
            EmptyPointError: If a point is empty
        """
        check_thresholds(b1, b2)
        _check_points(points)
        n = len(points)
        if repetitions is None:
            repetitions = default_repetitions(n)
        if repetitions < 1:
            fail(ParameterError, "INVALID_PARAMETER", "repetitions", repetitions)

        reps = list()
        for seed in derive_seeds(master_seed, repetitions):
            params = params_for(max(n, 1), b1, b2, master_seed=seed)
            table = build_table(params, points, frontier_cap=frontier_cap)
            reps.append((params, table))
            logger.debug("Repetition {}: {} buckets, {} entries".format(
                len(reps) - 1, humanize.intcomma(len(table)), humanize.intcomma(table.pairs)))

        index = cls(points, b1, b2, reps, master_seed=master_seed)
        stats = index.stats()
        logger.info("Built {} with {} stored pairs".format(index, humanize.intcomma(stats["stored_pairs"])))
        index_built.send(index, stats=stats)
        return index

    def query(self, q, frontier_cap=FRONTIER_CAP):
        """Return the first stored point with B(q, x) > b2

        Repetitions are scanned in order; within a repetition buckets are visited
        in fingerprint order and ids in ascending order. Each point is compared
        at most once per query.

        Args:
            q (SparseSet): Query set

        Returns:
            QueryOutcome: Found point (or None) and work counters
        """
        scan = QueryScan(q, self.points, self.b2)
        for r, (params, table) in enumerate(self.repetitions):
            if scan.scan(r, table, evaluate_map(params, q, frontier_cap=frontier_cap).fingerprints):
                break
        return scan.result()

    def repetition_hits(self, q, point_id, frontier_cap=FRONTIER_CAP):
        """Return, per repetition, whether point_id shares a bucket with q"""
        return [table.shares_bucket(evaluate_map(params, q, frontier_cap=frontier_cap).fingerprints, point_id)
                for params, table in self.repetitions]

    def stats(self):
        """Return a dict with n, k, w, R, total_buckets, stored_pairs, bytes and space_bound"""
        from chosenpath.snapshot import encoded_size

        if self.repetitions:
            params = self.repetitions[0][0]
            k, w = params.k, params.w
        else:
            k, w = 0, 0
        rho = math.log(1 / self.b1) / math.log(1 / self.b2)
        n = self.n
        return {
            "n": n,
            "k": k,
            "w": w,
            "R": self.R,
            "total_buckets": sum(len(table) for _, table in self.repetitions),
            "stored_pairs": sum(table.pairs for _, table in self.repetitions),
            "bytes": encoded_size(self),
            "space_bound": n ** (1 + rho) * math.log(max(n, 1)) + sum(len(x) for x in self.points),
        }

    def __eq__(self, other):
        if not isinstance(other, CPIndex):
            return NotImplemented
        if (self.b1, self.b2, self.points) != (other.b1, other.b2, other.points):
            return False
        if self.R != other.R:
            return False
        for (p1, t1), (p2, t2) in zip(self.repetitions, other.repetitions):
            if (p1.k, p1.w, p1.b1, p1.level_seeds) != (p2.k, p2.w, p2.b1, p2.level_seeds) or t1 != t2:
                return False
        return True

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result


class MinHashIndex(object):
    """MinHash LSH index for (j1, j2)-approximate Jaccard similarity search

    The min-hash of slot (l, s) is the element minimizing a_ls * e + c_ls mod 2**64
    with a_ls odd, a multiply-add surrogate for the first element under a
    random permutation. Repetition l buckets points by their K slot values.

    Attributes:
        points (list): Stored SparseSets
        j1 (float): Upper Jaccard threshold
        j2 (float): Lower Jaccard threshold
        K (int): Concatenation length
        L (int): Number of repetitions
        multipliers (numpy.ndarray): uint64, shape (L * K,)
        increments (numpy.ndarray): uint64, shape (L * K,)
        buckets (list): L dicts from packed K-tuples to lists of point ids
    """
    measure = MeasureKind.JACCARD

    def __init__(self, points, j1, j2, K, L, multipliers, increments, buckets):
        self.points = list(points)
        self.j1 = j1
        self.j2 = j2
        self.K = K
        self.L = L
        self.multipliers = multipliers
        self.increments = increments
        self.buckets = buckets

    def __repr__(self):
        return "<MinHashIndex n={} K={} L={}>".format(len(self.points), self.K, self.L)

    @staticmethod
    def shape_for(n, j1, j2, repetition_factor=MINHASH_REPETITION_FACTOR):
        """Return (K, L) = (ceil(ln n / ln(1/j2)), ceil(factor * n^rho))"""
        check_thresholds(j1, j2)
        K = depth_for(n, j2)
        rho = math.log(1 / j1) / math.log(1 / j2)
        L = int(math.ceil(repetition_factor * max(n, 1) ** rho))
        return K, L

    @classmethod
    def build(cls, points, j1, j2, master_seed=0, repetition_factor=MINHASH_REPETITION_FACTOR):
        """Build a MinHash index

        Raises:
            ParameterError: If thresholds are invalid
            EmptyPointError: If a point is empty
        """
        check_thresholds(j1, j2)
        _check_points(points)
        K, L = cls.shape_for(len(points), j1, j2, repetition_factor)
        words = splitmix64_stream(master_seed, 2 * K * L)
        multipliers = words[:K * L] | np.uint64(1)
        increments = words[K * L:]

        index = cls(points, j1, j2, K, L, multipliers, increments, [dict() for _ in range(L)])
        for point_id, x in enumerate(points):
            for table, key in zip(index.buckets, index.keys(x)):
                table.setdefault(key, []).append(point_id)

        logger.info("Built {}".format(index))
        index_built.send(index, stats={"n": len(points), "K": K, "L": L})
        return index

    def signature(self, x):
        """Return the (L, K) matrix of min-hash elements of x"""
        dims = x.dims.astype(np.uint64)
        with np.errstate(over="ignore"):
            values = self.multipliers[:, None] * dims[None, :] + self.increments[:, None]
        return x.dims[values.argmin(axis=1)].reshape(self.L, self.K)

    def keys(self, x):
        """Return one bucket key (packed K-tuple) per repetition"""
        return [row.tobytes() for row in self.signature(x)]

    def query(self, q):
        """Return the first stored point with J(q, x) > j2, scanning repetitions in order"""
        if len(q) == 0:
            return QueryOutcome(None, None, 0, 0)
        visited = np.zeros(len(self.points), dtype=bool)
        scanned = 0
        probed = 0
        for r, (table, key) in enumerate(zip(self.buckets, self.keys(q))):
            ids = table.get(key)
            if ids is None:
                continue
            probed += 1
            for point_id in ids:
                if visited[point_id]:
                    continue
                visited[point_id] = True
                scanned += 1
                value = jaccard(q, self.points[point_id])
                if value > self.j2:
                    return QueryOutcome(point_id, value, scanned, probed, r)
        return QueryOutcome(None, None, scanned, probed)


def brute_force(points, q, measure=MeasureKind.BRAUN_BLANQUET):
    """Return (point id, similarity) of the most similar point, lowest id on ties

    Raises:
        ParameterError: If points is empty
    """
    if not points:
        fail(ParameterError, "NO_POINTS")
    best_id = 0
    best = similarity(measure, q, points[0])
    for point_id in range(1, len(points)):
        value = similarity(measure, q, points[point_id])
        if value > best:
            best_id, best = point_id, value
    return best_id, best
