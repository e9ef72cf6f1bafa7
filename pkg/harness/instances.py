"""
Random set pairs and planted instances with exactly controlled overlaps.
"""
from dataclasses import dataclass, field

import numpy as np

from chosenpath import fail, ParameterError
from chosenpath.core import MeasureKind, SparseSet
from chosenpath.reductions import measure_profile, threshold_translate

# Elements are drawn from [0, UNIVERSE), large enough that unrelated sets rarely meet
UNIVERSE = 2 ** 24


def sample_distinct(rng, count, universe=UNIVERSE, exclude=()):
    """Return `count` distinct integers from [0, universe) avoiding `exclude`, in draw order"""
    excluded = set(int(v) for v in exclude)
    if count + len(excluded) > universe:
        fail(ParameterError, "INVALID_PARAMETER", "universe", universe)
    chosen = list()
    seen = set()
    while len(chosen) < count:
        for v in rng.integers(0, universe, size=2 * (count - len(chosen)) + 4):
            v = int(v)
            if v in excluded or v in seen:
                continue
            seen.add(v)
            chosen.append(v)
            if len(chosen) == count:
                break
    return chosen


def random_set(rng, t, universe=UNIVERSE):
    """Return a uniformly random t-subset of [0, universe)"""
    return SparseSet.from_iterable(sample_distinct(rng, t, universe))


def pair_with_overlap(rng, t_x, t_y, overlap, universe=UNIVERSE):
    """Return random sets (x, y) with |x| = t_x, |y| = t_y and |x ∩ y| = overlap

    Raises:
        ParameterError: If overlap exceeds min(t_x, t_y)
    """
    if not 0 <= overlap <= min(t_x, t_y):
        fail(ParameterError, "OUT_OF_RANGE", "overlap", overlap, 0, min(t_x, t_y))
    elements = sample_distinct(rng, t_x + t_y - overlap, universe)
    shared = elements[:overlap]
    only_x = elements[overlap:t_x]
    only_y = elements[t_x:]
    return SparseSet.from_iterable(shared + only_x), SparseSet.from_iterable(shared + only_y)


def neighbor(rng, q, overlap, universe=UNIVERSE):
    """Return a random set of size |q| sharing exactly `overlap` random elements with q"""
    t = len(q)
    if not 0 <= overlap <= t:
        fail(ParameterError, "OUT_OF_RANGE", "overlap", overlap, 0, t)
    shared = rng.choice(q.dims, size=overlap, replace=False).tolist() if overlap else []
    fresh = sample_distinct(rng, t - overlap, universe, exclude=q.dims)
    return SparseSet.from_iterable(shared + fresh)


def overlaps_for(t, b1, b2):
    """Return (planted overlap, decoy overlap) = (ceil(b1 t), floor(b2 t)) for t-sparse sets

    The planted overlap is the smallest intersection with B >= b1; the decoy
    overlap is the largest with B <= b2.
    """
    i1, i2 = threshold_translate(measure_profile(MeasureKind.BRAUN_BLANQUET, t, t), b1, b2, t, t)
    return i1, i2 - 1


@dataclass
class PlantedInstance(object):
    """Data set with one planted neighbor per query

    Attributes:
        points (list): Stored SparseSets in id order
        queries (list): Query SparseSets
        planted (list): Id of the planted neighbor of each query
        planted_overlap (int): |q ∩ planted|
        decoy_overlap (int): |q ∩ decoy| for the decoys assigned to q
    """
    points: list = field(default_factory=list)
    queries: list = field(default_factory=list)
    planted: list = field(default_factory=list)
    planted_overlap: int = 0
    decoy_overlap: int = 0


def planted_instance(seed, n, t, b1, b2, trials, universe=UNIVERSE):
    """Build an instance of n decoys plus one planted neighbor for each of `trials` queries

    Every query q gets a planted point with |q ∩ x| = ceil(b1 t). Decoys are
    assigned to queries round robin and share floor(b2 t) elements with their
    query. All points are t-sparse and stored in a seeded random order.

    Args:
        seed (int): Seed
        n (int): Number of decoys
        t (int): Set size
        b1 (float): Upper threshold
        b2 (float): Lower threshold
        trials (int): Number of queries

    Returns:
        PlantedInstance: The instance
    """
    rng = np.random.default_rng(seed)
    planted_overlap, decoy_overlap = overlaps_for(t, b1, b2)
    queries = [random_set(rng, t, universe) for _ in range(trials)]

    points = [neighbor(rng, q, planted_overlap, universe) for q in queries]
    if queries:
        points.extend(neighbor(rng, queries[i % trials], decoy_overlap, universe) for i in range(n))
    else:
        points.extend(random_set(rng, t, universe) for _ in range(n))

    order = rng.permutation(len(points))
    position = np.empty(len(points), dtype=np.int64)
    position[order] = np.arange(len(points))
    return PlantedInstance(
        points=[points[i] for i in order],
        queries=queries,
        planted=[int(position[i]) for i in range(trials)],
        planted_overlap=planted_overlap,
        decoy_overlap=decoy_overlap)


def decoy_instance(seed, n, t, overlap, universe=UNIVERSE):
    """Return (q, decoys): a random t-set and n t-sets each sharing `overlap` elements with q"""
    rng = np.random.default_rng(seed)
    q = random_set(rng, t, universe)
    return q, [neighbor(rng, q, overlap, universe) for _ in range(n)]
