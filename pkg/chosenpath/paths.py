"""
The Chosen Path locality-sensitive map.

M_0(x) holds w start paths. A path p in M_{i-1}(x) is extended by every j in x
whose level hash satisfies h_i(p, j) < min(1, 1 / (b1 |x|)); M_k(x) is the set
of depth-k survivors, identified by 64-bit fingerprints.
"""
import math

from collections import namedtuple
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from chosenpath import fail, logger, FrontierBlowupError, ParameterError
from chosenpath.hashing import extend_words, level_seed, survival_cutoff, surviving_pairs, TabulationHash

# A single evaluation aborts once its frontier holds more paths than this
FRONTIER_CAP = 10 ** 6

# Number of (path, vertex) hash words computed per block
BLOCK_WORDS = 2 ** 20

# Slack applied before rounding log ratios up, so exact integers are not bumped
CEIL_SLACK = 1e-9

LemmaBounds = namedtuple("LemmaBounds", ["size_bound", "intersection_bound", "collision_lower_bound"])

Level = namedtuple("Level", ["level", "fingerprints", "vertices"])


def check_thresholds(b1, b2):
    """Validate 0 < b2 < b1 < 1

    Raises:
        ParameterError: If the ordering is violated
    """
    if not 0 < b2 < b1 < 1:
        fail(ParameterError, "THRESHOLD_ORDER", b1, b2)


@dataclass(frozen=True)
class ChosenPathParams(object):
    """Parameters of one map instance

    Attributes:
        b1 (float): Similarity threshold in (0, 1)
        k (int): Depth of the branching process
        w (int): Number of start paths
        master_seed (int): Seed all level hashes derive from
        b2 (float): Lower threshold the depth was chosen for, if known
    """
    b1: float
    k: int
    w: int
    master_seed: int = 0
    b2: float = None
    level_seeds: tuple = field(init=False)

    def __post_init__(self):
        if not 0 < self.b1 < 1:
            fail(ParameterError, "OUT_OF_RANGE", "b1", self.b1, 0, 1)
        if self.k < 1:
            fail(ParameterError, "INVALID_PARAMETER", "k", self.k)
        if self.w < 1:
            fail(ParameterError, "INVALID_PARAMETER", "w", self.w)
        seeds = tuple(level_seed(self.master_seed, i) for i in range(1, self.k + 1))
        object.__setattr__(self, "level_seeds", seeds)

    @cached_property
    def hashes(self):
        """Level hash functions h_1 ... h_k"""
        return [TabulationHash(seed) for seed in self.level_seeds]

    @property
    def rho(self):
        """log(1/b1) / log(1/b2), or None if b2 is unknown"""
        if self.b2 is None:
            return None
        return math.log(1 / self.b1) / math.log(1 / self.b2)

    def reseeded(self, master_seed):
        """Return the same parameters with a different master seed"""
        return ChosenPathParams(b1=self.b1, k=self.k, w=self.w, master_seed=master_seed, b2=self.b2)


@dataclass(frozen=True, eq=False)
class PathSet(object):
    """Depth-k survivors of one map evaluation

    Attributes:
        fingerprints (numpy.ndarray): Sorted, duplicate-free uint64 fingerprints
        depth (int): Depth of all members
    """
    fingerprints: np.ndarray
    depth: int

    def __len__(self):
        return int(self.fingerprints.size)

    def __contains__(self, fingerprint):
        i = np.searchsorted(self.fingerprints, np.uint64(fingerprint))
        return i < self.fingerprints.size and int(self.fingerprints[i]) == int(fingerprint)

    def __iter__(self):
        return (int(v) for v in self.fingerprints)

    def intersection_size(self, other):
        """Return |self ∩ other|"""
        return int(np.intersect1d(self.fingerprints, other.fingerprints, assume_unique=True).size)


def depth_for(n, b2):
    """Return k = ceil(ln n / ln(1/b2)), at least 1"""
    if n <= 1:
        return 1
    return max(1, int(math.ceil(math.log(n) / math.log(1 / b2) - CEIL_SLACK)))


def params_for(n, b1, b2, master_seed=0):
    """Parameters for a data set of n points: k = ceil(ln n / ln(1/b2)), w = 2k

    Args:
        n (int): Number of points, >= 1
        b1 (float): Upper threshold
        b2 (float): Lower threshold, 0 < b2 < b1 < 1
        master_seed (int): Seed of the level hashes

    Returns:
        ChosenPathParams: The parameters

    Raises:
        ParameterError: If thresholds are out of order or n < 1
    """
    check_thresholds(b1, b2)
    if n < 1:
        fail(ParameterError, "INVALID_PARAMETER", "n", n)
    k = depth_for(n, b2)
    return ChosenPathParams(b1=b1, k=k, w=2 * k, master_seed=master_seed, b2=b2)


def survival_probability(params, size):
    """Return min(1, 1 / (b1 |x|)) for a set of the given size"""
    if size == 0:
        return 0.0
    return min(1.0, 1.0 / (params.b1 * size))


def iter_levels(params, x, frontier_cap=FRONTIER_CAP):
    """Run the branching process level by level

    Yields one Level per depth 0..k. Level 0 holds the w root fingerprints with
    no vertices; level i holds the fingerprints of the surviving children and
    the vertex j each of them appended. Stops early if a level dies out.

    Args:
        params (ChosenPathParams): Map instance
        x (SparseSet): Input set
        frontier_cap (int): Largest allowed frontier

    Raises:
        FrontierBlowupError: If a frontier exceeds frontier_cap
    """
    frontier = np.arange(params.w, dtype=np.uint64)
    yield Level(0, frontier, np.zeros(0, dtype=np.uint32))

    dims = x.dims
    if dims.size == 0:
        return

    cutoff = survival_cutoff(survival_probability(params, dims.size))
    rows_per_block = max(1, BLOCK_WORDS // dims.size)

    for level, h in enumerate(params.hashes, start=1):
        children = list()
        vertices = list()
        size = 0
        vertex_part = h.vertex_part(dims)
        for start in range(0, frontier.size, rows_per_block):
            fp_part = h.fingerprint_part(frontier[start:start + rows_per_block])
            if cutoff is None:
                words = fp_part[:, None] ^ vertex_part[None, :]
                children.append(extend_words(words.ravel()))
                vertices.append(np.tile(dims, fp_part.size))
            else:
                _, cols, words = surviving_pairs(fp_part, vertex_part, cutoff)
                children.append(extend_words(words))
                vertices.append(dims[cols])
            size += children[-1].size
            if size > frontier_cap:
                fail(FrontierBlowupError, "FRONTIER_BLOWUP", size, frontier_cap, level)

        frontier = np.concatenate(children) if children else np.zeros(0, dtype=np.uint64)
        logger.debug("Level {}: {} paths".format(level, frontier.size))
        yield Level(level, frontier, np.concatenate(vertices) if vertices else np.zeros(0, dtype=np.uint32))
        if frontier.size == 0:
            return


def evaluate_map(params, x, frontier_cap=FRONTIER_CAP):
    """Evaluate M_k(x)

    Args:
        params (ChosenPathParams): Map instance
        x (SparseSet): Input set, may be empty
        frontier_cap (int): Largest allowed frontier

    Returns:
        PathSet: Depth-k survivors (empty if the process dies out or x is empty)

    Raises:
        FrontierBlowupError: If a frontier exceeds frontier_cap
    """
    last = None
    for last in iter_levels(params, x, frontier_cap=frontier_cap):
        pass
    if last.level < params.k:
        return PathSet(np.zeros(0, dtype=np.uint64), params.k)
    return PathSet(np.unique(last.fingerprints), params.k)


def expected_bounds(params, level, similarity):
    """Analytic bounds on a level of the map

    Args:
        params (ChosenPathParams): Map instance
        level (int): i with 0 <= i <= k
        similarity (float): B(x, y) of the pair considered

    Returns:
        LemmaBounds: ((1/b1)^i w, (B/b1)^i w, w / (i + w))

    Raises:
        ParameterError: If level is outside 0..k
    """
    if not 0 <= level <= params.k:
        fail(ParameterError, "OUT_OF_RANGE", "level", level, 0, params.k)
    w = params.w
    return LemmaBounds(
        size_bound=(1 / params.b1) ** level * w,
        intersection_bound=(similarity / params.b1) ** level * w,
        collision_lower_bound=w / (level + w))


def stated_collision_bound(level, w):
    """Return i / (i + w), the collision bound in the form it is usually quoted"""
    return level / (level + w)


def sensitivity(params, n):
    """Return (m1, m2) = (n^rho w / b1, n^(rho - 1) w)

    Raises:
        ParameterError: If params has no b2
    """
    if params.b2 is None:
        fail(ParameterError, "INVALID_PARAMETER", "b2", None)
    rho = params.rho
    return (n ** rho * params.w / params.b1, n ** (rho - 1) * params.w)


def evaluation_cost_bound(params, query_size):
    """Expected number of hash evaluations for M_k(q): (b1^-k - 1) / (b1^-1 - 1) |q| w"""
    growth = 1 / params.b1
    return (growth ** params.k - 1) / (growth - 1) * query_size * params.w
