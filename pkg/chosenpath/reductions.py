"""
Reductions around the Chosen Path map: converting a locality-sensitive map
into a single-valued hash, the Hamming to Braun-Blanquet transform, size
classes, threshold translation for symmetric measures and OR-compression.
"""
import io
import math

from collections import OrderedDict

import numpy as np

from chosenpath import fail, logger, EmptyPointError, InfeasibleThresholdError, MalformedInputError, \
    ParameterError
from chosenpath.core import MeasureKind, SparseSet
from chosenpath.hashing import derive_seeds, mix64, splitmix64_stream, TabulationHash
from chosenpath.paths import evaluate_map, FRONTIER_CAP

# Salt separating sentinel fingerprints from everything else hashed with mix64
SENTINEL_SALT = 0x5EB7A5E1


#
# --------------------- LSM TO LSH -------------------
#


def padding_size(m1):
    """Return m = ceil(8 m1), at least 1"""
    return max(1, int(math.ceil(8 * m1)))


def set_fingerprint(x, salt=SENTINEL_SALT):
    """Return a 64-bit fingerprint of the set x"""
    mixed = mix64(x.dims.astype(np.uint64) ^ np.uint64(salt))
    folded = np.bitwise_xor.reduce(mixed) if mixed.size else np.uint64(0)
    return int(mix64(np.uint64(folded) ^ np.uint64(len(x))))


class PaddedMapHash(object):
    """Single-valued hash derived from a locality-sensitive map

    M(x) is padded to exactly m elements with sentinels (x, 1), (x, 2), ...
    and replaced by m sentinels when |M(x)| >= m. The hash value is the
    element of the padded set that comes first in a random order.

    Sentinels are the splitmix64 stream of the set's fingerprint. They live in
    the same 64-bit space as map fingerprints, collisions between the two are
    ignored.

    Attributes:
        map_fn (callable): SparseSet -> uint64 array of map values
        m (int): Padded set size
        order (TabulationHash): Random order on 64-bit values
    """

    def __init__(self, map_fn, m1, order_seed):
        self.map_fn = map_fn
        self.m = padding_size(m1)
        self.order = TabulationHash(order_seed)

    def padded(self, x):
        """Return the padded set of x as a uint64 array of m elements"""
        values = np.unique(np.asarray(self.map_fn(x), dtype=np.uint64))
        if values.size >= self.m:
            values = np.zeros(0, dtype=np.uint64)
        sentinels = splitmix64_stream(set_fingerprint(x), self.m - values.size)
        return np.concatenate([values, sentinels])

    def __call__(self, x):
        elements = self.padded(x)
        ranks = self.order.hash_words(elements)
        return int(elements[np.lexsort((elements, ranks))[0]])


def lsm_to_lsh(sample_map, m1, seed):
    """Sample a hash function from the family induced by a map family

    Args:
        sample_map (callable): seed -> (SparseSet -> array of map values)
        m1 (float): Bound on the expected map size
        seed (int): Seed for the map and the order

    Returns:
        PaddedMapHash: The hash function
    """
    map_seed, order_seed = derive_seeds(seed, 2)
    return PaddedMapHash(sample_map(map_seed), m1, order_seed)


def chosen_path_sampler(params, frontier_cap=FRONTIER_CAP):
    """Return a map sampler drawing Chosen Path maps with the shape of params"""
    def sample(seed):
        instance = params.reseeded(seed)
        return lambda x: evaluate_map(instance, x, frontier_cap=frontier_cap).fingerprints
    return sample


#
# --------------------- HAMMING TO BRAUN-BLANQUET -------------------
#


def hamming_gap(b1, b2, eps):
    """Return the approximation factor c = ln(1/(b2 - eps)) / ln(1/(b1 + eps))"""
    if not 0 < b2 - eps < b1 + eps < 1:
        fail(ParameterError, "INVALID_PARAMETER", "eps", eps)
    return math.log(1 / (b2 - eps)) / math.log(1 / (b1 + eps))


class TransformT(object):
    """Random map from D-dimensional bit vectors to t-sparse sets in dimension t l

    Block b reads x at tau sampled indices, hashes the tau bits with a
    tabulation hash g_b and sets element b l + (g_b mod l).

    Attributes:
        D (int): Source dimension
        t (int): Number of blocks, the cardinality of every output
        l (int): Block width
        tau (int): Sampled bits per block
        eps (float): Accuracy parameter the shape was chosen for, or None
        seed (int): Seed of the sampled indices and block hashes
        indices (numpy.ndarray): int64 matrix of shape (t, tau)
        hashes (list): One TabulationHash g_b of width ceil(tau / 8) per block
    """

    def __init__(self, D, t, l, tau, seed=0, eps=None):
        for name, value in (("D", D), ("t", t), ("l", l), ("tau", tau)):
            if value < 1:
                fail(ParameterError, "INVALID_PARAMETER", name, value)
        self.D = D
        self.t = t
        self.l = l
        self.tau = tau
        self.eps = eps
        self.seed = seed

        index_seed, hash_seed = derive_seeds(seed, 2)
        rng = np.random.default_rng(index_seed)
        self.indices = rng.integers(0, D, size=(t, tau), dtype=np.int64)
        width = (tau + 7) // 8
        self.hashes = [TabulationHash(s, width=width) for s in derive_seeds(hash_seed, t)]

    def __repr__(self):
        return "<TransformT D={} t={} l={} tau={}>".format(self.D, self.t, self.l, self.tau)

    @property
    def dimension(self):
        """Output dimension t l"""
        return self.t * self.l

    @classmethod
    def for_thresholds(cls, D, b1, eps, d, seed=0):
        """Shape the transform as tau = floor(sqrt(D) ln(1/(b1 + eps))), l = ceil(8/eps), t = floor(d/l)

        Args:
            D (int): Source dimension
            b1 (float): Upper Braun-Blanquet threshold
            eps (float): Accuracy parameter, eps >= 1/d
            d (int): Output dimension bound, t l <= d
            seed (int): Seed

        Raises:
            ParameterError: If a derived quantity is smaller than 1 or eps < 1/d
        """
        if not 0 < b1 + eps < 1 or eps <= 0:
            fail(ParameterError, "INVALID_PARAMETER", "b1 + eps", b1 + eps)
        if eps < 1 / d:
            fail(ParameterError, "OUT_OF_RANGE", "eps", eps, 1 / d, 1)
        tau = int(math.floor(math.sqrt(D) * math.log(1 / (b1 + eps))))
        l = int(math.ceil(8 / eps))
        t = d // l
        if t < 1:
            fail(ParameterError, "INVALID_PARAMETER", "t", t)
        if tau < 1:
            fail(ParameterError, "INVALID_PARAMETER", "tau", tau)
        return cls(D, t, l, tau, seed=seed, eps=eps)

    def block_values(self, bits):
        """Return the g values of every block, shape (..., t), for bit vectors of shape (..., D)"""
        bits = np.asarray(bits, dtype=bool)
        if bits.shape[-1] != self.D:
            fail(ParameterError, "INVALID_PARAMETER", "bit vector length", bits.shape[-1])
        packed = np.packbits(bits[..., self.indices], axis=-1)
        lead = packed.shape[:-2]
        words = np.empty(lead + (self.t,), dtype=np.uint64)
        for block, g in enumerate(self.hashes):
            rows = packed[..., block, :].reshape(-1, packed.shape[-1])
            words[..., block] = g.hash_rows(rows).reshape(lead)
        return (words % np.uint64(self.l)).astype(np.int64)

    def transform(self, bits):
        """Return T(x) for one bit vector of length D as a SparseSet of exactly t elements"""
        values = self.block_values(bits)
        return SparseSet(np.arange(self.t, dtype=np.int64) * self.l + values)

    def transform_many(self, matrix):
        """Return T(x) for every row of a (N, D) bit matrix"""
        values = self.block_values(matrix)
        offsets = np.arange(self.t, dtype=np.int64) * self.l
        return [SparseSet(offsets + row) for row in values]

    def block_matches(self, x, y):
        """Return the fraction of blocks where T(x) and T(y) agree, which is B(T(x), T(y))"""
        return float(np.mean(self.block_values(x) == self.block_values(y)))


def parse_bitvector(line, lineno=0, dimension=None):
    """Parse one hex row, most significant bit first, as a bool array

    Args:
        line (str): Hexadecimal digits
        lineno (int): Line number reported in errors
        dimension (int): Keep the first `dimension` coordinates, default 4 bits per digit

    Raises:
        MalformedInputError: If the row is not hexadecimal or shorter than `dimension`
    """
    digits = line.strip()
    if len(digits) % 2:
        digits += "0"
    try:
        raw = bytes.fromhex(digits)
    except ValueError:
        fail(MalformedInputError, "MALFORMED_LINE", lineno, "expected hexadecimal digits", lineno=lineno)
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8)).astype(bool)
    if dimension is None:
        return bits[:4 * len(line.strip())]
    if dimension > bits.size:
        fail(MalformedInputError, "MALFORMED_LINE", lineno, "fewer than {} bits".format(dimension), lineno=lineno)
    return bits[:dimension]


def read_bitvectors(stream, dimension=None):
    """Read hex rows from a text stream into an (N, D) bool matrix, skipping blank lines

    Raises:
        MalformedInputError: If a row is malformed or rows differ in length
    """
    rows = list()
    for lineno, line in enumerate(stream, start=1):
        if line.strip() == "":
            continue
        row = parse_bitvector(line, lineno, dimension)
        if rows and row.size != rows[0].size:
            fail(MalformedInputError, "MALFORMED_LINE", lineno, "row length differs from the first row",
                lineno=lineno)
        rows.append(row)
    if not rows:
        return np.zeros((0, dimension or 0), dtype=bool)
    return np.vstack(rows)


def read_bitvector_file(path, dimension=None):
    """Read a UTF-8 file of hex rows, see read_bitvectors"""
    with io.open(path, "r", encoding="utf-8") as f:
        return read_bitvectors(f, dimension)


def format_bitvector(bits):
    """Return the hex row of a bool array, most significant bit first"""
    bits = np.asarray(bits, dtype=bool)
    digits = np.packbits(bits).tobytes().hex()
    return digits[:(bits.size + 3) // 4]


#
# --------------------- SIZE CLASSES AND THRESHOLDS -------------------
#


def size_class(x):
    """Return floor(log2 |x|)"""
    if len(x) == 0:
        fail(EmptyPointError, "EMPTY_POINT", None)
    return len(x).bit_length() - 1


def split_by_size(points):
    """Partition points by floor(log2 |x|)

    Args:
        points (list): Non-empty SparseSets

    Returns:
        OrderedDict: class -> list of (point id, SparseSet), classes ascending, ids ascending

    Raises:
        EmptyPointError: If a point is empty
    """
    classes = dict()
    for point_id, x in enumerate(points):
        if len(x) == 0:
            fail(EmptyPointError, "EMPTY_POINT", point_id, point_id=point_id)
        classes.setdefault(size_class(x), []).append((point_id, x))
    return OrderedDict(sorted(classes.items()))


def merge_classes(classes):
    """Inverse of split_by_size: return the points ordered by point id"""
    members = sorted((point_id, x) for members in classes.values() for point_id, x in members)
    return [x for _, x in members]


def measure_profile(measure, t_query, t_point):
    """Return f(i), the similarity of a t_query-set and a t_point-set sharing i elements

    f is nondecreasing on 0 .. min(t_query, t_point).
    """
    if t_query < 1 or t_point < 1:
        fail(ParameterError, "INVALID_PARAMETER", "set size", min(t_query, t_point))
    if measure is MeasureKind.BRAUN_BLANQUET:
        return lambda i: i / max(t_query, t_point)
    if measure is MeasureKind.JACCARD:
        return lambda i: i / (t_query + t_point - i)
    if measure is MeasureKind.COSINE:
        return lambda i: i / math.sqrt(t_query * t_point)
    return lambda i: 2 * i / (t_query + t_point)


def threshold_translate(f, s1, s2, t, t_prime):
    """Translate similarity thresholds into intersection size thresholds

    Returns i1 = min{i : f(i) >= s1} and i2 = min{i : f(i) > s2} over
    i = 0 .. min(t, t_prime).

    Args:
        f (callable): Nondecreasing intersection size -> similarity
        s1 (float): Upper threshold
        s2 (float): Lower threshold, s2 < s1
        t (int): Point size
        t_prime (int): Query size

    Returns:
        tuple: (i1, i2)

    Raises:
        ParameterError: If s2 >= s1
        InfeasibleThresholdError: If f never reaches s1
    """
    if not s2 < s1:
        fail(ParameterError, "THRESHOLD_ORDER", s1, s2)
    top = min(t, t_prime)
    if f(top) < s1:
        fail(InfeasibleThresholdError, "INFEASIBLE_THRESHOLD", s1, f(top))
    i1 = next(i for i in range(top + 1) if f(i) >= s1)
    i2 = next(i for i in range(top + 1) if f(i) > s2)
    return i1, i2


#
# --------------------- DIMENSION REDUCTION -------------------
#


def default_target_dimension(n):
    """Return round((ln n)^3), at least 1"""
    return max(1, int(round(math.log(max(n, 2)) ** 3)))


def or_sample_size(d, n, size_class_index):
    """Return |I_j| = ceil(d / (2^(i+1) ln n)), capped at d"""
    size = int(math.ceil(d / (2 ** (size_class_index + 1) * math.log(max(n, 2)))))
    return min(d, max(1, size))


class OrCompression(object):
    """Map x in {0,1}^d to x' in {0,1}^d' with x'_j the OR of x over a random set I_j

    Attributes:
        d (int): Source dimension
        d_prime (int): Target dimension
        sample_size (int): |I_j|
        seed (int): Seed of the sets I_j
        members (numpy.ndarray): Source coordinates of all I_j, sorted
        owners (numpy.ndarray): Target coordinate j of each entry of members
    """

    def __init__(self, d, d_prime, sample_size, seed=0):
        if d_prime < 1:
            fail(ParameterError, "INVALID_PARAMETER", "d'", d_prime)
        if d < 1 or not 1 <= sample_size <= d:
            fail(ParameterError, "INVALID_PARAMETER", "sample size", sample_size)
        self.d = d
        self.d_prime = d_prime
        self.sample_size = sample_size
        self.seed = seed

        coordinates = list()
        for j, j_seed in enumerate(derive_seeds(seed, d_prime)):
            rng = np.random.default_rng(j_seed)
            coordinates.append(rng.choice(d, size=sample_size, replace=False))
        members = np.concatenate(coordinates).astype(np.int64)
        owners = np.repeat(np.arange(d_prime, dtype=np.int64), sample_size)
        order = np.argsort(members, kind="stable")
        self.members = members[order]
        self.owners = owners[order]

    def __call__(self, x):
        dims = x.dims.astype(np.int64)
        if dims.size and dims[-1] >= self.d:
            fail(ParameterError, "OUT_OF_RANGE", "element", int(dims[-1]), 0, self.d - 1)
        starts = np.searchsorted(self.members, dims, side="left")
        ends = np.searchsorted(self.members, dims, side="right")
        hit = [self.owners[s:e] for s, e in zip(starts, ends)]
        if not hit:
            return SparseSet([])
        return SparseSet(np.unique(np.concatenate(hit)))


def dimension_reduce(points, d, d_prime, n, seed=0, size_class_index=None):
    """Reduce points of one size class to d' dimensions by OR-compression

    |I_j| is chosen so that Pr[x'_j = 1] is about 1/ln n at |x| = 2^(i+1).

    Args:
        points (list): SparseSets in [0, d), all of size class i (empty sets allowed)
        d (int): Source dimension
        d_prime (int): Target dimension, >= 1
        n (int): Data set size the compression is tuned for
        seed (int): Seed
        size_class_index (int): Class i, inferred from the points if None

    Returns:
        list: Reduced SparseSets in [0, d')

    Raises:
        ParameterError: If d' < 1 or points span several size classes
    """
    if d_prime < 1:
        fail(ParameterError, "INVALID_PARAMETER", "d'", d_prime)
    classes = {size_class(x) for x in points if len(x) > 0}
    if size_class_index is None:
        size_class_index = min(classes) if classes else 0
    if classes - {size_class_index}:
        fail(ParameterError, "INVALID_PARAMETER", "size classes", sorted(classes))
    compression = OrCompression(d, d_prime, or_sample_size(d, n, size_class_index), seed)
    logger.debug("OR-compression of {} points from {} to {} dimensions, |I_j| = {}".format(
        len(points), d, d_prime, compression.sample_size))
    return [compression(x) for x in points]
