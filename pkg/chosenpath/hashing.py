"""
Seeded simple tabulation (Zobrist) hashing.

Tables are generated from a 64-bit seed with the splitmix64 generator:

    state_i = seed + i * 0x9E3779B97F4A7C15            (i = 1, 2, ...)
    z = (state_i ^ (state_i >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    word_i = z ^ (z >> 31)                             (all arithmetic mod 2**64)

Table position p, byte value v holds word_{p * 256 + v + 1}. A path hash reads
its 12 byte input as the path fingerprint (8 bytes, little-endian) followed by
the vertex (4 bytes, little-endian).
"""
from dataclasses import dataclass

import numpy as np

from chosenpath import fail, ParameterError

MASK64 = 2 ** 64 - 1
TWO_64 = 2.0 ** 64

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MULTIPLIER_1 = 0xBF58476D1CE4E5B9
MIX_MULTIPLIER_2 = 0x94D049BB133111EB

FINGERPRINT_BYTES = 8
VERTEX_BYTES = 4
PAIR_WIDTH = FINGERPRINT_BYTES + VERTEX_BYTES

_U64 = np.uint64


def mix64_int(z):
    """splitmix64 finalizer on a Python int"""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_MULTIPLIER_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MULTIPLIER_2) & MASK64
    return z ^ (z >> 31)


def mix64(values):
    """splitmix64 finalizer, vectorized over a uint64 array"""
    z = np.asarray(values, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _U64(MIX_MULTIPLIER_1)
        z = (z ^ (z >> _U64(27))) * _U64(MIX_MULTIPLIER_2)
    return z ^ (z >> _U64(31))


def splitmix64_stream(seed, count):
    """Return the first `count` outputs of splitmix64 started at `seed`

    Args:
        seed (int): 64-bit seed, larger values are reduced mod 2**64
        count (int): Number of words

    Returns:
        numpy.ndarray: uint64 array of length count
    """
    steps = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = steps * _U64(GOLDEN_GAMMA) + _U64(int(seed) & MASK64)
    return mix64(states)


def derive_seeds(seed, count):
    """Return `count` independent 64-bit Python int seeds derived from `seed`"""
    return [int(v) for v in splitmix64_stream(seed, count)]


def level_seed(master_seed, level):
    """Seed of the level hash h_level, derived as master XOR level"""
    return (int(master_seed) ^ int(level)) & MASK64


class TabulationHash(object):
    """Simple tabulation hash over a fixed number of input byte positions

    The hash of an input is the XOR of tables[p][byte_p] over its bytes. The
    empty input hashes to 0.

    Attributes:
        seed (int): 64-bit seed that determines all tables
        width (int): Number of input byte positions
        tables (numpy.ndarray): Read-only uint64 array of shape (width, 256)
    """

    def __init__(self, seed, width=PAIR_WIDTH):
        if width < 0:
            fail(ParameterError, "INVALID_PARAMETER", "width", width)
        self.seed = int(seed) & MASK64
        self.width = width
        self.tables = splitmix64_stream(self.seed, width * 256).reshape(width, 256)
        self.tables.flags.writeable = False

    def __repr__(self):
        return "<TabulationHash seed={:#018x} width={}>".format(self.seed, self.width)

    def hash_bytes(self, data):
        """Hash a byte string of at most `width` bytes

        Raises:
            ParameterError: If data is longer than the table width
        """
        if len(data) > self.width:
            fail(ParameterError, "INVALID_PARAMETER", "input length", len(data))
        h = 0
        for position, byte in enumerate(bytearray(data)):
            h ^= int(self.tables[position, byte])
        return h

    def hash_rows(self, rows):
        """Hash every row of a uint8 matrix

        Args:
            rows (numpy.ndarray): Shape (n, m) with m <= width

        Returns:
            numpy.ndarray: uint64 array of length n
        """
        rows = np.asarray(rows, dtype=np.uint8)
        n, m = rows.shape
        if m > self.width:
            fail(ParameterError, "INVALID_PARAMETER", "input length", m)
        if m == 0:
            return np.zeros(n, dtype=np.uint64)
        looked_up = self.tables[np.arange(m), rows]
        return np.bitwise_xor.reduce(looked_up, axis=1)

    def _fold(self, values, first_position, count):
        acc = np.zeros(values.shape, dtype=np.uint64)
        for i in range(count):
            byte = ((values >> _U64(8 * i)) & _U64(0xFF)).astype(np.intp)
            acc ^= self.tables[first_position + i, byte]
        return acc

    def hash_words(self, values):
        """Hash every uint64 of `values`, read as 8 little-endian bytes"""
        if self.width < FINGERPRINT_BYTES:
            fail(ParameterError, "INVALID_PARAMETER", "width", self.width)
        return self._fold(np.asarray(values, dtype=np.uint64), 0, FINGERPRINT_BYTES)

    def hash_pairs(self, fingerprints, vertices):
        """Hash every (fingerprint, vertex) combination

        Args:
            fingerprints (array-like): uint64 path fingerprints, length F
            vertices (array-like): uint32 dimension indices, length V

        Returns:
            numpy.ndarray: uint64 matrix of shape (F, V)
        """
        return self.fingerprint_part(fingerprints)[:, None] ^ self.vertex_part(vertices)[None, :]

    def fingerprint_part(self, fingerprints):
        """XOR of the table words of the fingerprint bytes, positions 0..7"""
        return self._fold(np.asarray(fingerprints, dtype=np.uint64), 0, FINGERPRINT_BYTES)

    def vertex_part(self, vertices):
        """XOR of the table words of the vertex bytes, positions 8..11"""
        return self._fold(np.asarray(vertices, dtype=np.uint64), FINGERPRINT_BYTES, VERTEX_BYTES)

    def hash_pair(self, fingerprint, vertex):
        """Hash a single (fingerprint, vertex) pair to a Python int"""
        return int(self.hash_pairs([int(fingerprint) & MASK64], [int(vertex)])[0, 0])


@dataclass(frozen=True)
class PathFingerprint(object):
    """Compressed identity of a path of length `depth`"""
    value: int
    depth: int


def threshold_value(h, fp, vertex):
    """Return h(fp, vertex) as a binary fraction in [0, 1)"""
    return h.hash_pair(fp.value, vertex) / TWO_64


def extend_fingerprint(h, fp, vertex):
    """Return the fingerprint of the path fp extended by vertex"""
    return PathFingerprint(mix64_int(h.hash_pair(fp.value, vertex)), fp.depth + 1)


def extend_words(words):
    """Fingerprints of the children whose hash words are `words` (vectorized extend_fingerprint)"""
    return mix64(words)


def surviving_pairs(fp_part, vertex_part, cutoff):
    """Find every (row, col) with fp_part[row] ^ vertex_part[col] < cutoff

    Same result as thresholding hash_pairs, without the dense matrix: a word
    below cutoff agrees with zero on every bit from cutoff.bit_length() up, so
    both parts must agree there. Candidates are matched on those high bits by
    binary search and then compared exactly.

    Returns:
        tuple: (rows, cols, words) in row-major order
    """
    fp_part = np.asarray(fp_part, dtype=np.uint64)
    vertex_part = np.asarray(vertex_part, dtype=np.uint64)
    bits = int(cutoff).bit_length()
    if bits >= 64:
        words = fp_part[:, None] ^ vertex_part[None, :]
        rows, cols = np.nonzero(words < cutoff)
        return rows, cols, words[rows, cols]

    shift = _U64(bits)
    order = np.argsort(vertex_part >> shift, kind="stable")
    sorted_high = (vertex_part >> shift)[order]
    high = fp_part >> shift
    first = np.searchsorted(sorted_high, high, side="left")
    counts = np.searchsorted(sorted_high, high, side="right") - first
    rows = np.repeat(np.arange(fp_part.size), counts)
    offsets = np.repeat(first - (np.cumsum(counts) - counts), counts)
    cols = order[np.arange(rows.size) + offsets]

    words = fp_part[rows] ^ vertex_part[cols]
    keep = words < cutoff
    rows, cols, words = rows[keep], cols[keep], words[keep]
    row_major = np.lexsort((cols, rows))
    return rows[row_major], cols[row_major], words[row_major]


def survival_cutoff(probability):
    """Return the uint64 cutoff c with Pr[word < c] = probability, or None when every word survives

    Args:
        probability (float): Survival probability, >= 0
    """
    if probability >= 1:
        return None
    if probability <= 0:
        return _U64(0)
    return _U64(min(int(probability * TWO_64), MASK64))
