"""
Sparse sets, the set similarity measures, and conversions between them.

A set x in {0,1}^d is stored as the strictly increasing array of its
dimension indices. The universe size d is never stored.
"""
import enum
import io
import math

from dataclasses import dataclass

import numpy as np

from chosenpath import fail, EmptyPointError, MalformedInputError, ParameterError, RangeError, \
    UndefinedSimilarityError, UnsupportedParametrizationError

# Absolute slack for range checks on converted values
RANGE_SLACK = 1e-12

MAX_ELEMENT = 2 ** 32 - 1


class SparseSet(object):
    """Immutable set of dimension indices

    Attributes:
        dims (numpy.ndarray): Read-only, strictly increasing uint32 array
    """
    __slots__ = ("dims", "_hash")

    def __init__(self, dims):
        """Create a set from an already sorted sequence of indices

        Args:
            dims (sequence): Strictly increasing non-negative integers < 2**32

        Raises:
            ParameterError: If dims are not strictly increasing or out of range
        """
        arr = np.asarray(dims, dtype=np.int64).ravel()
        if arr.size > 0:
            if arr[0] < 0 or arr[-1] > MAX_ELEMENT:
                fail(ParameterError, "OUT_OF_RANGE", "element", arr[0] if arr[0] < 0 else arr[-1], 0, MAX_ELEMENT)
            if np.any(arr[1:] <= arr[:-1]):
                fail(ParameterError, "INVALID_PARAMETER", "dims", "not strictly increasing")
        arr = arr.astype(np.uint32)
        arr.flags.writeable = False
        self.dims = arr
        self._hash = None

    @classmethod
    def from_iterable(cls, elements):
        """Create a set from elements in any order, dropping duplicates"""
        return cls(np.unique(np.asarray(list(elements), dtype=np.int64)))

    def __len__(self):
        return int(self.dims.size)

    def __iter__(self):
        return (int(v) for v in self.dims)

    def __contains__(self, element):
        i = np.searchsorted(self.dims, element)
        return i < self.dims.size and int(self.dims[i]) == element

    def __eq__(self, other):
        if not isinstance(other, SparseSet):
            return NotImplemented
        return np.array_equal(self.dims, other.dims)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.dims.tobytes())
        return self._hash

    def __repr__(self):
        if len(self) > 8:
            shown = " ".join(str(v) for v in self.dims[:8]) + " ..."
        else:
            shown = " ".join(str(v) for v in self.dims)
        return "<SparseSet |x|={} [{}]>".format(len(self), shown)


class MeasureKind(enum.Enum):
    BRAUN_BLANQUET = "braun-blanquet"
    JACCARD = "jaccard"
    COSINE = "cosine"
    NORMALIZED_HAMMING = "hamming"


@dataclass(frozen=True)
class ThresholdPair(object):
    """Similarity thresholds s1 > s2 under a measure, for size ratio beta

    Raises:
        ParameterError: If s2 >= s1 or a value is outside its domain
        RangeError: If s1 exceeds the maximum attainable at beta
    """
    s1: float
    s2: float
    measure: MeasureKind = MeasureKind.BRAUN_BLANQUET
    beta: float = 1

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            fail(ParameterError, "OUT_OF_RANGE", "beta", self.beta, 0, 1)
        if not (0 < self.s1 <= 1 and 0 <= self.s2 < 1 and self.s2 < self.s1):
            fail(ParameterError, "THRESHOLD_ORDER", self.s1, self.s2)
        if self.measure is MeasureKind.NORMALIZED_HAMMING and self.beta != 1:
            fail(UnsupportedParametrizationError, "UNSUPPORTED_PARAMETRIZATION", self.measure.value, self.beta)

        highest = attainable_maximum(self.measure, self.beta)
        if self.s1 > highest + RANGE_SLACK:
            fail(RangeError, "OUT_OF_RANGE", "s1", self.s1, 0, highest)


def attainable_maximum(measure, beta):
    """Return the largest similarity reachable when |y| = beta |x|

    Args:
        measure (MeasureKind): Measure
        beta (float): Size ratio in (0, 1]

    Returns:
        float: beta for Braun-Blanquet and Jaccard, sqrt(beta) for cosine, 1 for Hamming
    """
    if measure is MeasureKind.COSINE:
        return math.sqrt(beta)
    if measure is MeasureKind.NORMALIZED_HAMMING:
        return 1
    return beta


def intersection_size(x, y):
    """Return |x ∩ y| for two sparse sets"""
    if len(x) == 0 or len(y) == 0:
        return 0
    return int(np.intersect1d(x.dims, y.dims, assume_unique=True).size)


def braun_blanquet(x, y):
    """Return |x ∩ y| / max(|x|, |y|)

    Raises:
        UndefinedSimilarityError: If both sets are empty
    """
    larger = max(len(x), len(y))
    if larger == 0:
        fail(UndefinedSimilarityError, "UNDEFINED_SIMILARITY", MeasureKind.BRAUN_BLANQUET.value)
    return intersection_size(x, y) / larger


def jaccard(x, y):
    """Return |x ∩ y| / |x ∪ y|

    Raises:
        UndefinedSimilarityError: If both sets are empty
    """
    if len(x) == 0 and len(y) == 0:
        fail(UndefinedSimilarityError, "UNDEFINED_SIMILARITY", MeasureKind.JACCARD.value)
    common = intersection_size(x, y)
    return common / (len(x) + len(y) - common)


def cosine(x, y):
    """Return |x ∩ y| / sqrt(|x| |y|)

    Raises:
        UndefinedSimilarityError: If either set is empty
    """
    if len(x) == 0 or len(y) == 0:
        fail(UndefinedSimilarityError, "UNDEFINED_SIMILARITY", MeasureKind.COSINE.value)
    return intersection_size(x, y) / math.sqrt(len(x) * len(y))


def hamming_distance(x, y):
    """Return the Hamming distance |x| + |y| - 2|x ∩ y| of the indicator vectors"""
    return len(x) + len(y) - 2 * intersection_size(x, y)


def normalized_hamming(x, y):
    """Return the Hamming distance divided by |x| + |y|

    For t-sparse pairs this is the distance normalized by 2t, i.e. 1 - B(x, y).

    Raises:
        UndefinedSimilarityError: If both sets are empty
    """
    total = len(x) + len(y)
    if total == 0:
        fail(UndefinedSimilarityError, "UNDEFINED_SIMILARITY", MeasureKind.NORMALIZED_HAMMING.value)
    return hamming_distance(x, y) / total


_MEASURES = {
    MeasureKind.BRAUN_BLANQUET: braun_blanquet,
    MeasureKind.JACCARD: jaccard,
    MeasureKind.COSINE: cosine,
}


def similarity(measure, x, y):
    """Evaluate `measure` on (x, y)

    Normalized Hamming is a distance, so its similarity is 1 - distance.

    Args:
        measure (MeasureKind): The measure
        x (SparseSet): First set
        y (SparseSet): Second set

    Returns:
        float: Similarity in [0, 1]
    """
    if measure is MeasureKind.NORMALIZED_HAMMING:
        return 1 - normalized_hamming(x, y)
    return _MEASURES[measure](x, y)


def _to_common(value, measure, beta):
    """Return b = |x ∩ y| / |x| for a value of `measure` at ratio beta"""
    if measure is MeasureKind.BRAUN_BLANQUET:
        return value
    if measure is MeasureKind.JACCARD:
        return value * (1 + beta) / (1 + value)
    if measure is MeasureKind.COSINE:
        return value * math.sqrt(beta)
    return 1 - value


def _from_common(b, measure, beta):
    if measure is MeasureKind.BRAUN_BLANQUET:
        return b
    if measure is MeasureKind.JACCARD:
        return b / (1 + beta - b)
    if measure is MeasureKind.COSINE:
        return b / math.sqrt(beta)
    return 1 - b


def convert_threshold(value, source, target, beta=1):
    """Convert a threshold between measures through b = |x ∩ y| / |x|, |y| = beta |x|

    Braun-Blanquet is b, Jaccard is b / (1 + beta - b), cosine is b / sqrt(beta)
    and normalized Hamming distance is 1 - b (beta = 1 only).

    Args:
        value (float): Threshold under `source`
        source (MeasureKind): Measure of `value`
        target (MeasureKind): Measure to convert to
        beta (float): Size ratio in (0, 1]

    Returns:
        float: Threshold under `target`

    Raises:
        UnsupportedParametrizationError: If Hamming is involved and beta != 1
        RangeError: If value, b or the result leave [0, 1]
        ParameterError: If beta is outside (0, 1]
    """
    if not 0 < beta <= 1:
        fail(ParameterError, "OUT_OF_RANGE", "beta", beta, 0, 1)
    for measure in (source, target):
        if measure is MeasureKind.NORMALIZED_HAMMING and beta != 1:
            fail(UnsupportedParametrizationError, "UNSUPPORTED_PARAMETRIZATION", measure.value, beta)
    if not -RANGE_SLACK <= value <= 1 + RANGE_SLACK:
        fail(RangeError, "OUT_OF_RANGE", source.value, value, 0, 1)
    if source is target:
        return value

    b = _to_common(value, source, beta)
    if not -RANGE_SLACK <= b <= 1 + RANGE_SLACK:
        fail(RangeError, "OUT_OF_RANGE", "b", b, 0, 1)
    converted = _from_common(b, target, beta)
    if not -RANGE_SLACK <= converted <= 1 + RANGE_SLACK:
        fail(RangeError, "OUT_OF_RANGE", target.value, converted, 0, 1)
    return converted


#
# --------------------- SET FILES -------------------
#


def parse_set_line(line, lineno=0):
    """Parse one line of a set file

    Args:
        line (str): Base-10 integers separated by single spaces, strictly increasing
        lineno (int): Line number reported in errors

    Returns:
        SparseSet: The parsed set

    Raises:
        MalformedInputError: If a token is not an integer, out of range or out of order
    """
    tokens = line.strip().split(" ")
    try:
        values = [int(tok, 10) for tok in tokens]
    except ValueError:
        fail(MalformedInputError, "MALFORMED_LINE", lineno, "expected integers separated by single spaces",
            lineno=lineno)

    for previous, current in zip(values, values[1:]):
        if current <= previous:
            fail(MalformedInputError, "MALFORMED_LINE", lineno, "elements not strictly increasing", lineno=lineno)
    if values[0] < 0 or values[-1] > MAX_ELEMENT:
        fail(MalformedInputError, "MALFORMED_LINE", lineno, "element outside the 32-bit range", lineno=lineno)
    return SparseSet(values)


def read_sets(stream):
    """Read sets from a text stream in set-file format

    Blank lines are skipped; the point id is the 0-based index among non-blank lines.
    Line numbers in errors are 1-based physical line numbers.

    Args:
        stream: Iterable of text lines

    Returns:
        list: SparseSet objects in file order
    """
    sets = list()
    for lineno, line in enumerate(stream, start=1):
        if line.strip() == "":
            continue
        sets.append(parse_set_line(line, lineno))
    return sets


def read_set_file(path):
    """Read a UTF-8 set file from `path`, see read_sets"""
    with io.open(path, "r", encoding="utf-8") as f:
        return read_sets(f)


def format_set(x):
    """Return the set-file line (without newline) for x"""
    return " ".join(str(v) for v in x.dims)


def write_set_file(path, sets):
    """Write sets to `path` in set-file format

    Raises:
        EmptyPointError: If a set is empty, since it would be read back as a blank line
    """
    with io.open(path, "w", encoding="utf-8") as f:
        for point_id, x in enumerate(sets):
            if len(x) == 0:
                fail(EmptyPointError, "EMPTY_POINT", point_id, point_id=point_id)
            f.write(format_set(x) + "\n")
