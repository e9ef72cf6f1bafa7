"""
Query exponents (rho values) of the set similarity search methods, the
comparisons between them, and CSV tables of the comparisons.

All formulas work on Python floats, on fractions.Fraction where they are
rational, and elementwise on numpy arrays.
"""
import csv
import enum
import math

from dataclasses import dataclass, field

import numpy as np

from chosenpath import fail, logger, ParameterError, VerificationError
from chosenpath.core import convert_threshold, MeasureKind, ThresholdPair
from chosenpath.paths import check_thresholds

# Significant digits of numbers in CSV output
CSV_DIGITS = 10

DEFAULT_RESOLUTION = 400

# Below this lower threshold Chosen Path beats data-dependent LSH everywhere
DATADEP_DOMINANCE_LIMIT = 0.2

GRID_FIELDS = ["b1", "b2", "rho_bitsampling", "rho_minhash", "rho_angular", "rho_datadep", "rho_chosenpath",
               "winner"]
REGIME_FIELDS = ["beta", "j1", "j2"] + GRID_FIELDS


class Method(enum.Enum):
    BITSAMPLING = "bitsampling"
    MINHASH = "minhash"
    ANGULAR = "angular"
    DATA_DEPENDENT = "datadep"
    CHOSEN_PATH = "chosenpath"

    @property
    def column(self):
        return "rho_" + self.value


# Winner on ties is the first method in this order
TIE_ORDER = [Method.CHOSEN_PATH, Method.MINHASH, Method.ANGULAR, Method.DATA_DEPENDENT, Method.BITSAMPLING]

REGIME_METHODS = [Method.CHOSEN_PATH, Method.MINHASH, Method.ANGULAR]


def _log(value):
    if isinstance(value, np.ndarray):
        return np.log(value)
    return math.log(value)


def _rho_values(method, b1, b2):
    if method is Method.BITSAMPLING:
        return (1 - b1) / (1 - b2)
    if method is Method.MINHASH:
        return _log(b1 / (2 - b1)) / _log(b2 / (2 - b2))
    if method is Method.ANGULAR:
        return ((1 - b1) / (1 + b1)) / ((1 - b2) / (1 + b2))
    if method is Method.DATA_DEPENDENT:
        return (1 - b1) / (1 + b1 - 2 * b2)
    return _log(b1) / _log(b2)


def rho(method, b1, b2):
    """Return the query exponent of `method` for Braun-Blanquet thresholds b1 > b2 (equal set sizes)

    Data-dependent LSH is reported ignoring its lower order terms.

    Args:
        method (Method): The method
        b1 (float): Upper threshold
        b2 (float): Lower threshold

    Returns:
        float: rho in (0, 1). Fraction inputs give a Fraction for the rational formulas.

    Raises:
        ParameterError: If 0 < b2 < b1 < 1 is violated
    """
    check_thresholds(b1, b2)
    return _rho_values(method, b1, b2)


def rho_hamming(method, r1, r2):
    """Return the query exponent for normalized Hamming distance thresholds r1 < r2

    Raises:
        ParameterError: If 0 < r1 < r2 < 1 is violated
    """
    if not 0 < r1 < r2 < 1:
        fail(ParameterError, "INVALID_PARAMETER", "(r1, r2)", (r1, r2))
    c = r1 / r2
    if method is Method.BITSAMPLING:
        return c
    if method is Method.MINHASH:
        return _log((1 - r1) / (1 + r1)) / _log((1 - r2) / (1 + r2))
    if method is Method.ANGULAR:
        return c * (1 - r2 / 2) / (1 - r1 / 2)
    if method is Method.DATA_DEPENDENT:
        return c / (2 - c)
    return _log(1 - r1) / _log(1 - r2)


def jaccard_to_braun_blanquet(j):
    """Return 2j / (1 + j), the Braun-Blanquet value of Jaccard j on equal-size sets"""
    return 2 * j / (1 + j)


def rho_jaccard(method, j1, j2):
    """Return the query exponent for Jaccard thresholds j1 > j2 (equal set sizes)"""
    check_thresholds(j1, j2)
    return rho(method, jaccard_to_braun_blanquet(j1), jaccard_to_braun_blanquet(j2))


def _winner(values, order=TIE_ORDER):
    best = None
    for method in order:
        if method in values and (best is None or values[method] < values[best]):
            best = method
    return best


@dataclass(frozen=True)
class RhoReport(object):
    """Query exponents of several methods for one threshold pair

    Attributes:
        thresholds (ThresholdPair): Thresholds the values were computed for
        values (dict): Method to rho
        winner (Method): Method with the smallest rho
    """
    thresholds: ThresholdPair
    values: dict = field(default_factory=dict)
    winner: Method = None

    def __getitem__(self, method):
        return self.values[method]


def rho_report(b1, b2):
    """Return a RhoReport over all five methods for Braun-Blanquet thresholds at equal set sizes"""
    check_thresholds(b1, b2)
    thresholds = ThresholdPair(b1, b2)
    values = {method: rho(method, b1, b2) for method in Method}
    return RhoReport(thresholds, values, _winner(values))


def regime_map(j1, j2, beta):
    """Compare MinHash, angular LSH and Chosen Path for Jaccard thresholds at size ratio beta

    Jaccard thresholds become Braun-Blanquet thresholds b = j(1 + beta)/(1 + j) for
    Chosen Path and cosine thresholds C = b / sqrt(beta) for angular LSH; MinHash
    works on j directly.

    Args:
        j1 (float): Upper Jaccard threshold
        j2 (float): Lower Jaccard threshold
        beta (float): Size ratio |y| / |x| in (0, 1]

    Returns:
        RhoReport: Values for the three methods, ties go to Chosen Path, then MinHash

    Raises:
        ParameterError: If 0 < j2 < j1 <= beta <= 1 is violated
        RangeError: If j1 is not attainable at beta
    """
    thresholds = ThresholdPair(j1, j2, MeasureKind.JACCARD, beta)
    if j2 <= 0:
        fail(ParameterError, "OUT_OF_RANGE", "j2", j2, 0, j1)
    b1, b2 = (convert_threshold(j, MeasureKind.JACCARD, MeasureKind.BRAUN_BLANQUET, beta) for j in (j1, j2))
    c1, c2 = (convert_threshold(j, MeasureKind.JACCARD, MeasureKind.COSINE, beta) for j in (j1, j2))
    values = {
        Method.MINHASH: math.log(1 / j1) / math.log(1 / j2),
        Method.CHOSEN_PATH: math.log(1 / b1) / math.log(1 / b2),
        Method.ANGULAR: _rho_values(Method.ANGULAR, c1, c2),
    }
    return RhoReport(thresholds, values, _winner(values, REGIME_METHODS))


def sampling_crossover(t, a):
    """Return (1 - (1 - 1/t)^a, a / (2t - a)) for t-sparse sets sharing a elements

    The first value is the probability that x ∩ b and y ∩ b intersect when b
    keeps every coordinate independently with probability 1/t; the second is
    the MinHash collision probability J = a / (2t - a).

    Raises:
        ParameterError: If 1 <= a <= t is violated
    """
    if not 1 <= a <= t:
        fail(ParameterError, "OUT_OF_RANGE", "a", a, 1, t)
    return 1 - (1 - 1 / t) ** a, a / (2 * t - a)


def crossover_fraction(t):
    """Return the smallest a / t at which subset sampling stops beating MinHash"""
    for a in range(1, t + 1):
        subset, minhash = sampling_crossover(t, a)
        if subset <= minhash:
            return a / t
    return 1.0


def minhash_ratio(b):
    """log(b / (2 - b)) / log(b), strictly increasing on (0, 1)"""
    return _log(b / (2 - b)) / _log(b)


def angular_ratio(b):
    """ln(b) (1 + b) / (1 - b), strictly increasing on (0, 1)"""
    return _log(b) * (1 + b) / (1 - b)


def cell_centers(resolution, high=1.0):
    """Return the centers of `resolution` equal cells of (0, high)"""
    return (np.arange(resolution) + 0.5) * (high / resolution)


def threshold_grid(resolution):
    """Return (b1, b2) arrays of all cell centers with b2 < b1, ordered by b1 then b2"""
    centers = cell_centers(resolution)
    b1, b2 = np.meshgrid(centers, centers, indexing="ij")
    below = b2 < b1
    return b1[below], b2[below]


@dataclass
class DominanceReport(object):
    """Outcome of a dominance scan

    Attributes:
        resolution (int): Cells per axis
        cells (int): Cells with b2 < b1
        datadep_better (int): Cells where data-dependent LSH beats Chosen Path
        datadep_better_below_limit (int): Such cells with b2 <= 1/5, always 0 after a passing scan
        sign_map (numpy.ndarray): int8 matrix indexed [b1 cell, b2 cell], sign of rho_cp - rho_datadep, 0 off-grid
    """
    resolution: int
    cells: int
    datadep_better: int
    datadep_better_below_limit: int
    sign_map: np.ndarray = None


def dominance_scan(resolution=DEFAULT_RESOLUTION):
    """Check on a grid of cell centers that Chosen Path has the smallest exponent

    Asserts rho_cp < rho_minhash and rho_cp < rho_angular at every cell and
    rho_cp < rho_datadep at every cell with b2 <= 1/5.

    Args:
        resolution (int): Cells per axis, at least 100

    Returns:
        DominanceReport: Counts and the sign map of rho_cp - rho_datadep

    Raises:
        ParameterError: If resolution < 100
        VerificationError: Naming the first violated cell
    """
    if resolution < 100:
        fail(ParameterError, "INVALID_PARAMETER", "resolution", resolution)
    centers = cell_centers(resolution)
    b1, b2 = np.meshgrid(centers, centers, indexing="ij")
    valid = b2 < b1
    v1, v2 = b1[valid], b2[valid]
    chosen = _rho_values(Method.CHOSEN_PATH, v1, v2)

    checks = [
        ("rho_chosenpath < rho_minhash", chosen < _rho_values(Method.MINHASH, v1, v2), np.ones(v1.size, bool)),
        ("rho_chosenpath < rho_angular", chosen < _rho_values(Method.ANGULAR, v1, v2), np.ones(v1.size, bool)),
    ]
    datadep = _rho_values(Method.DATA_DEPENDENT, v1, v2)
    checks.append(("rho_chosenpath < rho_datadep", chosen < datadep, v2 <= DATADEP_DOMINANCE_LIMIT))

    for name, holds, applies in checks:
        broken = np.flatnonzero(applies & ~holds)
        if broken.size:
            i = broken[0]
            cell = "{} at b1={:.6g} b2={:.6g}".format(name, v1[i], v2[i])
            fail(VerificationError, "CHECK_FAILED", [cell])

    sign_map = np.zeros(b1.shape, dtype=np.int8)
    sign_map[valid] = np.sign(chosen - datadep).astype(np.int8)
    datadep_better = chosen > datadep
    report = DominanceReport(
        resolution=resolution,
        cells=int(v1.size),
        datadep_better=int(np.count_nonzero(datadep_better)),
        datadep_better_below_limit=int(np.count_nonzero(datadep_better & (v2 <= DATADEP_DOMINANCE_LIMIT))),
        sign_map=sign_map)
    logger.info("Dominance scan passed on {} cells, data-dependent LSH better on {}".format(
        report.cells, report.datadep_better))
    return report


def fixed_rho_crossing(samples=10 ** 4, tolerance=1e-12):
    """Return the values of b2 where Chosen Path and data-dependent LSH tie on the curve b1 = sqrt(b2)

    Chosen Path has rho = 1/2 along the whole curve. Sign changes of the
    difference on a grid are refined by bisection.
    """
    def difference(b2):
        b1 = math.sqrt(b2)
        return _rho_values(Method.CHOSEN_PATH, b1, b2) - _rho_values(Method.DATA_DEPENDENT, b1, b2)

    grid = [float(v) for v in cell_centers(samples)]
    crossings = list()
    for low, high in zip(grid, grid[1:]):
        f_low, f_high = difference(low), difference(high)
        if f_low == 0:
            crossings.append(low)
            continue
        if f_low * f_high > 0:
            continue
        while high - low > tolerance:
            middle = (low + high) / 2
            if difference(middle) * f_low > 0:
                low = middle
            else:
                high = middle
        crossings.append((low + high) / 2)
    return crossings


#
# --------------------- CSV TABLES -------------------
#


def _grid_row(b1, b2):
    values = {method: _rho_values(method, b1, b2) for method in Method}
    row = {"b1": b1, "b2": b2, "winner": _winner(values).value}
    row.update({method.column: value for method, value in values.items()})
    return row


def grid_rows(resolution=DEFAULT_RESOLUTION):
    """Yield one row per grid cell with b2 < b1: all five exponents and the winner"""
    for b1, b2 in zip(*threshold_grid(resolution)):
        yield _grid_row(float(b1), float(b2))


def point_row(b1, b2):
    """Return the grid row of a single threshold pair"""
    check_thresholds(b1, b2)
    return _grid_row(b1, b2)


def regime_row(j1, j2, beta):
    """Return one REGIME_FIELDS row for Jaccard thresholds j1 > j2 at size ratio beta"""
    report = regime_map(j1, j2, beta)
    b1, b2 = (convert_threshold(j, MeasureKind.JACCARD, MeasureKind.BRAUN_BLANQUET, beta) for j in (j1, j2))
    row = {"beta": beta, "j1": j1, "j2": j2, "b1": b1, "b2": b2, "winner": report.winner.value}
    row.update({method.column: value for method, value in report.values.items()})
    return row


def regime_rows(betas, resolution=DEFAULT_RESOLUTION):
    """Yield the regime map rows for every beta over a grid of Jaccard thresholds 0 < j2 < j1 <= beta

    Bit-sampling and data-dependent columns are left empty.
    """
    for beta in betas:
        centers = cell_centers(resolution, high=beta)
        for j1 in centers:
            for j2 in centers:
                if j2 >= j1:
                    break
                yield regime_row(float(j1), float(j2), beta)


def figure2_rows(resolution=DEFAULT_RESOLUTION):
    """Yield equal-size rows along the slice j2 = j1 / 2, for j1 over the cell centers of (0, 1)"""
    for j1 in cell_centers(resolution):
        j1 = float(j1)
        j2 = j1 / 2
        row = _grid_row(jaccard_to_braun_blanquet(j1), jaccard_to_braun_blanquet(j2))
        row.update({"beta": 1, "j1": j1, "j2": j2})
        yield row


def format_number(value, digits=CSV_DIGITS):
    """Format a number with `digits` significant digits, None as an empty field"""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return "{:.{}g}".format(float(value), digits)


def write_csv(stream, fieldnames, rows, digits=CSV_DIGITS):
    """Write rows as CSV with a header to a text stream; missing fields stay empty

    Returns:
        int: Number of rows written
    """
    writer = csv.DictWriter(stream, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    count = 0
    for row in rows:
        writer.writerow({key: format_number(row.get(key), digits) for key in fieldnames})
        count += 1
    return count
