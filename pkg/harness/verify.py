"""
Monte Carlo verification of the map properties, the map to hash conversion
and the Hamming to Braun-Blanquet transform.

Every harness returns a VerificationReport: a list of Checks comparing an
estimate and its standard error with an analytic target.
"""
import math

from dataclasses import dataclass, field

import numpy as np

from chosenpath import fail, notification_signals, ParameterError
from chosenpath.hashing import derive_seeds
from chosenpath.paths import evaluate_map, expected_bounds, stated_collision_bound, FRONTIER_CAP
from chosenpath.reductions import chosen_path_sampler, lsm_to_lsh, TransformT
from harness import logger
from harness.instances import overlaps_for, pair_with_overlap, UNIVERSE

check_finished = notification_signals.signal('check-finished')

# Checks pass when the estimate is within this many standard errors of the target
SE_TOLERANCE = 4

# Smallest trial count that gives stable standard errors
MIN_TRIALS = 1000


@dataclass(frozen=True)
class Check(object):
    """One estimate compared with an analytic target

    Attributes:
        name (str): Identifier of the property
        estimate (float): Monte Carlo estimate
        standard_error (float): Standard error of the estimate
        target (float): Analytic value
        relation (str): ">=" (estimate at least target), "<=" (at most), "~" (equal) or "==" (exact)
        passed (bool): Whether the estimate is consistent with the target
        trials (int): Number of samples
        detail (str): Free-form context
    """
    name: str
    estimate: float
    standard_error: float
    target: float
    relation: str
    passed: bool
    trials: int
    detail: str = ""

    def as_dict(self):
        return {
            "name": self.name,
            "estimate": self.estimate,
            "standard_error": self.standard_error,
            "target": self.target,
            "relation": self.relation,
            "passed": self.passed,
            "trials": self.trials,
            "detail": self.detail,
        }

    def describe(self):
        return "{:<28} {:.6g} ± {:.2g} {} {:.6g}  {}".format(
            self.name, self.estimate, self.standard_error, self.relation, self.target,
            "ok" if self.passed else "FAILED")


@dataclass
class VerificationReport(object):
    """Checks of one harness run

    Attributes:
        harness (str): Harness name
        parameters (dict): Parameters of the run
        checks (list): Check objects in the order they were run
    """
    harness: str
    parameters: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failed(self):
        return [check.name for check in self.checks if not check.passed]

    def as_dict(self):
        return {
            "harness": self.harness,
            "parameters": self.parameters,
            "passed": self.passed,
            "checks": [check.as_dict() for check in self.checks],
        }


def mean_and_error(samples):
    """Return (mean, standard error of the mean) of a sample"""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        fail(ParameterError, "NO_POINTS")
    if samples.size == 1:
        return float(samples[0]), 0.0
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(samples.size))


def compare(name, samples, target, relation, detail="", tolerance=SE_TOLERANCE):
    """Build a Check from raw samples

    Args:
        name (str): Check name
        samples (array-like): One value per trial
        target (float): Analytic target
        relation (str): ">=", "<=", "~" or "=="
        detail (str): Context for the report
        tolerance (float): Allowed deviation in standard errors

    Returns:
        Check: The comparison
    """
    estimate, error = mean_and_error(samples)
    slack = tolerance * error
    if relation == ">=":
        passed = estimate + slack >= target
    elif relation == "<=":
        passed = estimate - slack <= target
    elif relation == "~":
        passed = abs(estimate - target) <= slack + 1e-12 * max(1.0, abs(target))
    elif relation == "==":
        passed = bool(np.all(np.asarray(samples) == target))
    else:
        fail(ParameterError, "INVALID_PARAMETER", "relation", relation)
    return Check(name, estimate, error, target, relation, bool(passed), int(np.asarray(samples).size), detail)


def _finish(report):
    for check in report.checks:
        logger.info("{}: {}".format(report.harness, check.describe()))
        check_finished.send(report.harness, check=check)
    if not report.passed:
        logger.warning("{}: failed {}".format(report.harness, ", ".join(report.failed)))
    return report


def _warn_trials(harness, trials):
    if trials < MIN_TRIALS:
        logger.warning("{}: {} trials is below {}, standard errors are rough".format(harness, trials, MIN_TRIALS))


def verify_lemma4(params, t, trials, seed=0, universe=UNIVERSE, frontier_cap=FRONTIER_CAP):
    """Estimate the size, overlap and collision properties of the map

    Every trial draws a fresh map instance with the shape of params and fresh
    t-sparse pairs: one pair at B = floor(b2 t)/t and one at B = ceil(b1 t)/t.

    Checks:
        size: E|M_k(x)| = w (t p)^k with p = min(1, 1/(b1 t)), which is w / b1^k when b1 t >= 1
        intersection_b2: E|M_k(x) ∩ M_k(y)| = w (a p)^k at overlap a = floor(b2 t)
        collision_b1: Pr[M_k(x) ∩ M_k(y) nonempty] >= 1/2 and >= w / (k + w) at overlap ceil(b1 t)
        self_collision: Pr[M_k(x) nonempty] == 1 when t <= 1/b1

    Args:
        params (ChosenPathParams): Map shape, must carry b2
        t (int): Set size
        trials (int): Number of trials
        seed (int): Seed

    Returns:
        VerificationReport: The checks
    """
    if params.b2 is None:
        fail(ParameterError, "INVALID_PARAMETER", "b2", None)
    if trials < 1:
        fail(ParameterError, "INVALID_PARAMETER", "trials", trials)
    _warn_trials("lemma4", trials)
    rng = np.random.default_rng(seed)
    planted_overlap, decoy_overlap = overlaps_for(t, params.b1, params.b2)
    k, w = params.k, params.w
    p = min(1.0, 1.0 / (params.b1 * t))

    sizes = np.zeros(trials)
    low_overlaps = np.zeros(trials)
    collisions = np.zeros(trials)
    nonempty = np.zeros(trials)
    for i, trial_seed in enumerate(derive_seeds(seed, trials)):
        instance = params.reseeded(trial_seed)
        x, y = pair_with_overlap(rng, t, t, decoy_overlap, universe)
        mx = evaluate_map(instance, x, frontier_cap)
        sizes[i] = len(mx)
        nonempty[i] = len(mx) > 0
        low_overlaps[i] = mx.intersection_size(evaluate_map(instance, y, frontier_cap))

        x, y = pair_with_overlap(rng, t, t, planted_overlap, universe)
        collisions[i] = evaluate_map(instance, x, frontier_cap).intersection_size(
            evaluate_map(instance, y, frontier_cap)) > 0

    size_target = w * (t * p) ** k
    bounds = expected_bounds(params, k, decoy_overlap / t)
    report = VerificationReport("lemma4", {"b1": params.b1, "b2": params.b2, "k": k, "w": w, "t": t,
                                           "trials": trials, "seed": seed})
    report.checks.append(compare("size", sizes, size_target, "~",
                                 "bound w/b1^k = {:.6g}".format(bounds.size_bound)))
    report.checks.append(compare("intersection_b2", low_overlaps, w * (decoy_overlap * p) ** k, "~",
                                 "overlap {} of {}, bound {:.6g}".format(decoy_overlap, t, bounds.intersection_bound)))
    report.checks.append(compare("collision_b1", collisions, 0.5, ">=",
                                 "overlap {} of {}".format(planted_overlap, t)))
    report.checks.append(compare("collision_b1_w", collisions, bounds.collision_lower_bound, ">=",
                                 "w/(k+w); k/(k+w) = {:.6g}".format(stated_collision_bound(k, w))))
    if p >= 1:
        report.checks.append(compare("self_collision", nonempty, 1.0, "==", "t <= 1/b1"))
    return _finish(report)


def verify_lemma5(params, t, trials, seed=0, universe=UNIVERSE, frontier_cap=FRONTIER_CAP):
    """Estimate collision probabilities of the hash family derived from the map

    The map size bound is m1 = w / b1^k, so m = ceil(8 m1).

    Checks:
        collision_b1: similar pairs (overlap ceil(b1 t)) collide with frequency >= 0.8 / (8m)
        collision_b2: dissimilar pairs (overlap floor(b2 t)) collide with frequency <= 1.25 m2 / m,
            m2 = w (a / (b1 t))^k

    Returns:
        VerificationReport: The checks
    """
    if params.b2 is None:
        fail(ParameterError, "INVALID_PARAMETER", "b2", None)
    if trials < 1:
        fail(ParameterError, "INVALID_PARAMETER", "trials", trials)
    _warn_trials("lemma5", trials)
    rng = np.random.default_rng(seed)
    planted_overlap, decoy_overlap = overlaps_for(t, params.b1, params.b2)
    k, w = params.k, params.w
    m1 = expected_bounds(params, k, 1).size_bound
    m2 = expected_bounds(params, k, decoy_overlap / t).intersection_bound
    sampler = chosen_path_sampler(params, frontier_cap)

    high = np.zeros(trials)
    low = np.zeros(trials)
    m = None
    for i, trial_seed in enumerate(derive_seeds(seed, trials)):
        h = lsm_to_lsh(sampler, m1, trial_seed)
        m = h.m
        x, y = pair_with_overlap(rng, t, t, planted_overlap, universe)
        high[i] = h(x) == h(y)
        x, y = pair_with_overlap(rng, t, t, decoy_overlap, universe)
        low[i] = h(x) == h(y)

    report = VerificationReport("lemma5", {"b1": params.b1, "b2": params.b2, "k": k, "w": w, "t": t, "m": m,
                                           "trials": trials, "seed": seed})
    report.checks.append(compare("collision_b1", high, 0.8 / (8 * m), ">=", "p1 = 1/(8m), m = {}".format(m)))
    report.checks.append(compare("collision_b2", low, 1.25 * m2 / m, "<=", "p2 = m2/m, m2 = {:.6g}".format(m2)))
    return _finish(report)


def flip_bits(rng, x, r):
    """Return a copy of the bool vector x with r random coordinates flipped"""
    y = np.array(x, dtype=bool)
    positions = rng.choice(y.size, size=r, replace=False)
    y[positions] = ~y[positions]
    return y


def verify_transform(D, b1, eps, d, trials, inputs=10 ** 5, distance=None, seed=0, batch=32, vectors=None):
    """Check the cardinality and similarity preservation of transform T

    Checks:
        cardinality: |T(x)| == t for `inputs` random vectors, or every row of `vectors`, under one transform
        block_match: over `trials` transforms, pairs at Hamming distance r (default sqrt(D))
            agree in a mean fraction >= b1 + eps/4 of the blocks

    Args:
        D (int): Source dimension
        b1 (float): Upper threshold
        eps (float): Accuracy parameter
        d (int): Output dimension bound
        trials (int): Number of sampled transforms
        inputs (int): Number of random inputs for the cardinality check
        distance (int): Hamming distance r of the pairs
        seed (int): Seed
        batch (int): Vectors transformed at once
        vectors (numpy.ndarray): (N, D) bool rows replacing the random cardinality inputs

    Returns:
        VerificationReport: The checks
    """
    if trials < 1:
        fail(ParameterError, "INVALID_PARAMETER", "trials", trials)
    r = int(round(math.sqrt(D))) if distance is None else distance
    rng = np.random.default_rng(seed)
    seeds = derive_seeds(seed, trials + 1)

    transform = TransformT.for_thresholds(D, b1, eps, d, seed=seeds[0])
    sizes = list()
    if vectors is not None:
        vectors = np.asarray(vectors, dtype=bool)
        if vectors.ndim != 2 or vectors.shape[1] != D:
            fail(ParameterError, "INVALID_PARAMETER", "vectors", "shape {}".format(vectors.shape))
        inputs = vectors.shape[0]
        for start in range(0, inputs, batch):
            sizes.extend(len(z) for z in transform.transform_many(vectors[start:start + batch]))
    remaining = 0 if vectors is not None else inputs
    while remaining > 0:
        count = min(batch, remaining)
        matrix = rng.integers(0, 2, size=(count, D), dtype=np.uint8).astype(bool)
        sizes.extend(len(z) for z in transform.transform_many(matrix))
        remaining -= count

    matches = np.zeros(trials)
    for i, trial_seed in enumerate(seeds[1:]):
        sampled = TransformT.for_thresholds(D, b1, eps, d, seed=trial_seed)
        x = rng.integers(0, 2, size=D, dtype=np.uint8).astype(bool)
        matches[i] = sampled.block_matches(x, flip_bits(rng, x, r))

    report = VerificationReport("transformT", {"D": D, "b1": b1, "eps": eps, "d": d, "t": transform.t,
                                               "l": transform.l, "tau": transform.tau, "r": r,
                                               "trials": trials, "inputs": inputs, "seed": seed})
    if inputs > 0:
        report.checks.append(compare("cardinality", sizes, transform.t, "=="))
    report.checks.append(compare("block_match", matches, b1 + eps / 4, ">=",
                                 "(1 - r/D)^tau = {:.6g}".format((1 - r / D) ** transform.tau)))
    return _finish(report)

