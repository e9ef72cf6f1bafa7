"""
Planted-pair recall benchmark and the decoy-only work scaling experiment.

Reports hold only seeded quantities, so the same parameters and seed give
byte-identical JSON. Wall-clock time is logged.
"""
import math
import time

from dataclasses import dataclass

import humanize
import numpy as np

from chosenpath import fail, ParameterError
from chosenpath.core import braun_blanquet, jaccard, MeasureKind
from chosenpath.hashing import derive_seeds
from chosenpath.index import brute_force, build_table, default_repetitions, CPIndex, MinHashIndex, QueryScan
from chosenpath.paths import check_thresholds, evaluate_map, params_for, FRONTIER_CAP
from harness import logger
from harness.instances import decoy_instance, overlaps_for, planted_instance, UNIVERSE


def _mean(values):
    return float(np.mean(values)) if len(values) else 0.0


def _query_summary(outcomes, threshold, similarity_fn, instance):
    found = [o for o in outcomes if o.found is not None]
    false_accepts = sum(1 for q, o in zip(instance.queries, outcomes)
                        if o.found is not None and not similarity_fn(q, instance.points[o.found]) > threshold)
    return {
        "total_recall": len(found) / len(outcomes),
        "planted_found": sum(1 for o, p in zip(outcomes, instance.planted) if o.found == p) / len(outcomes),
        "false_accepts": false_accepts,
        "mean_candidates": _mean([o.candidates_scanned for o in outcomes]),
        "mean_buckets": _mean([o.buckets_probed for o in outcomes]),
    }


def _chosen_path_queries(instance, b1, b2, repetitions, master_seed, frontier_cap):
    """Answer every query of the instance as CPIndex.build + CPIndex.query would

    Only one repetition's table is alive at a time. Seeds follow CPIndex.build.

    Returns:
        tuple: (outcomes, per-repetition planted hits of shape (queries, R), last params, stored pairs)
    """
    points = instance.points
    scans = [QueryScan(q, points, b2) for q in instance.queries]
    hits = np.zeros((len(scans), repetitions), dtype=bool)
    stored_pairs = 0
    params = None
    for r, rep_seed in enumerate(derive_seeds(master_seed, repetitions)):
        params = params_for(len(points), b1, b2, master_seed=rep_seed)
        table = build_table(params, points, frontier_cap=frontier_cap)
        stored_pairs += table.pairs
        for i, (scan, planted) in enumerate(zip(scans, instance.planted)):
            fingerprints = evaluate_map(params, scan.q, frontier_cap=frontier_cap).fingerprints
            hits[i, r] = table.shares_bucket(fingerprints, planted)
            scan.scan(r, table, fingerprints)
        logger.debug("Repetition {}: {} stored pairs".format(r, humanize.intcomma(table.pairs)))
        del table
    return [scan.result() for scan in scans], hits, params, stored_pairs


def run_bench(n, t, b1, b2, trials, seed=0, repetitions=None, universe=UNIVERSE, frontier_cap=FRONTIER_CAP,
              minhash=True):
    """Run the planted-pair benchmark

    The instance holds n decoys plus one planted neighbor per query
    (see planted_instance). Chosen Path is queried with Braun-Blanquet
    thresholds (b1, b2); MinHash with the Jaccard thresholds of the same
    intersections, j1 = a / (2t - a) for a = ceil(b1 t) and j2 = b2 / (2 - b2).

    Args:
        n (int): Number of decoys
        t (int): Set size
        b1 (float): Upper threshold
        b2 (float): Lower threshold
        trials (int): Number of queries
        seed (int): Seed
        repetitions (int): Chosen Path repetitions, default ceil(log2 N) + 2 for N stored points
        minhash (bool): Also run the MinHash baseline

    Returns:
        dict: {"parameters": ..., "methods": {...}}, methods is empty when trials is 0
    """
    check_thresholds(b1, b2)
    if n < 0 or trials < 0 or t < 1:
        fail(ParameterError, "INVALID_PARAMETER", "(n, t, trials)", (n, t, trials))
    report = {"parameters": {"n": n, "t": t, "b1": b1, "b2": b2, "trials": trials, "seed": seed,
                             "repetitions": repetitions, "universe": universe},
              "methods": dict()}
    if trials == 0:
        logger.info("No trials, empty benchmark report")
        return report

    instance_seed, cp_seed, mh_seed = derive_seeds(seed, 3)
    instance = planted_instance(instance_seed, n, t, b1, b2, trials, universe)
    if repetitions is None:
        repetitions = default_repetitions(len(instance.points))
    report["parameters"]["repetitions"] = repetitions
    report["parameters"]["planted_overlap"] = instance.planted_overlap
    report["parameters"]["decoy_overlap"] = instance.decoy_overlap

    started = time.time()
    outcomes, hits, params, stored_pairs = _chosen_path_queries(instance, b1, b2, repetitions, cp_seed,
                                                                frontier_cap)
    logger.info("Chosen Path: {} repetitions and {} queries in {}".format(
        repetitions, trials, humanize.naturaldelta(time.time() - started)))

    summary = _query_summary(outcomes, b2, braun_blanquet, instance)
    summary.update({
        "per_rep_recall": float(hits.mean()),
        "k": params.k,
        "w": params.w,
        "R": repetitions,
        "stored_pairs": stored_pairs,
    })
    report["methods"]["chosenpath"] = summary

    if minhash:
        a = instance.planted_overlap
        j1 = a / (2 * t - a)
        j2 = b2 / (2 - b2)
        started = time.time()
        mh_index = MinHashIndex.build(instance.points, j1, j2, master_seed=mh_seed)
        mh_outcomes = [mh_index.query(q) for q in instance.queries]
        logger.info("MinHash: {} repetitions, build and queries in {}".format(
            humanize.intcomma(mh_index.L), humanize.naturaldelta(time.time() - started)))
        summary = _query_summary(mh_outcomes, j2, jaccard, instance)
        summary.update({"j1": j1, "j2": j2, "K": mh_index.K, "L": mh_index.L})
        report["methods"]["minhash"] = summary

    best = [brute_force(instance.points, q, MeasureKind.BRAUN_BLANQUET) for q in instance.queries]
    report["methods"]["bruteforce"] = {
        "planted_is_best": sum(1 for (i, _), p in zip(best, instance.planted) if i == p) / trials,
        "mean_best_similarity": _mean([s for _, s in best]),
        "above_b1": sum(1 for _, s in best if s >= b1) / trials,
    }
    return report


@dataclass(frozen=True)
class WorkScaling(object):
    """Candidate counts on decoy-only instances at n and factor n

    Attributes:
        n (int): Smaller data set size
        factor (int): Size ratio
        mean_small (float): Mean candidates_scanned at n
        mean_large (float): Mean candidates_scanned at factor n
        ratio (float): mean_large / mean_small, or None if mean_small is 0
        bound (float): factor^(rho + slack)
        rho (float): log(1/b1) / log(1/b2)
        passed (bool): ratio <= bound
    """
    n: int
    factor: int
    mean_small: float
    mean_large: float
    ratio: float
    bound: float
    rho: float
    passed: bool

    def as_dict(self):
        return {"n": self.n, "factor": self.factor, "mean_small": self.mean_small, "mean_large": self.mean_large,
                "ratio": self.ratio, "bound": self.bound, "rho": self.rho, "passed": self.passed}


def _mean_candidates(size, t, b1, b2, overlap, instances, seed, universe, frontier_cap):
    counts = list()
    for instance_seed in derive_seeds(seed, instances):
        query_seed, index_seed = derive_seeds(instance_seed, 2)
        q, decoys = decoy_instance(query_seed, size, t, overlap, universe)
        index = CPIndex.build(decoys, b1, b2, repetitions=1, master_seed=index_seed, frontier_cap=frontier_cap)
        counts.append(index.query(q, frontier_cap=frontier_cap).candidates_scanned)
    return _mean(counts)


def work_scaling(n, t, b1, b2, factor=4, instances=10, overlap=None, seed=0, slack=0.15, universe=UNIVERSE,
                 frontier_cap=FRONTIER_CAP):
    """Compare the work of one repetition on decoy-only instances of size n and factor n

    Each instance is one query and its decoys, all sharing `overlap` elements
    (default floor(b2 t)) with it, so no query succeeds and every colliding
    decoy is scanned.

    Returns:
        WorkScaling: Mean candidate counts and the comparison with factor^(rho + slack)
    """
    check_thresholds(b1, b2)
    if n < 1 or factor < 1 or instances < 1:
        fail(ParameterError, "INVALID_PARAMETER", "(n, factor, instances)", (n, factor, instances))
    if overlap is None:
        overlap = overlaps_for(t, b1, b2)[1]
    rho = math.log(1 / b1) / math.log(1 / b2)
    small_seed, large_seed = derive_seeds(seed, 2)
    started = time.time()
    small = _mean_candidates(n, t, b1, b2, overlap, instances, small_seed, universe, frontier_cap)
    large = _mean_candidates(factor * n, t, b1, b2, overlap, instances, large_seed, universe, frontier_cap)
    ratio = large / small if small > 0 else None
    bound = factor ** (rho + slack)
    result = WorkScaling(n, factor, small, large, ratio, bound, rho, ratio is not None and ratio <= bound)
    logger.info("Work scaling {} -> {}: {:.4g} -> {:.4g} candidates in {}".format(
        n, factor * n, small, large, humanize.naturaldelta(time.time() - started)))
    return result
