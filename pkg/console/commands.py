"""
The subcommands of run.py. Each writes its output to a text stream and
raises a ChosenPathError subclass on failure.
"""
import io
import sys

from chosenpath import fail, notification_signals, MalformedInputError, ParameterError, VerificationError
from chosenpath.analysis import dominance_scan, figure2_rows, grid_rows, point_row, regime_row, regime_rows, \
    write_csv, GRID_FIELDS, REGIME_FIELDS
from chosenpath.core import convert_threshold, read_set_file, MeasureKind
from chosenpath.index import CPIndex
from chosenpath.paths import params_for
from chosenpath.reductions import read_bitvector_file
from chosenpath.snapshot import dump, load
from console import logger
from console.helpers import json_line, run_metadata
from harness.bench import run_bench, work_scaling
from harness.verify import verify_lemma4, verify_lemma5, verify_transform


def format_outcome(query_index, outcome):
    """Return `query_index,found_id|NONE,similarity,candidates_scanned`"""
    if outcome.found is None:
        return "{},NONE,,{}".format(query_index, outcome.candidates_scanned)
    similarity = "{:.10g}".format(outcome.similarity)
    if not any(c in similarity for c in ".en"):
        similarity += ".0"
    return "{},{},{},{}".format(query_index, outcome.found, similarity, outcome.candidates_scanned)


def parse_assignments(pairs):
    """Parse ["b1=0.3", "b2=0.1"] into {"b1": 0.3, "b2": 0.1}

    Raises:
        ParameterError: If an item is not key=number
    """
    values = dict()
    for pair in pairs:
        key, sep, value = pair.partition("=")
        try:
            values[key.strip()] = float(value)
        except ValueError:
            sep = ""
        if not sep:
            fail(ParameterError, "INVALID_PARAMETER", "point", pair)
    return values


class Console(object):
    """Runs subcommands against a configuration

    Args:
        config: A flask Config object
        out: Text stream for command output, defaults to stdout
    """

    def __init__(self, config, out=None):
        self.config = config
        self.out = out if out is not None else sys.stdout
        self.built = list()
        self.checks = list()
        self._connect_signals()

    def _connect_signals(self):
        """
        Connect to Blinker signals which are registered in chosenpath and harness
        """

        signal = notification_signals.signal

        signal('index-built').connect(self.on_index_built)
        signal('check-finished').connect(self.on_check_finished)

    def on_index_built(self, sender, stats=None):
        logger.debug("{} built: {}".format(sender, stats))
        self.built.append(stats)

    def on_check_finished(self, sender, check=None):
        self.checks.append((sender, check))

    def _open_output(self, path):
        if path is None:
            return self.out, False
        return io.open(path, "w", encoding="utf-8"), True

    #
    # --------------------- INDEX LIFECYCLE -------------------
    #

    def cmd_build(self, input_path, output_path, b1, b2):
        """Build an index over a set file, write its snapshot and a JSON stats line

        Raises:
            MalformedInputError: If the set file is malformed or has no points
            ParameterError: If the thresholds are invalid
        """
        points = read_set_file(input_path)
        if not points:
            fail(MalformedInputError, "NO_POINTS")
        index = CPIndex.build(points, b1, b2, repetitions=self.config["REPETITIONS"],
                              master_seed=self.config["SEED"], frontier_cap=self.config["FRONTIER_CAP"])
        dump(index, output_path)

        record = run_metadata(self.config, "build", {"input": input_path, "output": output_path, "b1": b1, "b2": b2,
                                                     "reps": self.config["REPETITIONS"]})
        record["stats"] = self.built[-1] if self.built else index.stats()
        self.out.write(json_line(record))
        return record

    def cmd_query(self, snapshot_path, queries_path, output_path=None):
        """Answer every query of a set file against a snapshot, one CSV line per query

        The first line is a `#` comment naming the run seed and the version.

        Returns:
            int: Number of queries answered
        """
        index = load(snapshot_path)
        queries = read_set_file(queries_path)
        stream, close = self._open_output(output_path)
        try:
            stream.write("# seed={}, version={}\n".format(self.config["SEED"], self.config["VERSION"]))
            for query_index, q in enumerate(queries):
                outcome = index.query(q, frontier_cap=self.config["FRONTIER_CAP"])
                stream.write(format_outcome(query_index, outcome) + "\n")
        finally:
            if close:
                stream.close()
        logger.info("Answered {} queries".format(len(queries)))
        return len(queries)

    #
    # --------------------- EXPERIMENTS -------------------
    #

    def cmd_bench(self, n, t, b1, b2, trials, output_path=None, minhash=True, scaling=False):
        """Run the planted-pair benchmark and write its JSON report"""
        report = run_bench(n, t, b1, b2, trials, seed=self.config["SEED"], repetitions=self.config["REPETITIONS"],
                           frontier_cap=self.config["FRONTIER_CAP"], minhash=minhash)
        if scaling and trials > 0:
            report["work_scaling"] = work_scaling(
                self.config["SCALING_N"], t, b1, b2, factor=self.config["SCALING_FACTOR"],
                instances=self.config["SCALING_INSTANCES"], seed=self.config["SEED"],
                frontier_cap=self.config["FRONTIER_CAP"]).as_dict()
        record = run_metadata(self.config, "bench", report.pop("parameters"))
        record.update(report)

        stream, close = self._open_output(output_path)
        try:
            stream.write(json_line(record))
        finally:
            if close:
                stream.close()
        return record

    def _point_rows(self, assignments, measure):
        values = parse_assignments(assignments)
        if measure is MeasureKind.BRAUN_BLANQUET:
            keys = ("b1", "b2")
        elif measure is MeasureKind.JACCARD:
            keys = ("j1", "j2")
        elif measure is MeasureKind.NORMALIZED_HAMMING:
            keys = ("r1", "r2")
        else:
            keys = ("s1", "s2")
        if not set(keys) <= set(values):
            fail(ParameterError, "INVALID_PARAMETER", "point", " ".join(assignments))
        b1, b2 = (convert_threshold(values[key], measure, MeasureKind.BRAUN_BLANQUET) for key in keys)
        return [point_row(b1, b2)]

    def cmd_rho(self, mode="grid", point=None, measure=MeasureKind.BRAUN_BLANQUET, betas=None, j1=None, j2=None,
                check=False, output_path=None):
        """Write a CSV of query exponents

        Args:
            mode (str): "grid", "point", "regime" or "figure2"
            point (list): key=value assignments for mode "point"
            measure (MeasureKind): Measure of the point thresholds
            betas (list): Size ratios for mode "regime"
            j1 (float): Single regime cell, with j2 and one beta
            j2 (float): Single regime cell
            check (bool): Run the dominance scan first

        Returns:
            int: Number of rows written

        Raises:
            VerificationError: If check is set and the dominance scan fails
        """
        resolution = self.config["GRID_RESOLUTION"]
        if check:
            report = dominance_scan(resolution)
            logger.info("Dominance holds on {} cells".format(report.cells))

        if mode == "point":
            fields, rows = GRID_FIELDS, self._point_rows(point or [], measure)
        elif mode == "regime" and j1 is not None and j2 is not None:
            fields, rows = REGIME_FIELDS, [regime_row(j1, j2, (betas or [1.0])[0])]
        elif mode == "regime":
            fields, rows = REGIME_FIELDS, regime_rows(betas or self.config["REGIME_BETAS"], resolution)
        elif mode == "figure2":
            fields, rows = REGIME_FIELDS, figure2_rows(resolution)
        else:
            fields, rows = GRID_FIELDS, grid_rows(resolution)

        stream, close = self._open_output(output_path)
        try:
            count = write_csv(stream, fields, rows, self.config["CSV_DIGITS"])
        finally:
            if close:
                stream.close()
        logger.info("Wrote {} rows".format(count))
        return count

    def cmd_verify(self, harness, trials=None, n=None, t=None, b1=None, b2=None, output_path=None, **options):
        """Run a verification harness, print its checks and a JSON report line

        Args:
            harness (str): "lemma4", "lemma5", "transformT" or "scaling"
            trials (int): Trials, harness default from the configuration if None
            options: dimension, eps, target_dimension, inputs and input (a bit-vector file) for transformT

        Returns:
            VerificationReport or WorkScaling: The result

        Raises:
            VerificationError: Naming the failed checks
        """
        seed = self.config["SEED"]
        cap = self.config["FRONTIER_CAP"]

        if harness == "lemma4":
            params = params_for(n or self.config["VERIFY_N"], b1 or self.config["VERIFY_B1"],
                                b2 or self.config["VERIFY_B2"], master_seed=seed)
            result = verify_lemma4(params, t or self.config["VERIFY_T"], trials or self.config["VERIFY_TRIALS"],
                                   seed=seed, frontier_cap=cap)
        elif harness == "lemma5":
            params = params_for(n or self.config["LEMMA5_N"], b1 or self.config["LEMMA5_B1"],
                                b2 or self.config["LEMMA5_B2"], master_seed=seed)
            result = verify_lemma5(params, t or self.config["LEMMA5_T"], trials or self.config["LEMMA5_TRIALS"],
                                   seed=seed, frontier_cap=cap)
        elif harness == "transformT":
            dimension = options.get("dimension") or self.config["TRANSFORM_DIMENSION"]
            vectors = None
            if options.get("input") is not None:
                vectors = read_bitvector_file(options["input"], dimension)
                logger.info("Read {} bit-vectors from {}".format(vectors.shape[0], options["input"]))
            result = verify_transform(
                dimension,
                b1 or self.config["TRANSFORM_B1"],
                options.get("eps") or self.config["TRANSFORM_EPS"],
                options.get("target_dimension") or self.config["TRANSFORM_TARGET_DIMENSION"],
                trials or self.config["TRANSFORM_TRIALS"],
                inputs=self.config["TRANSFORM_INPUTS"] if options.get("inputs") is None else options["inputs"],
                seed=seed, vectors=vectors)
        elif harness == "scaling":
            result = work_scaling(n or self.config["SCALING_N"], t or self.config["BENCH_T"],
                                  b1 or self.config["BENCH_B1"], b2 or self.config["BENCH_B2"],
                                  factor=self.config["SCALING_FACTOR"],
                                  instances=trials or self.config["SCALING_INSTANCES"], seed=seed, frontier_cap=cap)
        else:
            fail(ParameterError, "INVALID_PARAMETER", "harness", harness)

        if harness == "scaling":
            self.out.write("{:<28} {} <= {:.6g}  {}\n".format(
                "scaling_ratio", result.ratio, result.bound, "ok" if result.passed else "FAILED"))
            record = run_metadata(self.config, "verify", {"harness": harness})
            record["result"] = result.as_dict()
            failed = [] if result.passed else ["scaling_ratio"]
        else:
            for check in result.checks:
                self.out.write(check.describe() + "\n")
            record = run_metadata(self.config, "verify", result.parameters)
            record["result"] = result.as_dict()
            failed = result.failed

        if output_path is not None:
            with io.open(output_path, "w", encoding="utf-8") as f:
                f.write(json_line(record))
        if failed:
            fail(VerificationError, "CHECK_FAILED", failed)
        return result
