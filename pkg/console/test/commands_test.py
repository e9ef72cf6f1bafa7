import io
import json
import os
import shutil
import tempfile
import unittest

from unittest import mock

import run

from chosenpath import InfeasibleThresholdError, MalformedInputError, ParameterError, RangeError, \
    VerificationError
from chosenpath.analysis import format_number, point_row, regime_row, GRID_FIELDS, REGIME_FIELDS
from chosenpath.core import SparseSet
from chosenpath.index import QueryOutcome
from chosenpath.snapshot import load
from console import make_config
from console.commands import format_outcome, parse_assignments, Console
from harness.verify import Check, VerificationReport

POINTS = "1 2 3 4 5 6 7 8\n2 4 6 8 10 12 14 16\n\n100 200 300 400 500 600 700 800\n"


class HelpersTest(unittest.TestCase):

    def test_format_outcome(self):
        self.assertEqual(format_outcome(0, QueryOutcome(None, None, 3, 5)), "0,NONE,,3")
        self.assertEqual(format_outcome(4, QueryOutcome(2, 0.5, 1, 1)), "4,2,0.5,1")
        self.assertEqual(format_outcome(1, QueryOutcome(0, 1.0, 1, 1)), "1,0,1.0,1")
        self.assertEqual(format_outcome(2, QueryOutcome(5, 1 / 3, 2, 2)), "2,5,0.3333333333,2")

    def test_parse_assignments(self):
        self.assertEqual(parse_assignments(["b1=0.5", " b2 =0.25"]), {"b1": 0.5, "b2": 0.25})
        with self.assertRaises(ParameterError):
            parse_assignments(["b1"])
        with self.assertRaises(ParameterError):
            parse_assignments(["b1=high"])

    def test_exit_codes(self):
        self.assertEqual(run.exit_code(ParameterError(12, "")), run.EXIT_USAGE)
        self.assertEqual(run.exit_code(RangeError(3, "")), run.EXIT_USAGE)
        self.assertEqual(run.exit_code(InfeasibleThresholdError(7, "")), run.EXIT_USAGE)
        self.assertEqual(run.exit_code(MalformedInputError(9, "")), run.EXIT_DATA)
        self.assertEqual(run.exit_code(VerificationError(11, "")), run.EXIT_VERIFICATION)


class ConsoleTest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.out = io.StringIO()
        self.console = Console(make_config(), out=self.out)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, name, content=None):
        path = os.path.join(self.tmp, name)
        if content is not None:
            with io.open(path, "w", encoding="utf-8") as f:
                f.write(content)
        return path

    def test_build_and_query(self):
        snapshot = self.path("index.cp")
        record = self.console.cmd_build(self.path("points.txt", POINTS), snapshot, 0.5, 0.25)

        index = load(snapshot)
        self.assertEqual(index.points, [SparseSet(range(1, 9)), SparseSet(range(2, 17, 2)),
                                        SparseSet(range(100, 900, 100))])
        self.assertEqual(record["stats"]["n"], 3)
        self.assertEqual(record["seed"], 0)
        self.assertEqual(json.loads(self.out.getvalue())["command"], "build")

        again = self.path("again.cp")
        Console(make_config(), out=io.StringIO()).cmd_build(self.path("points.txt"), again, 0.5, 0.25)
        self.assertEqual(load(again), index)

        queries = self.path("queries.txt", "1000 1001 1002 1003\n1 2 3 4 5 6 7 8\n")
        results = self.path("results.csv")
        self.assertEqual(self.console.cmd_query(snapshot, queries, results), 2)
        with io.open(results, encoding="utf-8") as f:
            header, *lines = f.read().splitlines()
        self.assertEqual(header, "# seed=0, version={}".format(make_config()["VERSION"]))
        self.assertEqual(len(lines), 2)
        self.assertEqual(lines[0], "0,NONE,,0")
        query_index, found, similarity, scanned = lines[1].split(",")
        self.assertEqual(query_index, "1")
        if found != "NONE":
            self.assertGreater(float(similarity), 0.25)
        self.assertGreaterEqual(int(scanned), 0)

    def test_build_and_query_repeat_exactly(self):
        points = self.path("points.txt", POINTS + "1 2 3 4 5 6 7 9\n")
        queries = self.path("queries.txt", "1 2 3 4 5 6 7 8\n2 4 6 8 10 12 14 15\n7 8 9\n")
        snapshots, results = list(), list()
        for name in ("first.cp", "second.cp"):
            snapshot = self.path(name)
            Console(make_config(), out=io.StringIO()).cmd_build(points, snapshot, 0.5, 0.25)
            with io.open(snapshot, "rb") as f:
                snapshots.append(f.read())
            out = io.StringIO()
            Console(make_config(), out=out).cmd_query(snapshot, queries)
            results.append(out.getvalue())
        self.assertEqual(snapshots[0], snapshots[1])
        self.assertEqual(results[0], results[1])
        self.assertEqual(len(results[0].splitlines()), 4)

    def test_build_empty(self):
        with self.assertRaises(MalformedInputError):
            self.console.cmd_build(self.path("empty.txt", "\n\n"), self.path("index.cp"), 0.5, 0.25)
        self.assertFalse(os.path.exists(self.path("index.cp")))

    def test_build_malformed(self):
        with self.assertRaises(MalformedInputError) as cm:
            self.console.cmd_build(self.path("bad.txt", "1 2 3\n3 2\n"), self.path("index.cp"), 0.5, 0.25)
        self.assertEqual(cm.exception.lineno, 2)

    def test_bench_without_trials(self):
        record = self.console.cmd_bench(50, 16, 0.5, 0.25, 0, scaling=True)
        self.assertEqual(record["methods"], {})
        self.assertNotIn("work_scaling", record)
        self.assertEqual(json.loads(self.out.getvalue())["parameters"]["trials"], 0)

    def test_rho_point(self):
        self.assertEqual(self.console.cmd_rho("point", point=["b1=0.3333333333", "b2=0.1818181818"]), 1)
        header, line = self.out.getvalue().splitlines()
        self.assertEqual(header.split(","), GRID_FIELDS)
        row = point_row(0.3333333333, 0.1818181818)
        self.assertEqual(line.split(","), [format_number(row.get(key)) for key in GRID_FIELDS])

    def test_rho_point_missing_key(self):
        with self.assertRaises(ParameterError):
            self.console.cmd_rho("point", point=["b1=0.5"])

    def test_rho_regime_cell(self):
        self.assertEqual(self.console.cmd_rho("regime", betas=[0.5], j1=0.3, j2=0.1), 1)
        header, line = self.out.getvalue().splitlines()
        self.assertEqual(header.split(","), REGIME_FIELDS)
        row = regime_row(0.3, 0.1, 0.5)
        self.assertEqual(line.split(","), [format_number(row.get(key)) for key in REGIME_FIELDS])
        values = dict(zip(REGIME_FIELDS, line.split(",")))
        self.assertEqual(values["b1"], format_number(0.3 * 1.5 / 1.3))
        self.assertNotEqual(values["b2"], "")
        self.assertTrue(line.startswith("0.5,0.3,0.1,"))

    def test_signals(self):
        self.console.cmd_build(self.path("points.txt", POINTS), self.path("index.cp"), 0.5, 0.25)
        self.assertEqual(self.console.built[-1]["n"], 3)


class MainTest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def run_main(self, *argv):
        out = io.StringIO()
        return run.main(list(argv), out=out), out.getvalue()

    def test_rho_point(self):
        code, output = self.run_main("rho", "--point", "b1=0.3333333333", "b2=0.1818181818")
        self.assertEqual(code, run.EXIT_OK)
        self.assertEqual(len(output.splitlines()), 2)

    def test_rho_check(self):
        code, output = self.run_main("rho", "--check", "--resolution", "100", "--point", "b1=0.5", "b2=0.25")
        self.assertEqual(code, run.EXIT_OK)

    def test_bad_thresholds(self):
        code, _ = self.run_main("rho", "--point", "b1=0.2", "b2=0.3")
        self.assertEqual(code, run.EXIT_USAGE)

    def test_argparse_error(self):
        with self.assertRaises(SystemExit) as cm:
            run.main(["build", "--input", "points.txt"], out=io.StringIO())
        self.assertEqual(cm.exception.code, run.EXIT_USAGE)

    def test_empty_input(self):
        empty = os.path.join(self.tmp, "empty.txt")
        open(empty, "w").close()
        code, _ = self.run_main("build", "--input", empty, "--output", os.path.join(self.tmp, "index.cp"),
                                "--b1", "0.5", "--b2", "0.25")
        self.assertEqual(code, run.EXIT_DATA)

    def test_missing_snapshot(self):
        queries = os.path.join(self.tmp, "queries.txt")
        with open(queries, "w") as f:
            f.write("1 2 3\n")
        code, _ = self.run_main("query", "--input", os.path.join(self.tmp, "missing.cp"), "--queries", queries)
        self.assertEqual(code, run.EXIT_DATA)

    def test_bench(self):
        code, output = self.run_main("--seed", "7", "bench", "--n", "50", "--t", "16", "--b1", "0.5",
                                     "--b2", "0.25", "--trials", "0")
        self.assertEqual(code, run.EXIT_OK)
        record = json.loads(output)
        self.assertEqual((record["seed"], record["methods"]), (7, {}))

    def test_verify_failure(self):
        report = VerificationReport("lemma4", {"k": 1}, [Check("size", 1.0, 0.0, 2.0, "~", False, 10)])
        with mock.patch("console.commands.verify_lemma4", return_value=report):
            code, output = self.run_main("verify", "lemma4", "--trials", "10")
        self.assertEqual(code, run.EXIT_VERIFICATION)
        self.assertTrue(output.startswith("size"))

    def test_verify_transform_input(self):
        path = os.path.join(self.tmp, "vectors.hex")
        with open(path, "w") as f:
            f.write("f0" * 128 + "\n\n" + "0123456789abcdef" * 16 + "\n")
        report = VerificationReport("transformT", {"D": 1024}, [Check("cardinality", 64.0, 0.0, 64.0, "==", True, 2)])
        with mock.patch("console.commands.verify_transform", return_value=report) as verify:
            code, output = self.run_main("verify", "transformT", "--dimension", "1024", "--input", path)
        self.assertEqual(code, run.EXIT_OK)
        self.assertTrue(output.startswith("cardinality"))
        vectors = verify.call_args[1]["vectors"]
        self.assertEqual(vectors.shape, (2, 1024))
        self.assertEqual(list(vectors[0, :8]), [True] * 4 + [False] * 4)
        self.assertEqual(list(vectors[1, :8]), [False] * 7 + [True])
        self.assertEqual(verify.call_args[0][0], 1024)

    def test_verify_transform_bad_input(self):
        path = os.path.join(self.tmp, "vectors.hex")
        with open(path, "w") as f:
            f.write("f0f0\nzz\n")
        code, _ = self.run_main("verify", "transformT", "--dimension", "16", "--input", path)
        self.assertEqual(code, run.EXIT_DATA)

    def test_verify_report_file(self):
        report = VerificationReport("lemma4", {"k": 1}, [Check("size", 2.0, 0.0, 2.0, "~", True, 10)])
        path = os.path.join(self.tmp, "report.json")
        with mock.patch("console.commands.verify_lemma4", return_value=report):
            code, _ = self.run_main("verify", "lemma4", "--output", path)
        self.assertEqual(code, run.EXIT_OK)
        with open(path) as f:
            record = json.load(f)
        self.assertTrue(record["result"]["passed"])
        self.assertEqual(record["parameters"], {"k": 1})


if __name__ == '__main__':
    unittest.main()
