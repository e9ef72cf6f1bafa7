#!/usr/bin/python

import sys
import argparse

from chosenpath import ChosenPathError, InfeasibleThresholdError, ParameterError, RangeError, \
    UnsupportedParametrizationError, VerificationError
from chosenpath.core import MeasureKind
from console import logger, make_config
from console.commands import Console
from console.helpers import configure_app

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFICATION = 3

USAGE_ERRORS = (ParameterError, RangeError, UnsupportedParametrizationError, InfeasibleThresholdError)

BITVECTOR_HELP = """bit-vector files hold one hex-encoded vector per line,
the most significant bit of the first digit is coordinate 0"""


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that exits with the usage error code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "{}: error: {}\n".format(self.prog, message))


def exit_code(error):
    """Return the process exit code for a ChosenPathError or IOError"""
    if isinstance(error, VerificationError):
        return EXIT_VERIFICATION
    if isinstance(error, USAGE_ERRORS):
        return EXIT_USAGE
    return EXIT_DATA


def make_parser(config):
    """ parse arguments for config """
    parser = ArgumentParser(description='Chosen Path set similarity search', epilog=BITVECTOR_HELP)
    parser.add_argument('-d',
        '--debug',
        default=False,
        action="store_true",
        help="display more log events")

    parser.add_argument('--seed',
        type=int,
        default=config['SEED'],
        help="master seed, every run is deterministic given it")

    parser.add_argument('--frontier-cap',
        dest="frontier_cap",
        type=int,
        help="largest frontier a map evaluation may hold")

    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    build = commands.add_parser('build', help="index a set file and write a snapshot")
    build.add_argument('--input', required=True, help="set file, one point per line")
    build.add_argument('--output', required=True, help="snapshot file")
    build.add_argument('--b1', type=float, required=True, help="upper Braun-Blanquet threshold")
    build.add_argument('--b2', type=float, required=True, help="lower Braun-Blanquet threshold")
    build.add_argument('--reps', type=int, help="repetitions, default ceil(log2 n) + 2")

    query = commands.add_parser('query', help="answer a set file of queries against a snapshot")
    query.add_argument('--input', required=True, help="snapshot file")
    query.add_argument('--queries', required=True, help="set file, one query per line")
    query.add_argument('--output', help="result file, default stdout")

    bench = commands.add_parser('bench', help="planted-pair recall benchmark")
    bench.add_argument('--n', type=int, default=config['BENCH_N'], help="number of decoys")
    bench.add_argument('--t', type=int, default=config['BENCH_T'], help="set size")
    bench.add_argument('--b1', type=float, default=config['BENCH_B1'])
    bench.add_argument('--b2', type=float, default=config['BENCH_B2'])
    bench.add_argument('--trials', type=int, default=config['BENCH_TRIALS'], help="number of queries")
    bench.add_argument('--reps', type=int, help="Chosen Path repetitions")
    bench.add_argument('--no-minhash', dest="minhash", default=True, action="store_false",
        help="skip the MinHash baseline")
    bench.add_argument('--scaling', default=False, action="store_true",
        help="add the decoy-only work scaling experiment")
    bench.add_argument('--output', help="report file, default stdout")

    rho = commands.add_parser('rho', help="query exponent tables as CSV")
    mode = rho.add_mutually_exclusive_group()
    mode.add_argument('--point', nargs="+", metavar="KEY=VALUE",
        help="one row, e.g. b1=0.3333333333 b2=0.1818181818")
    mode.add_argument('--grid', dest="mode", action="store_const", const="grid", help="(b1, b2) grid (default)")
    mode.add_argument('--regime', dest="mode", action="store_const", const="regime", help="(j1, j2) regime map")
    mode.add_argument('--figure2', dest="mode", action="store_const", const="figure2",
        help="regime map slice with j2 = j1 / 2")
    rho.add_argument('--measure', default=MeasureKind.BRAUN_BLANQUET.value,
        choices=[m.value for m in MeasureKind], help="measure of the --point thresholds")
    rho.add_argument('--j1', type=float, help="single regime cell")
    rho.add_argument('--j2', type=float, help="single regime cell")
    rho.add_argument('--beta', type=float, action="append", help="size ratio, repeatable")
    rho.add_argument('--resolution', type=int, help="grid cells per axis")
    rho.add_argument('--check', default=False, action="store_true",
        help="run the dominance scan first, exit 3 on a violation")
    rho.add_argument('--output', help="CSV file, default stdout")

    verify = commands.add_parser('verify', help="Monte Carlo verification harnesses")
    verify.add_argument('harness', choices=["lemma4", "lemma5", "transformT", "scaling"])
    verify.add_argument('--trials', type=int)
    verify.add_argument('--n', type=int, help="data set size the map is parametrized for")
    verify.add_argument('--t', type=int, help="set size")
    verify.add_argument('--b1', type=float)
    verify.add_argument('--b2', type=float)
    verify.add_argument('--dimension', type=int, help="transformT input dimension")
    verify.add_argument('--eps', type=float, help="transformT gap")
    verify.add_argument('--target-dimension', dest="target_dimension", type=int,
        help="transformT output dimension")
    verify.add_argument('--inputs', type=int, help="transformT cardinality inputs")
    verify.add_argument('--input', help="transformT bit-vector file used as the cardinality inputs")
    verify.add_argument('--output', help="JSON report file")
    return parser


def dispatch(console, args):
    if args.command == "build":
        console.cmd_build(args.input, args.output, args.b1, args.b2)
    elif args.command == "query":
        console.cmd_query(args.input, args.queries, args.output)
    elif args.command == "bench":
        console.cmd_bench(args.n, args.t, args.b1, args.b2, args.trials, output_path=args.output,
                          minhash=args.minhash, scaling=args.scaling)
    elif args.command == "rho":
        mode = "point" if args.point else (args.mode or "grid")
        console.cmd_rho(mode, point=args.point, measure=MeasureKind(args.measure), betas=args.beta,
                        j1=args.j1, j2=args.j2, check=args.check, output_path=args.output)
    elif args.command == "verify":
        console.cmd_verify(args.harness, trials=args.trials, n=args.n, t=args.t, b1=args.b1, b2=args.b2,
                           output_path=args.output, dimension=args.dimension, eps=args.eps,
                           target_dimension=args.target_dimension, inputs=args.inputs, input=args.input)


def main(argv=None, out=None):
    """Run one subcommand and return its exit code"""
    config = make_config()
    args = make_parser(config).parse_args(argv)
    configure_app(config, args)

    try:
        dispatch(Console(config, out=out), args)
    except ChosenPathError as e:
        logger.error(e.message)
        return exit_code(e)
    except IOError as e:
        logger.error("{}".format(e))
        return EXIT_DATA
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
