# quotatope/cli.py
"""
Command-line surface: one subcommand per dataset family plus `verify`.

Every command validates its parameters into a request model before computing,
writes its datasets under --out and prints a JSON summary of what it wrote.

Exit codes: 0 success, 1 verification or numeric failure, 2 usage error,
3 capacity exceeded.
"""

import argparse
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from quotatope import __version__
from quotatope.domain.exceptions import (
    CapacityException,
    InputException,
    NumericException,
    QuotatopeException,
    VerificationException,
)
from quotatope.infrastructure.dataset_writer import create_dataset_writer
from quotatope.infrastructure.interfaces import Dataset
from quotatope.infrastructure.svg_plot import create_plotter
from quotatope.schemas.requests import (
    SUITE_NAMES,
    DivisorRequest,
    EulerRequest,
    LogPrimeRequest,
    RandomRequest,
    SeqRequest,
    SeriesRequest,
    VerifyRequest,
)
from quotatope.schemas.responses import CommandSummary
from quotatope.services.experiments import (
    divisor_datasets,
    euler_dataset,
    logprime_datasets,
    random_datasets,
    sequence_datasets,
    series_datasets,
)
from quotatope.services.verification import ensure_passed, run_suite
from quotatope.utils.logger import get_logger, set_level

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

# dataset name prefix -> (x column, y column, grouping column)
PLOTS: Dict[str, Tuple[str, str, Optional[str]]] = {
    "seq_": ("q", "S_i", "i"),
    "euler": ("q", "chi", None),
    "logprime": ("q", "ln_abs_chi", None),
    "divisor": ("n", "top_dim", None),
    "count_": ("q", "chi_q", None),
    "prime": ("q", "chi_q", None),
    "partitions": ("n", "p_n", None),
    "tau": ("n", "tau_n", None),
    "random": ("q", "empirical_mean", "j"),
    "random_euler": ("q", "empirical_mean", None),
}


def _plot_spec(dataset: Dataset) -> Optional[Tuple[str, str, Optional[str]]]:
    if dataset.name in PLOTS:
        return PLOTS[dataset.name]
    for prefix, spec in PLOTS.items():
        if prefix.endswith("_") and dataset.name.startswith(prefix):
            return spec
    return None


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("results"), help="Output directory")
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="Dataset file format")
    common.add_argument("--svg", action="store_true", help="Also write SVG scatter plots")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="quotatope",
        description="Datasets and verification suites for quota complexes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    seq = commands.add_parser("seq", parents=[common], help="Face and homology counts for integer sequences")
    seq.add_argument("kind", choices=["primes", "squares", "cubes"])
    seq.add_argument("--qmax", type=int, required=True)
    seq.add_argument("--imax", type=int, required=True)
    seq.add_argument("--fit-qmax", type=int, default=None, help="Upper quota of the slope fits")

    euler = commands.add_parser("euler", parents=[common], help="χ(Prime(q)) sweep")
    euler.add_argument("--qmax", type=int, required=True)
    euler.add_argument("--method", choices=["dp", "enumerate"], default="dp")

    logprime = commands.add_parser("logprime", parents=[common], help="Growth of χ(LogPrime(q))")
    logprime.add_argument("--qlo", type=float, required=True)
    logprime.add_argument("--qhi", type=float, default=None)
    logprime.add_argument("--nmax", type=int, default=None, help="Möbius sieve bound")
    logprime.add_argument("--samples", type=int, default=6276)
    logprime.add_argument("--slope", type=float, default=0.55)
    logprime.add_argument("--anchor", choices=["first", "calibrated"], default="first",
                          help="Line through the first sample, or over the leading half")
    logprime.add_argument("--full-range", action="store_true", help="Use the full configured sieve")

    divisor = commands.add_parser("divisor", parents=[common], help="Non-contractible divisor complexes")
    divisor.add_argument("--nmin", type=int, default=2)
    divisor.add_argument("--nmax", type=int, required=True, help="Exclusive upper bound")
    divisor.add_argument("--parity", choices=["all", "odd", "even"], default="all")
    divisor.add_argument("--no-signatures", action="store_true", help="Report the top dimension only")
    divisor.add_argument("--all", dest="all_n", action="store_true", help="Profile every n, contractible or not")

    series = commands.add_parser("series", parents=[common], help="Generating-function examples")
    series.add_argument("example", choices=["count", "lehmer", "prime", "partitions", "tau"])
    series.add_argument("--degree", type=int, required=True)
    series.add_argument("--copies", type=int, default=1)

    random = commands.add_parser("random", parents=[common], help="Random quota complexes")
    random.add_argument("spec_file", type=Path)
    random.add_argument("--trials", type=int, default=None)
    random.add_argument("--seed", type=int, default=None)
    random.add_argument("--method", choices=["auto", "subset", "product"], default="auto")

    verify = commands.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("suite", choices=list(SUITE_NAMES))
    verify.add_argument("--trials", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=7)
    verify.add_argument("--scale", choices=["quick", "full"], default="quick")
    return parser


def _output_options(args: argparse.Namespace) -> Dict:
    return {"out": args.out, "format": args.format, "svg": args.svg}


def _run_seq(args) -> Tuple[SeqRequest, List[Dataset]]:
    request = SeqRequest(kind=args.kind, q_max=args.qmax, i_max=args.imax, fit_q_max=args.fit_qmax,
                         **_output_options(args))
    return request, sequence_datasets(request)


def _run_euler(args):
    request = EulerRequest(q_max=args.qmax, method=args.method, **_output_options(args))
    return request, euler_dataset(request)


def _run_logprime(args):
    request = LogPrimeRequest(q_lo=args.qlo, q_hi=args.qhi, n_max=args.nmax, samples=args.samples,
                              slope=args.slope, anchor=args.anchor, full_range=args.full_range,
                              **_output_options(args))
    return request, logprime_datasets(request)


def _run_divisor(args):
    request = DivisorRequest(n_min=args.nmin, n_max=args.nmax, parity=args.parity,
                             signatures=not args.no_signatures, all_n=args.all_n, **_output_options(args))
    return request, divisor_datasets(request)


def _run_series(args):
    request = SeriesRequest(example=args.example, degree=args.degree, copies=args.copies, **_output_options(args))
    return request, series_datasets(request)


def _run_random(args):
    request = RandomRequest(spec_file=args.spec_file, trials=args.trials, seed=args.seed, method=args.method,
                            **_output_options(args))
    return request, random_datasets(request)


def _run_verify(args):
    request = VerifyRequest(suite=args.suite, trials=args.trials, seed=args.seed, scale=args.scale,
                            **_output_options(args))
    report = run_suite(request)
    dataset = Dataset(
        f"verify_{request.suite}",
        ["check", "passed", "informational", "detail"],
        [[c.name, c.passed, c.informational, c.detail] for c in report.checks],
        metadata={"suite": report.suite, "seed": report.seed, "scale": report.scale, "passed": report.passed},
    )
    _write(request, [dataset], args.command)
    ensure_passed(report)
    return request, []


COMMANDS: Dict[str, Callable] = {
    "seq": _run_seq,
    "euler": _run_euler,
    "logprime": _run_logprime,
    "divisor": _run_divisor,
    "series": _run_series,
    "random": _run_random,
    "verify": _run_verify,
}


def _write(options, datasets: Sequence[Dataset], command: str) -> CommandSummary:
    writer = create_dataset_writer(options.format)
    outputs = [writer.write(dataset, options.out) for dataset in datasets]
    if options.svg:
        plotter = create_plotter("svg")
        for dataset in datasets:
            spec = _plot_spec(dataset)
            if spec is None or not dataset.rows:
                continue
            x, y, group = spec
            outputs.append(plotter.scatter(dataset, x, y, Path(options.out) / f"{dataset.name}.svg", group=group))
    summary = CommandSummary(
        command=command,
        outputs=[str(p) for p in outputs],
        rows=sum(len(d.rows) for d in datasets),
    )
    print(summary.model_dump_json())
    return summary


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    if args.log_level:
        set_level(args.log_level)

    try:
        request, datasets = COMMANDS[args.command](args)
        if datasets:
            _write(request, datasets, args.command)
        return EXIT_OK
    except ValidationError as e:
        logger.error(f"Invalid parameters for {args.command}: {str(e)}")
        return EXIT_USAGE
    except InputException as e:
        logger.error(f"Input error: {str(e)}")
        return EXIT_USAGE
    except CapacityException as e:
        logger.error(f"Capacity exceeded: {str(e)}")
        return EXIT_CAPACITY
    except VerificationException as e:
        logger.error(str(e))
        return EXIT_FAILURE
    except NumericException as e:
        logger.error(f"Numeric failure: {str(e)}")
        return EXIT_FAILURE
    except QuotatopeException as e:
        logger.error(f"Unexpected error: {str(e)}")
        return EXIT_FAILURE
