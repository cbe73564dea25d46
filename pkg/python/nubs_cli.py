#!/usr/bin/env python3
"""
nu-Birnbaum-Saunders toolkit command line
Every subcommand except sample and simulate2 prints a JSON RunReport on stdout;
diagnostics go to stderr.
"""

import argparse
import re
import sys
import time
from typing import Callable, Dict, NoReturn, Optional, Sequence, Tuple

from nubs_config import SEED_ENV_VAR, TOOL_VERSION, ToolkitConfig, get_logger
from nubs_datasets import (
    Dataset,
    RunReport,
    embedded_table1,
    format_values,
    load_dataset,
    load_paired_dataset,
)
from nubs_errors import DatasetError, DomainError, NuBsError, UsageError
from nubs_estimation import (
    OptimizerConfig,
    compare_models,
    fit_bivariate,
    fit_univariate,
    params_as_dict,
    with_std_errors,
)
from nubs_gof import gof_test
from nubs_multivariate import BivNuBsParams, biv_sample
import nubs_univariate as uni
from nubs_univariate import NuBsParams

logger = get_logger("cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2

_FLAG = re.compile(r"(?<![\w-])(--?[A-Za-z][\w-]*)")

CommandResult = Tuple[Optional[RunReport], int]


class ToolkitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str) -> NoReturn:
        match = _FLAG.search(message)
        raise UsageError(message, flag=match.group(1) if match else None)


def _float_list(count: int) -> Callable[[str], Tuple[float, ...]]:
    def parse(text: str) -> Tuple[float, ...]:
        try:
            values = tuple(float(v) for v in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        if len(values) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {len(values)}")
        return values

    return parse


def _add_data_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", metavar="PATH", help="file of positive values")
    source.add_argument("--table1", action="store_true",
                        help="use the embedded 101-specimen fatigue-life sample")


def _add_triple(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, required=True, help="shape alpha > 0")
    parser.add_argument("--beta", type=float, required=True, help="scale beta > 0")
    parser.add_argument("--nu", type=float, required=True, help="exponent nu > 0")


def build_parser() -> ToolkitArgumentParser:
    parser = ToolkitArgumentParser(
        prog="nubs-toolkit",
        description="Fit, evaluate and test nu-Birnbaum-Saunders lifetime models.",
        epilog=(f"Environment: {SEED_ENV_VAR} sets the default seed for commands that "
                "draw random numbers (overridden by --seed).\n"
                "Exit status: 0 success, 1 usage or input error, 2 numeric failure."),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument("--config", metavar="PATH", help="JSON settings file")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="diagnostic verbosity on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    fit = sub.add_parser("fit", help="univariate maximum-likelihood fit")
    _add_data_source(fit)
    fit.add_argument("--fix-nu", type=float, metavar="X", help="hold nu fixed (0.5 is classic BS)")
    fit.add_argument("--seed", type=int, help="recorded in the report")

    evaluate = sub.add_parser("eval", help="pdf, cdf, quantile or hazard at one point")
    _add_triple(evaluate)
    evaluate.add_argument("--at", type=float, metavar="T", help="lifetime t > 0")
    quantity = evaluate.add_mutually_exclusive_group(required=True)
    quantity.add_argument("--pdf", action="store_true")
    quantity.add_argument("--cdf", action="store_true")
    quantity.add_argument("--quantile", type=float, metavar="P")
    quantity.add_argument("--hazard", action="store_true")

    sample = sub.add_parser("sample", help="draw lifetimes, one per line")
    _add_triple(sample)
    sample.add_argument("-n", type=int, required=True, metavar="N")
    sample.add_argument("--seed", type=int)

    gof = sub.add_parser("gof", help="Kolmogorov-Smirnov goodness of fit")
    _add_data_source(gof)
    model = gof.add_mutually_exclusive_group(required=True)
    model.add_argument("--params", type=_float_list(3), metavar="A,B,V")
    model.add_argument("--fit", action="store_true", help="test against the data's own fit")
    gof.add_argument("--fix-nu", type=float, metavar="X", help="with --fit: hold nu fixed")
    gof.add_argument("--boot", type=int, metavar="K", help="bootstrap replicates (0 disables)")
    gof.add_argument("--seed", type=int)

    moments = sub.add_parser("moments", help="raw moment E[T^k]")
    _add_triple(moments)
    moments.add_argument("-k", type=int, required=True, metavar="K")
    moments.add_argument("--nodes", type=int, help="Gauss-Hermite nodes (doubled for the check)")

    fit2 = sub.add_parser("fit2", help="bivariate maximum-likelihood fit")
    fit2.add_argument("--data", metavar="PATH", required=True, help="file of value pairs")

    simulate2 = sub.add_parser("simulate2", help="draw pairs, two values per line")
    simulate2.add_argument("--params", type=_float_list(7), required=True,
                           metavar="A1,B1,V1,A2,B2,V2,RHO")
    simulate2.add_argument("-n", type=int, required=True, metavar="N")
    simulate2.add_argument("--seed", type=int)

    compare = sub.add_parser("compare", help="classic BS against free nu")
    _add_data_source(compare)

    return parser


def _triple(args: argparse.Namespace) -> NuBsParams:
    try:
        return NuBsParams(args.alpha, args.beta, args.nu)
    except DomainError as e:
        raise UsageError(str(e), flag="--alpha/--beta/--nu") from e


def _dataset(args: argparse.Namespace) -> Dataset:
    return embedded_table1() if args.table1 else load_dataset(args.data)


def _seed(args: argparse.Namespace, settings: ToolkitConfig) -> int:
    return args.seed if args.seed is not None else int(settings["default_seed"])


def _fit_exit(*fits_converged: bool) -> int:
    return EXIT_OK if all(fits_converged) else EXIT_NUMERIC


def cmd_fit(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    data = _dataset(args)
    fit = fit_univariate(data.values, OptimizerConfig.from_config(settings.config),
                         fixed_nu=args.fix_nu)
    fit = with_std_errors(fit, data.values) if fit.converged else fit
    report = RunReport(
        command="fit",
        tool_version=TOOL_VERSION,
        seed=args.seed,
        params_in=None if args.fix_nu is None else {"nu": args.fix_nu},
        params_out=params_as_dict(fit.params),
        fit=fit.to_dict(),
        result={"dataset": data.name, "n": len(data)},
    )
    return report, _fit_exit(fit.converged)


def cmd_eval(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    params = _triple(args)
    if args.quantile is not None:
        result = {"quantity": "quantile", "p": args.quantile,
                  "value": uni.quantile(args.quantile, params)}
    else:
        if args.at is None:
            raise UsageError("--at is required for --pdf, --cdf and --hazard", flag="--at")
        if args.pdf:
            quantity, evaluate = "pdf", uni.pdf
        elif args.cdf:
            quantity, evaluate = "cdf", uni.cdf
        else:
            quantity, evaluate = "hazard", uni.hazard
        result = {"quantity": quantity, "t": args.at, "value": evaluate(args.at, params)}
    report = RunReport(command="eval", tool_version=TOOL_VERSION,
                       params_in=params_as_dict(params), result=result)
    return report, EXIT_OK


def cmd_sample(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    draws = uni.sample(_triple(args), args.n, _seed(args, settings))
    sys.stdout.write(format_values(draws))
    return None, EXIT_OK


def cmd_gof(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    data = _dataset(args)
    optimizer = OptimizerConfig.from_config(settings.config)
    seed = _seed(args, settings)
    n_boot = args.boot if args.boot is not None else int(settings["n_boot"])
    if args.fix_nu is not None and not args.fit:
        raise UsageError("--fix-nu only applies together with --fit", flag="--fix-nu")

    fit = None
    if args.fit:
        fit = fit_univariate(data.values, optimizer, fixed_nu=args.fix_nu)
        params = fit.params
    else:
        try:
            params = NuBsParams(*args.params)
        except DomainError as e:
            raise UsageError(str(e), flag="--params") from e

    report_gof = gof_test(data.values, params, n_boot, seed, optimizer, fixed_nu=args.fix_nu)
    report = RunReport(
        command="gof",
        tool_version=TOOL_VERSION,
        seed=seed,
        params_in=None if fit is not None else params_as_dict(params),
        params_out=params_as_dict(params) if fit is not None else None,
        fit=fit.to_dict() if fit is not None else None,
        gof=report_gof.to_dict(),
        result={"dataset": data.name, "n": len(data)},
    )
    return report, _fit_exit(fit.converged if fit is not None else True)


def cmd_moments(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    params = _triple(args)
    nodes = args.nodes if args.nodes is not None else int(settings["moment_nodes"])
    value = uni.raw_moment(args.k, params, nodes)
    report = RunReport(command="moments", tool_version=TOOL_VERSION,
                       params_in=params_as_dict(params),
                       result={"k": args.k, "nodes": nodes, "value": value})
    return report, EXIT_OK


def cmd_fit2(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    data = load_paired_dataset(args.data)
    fit = fit_bivariate(data, OptimizerConfig.from_config(settings.config))
    fit = with_std_errors(fit, data) if fit.converged else fit
    report = RunReport(
        command="fit2",
        tool_version=TOOL_VERSION,
        params_out=params_as_dict(fit.params),
        fit=fit.to_dict(),
        result={"n": int(data.shape[0])},
    )
    return report, _fit_exit(fit.converged)


def cmd_simulate2(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    try:
        params = BivNuBsParams.from_tuple(args.params)
    except DomainError as e:
        raise UsageError(str(e), flag="--params") from e
    sys.stdout.write(format_values(biv_sample(params, args.n, _seed(args, settings))))
    return None, EXIT_OK


def cmd_compare(args: argparse.Namespace, settings: ToolkitConfig) -> CommandResult:
    data = _dataset(args)
    comparison = compare_models(data.values, OptimizerConfig.from_config(settings.config))
    report = RunReport(
        command="compare",
        tool_version=TOOL_VERSION,
        params_out=params_as_dict(comparison.free.params),
        result=comparison.to_dict(),
    )
    return report, _fit_exit(comparison.classic.converged, comparison.free.converged)


COMMANDS: Dict[str, Callable[[argparse.Namespace, ToolkitConfig], CommandResult]] = {
    "fit": cmd_fit,
    "eval": cmd_eval,
    "sample": cmd_sample,
    "gof": cmd_gof,
    "moments": cmd_moments,
    "fit2": cmd_fit2,
    "simulate2": cmd_simulate2,
    "compare": cmd_compare,
}


def _print_usage_error(error: UsageError) -> None:
    print(f"usage error: {error}", file=sys.stderr)
    if error.flag:
        print(f"offending flag: {error.flag}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for command-line interface."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as e:
        _print_usage_error(e)
        return EXIT_USAGE
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)

    settings = ToolkitConfig(args.config)
    settings.setup_logging(args.log_level)
    if settings.load_warning:
        logger.warning(settings.load_warning)

    started = time.perf_counter()
    try:
        report, exit_code = COMMANDS[args.command](args, settings)
    except UsageError as e:
        _print_usage_error(e)
        return EXIT_USAGE
    except (DatasetError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NuBsError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    if report is not None:
        report.timing_ms = int(round((time.perf_counter() - started) * 1000))
        print(report.to_json())
    logger.debug(f"{args.command} finished with exit status {exit_code}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
