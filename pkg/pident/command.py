# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import argparse
import logging
import sys
from enum import Enum
from typing import Optional

from pident import __version__
from pident.common import (
    DEFAULT_MAX_BASIS,
    DEFAULT_MAX_DEGREE,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    Budget,
    BudgetExhaustedError,
    ExpressionError,
    ModelSemanticError,
    ModelSyntaxError,
    PidentError,
    ProlongationBudgetError,
    RankMethod,
    SelfCheckError,
    Settings,
    log,
)
from pident.differential import Ranking
from pident.model import format_model, gen_appendix, read_model
from pident.report import ReportScope, build_report, check_function

_DEFAULT_LOG_LEVEL = "info"
_VALID_LOG_LEVELS = ["debug", "info", "warning"]
_VALID_FORMATS = ["json", "text"]
_APPENDIX_FAMILY = "appendix"

EXIT_CODE_SUCCESS = 0
EXIT_CODE_ERROR = 1
EXIT_CODE_PARSE_ERROR = 2
EXIT_CODE_BUDGET_EXHAUSTED = 3
EXIT_CODE_SELF_CHECK_FAILED = 4


class CommandName(Enum):
    """Available command line sub commands."""

    CHECK = "check"
    GEN = "gen"
    IDENT = "ident"
    IO = "io"
    MULTI = "multi"


def _positive_int(text: str) -> int:
    result = int(text)
    if result < 1:
        raise argparse.ArgumentTypeError(f"value must be at least 1 but is {result}")
    return result


def _parser() -> argparse.ArgumentParser:
    result = argparse.ArgumentParser(prog="pident", description="structural identifiability of rational ODE models")

    def add_model(parser_to_extend: argparse.ArgumentParser):
        parser_to_extend.add_argument("model_path", metavar="MODEL", help="path to the model file to analyze")

    def add_analysis_options(parser_to_extend: argparse.ArgumentParser):
        parser_to_extend.add_argument(
            "--ranking",
            "-r",
            help=(
                "comma separated list of all outputs and inputs from high to low rank; "
                "default: outputs above inputs, orderly in each group"
            ),
        )
        parser_to_extend.add_argument(
            "--rank-method",
            choices=[rank_method.value for rank_method in RankMethod],
            default=RankMethod.SYMBOLIC.value,
            help="method to compute Wronskian ranks; default: %(default)s",
        )
        parser_to_extend.add_argument(
            "--seed", type=int, default=DEFAULT_SEED, help="seed for probabilistic ranks; default: %(default)s"
        )
        parser_to_extend.add_argument(
            "--trials",
            type=_positive_int,
            default=DEFAULT_TRIALS,
            help="number of random evaluations for probabilistic ranks; default: %(default)s",
        )
        parser_to_extend.add_argument(
            "--max-prolongation",
            type=int,
            help="maximum derivative order to prolong the outputs to; default: number of states + 4",
        )
        parser_to_extend.add_argument(
            "--jet-cap", type=int, help="highest derivative order available; default: 2 * number of states + 2"
        )
        parser_to_extend.add_argument(
            "--budget-degree",
            type=_positive_int,
            default=DEFAULT_MAX_DEGREE,
            help="maximum total degree of Gröbner basis elements; default: %(default)s",
        )
        parser_to_extend.add_argument(
            "--budget-terms",
            type=_positive_int,
            default=DEFAULT_MAX_BASIS,
            help="maximum number of Gröbner basis elements; default: %(default)s",
        )

    def add_report_options(parser_to_extend: argparse.ArgumentParser):
        parser_to_extend.add_argument(
            "--format", "-f", choices=_VALID_FORMATS, default="text", help="output format; default: %(default)s"
        )
        parser_to_extend.add_argument(
            "--timing", action="store_true", help="include the elapsed time in milliseconds in the report"
        )

    result.add_argument(
        "--log",
        choices=_VALID_LOG_LEVELS,
        default=_DEFAULT_LOG_LEVEL,
        help=(
            f"level for logging messages; possible values: {', '.join(_VALID_LOG_LEVELS)}; "
            f"default: {_DEFAULT_LOG_LEVEL}"
        ),
    )
    result.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = result.add_subparsers(dest="command", help="command to run")

    io_parser = subparsers.add_parser(CommandName.IO.value, help="compute the input-output equations of a model")
    add_model(io_parser)
    add_analysis_options(io_parser)
    add_report_options(io_parser)

    ident_parser = subparsers.add_parser(
        CommandName.IDENT.value, help="compute all single- and multi-experiment identifiable functions of a model"
    )
    add_model(ident_parser)
    add_analysis_options(ident_parser)
    add_report_options(ident_parser)
    ident_parser.add_argument(
        "--trace", action="store_true", help="include the ideals of the field intersection in the report"
    )

    multi_parser = subparsers.add_parser(
        CommandName.MULTI.value, help="compute the multi-experiment identifiable field and the experiment bound"
    )
    add_model(multi_parser)
    add_analysis_options(multi_parser)
    add_report_options(multi_parser)
    multi_parser.add_argument(
        "--replicate",
        action="store_true",
        help="also compare the single-experiment field of the replicated model with the multi-experiment field",
    )

    check_parser = subparsers.add_parser(
        CommandName.CHECK.value, help="check whether a function of the parameters is identifiable"
    )
    add_model(check_parser)
    add_analysis_options(check_parser)
    check_parser.add_argument(
        "--function", "-F", required=True, help='rational function of the parameters, for example "k1*k2"'
    )
    check_parser.add_argument(
        "--multi", action="store_true", help="check multi-experiment instead of single-experiment identifiability"
    )

    gen_parser = subparsers.add_parser(CommandName.GEN.value, help="generate a benchmark model")
    gen_parser.add_argument(
        "--family", choices=[_APPENDIX_FAMILY], default=_APPENDIX_FAMILY, help="model family; default: %(default)s"
    )
    gen_parser.add_argument("--n", type=_positive_int, required=True, help="number of outputs")
    gen_parser.add_argument("--h", type=_positive_int, required=True, help="length of the derivative chains")
    gen_parser.add_argument("--out", "-o", help="path of the model file to write; default: standard output")

    return result


def _settings(args: argparse.Namespace) -> Settings:
    budget = Budget.from_environment(max_degree=args.budget_degree, max_basis=args.budget_terms)
    return Settings(
        budget=budget,
        jet_cap=args.jet_cap,
        max_prolongation=args.max_prolongation,
        rank_method=RankMethod(args.rank_method),
        seed=args.seed,
        trials=args.trials,
    )


def _ranking(args: argparse.Namespace) -> Optional[Ranking]:
    return Ranking.from_text(args.ranking) if args.ranking is not None else None


class _ReportCommand:
    scope = ReportScope.FULL

    def __init__(self, _parser: argparse.ArgumentParser, args: argparse.Namespace):
        self._model_path = args.model_path
        self._ranking = _ranking(args)
        self._settings = _settings(args)
        self._format = args.format
        self._with_timing = args.timing
        self._with_trace = getattr(args, "trace", False)
        self._with_replication = getattr(args, "replicate", False)

    def run(self):
        model = read_model(self._model_path)
        report = build_report(
            model,
            self.scope,
            self._ranking,
            self._settings,
            with_trace=self._with_trace,
            with_timing=self._with_timing,
            with_replication=self._with_replication,
        )
        sys.stdout.write(report.to_json() if self._format == "json" else report.to_text())


class _IoCommand(_ReportCommand):
    scope = ReportScope.IO


class _IdentCommand(_ReportCommand):
    scope = ReportScope.FULL


class _MultiCommand(_ReportCommand):
    scope = ReportScope.MULTI


class _CheckCommand:
    def __init__(self, _parser: argparse.ArgumentParser, args: argparse.Namespace):
        self._model_path = args.model_path
        self._function = args.function
        self._multi = args.multi
        self._ranking = _ranking(args)
        self._settings = _settings(args)

    def run(self):
        model = read_model(self._model_path)
        is_identifiable = check_function(model, self._function, self._multi, self._ranking, self._settings)
        print("true" if is_identifiable else "false")


class _GenCommand:
    def __init__(self, _parser: argparse.ArgumentParser, args: argparse.Namespace):
        self._n = args.n
        self._h = args.h
        self._out_path = args.out

    def run(self):
        model_text = format_model(gen_appendix(self._n, self._h))
        if self._out_path is None:
            sys.stdout.write(model_text)
        else:
            log.info('writing model to "%s"', self._out_path)
            with open(self._out_path, "w", encoding="utf-8") as model_file:
                model_file.write(model_text)


_COMMAND_NAME_TO_COMMAND_CLASS_MAP = {
    CommandName.CHECK: _CheckCommand,
    CommandName.GEN: _GenCommand,
    CommandName.IDENT: _IdentCommand,
    CommandName.IO: _IoCommand,
    CommandName.MULTI: _MultiCommand,
}


def _exit_code_for_error(error: Exception) -> int:
    if isinstance(error, (ModelSyntaxError, ModelSemanticError, ExpressionError)):
        return EXIT_CODE_PARSE_ERROR
    if isinstance(error, BudgetExhaustedError):
        return EXIT_CODE_BUDGET_EXHAUSTED
    if isinstance(error, SelfCheckError):
        return EXIT_CODE_SELF_CHECK_FAILED
    return EXIT_CODE_ERROR


def exit_code_for(arguments: Optional[list[str]] = None) -> int:
    """
    Exit code for running the command line with the specified ``arguments``,
    or ``sys.argv`` if no arguments are specified.

    Unlike :py:func:`main`, logging has to be initialized before calling this
    function.

    Some command line options like "--help" and "--version" result in
    :py:exc:`SystemExit` that is just passed on.

    Unexpected errors are not handled with ``except`` but passed on.
    """
    result = EXIT_CODE_ERROR
    command_name = None
    try:
        parser = _parser()
        args = parser.parse_args(arguments)
        if args.command is None:
            possible_commands_text = ", ".join(command_name.value for command_name in CommandName)
            parser.error(f"COMMAND must be specified; possible commands are: {possible_commands_text}")

        log.setLevel(logging.getLevelName(args.log.upper()))

        command_name = CommandName(args.command)
        command_class = _COMMAND_NAME_TO_COMMAND_CLASS_MAP[command_name]
        command_class(parser, args).run()
        result = EXIT_CODE_SUCCESS
    except (PidentError, OSError) as error:
        if command_name is None:
            log.error(error)
        else:
            log.error('cannot perform command "%s": %s', command_name.value, error)
        if isinstance(error, ProlongationBudgetError):
            for candidate in error.last_candidate:
                log.info("  last candidate: %s", candidate)
        result = _exit_code_for_error(error)
    except KeyboardInterrupt:
        log.error("interrupted by user")
    return result


def main():
    logging.basicConfig(level=logging.INFO)
    sys.exit(exit_code_for())


if __name__ == "__main__":
    main()
