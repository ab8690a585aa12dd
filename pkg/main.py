import argparse
import logging
import os
import sys

from components.collusion_report import cancel_report, cycle_report
from components.deviation_report import deviate_report, verify_ne_report
from components.election_report import require_profile, utility_report, winner_report
from components.report import EXIT_ERROR, Report
from components.rules_report import compare_report, criteria_report
from utils.criteria import CriteriaChecker, SearchConfig
from utils.election_loader import ElectionLoader
from utils.errors import InvalidArgumentError, QVError
from utils.models import FixedBudget
from utils.voting_rules import RuleId

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVEL_ENV = "QV_LOG_LEVEL"
ALL = "all"


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


class CommandParser(argparse.ArgumentParser):
    """Usage errors exit 1; exit 2 is reserved for negative decisions."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = CommandParser(add_help=False)
    common.add_argument("file", help="election file (.json or .xlsx)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--log-level", default=None,
                        help=f"logging level (default WARNING, or ${LOG_LEVEL_ENV})")

    parser = CommandParser(prog="qv-lab", description="Quadratic Voting elections, deviations and collusion.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CommandParser)

    winner = commands.add_parser("winner", parents=[common], help="tally, winner set and probabilities")
    winner.add_argument("--plot", metavar="PATH", help="write an HTML bar chart of the tally")

    utility = commands.add_parser("utility", parents=[common], help="total utility of one agent")
    utility.add_argument("--agent", type=int, required=True)
    utility.add_argument("--with-refund", action="store_true")
    utility.add_argument("--ballot", type=_int_list, help="replacement ballot v1,v2,...")

    deviate = commands.add_parser("deviate", parents=[common], help="best beneficial deviation of one agent")
    deviate.add_argument("--agent", type=int, required=True)
    deviate.add_argument("--oracle", action="store_true", help="use brute-force enumeration")
    deviate.add_argument("--max-votes", type=int, help="oracle bound on |votes| per outcome")

    verify = commands.add_parser("verify-ne", parents=[common], help="is the profile a pure Nash equilibrium")
    verify.add_argument("--oracle", action="store_true")
    verify.add_argument("--max-votes", type=int)
    verify.add_argument("--all", dest="every_agent", action="store_true", help="report every agent's deviation")

    collude = commands.add_parser("collude", help="collusion constructions")
    collude_modes = collude.add_subparsers(dest="mode", required=True, parser_class=CommandParser)
    cancel = collude_modes.add_parser("cancel", parents=[common], help="cancel opposing votes on one outcome")
    cancel.add_argument("--outcome", type=int, required=True)
    cancel.add_argument("--coalition", type=_int_list, required=True)
    collude_modes.add_parser("cycle", parents=[common], help="search the claimed preference graph for a cycle")

    compare = commands.add_parser("compare", parents=[common], help="classical rule winners against QV")
    compare.add_argument("--rule", required=True, choices=[kind for kind in RuleId.KINDS if kind != RuleId.QV])
    compare.add_argument("--k", type=int, help="top score for score voting")
    compare.add_argument("--plot", metavar="PATH")

    criteria = commands.add_parser("criteria", parents=[common], help="check social-choice criteria")
    criteria.add_argument("--rule", required=True, choices=[*RuleId.KINDS, ALL])
    criteria.add_argument("--criterion", required=True, choices=[*CriteriaChecker.CRITERIA, ALL])
    criteria.add_argument("--k", type=int)
    criteria.add_argument("--seed", type=int, default=0)
    criteria.add_argument("--trials", type=int, help="search this many random elections instead of the file's")
    return parser


def configure_logging(level: str | None) -> None:
    level = (level or os.environ.get(LOG_LEVEL_ENV) or "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise InvalidArgumentError(f"unknown log level {level!r}")
    root = logging.getLogger()
    root.setLevel(level)
    if not any(getattr(handler, "_qv_cli", False) for handler in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._qv_cli = True
        root.addHandler(handler)


def dispatch(args: argparse.Namespace) -> Report:
    loaded = ElectionLoader.load(args.file)
    election, profile = loaded.election, loaded.profile

    if args.command == "winner":
        return winner_report(election, require_profile(profile))
    if args.command == "utility":
        return utility_report(election, require_profile(profile), args.agent,
                              with_refund=args.with_refund, ballot=args.ballot)
    if args.command == "deviate":
        return deviate_report(election, require_profile(profile), args.agent,
                              oracle=args.oracle, max_votes=args.max_votes)
    if args.command == "verify-ne":
        return verify_ne_report(election, require_profile(profile), oracle=args.oracle,
                                max_votes=args.max_votes, every_agent=args.every_agent)
    if args.command == "collude":
        if args.mode == "cancel":
            return cancel_report(election, require_profile(profile), args.outcome, args.coalition)
        return cycle_report(election, require_profile(profile))
    if args.command == "compare":
        return compare_report(election, profile, RuleId.parse(args.rule, args.k))
    if args.command == "criteria":
        rules = [*RuleId.classical(args.k), RuleId(RuleId.QV)] if args.rule == ALL else [RuleId.parse(args.rule, args.k)]
        criteria = list(CriteriaChecker.CRITERIA) if args.criterion == ALL else [args.criterion]
        search = args.trials is not None
        budget = election.config.budget if isinstance(election.config, FixedBudget) else None
        trials = SearchConfig.trials if args.trials is None else args.trials
        config = SearchConfig(seed=args.seed, trials=trials, budget=budget)
        return criteria_report(election, profile, rules, criteria, config, search)
    raise InvalidArgumentError(f"unknown command {args.command!r}")


def run_command(argv: list[str] | None = None) -> int:
    """Parse `argv`, run the command, print its report and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    try:
        configure_logging(args.log_level)
        report = dispatch(args)
        print(report.render(args.json))
        plot_path = getattr(args, "plot", None)
        if plot_path and report.figure is not None:
            report.figure.write_html(plot_path, include_plotlyjs=True)
            logger.info("wrote chart to %s", plot_path)
    except QVError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return report.exit_code


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
