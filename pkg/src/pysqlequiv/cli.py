"""
pySqlEquiv Command Line

    pysqlequiv check [FILE ...] [options]
    pysqlequiv oracle [FILE ...] [options]

Without files the builtin corpus is checked. The report goes to stdout,
logging to stderr. Exit status is 0 when every rule gets the verdict its
`@expect` pragma asks for, 1 when some rule does not, 2 when a file cannot
be read, parsed or typechecked.
"""

from __future__ import annotations
import argparse
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
import logging
import os
import sys
import time
import warnings
from . import __version__
from .error_handling import SqlEquivError
from .core.rule import CheckedRule
from .interp.coherence import check_coherence
from .interp.oracle import MODES, OracleConfig, run_oracle
from .parser.parser import parse_rule_file
from .prover.prover import prove_equiv
from .prover.trace import Proved
from .report import Report, ReportEntry
from .rules.corpus import builtin_rules
from .util.config import ProverBudget, budget_from_env, oracle_config_from_env

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2

# flag destination -> OracleConfig field
ORACLE_FLAGS = {
    "oracle_depth": "depth",
    "oracle_domain": "domain",
    "oracle_tuples": "tuples",
    "oracle_mult": "mult",
    "mode": "mode",
    "seed": "seed",
    "oracle_budget": "budget",
    "jobs": "jobs",
}


# ==============================
# Arguments and settings
# ==============================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pysqlequiv",
        description="Check SQL rewrite rules by proof, with a bounded differential oracle as fallback",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Check the builtin corpus
  pysqlequiv check

  # Check a rule file, printing proof traces
  pysqlequiv check rules.sql --trace

  # Test a rule file on random instances only
  pysqlequiv oracle rules.sql --mode random --seed 7 --format json
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("paths", nargs="*", help="rule files; the builtin corpus when omitted")
    common.add_argument("--rule", action="append", default=None, help="only check the named rule")
    common.add_argument("--oracle-depth", type=int, help="maximum depth of substituted schemas")
    common.add_argument("--oracle-domain", type=int, help="values per base type")
    common.add_argument("--oracle-tuples", type=int, help="distinct tuples per relation")
    common.add_argument("--oracle-mult", type=int, help="maximum multiplicity of a tuple")
    common.add_argument("--oracle-budget", type=int, help="maximum instances per rule")
    common.add_argument("--mode", choices=MODES, help="instance enumeration")
    common.add_argument("--seed", type=int, help="seed of the random mode")
    common.add_argument("--jobs", type=int, help="rules checked in parallel")
    common.add_argument("--format", choices=("text", "json"), default="text", help="report format")
    common.add_argument("--timings", action="store_true", help="report the wall time of every rule")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    check = commands.add_parser("check", parents=[common], help="prove rules, falling back to the oracle")
    check.add_argument("--fuel", type=int, help="total prover fuel per rule")
    check.add_argument("--trace", action="store_true", help="print proof traces")
    check.add_argument("--no-cross-check", action="store_true", help="do not run the oracle on proved rules")
    check.add_argument(
        "--coherence", action="store_true", help="also compare denotation and evaluation of both sides"
    )

    commands.add_parser("oracle", parents=[common], help="differential testing only")
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def resolve_budget(args: argparse.Namespace, environ=None) -> ProverBudget:
    """
    Defaults, then `PYSQLEQUIV_FUEL`, then `--fuel`.
    """
    budget = budget_from_env(environ)
    fuel = getattr(args, "fuel", None)
    return budget if fuel is None else budget.with_fuel(fuel)


def resolve_oracle_config(args: argparse.Namespace, environ=None) -> OracleConfig:
    """
    Defaults, then `PYSQLEQUIV_*` variables, then flags.
    """
    cfg = oracle_config_from_env(environ)
    changes = {
        field_name: getattr(args, dest)
        for dest, field_name in ORACLE_FLAGS.items()
        if getattr(args, dest, None) is not None
    }
    return replace(cfg, **changes)


def load_rules(paths: list[str], names: list[str] | None = None) -> list[CheckedRule]:
    """
    Checked rules of the given files in order, or of the builtin corpus.

    Raises
    ------
    OSError
        A file cannot be read.

    SqlEquivError
        A file does not parse or a rule is not well formed.

    KeyError
        A rule named in `names` does not exist.
    """
    if not paths:
        rules = list(builtin_rules())
    else:
        rules = []
        for path in paths:
            with open(path, encoding="utf-8") as f:
                text = f.read()
            logger.debug("parsing %s", path)
            rules += parse_rule_file(text).checked
    if names:
        known = {checked.name for checked in rules}
        for name in names:
            if name not in known:
                raise KeyError(f"no rule named '{name}'")
        rules = [checked for checked in rules if checked.name in names]
    return rules


# ==============================
# Per-rule work
# ==============================


def check_rule(
    checked: CheckedRule,
    budget: ProverBudget,
    cfg: OracleConfig,
    fuel_flag: bool = False,
    cross_check: bool = True,
    coherence: bool = False,
    timings: bool = False,
) -> ReportEntry:
    """
    Prove one rule and build its report entry.

    A proved rule is also run through the oracle unless `cross_check` is
    False; a counterexample then marks the entry as contradicted. Warnings
    raised along the way become notes of the entry. The wall time is
    recorded only when `timings` is set.
    """
    if fuel_flag and checked.rule.fuel is not None:
        checked = replace(checked, rule=replace(checked.rule, fuel=None))
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        verdict = prove_equiv(checked, budget, oracle_cfg=cfg)
        entry = ReportEntry.from_verdict(checked, verdict)
        if isinstance(verdict, Proved) and cross_check:
            outcome = run_oracle(checked, cfg)
            entry.oracle = outcome
            if outcome.counterexample is not None:
                entry.contradicted = True
                entry.counterexample = outcome.counterexample
                warnings.warn(f"proof of rule {checked.name} is contradicted by the oracle", UserWarning)
        if coherence:
            entry.discrepancies = check_coherence(checked, cfg)
    if timings:
        entry.time = time.perf_counter() - start
    entry.notes = [str(w.message) for w in caught]
    return entry


def oracle_rule(checked: CheckedRule, cfg: OracleConfig, timings: bool = False) -> ReportEntry:
    """
    Differential test of one rule, without proving.
    """
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        outcome = run_oracle(checked, cfg)
    elapsed = time.perf_counter() - start if timings else None
    return ReportEntry.from_outcome(checked, outcome, elapsed, [str(w.message) for w in caught])


def _run(function, rules: list, jobs: int, *args) -> list[ReportEntry]:
    if jobs <= 1 or len(rules) <= 1:
        return [function(checked, *args) for checked in rules]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(function, checked, *args) for checked in rules]
        return [future.result() for future in futures]


def cmd_check(
    rules: list[CheckedRule],
    budget: ProverBudget | None = None,
    cfg: OracleConfig | None = None,
    *,
    fuel_flag: bool = False,
    cross_check: bool = True,
    coherence: bool = False,
    timings: bool = False,
) -> Report:
    """
    Prove every rule; entries follow the order of `rules`.
    """
    budget = budget or ProverBudget()
    cfg = cfg or OracleConfig()
    entries = _run(check_rule, rules, cfg.jobs, budget, cfg, fuel_flag, cross_check, coherence, timings)
    for entry in entries:
        logger.info("%s", entry)
    return Report("check", entries)


def cmd_oracle(rules: list[CheckedRule], cfg: OracleConfig | None = None, *, timings: bool = False) -> Report:
    """
    Differential test of every rule; deterministic for a fixed seed.
    """
    cfg = cfg or OracleConfig()
    entries = _run(oracle_rule, rules, cfg.jobs, cfg, timings)
    for entry in entries:
        logger.info("%s", entry)
    return Report("oracle", entries)


# ==============================
# Entry point
# ==============================


def main(argv: list[str] | None = None, environ=None) -> int:
    """
    Run the command line and return its exit status.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    environ = os.environ if environ is None else environ
    try:
        cfg = resolve_oracle_config(args, environ)
        rules = load_rules(args.paths, args.rule)
        if args.command == "check":
            budget = resolve_budget(args, environ)
            report = cmd_check(
                rules,
                budget,
                cfg,
                fuel_flag=args.fuel is not None,
                cross_check=not args.no_cross_check,
                coherence=args.coherence,
                timings=args.timings,
            )
        else:
            report = cmd_oracle(rules, cfg, timings=args.timings)
    except (OSError, SqlEquivError, ValueError, KeyError) as err:
        message = err.args[0] if isinstance(err, KeyError) and err.args else err
        print(f"pysqlequiv: error: {message}", file=sys.stderr)
        return EXIT_ERROR
    if args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.render_text(trace=getattr(args, "trace", False)))
    code = report.exit_code()
    logger.info("%s; exit status %d", report, code)
    return code
