# pylint: disable=wrong-import-position
"""
pySqlEquiv Exports
"""

__version__ = "0.1.0"

from .core import RewriteRule, CheckedRule, Declarations, rule_wellformed
from .parser import parse_query, parse_rule_file
from .prover import Proved, Refuted, Unknown, prove_equiv, replay_trace
from .interp import OracleConfig, run_oracle, differential_test
from .rules import builtin_rules
from . import util
