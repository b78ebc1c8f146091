"""
Test suite for the rule DSL printer

Tests
-----
test_print_proj
    Select lists print without parentheses, nested pairs and left-nested compositions with them

test_print_reparses
    Printed queries parse back to the same AST

test_corpus_round_trip
    The builtin corpus printed as a rule file parses back to the same rules
"""

from pysqlequiv.core import ast
from pysqlequiv.parser import parse_query, parse_rule_file, print_proj, print_query, print_rule_file
from pysqlequiv.rules import corpus_source

from ..sample_rules import MAGIC_SET, MUTANTS


def test_print_proj():
    """
    Select lists print without parentheses, nested pairs and left-nested compositions with them
    """
    items = ast.Pair(ast.Left(), ast.Pair(ast.Right(), ast.Star()))
    assert print_proj(items, top=True) == "Left, Right, *"
    assert print_proj(items) == "(Left, Right, *)"
    assert print_proj(ast.path(ast.Left(), ast.Right(), ast.Left())) == "Left.Right.Left"
    assert print_proj(ast.Compose(ast.Compose(ast.Left(), ast.Right()), ast.Left())) == "(Left.Right).Left"


def test_print_reparses():
    """
    Printed queries parse back to the same AST
    """
    for text in [
        "SELECT Left.Right, Right FROM R, S WHERE VAR(Right.Left.Left) = VAR(Right.Right)",
        "SELECT DISTINCT * FROM (R UNION ALL S) EXCEPT T",
        "SELECT * FROM R WHERE NOT EXISTS (SELECT * FROM S WHERE CASTPRED((Left.Right, Right), b)) OR TRUE",
        "SELECT (Left, Left).Right FROM R",
    ]:
        q = parse_query(text)
        assert parse_query(print_query(q)) == q


def test_corpus_round_trip():
    """
    The builtin corpus printed as a rule file parses back to the same rules
    """
    for source in (corpus_source(), MUTANTS, MAGIC_SET):
        parsed = parse_rule_file(source)
        reparsed = parse_rule_file(print_rule_file(parsed.declarations, parsed.rules))
        assert len(reparsed.rules) == len(parsed.rules)
        for before, after in zip(parsed.rules, reparsed.rules):
            assert after.name == before.name
            assert after.lhs == before.lhs
            assert after.rhs == before.rhs
            assert after.premises == before.premises
            assert (after.category, after.expect, after.provenance) == (
                before.category,
                before.expect,
                before.provenance,
            )
