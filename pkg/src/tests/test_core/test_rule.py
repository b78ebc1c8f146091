"""
Test suite for rewrite rules and their well-formedness check

Tests
-----
test_rule_wellformed
    A rule whose sides share a schema is checked

test_rule_wellformed_errors
    Undeclared meta-variables and sides of different schemas, named by rule

test_rewrite_rule_arguments
    RewriteRule rejects non-query sides

test_instantiate
    Schema meta-variables are substituted throughout a checked rule
"""

import pytest
from pysqlequiv.error_handling import ArgumentTypeError, SchemaMismatchError, UnboundMetaError
from pysqlequiv.core import ast
from pysqlequiv.core.rule import CheckedRule, Declarations, RewriteRule, rule_wellformed
from pysqlequiv.core.schema import INT, Leaf, Node, SchemaMeta
from pysqlequiv.parser import parse_query

from ..sample_rules import DISTINCT_SELF_JOIN, load

PAIR = Node(Leaf(INT), Leaf(INT))
DECLS = Declarations(tables={"R": PAIR, "S": Leaf(INT)})


def test_rule_wellformed():
    """
    A rule whose sides share a schema is checked
    """
    rule = RewriteRule(
        "swap_twice",
        parse_query("SELECT Right, Left FROM (SELECT Right, Left FROM R)", DECLS),
        parse_query("R", DECLS),
        DECLS,
    )
    checked = rule_wellformed(rule)
    assert isinstance(checked, CheckedRule)
    assert checked.schema == PAIR
    assert checked.name == "swap_twice"
    assert checked.catalog == {"R": PAIR, "S": Leaf(INT)}

    with pytest.raises(ArgumentTypeError):
        rule_wellformed("swap_twice")


def test_rule_wellformed_errors():
    """
    Undeclared meta-variables and sides of different schemas, named by rule
    """
    lhs = parse_query("SELECT * FROM R WHERE b", DECLS)
    unbound = RewriteRule("unbound", lhs, parse_query("R", DECLS), DECLS)
    with pytest.raises(UnboundMetaError) as info:
        rule_wellformed(unbound)
    assert info.value.rule == "unbound"

    mismatch = RewriteRule("mismatch", parse_query("R", DECLS), parse_query("S", DECLS), DECLS)
    with pytest.raises(SchemaMismatchError) as info:
        rule_wellformed(mismatch)
    assert "mismatch" in str(info.value)


def test_rewrite_rule_arguments():
    """
    RewriteRule rejects non-query sides
    """
    with pytest.raises(ArgumentTypeError):
        RewriteRule("bad", "SELECT * FROM R", ast.Table("R"))

    with pytest.raises(ArgumentTypeError):
        RewriteRule("bad", ast.Table("R"), ast.Table("R"), declarations={"R": PAIR})


def test_instantiate():
    """
    Schema meta-variables are substituted throughout a checked rule
    """
    checked = load(DISTINCT_SELF_JOIN, "distinct_self_join")
    assert checked.catalog["R"] == SchemaMeta("s")

    bound = checked.instantiate({"s": PAIR})
    assert bound.catalog["R"] == PAIR
    assert bound.declarations.projs["p"].source == PAIR
    assert bound.declarations.schemas == ()
    assert bound.schema == checked.schema
    assert checked.instantiate({}) is checked
