"""
Test suite for the rule DSL lexer and parser

Tests
-----
test_tokenize
    Keywords are case-insensitive and pragmas are collected with their lines

test_parse_projections
    Composition nests to the right, projection lists pair to the right

test_parse_from_list
    FROM lists nest to the left and WHERE applies to the whole product

test_parse_semijoin
    SEMIJOIN expands to EXISTS over a cast of the joined tuple

test_parse_groupby
    GROUP BY is de-sugared to a correlated aggregate under DISTINCT

test_parse_rule_file
    Declarations, premises and pragmas of a rule file

test_parse_errors
    Syntax errors carry a line, a column and the expected tokens

test_duplicate_declaration
    A name declared twice in one file is rejected

test_pragma_errors
    Malformed @fuel and @expect values are rejected

test_parse_garbage
    Random bytes and truncated files raise parse or well-formedness errors, nothing else
"""

import random
import pytest
from pysqlequiv.error_handling import DuplicateDeclarationError, ParseError, SqlEquivError
from pysqlequiv.core import ast
from pysqlequiv.core.rule import Declarations
from pysqlequiv.core.schema import INT, Leaf, Node
from pysqlequiv.parser import parse_query, parse_rule_file
from pysqlequiv.parser.lexer import TokenType, tokenize

from ..sample_rules import DISTINCT_SELF_JOIN, KEYED, MUTANTS, UNION_SELECTION


def test_tokenize():
    """
    Keywords are case-insensitive and pragmas are collected with their lines
    """
    tokens, pragmas = tokenize("-- @expect refuted\nselect * From R -- trailing")
    assert [t.value for t in tokens[:4]] == ["SELECT", "*", "FROM", "R"]
    assert tokens[0].type is TokenType.KEYWORD
    assert tokens[3].type is TokenType.IDENT
    assert (tokens[3].line, tokens[3].column) == (2, 15)
    assert tokens[-1].type is TokenType.EOF
    assert len(pragmas) == 1
    assert (pragmas[0].name, pragmas[0].args, pragmas[0].line) == ("expect", ("refuted",), 1)

    with pytest.raises(ParseError) as info:
        tokenize("SELECT ; FROM R")
    assert (info.value.line, info.value.column) == (1, 8)


def test_parse_projections():
    """
    Composition nests to the right, projection lists pair to the right
    """
    q = parse_query("SELECT Left.Right.Left, Right, * FROM R")
    assert isinstance(q, ast.Select)
    assert q.proj == ast.Pair(
        ast.Compose(ast.Left(), ast.Compose(ast.Right(), ast.Left())),
        ast.Pair(ast.Right(), ast.Star()),
    )
    assert q.proj.left == ast.path(ast.Left(), ast.Right(), ast.Left())


def test_parse_from_list():
    """
    FROM lists nest to the left and WHERE applies to the whole product
    """
    q = parse_query("SELECT * FROM R, S, T WHERE b")
    assert q == ast.Select(
        ast.Star(),
        ast.Where(
            ast.Product(ast.Product(ast.Table("R"), ast.Table("S")), ast.Table("T")),
            ast.PredMeta("b"),
        ),
    )

    decls = Declarations(tables={"R": Leaf(INT)})
    r = ast.TableMeta("R", Leaf(INT))
    assert parse_query("FROM R, R", decls) == ast.Product(r, r)
    assert parse_query("DISTINCT R UNION ALL R EXCEPT R", decls) == ast.Except(
        ast.UnionAll(ast.Distinct(r), r), r
    )


def test_parse_semijoin():
    """
    SEMIJOIN expands to EXISTS over a cast of the joined tuple
    """
    q = parse_query("R SEMIJOIN S ON theta")
    cast = ast.Pair(ast.Compose(ast.Left(), ast.Right()), ast.Right())
    inner = ast.Select(ast.Star(), ast.Where(ast.Table("S"), ast.CastPred(cast, ast.PredMeta("theta"))))
    assert q == ast.Select(ast.Star(), ast.Where(ast.Table("R"), ast.Exists(inner)))


def test_parse_groupby():
    """
    GROUP BY is de-sugared to a correlated aggregate under DISTINCT
    """
    decls = Declarations(tables={"R": Node(Leaf(INT), Leaf(INT))})
    q = parse_query("SELECT Left, SUM(Right) FROM R GROUP BY Left", decls)
    assert isinstance(q, ast.Distinct)
    assert isinstance(q.query, ast.Select)
    key, value = q.query.proj.left, q.query.proj.right
    assert key == ast.Left()
    assert isinstance(value, ast.Eval)
    assert isinstance(value.expr, ast.Agg)
    assert value.expr.name == "SUM"
    assert not any(isinstance(node, ast.GroupBy) for node in q.walk())

    with pytest.raises(ParseError):
        parse_query("SELECT Left, SUM(Right) FROM R", decls)


def test_parse_rule_file():
    """
    Declarations, premises and pragmas of a rule file
    """
    parsed = parse_rule_file(MUTANTS)
    assert [rule.name for rule in parsed.rules] == [
        "self_join_without_distinct",
        "except_commute",
        "index_lookup_without_key",
        "selection_on_wrong_side",
        "cq_missing_join_equality",
        "cq_dropped_join",
    ]
    assert len(parsed.checked) == len(parsed.rules)
    assert all(rule.expect == "refuted" for rule in parsed.rules)
    assert parsed.pragmas["except_commute"] == {"expect": "refuted"}

    # each rule keeps only the declarations it uses
    except_commute = parsed.rules[1]
    assert set(except_commute.declarations.tables) == {"A", "B"}
    assert except_commute.declarations.types == ("a",)
    assert set(parsed.declarations.tables) == {"R", "S", "A", "B", "T"}

    keyed = parse_rule_file(KEYED)
    premise = keyed.rules[0].premises[0]
    assert premise.kind == "key"
    assert premise.table_name == "R"
    assert premise.proj == ast.Left()
    assert keyed.rules[0].expect is None


def test_parse_errors():
    """
    Syntax errors carry a line, a column and the expected tokens
    """
    with pytest.raises(ParseError) as info:
        parse_query("SELECT * FROM")
    assert info.value.line == 1
    assert info.value.column == 14
    assert "(" in info.value.expected

    with pytest.raises(ParseError) as info:
        parse_rule_file("TABLE R : leaf int\nRULE r\n  R\n  R\nEND\n")
    assert info.value.line == 4
    assert "EQUIV" in info.value.expected

    with pytest.raises(ParseError):
        parse_query("R R")

    with pytest.raises(ParseError):
        parse_query(b"\xff\xfe")


def test_duplicate_declaration():
    """
    A name declared twice in one file is rejected
    """
    with pytest.raises(DuplicateDeclarationError) as info:
        parse_rule_file("TYPE a\nTABLE a : leaf int\n")
    assert info.value.name == "a"
    assert info.value.line == 2

    with pytest.raises(DuplicateDeclarationError):
        parse_rule_file("TABLE R : leaf int\nRULE r R EQUIV R END\nRULE r R EQUIV R END\n")


def test_pragma_errors():
    """
    Malformed @fuel and @expect values are rejected
    """
    with pytest.raises(ParseError):
        parse_rule_file("TABLE R : leaf int\n-- @fuel lots\nRULE r R EQUIV R END\n")

    with pytest.raises(ParseError):
        parse_rule_file("TABLE R : leaf int\n-- @expect maybe\nRULE r R EQUIV R END\n")

    parsed = parse_rule_file("TABLE R : leaf int\n-- @fuel 50\n-- @category Basic\nRULE r R EQUIV R END\n")
    assert parsed.rules[0].fuel == 50
    assert parsed.rules[0].category == "Basic"


def _parses_or_rejects(text):
    try:
        parse_rule_file(text)
    except SqlEquivError:
        pass


def test_parse_garbage(oracle_seed):
    """
    Random bytes and truncated files raise parse or well-formedness errors, nothing else
    """
    rng = random.Random(oracle_seed)
    for _ in range(1000):
        data = bytes(rng.randrange(256) for _ in range(rng.randint(0, 60)))
        _parses_or_rejects(data)
        _parses_or_rejects(data.decode("latin-1"))

    with pytest.raises(ParseError):
        parse_rule_file(b"\xff\xfe")

    for text in (UNION_SELECTION, DISTINCT_SELF_JOIN):
        for end in range(len(text) + 1):
            _parses_or_rejects(text[:end])
