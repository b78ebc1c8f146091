"""
Test suite for the UniNomial denotation of queries

Tests
-----
test_denote_select
    Shape of the denotation of a projection

test_denote_well_scoped
    Denotations pass the schema check of terms

test_denotation_matches_evaluation
    The denotation of a query counts each tuple as often as bag evaluation does

test_denote_errors
    Ill-typed queries and wrong argument types are rejected

test_denote_proj
    Projections denote compositions of pair selectors

test_denote_pred
    Predicates denote 0/1-valued bodies over their context
"""

import pytest
from pysqlequiv.error_handling import ArgumentTypeError, SchemaMismatchError
from pysqlequiv.core import ast
from pysqlequiv.core.rule import Declarations
from pysqlequiv.core.schema import EMPTY, INT, Leaf, Node
from pysqlequiv.denote import (
    EqAtom,
    Fst,
    Lam,
    Negate,
    One,
    Plus,
    RelAtom,
    Sigma,
    Snd,
    Squash,
    Times,
    VarRef,
    Zero,
    check_term,
    denote_pred,
    denote_proj,
    denote_query,
    print_term,
)
from pysqlequiv.interp import Bag, Instance, eval_query, eval_uterm
from pysqlequiv.interp.values import Value, enumerate_tuples
from pysqlequiv.parser import parse_query

PAIR = Node(Leaf(INT), Leaf(INT))
DECLS = Declarations(tables={"R": PAIR, "S": Leaf(INT)})


def _v(n):
    return Value(INT, n)


INSTANCE = Instance(
    relations={
        "R": Bag({(_v(0), _v(1)): 2, (_v(1), _v(1)): 1, (_v(2), _v(0)): 1}),
        "S": Bag({_v(0): 1, _v(1): 3}),
    },
    domains={INT: (_v(0), _v(1), _v(2))},
)

QUERIES = [
    "SELECT Left FROM R",
    "SELECT Right, * FROM S, R WHERE VAR(Right.Left) = VAR(Right.Right.Right)",
    "DISTINCT (SELECT Right FROM R UNION ALL S)",
    "S EXCEPT (SELECT Right FROM R)",
    "SELECT * FROM S WHERE EXISTS (SELECT * FROM R WHERE VAR(Left.Right) = VAR(Right.Left))",
    "S SEMIJOIN R ON VAR(Left) = VAR(Right.Right)",
    "SELECT * FROM S WHERE NOT (VAR(Right) = VAR(Right) AND FALSE) OR TRUE",
    "SELECT Right, COUNT(Left) FROM R GROUP BY Right",
    "SELECT Left, SUM(Right) FROM R GROUP BY Left",
]


def test_denote_select():
    """
    Shape of the denotation of a projection
    """
    term = denote_query(EMPTY, parse_query("SELECT Left FROM R", DECLS))
    assert term == Lam(
        EMPTY,
        Lam(
            Leaf(INT),
            Sigma(PAIR, Times(EqAtom(VarRef(1), Fst(VarRef(0))), RelAtom("R", VarRef(0), PAIR))),
        ),
    )
    assert "R" in print_term(term)


@pytest.mark.parametrize("text", QUERIES)
def test_denote_well_scoped(text):
    """
    Denotations pass the schema check of terms
    """
    check_term(denote_query(EMPTY, parse_query(text, DECLS)))


@pytest.mark.parametrize("text", QUERIES)
def test_denotation_matches_evaluation(text):
    """
    The denotation of a query counts each tuple as often as bag evaluation does
    """
    q = parse_query(text, DECLS)
    term = denote_query(EMPTY, q)
    result = eval_query(INSTANCE, (), q)
    candidates = set(result)
    schema = term.body.schema
    candidates |= set(enumerate_tuples(schema, INSTANCE.domains))
    for t in candidates:
        assert eval_uterm(INSTANCE, [], term, (), t) == result.multiplicity(t)


def test_denote_errors():
    """
    Ill-typed queries and wrong argument types are rejected
    """
    with pytest.raises(SchemaMismatchError):
        denote_query(EMPTY, parse_query("R UNION ALL S", DECLS))

    with pytest.raises(ArgumentTypeError):
        denote_query("empty", parse_query("S", DECLS))

    with pytest.raises(ArgumentTypeError):
        denote_proj("Left")


def test_denote_proj():
    """
    Projections denote compositions of pair selectors
    """
    x = VarRef(0)
    proj = parse_query("SELECT Left.Right FROM R").proj
    assert denote_proj(proj)(x) == Snd(Fst(x))


def test_denote_pred():
    """
    Predicates denote 0/1-valued bodies over their context
    """
    x = VarRef(0)
    eq = ast.Eq(ast.Var(ast.Left()), ast.Var(ast.Right()))
    assert denote_pred(PAIR, eq) == Lam(PAIR, EqAtom(Fst(x), Snd(x)))
    assert denote_pred(PAIR, ast.TruePred()) == Lam(PAIR, One())
    assert denote_pred(PAIR, ast.FalsePred()) == Lam(PAIR, Zero())

    excluded_middle = denote_pred(PAIR, ast.Or(eq, ast.Not(eq)))
    assert excluded_middle == Lam(PAIR, Squash(Plus(EqAtom(Fst(x), Snd(x)), Negate(EqAtom(Fst(x), Snd(x))))))
    for t in enumerate_tuples(PAIR, INSTANCE.domains):
        assert eval_uterm(INSTANCE, [], excluded_middle, t) == 1
        assert eval_uterm(INSTANCE, [], denote_pred(PAIR, eq), t) == int(t[0] == t[1])

    with pytest.raises(ArgumentTypeError):
        denote_pred("pair", eq)
