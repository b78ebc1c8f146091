"""
Test suite for bags, aggregates, instances and query evaluation

Tests
-----
test_bag
    Multiset operations keep multiplicities and drop empty entries

test_eval_agg
    Aggregates of empty and non-empty bags

test_eval_query
    Queries evaluated on a small instance

test_parse_instance
    The instance text form reparses to the same instance

test_parse_instance_errors
    Malformed instance blocks are rejected with a position

test_enumerate_tuples
    Tuples of a schema over finite domains

test_semiring_identities
    Equality, sum and squash identities hold for every bag with multiplicities up to 2
"""

from fractions import Fraction
import itertools
import pytest
from pysqlequiv.error_handling import (
    ArgumentTypeError,
    EmptyAggregateError,
    EvaluationError,
    InfiniteDomainError,
    ParseError,
    UnboundMetaError,
)
from pysqlequiv.core import ast
from pysqlequiv.core.rule import Declarations
from pysqlequiv.core.schema import BOOL, EMPTY, INT, Leaf, Node, abstract
from pysqlequiv.denote import EqAtom, Lam, RelAtom, Sigma, Squash, Times, VarRef
from pysqlequiv.interp import Bag, Instance, eval_agg, eval_query, eval_uterm, parse_instance
from pysqlequiv.interp.values import Value, default_domain, enumerate_tuples, format_tuple
from pysqlequiv.parser import parse_query

PAIR = Node(Leaf(INT), Leaf(INT))
DECLS = Declarations(tables={"R": PAIR, "S": Leaf(INT)})

INSTANCE_TEXT = """
instance
  domain int = {0, 1, 2}
  table R = {(0, 1) * 2, (1, 1)}
  table S = {1, 2}
end
"""


def _v(n):
    return Value(INT, n)


def test_bag():
    """
    Multiset operations keep multiplicities and drop empty entries
    """
    a = Bag({_v(0): 2, _v(1): 1})
    b = Bag([_v(1), _v(2), _v(2)])
    assert len(a) == 3
    assert b.multiplicity(_v(2)) == 2
    assert a.union_all(b) == Bag({_v(0): 2, _v(1): 2, _v(2): 2})
    assert a.except_(b) == Bag({_v(0): 2})
    assert a.distinct() == Bag({_v(0): 1, _v(1): 1})
    assert str(a) == "{0 * 2, 1}"
    assert not Bag({_v(0): 0})
    assert Bag() == Bag([])

    with pytest.raises(ValueError):
        Bag({_v(0): -1})


def test_eval_agg():
    """
    Aggregates of empty and non-empty bags
    """
    assert eval_agg("SUM", Bag()) == _v(0)
    assert eval_agg("COUNT", Bag()) == _v(0)
    assert eval_agg("COUNT", Bag({_v(5): 3})) == _v(3)
    assert eval_agg("SUM", Bag({_v(2): 2, _v(3): 1})) == _v(7)
    assert eval_agg("AVG", Bag([_v(1), _v(2)])) == Value(INT, Fraction(3, 2))
    assert eval_agg("AVG", Bag([_v(2), _v(2)])) == _v(2)
    assert eval_agg("MAX", Bag([_v(1), _v(4), _v(2)])) == _v(4)
    assert eval_agg("MIN", Bag([_v(1), _v(4), _v(2)])) == _v(1)

    for name in ("AVG", "MAX", "MIN"):
        with pytest.raises(EmptyAggregateError):
            eval_agg(name, Bag())

    with pytest.raises(EvaluationError):
        eval_agg("SUM", Bag([Value(BOOL, True)]))

    with pytest.raises(EvaluationError):
        eval_agg("SUM", Bag([(_v(1), _v(2))]))

    with pytest.raises(ArgumentTypeError):
        eval_agg("SUM", [_v(1)])


def test_eval_query():
    """
    Queries evaluated on a small instance
    """
    inst = parse_instance(INSTANCE_TEXT)

    def run(text):
        return eval_query(inst, (), parse_query(text, DECLS))

    assert run("SELECT Right FROM R") == Bag({_v(1): 3})
    assert run("DISTINCT (SELECT Right FROM R)") == Bag({_v(1): 1})
    assert run("S EXCEPT (SELECT Right FROM R)") == Bag({_v(2): 1})
    assert run("S UNION ALL (SELECT Left FROM R)") == Bag({_v(0): 2, _v(1): 2, _v(2): 1})
    assert run("SELECT * FROM R, S WHERE VAR(Right.Left.Right) = VAR(Right.Right)") == Bag(
        {((_v(0), _v(1)), _v(1)): 2, ((_v(1), _v(1)), _v(1)): 1}
    )
    correlated = "SELECT * FROM S WHERE EXISTS (SELECT * FROM R WHERE VAR(Left.Right) = VAR(Right.Left))"
    assert run(correlated) == Bag({_v(1): 1})
    per_key = Bag({(_v(0), _v(2)): 1, (_v(1), _v(1)): 1})
    assert run("SELECT Left, COUNT(Right) FROM R GROUP BY Left") == per_key
    assert run("SELECT Left, SUM(Right) FROM R GROUP BY Left") == per_key

    with pytest.raises(UnboundMetaError):
        eval_query(inst, (), ast.Table("T"))


def test_parse_instance():
    """
    The instance text form reparses to the same instance
    """
    k = abstract("k")
    inst = Instance(
        relations={
            "R": Bag({(Value(k, 0), _v(1)): 2, (Value(k, 1), _v(0)): 1}),
            "E": Bag(),
        },
        schemas={"s": Node(Leaf(k), Leaf(INT))},
        projs={"p": ast.Left(), "q": {(Value(k, 0), _v(1)): _v(1)}},
        preds={"b": frozenset({((), _v(0))})},
        exprs={"e": {(): Value(BOOL, True)}},
        functions={"l": {(): _v(1), (_v(0),): _v(2)}},
        domains={INT: default_domain(INT, 2), k: default_domain(k, 2)},
    )
    text = inst.to_dsl()
    assert text.splitlines()[0] == "instance"
    assert "table R = {(k#0, 1) * 2, (k#1, 0)}" in text
    reparsed = parse_instance(text)
    assert reparsed == inst


def test_parse_instance_errors():
    """
    Malformed instance blocks are rejected with a position
    """
    with pytest.raises(ParseError) as info:
        parse_instance("instance\n  table R = {1 * 0}\nend")
    assert info.value.line == 2

    with pytest.raises(ParseError):
        parse_instance("instance\n  view V = {}\nend")

    with pytest.raises(ParseError):
        parse_instance("instance\n  table R = {1}\n")

    with pytest.raises(ParseError):
        parse_instance("instance end extra")


def test_enumerate_tuples():
    """
    Tuples of a schema over finite domains
    """
    domains = {INT: default_domain(INT, 2), BOOL: default_domain(BOOL, 2)}
    tuples = list(enumerate_tuples(Node(Leaf(INT), Leaf(BOOL)), domains))
    assert len(tuples) == 4
    assert format_tuple(tuples[0]) == "(0, false)"
    assert list(enumerate_tuples(EMPTY, domains)) == [()]

    with pytest.raises(InfiniteDomainError):
        list(enumerate_tuples(Leaf(abstract("k")), domains))


def _bags(domain, mults=range(3)):
    for counts in itertools.product(mults, repeat=len(domain)):
        yield Bag({t: n for t, n in zip(domain, counts) if n})


def test_semiring_identities():
    """
    Equality, sum and squash identities hold for every bag with multiplicities up to 2
    """
    ints = Leaf(INT)

    def rel(name, index):
        return RelAtom(name, VarRef(index), ints)

    # (a = b) × (b = c)  ==  (a = b) × (a = c)
    a, b, c = VarRef(2), VarRef(1), VarRef(0)
    chained = Lam(ints, Lam(ints, Lam(ints, Times(EqAtom(a, b), EqAtom(b, c)))))
    rebased = Lam(ints, Lam(ints, Lam(ints, Times(EqAtom(a, b), EqAtom(a, c)))))
    values = default_domain(INT, 3)
    plain = Instance(relations={}, domains={INT: values})
    for args in itertools.product(values, repeat=3):
        assert eval_uterm(plain, [], chained, *args) == eval_uterm(plain, [], rebased, *args)

    # Σ t1, t2. R t1 × S t2  ==  (Σ t1. R t1) × (Σ t2. S t2)
    split = Sigma(ints, Sigma(ints, Times(rel("R", 1), rel("S", 0))))
    factored = Times(Sigma(ints, rel("R", 0)), Sigma(ints, rel("S", 0)))
    # ‖n × n‖  ==  ‖n‖
    squared = Lam(ints, Squash(Times(rel("R", 0), rel("R", 0))))
    squashed = Lam(ints, Squash(rel("R", 0)))

    domain = default_domain(INT, 2)
    bags = list(_bags(domain))
    assert len(bags) == 9
    for r, s in itertools.product(bags, repeat=2):
        inst = Instance(relations={"R": r, "S": s}, domains={INT: domain})
        assert eval_uterm(inst, [], split) == eval_uterm(inst, [], factored) == len(r) * len(s)
        for t in domain:
            assert eval_uterm(inst, [], squared, t) == eval_uterm(inst, [], squashed, t)
            assert eval_uterm(inst, [], squashed, t) == min(r.multiplicity(t), 1)
