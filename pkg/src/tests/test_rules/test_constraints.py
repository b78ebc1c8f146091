"""
Test suite for key and functional dependency constraints and GROUP BY de-sugaring

Tests
-----
test_encode_key
    Keys must reach a leaf of the table's schema

test_encode_fd
    Functional dependencies are keys of a distinct projection

test_constraint_holds
    Constraints are checked on instances through their defining equation

test_constraints_pairwise
    The defining equations agree with the pairwise definitions of keys and dependencies

test_index_def
    Index definitions select the key and the indexed attribute

test_desugar_groupby
    Sugar nodes become distinct selections with correlated aggregates

test_desugar_groupby_pair_key
    A pair key groups like its components given as separate keys

test_desugar_groupby_errors
    Unsupported GROUP BY shapes are rejected

test_desugar_groupby_evaluates
    De-sugared GROUP BY queries agree with grouping the rows directly
"""

import itertools
import pytest
from pysqlequiv.error_handling import ArgumentTypeError, PathMismatchError, UnsupportedSugarError
from pysqlequiv.core import ast
from pysqlequiv.core.schema import INT, Leaf, Node
from pysqlequiv.interp import Bag, Instance, eval_query, parse_instance
from pysqlequiv.interp.values import Value
from pysqlequiv.rules import Constraint, desugar_groupby, encode_fd, encode_key, index_def, key_equation

PAIR = Node(Leaf(INT), Leaf(INT))
R = ast.TableMeta("R", PAIR)
CATALOG = {"T": Node(PAIR, Leaf(INT))}


def _instance(rows):
    return parse_instance(f"instance\n  domain int = {{0, 1, 2}}\n  table R = {{{rows}}}\nend")


def test_encode_key():
    """
    Keys must reach a leaf of the table's schema
    """
    key = encode_key(ast.Left(), R)
    assert key.kind == "key"
    assert key.table_name == "R"
    assert str(key) == "key(Left, R)"
    assert key.keyed_query() == R
    assert key.equation() == key_equation(ast.Left(), R)

    encode_key(ast.path(ast.Left(), ast.Right()), ast.Table("T"), CATALOG)

    with pytest.raises(PathMismatchError):
        encode_key(ast.Star(), R)

    with pytest.raises(PathMismatchError):
        encode_key(ast.Left(), ast.Table("T"), CATALOG)

    with pytest.raises(ArgumentTypeError):
        encode_key("Left", R)

    with pytest.raises(ValueError):
        Constraint("unique", R, ast.Left())

    with pytest.raises(ValueError):
        Constraint("key", R, ast.Left(), ast.Right())


def test_encode_fd():
    """
    Functional dependencies are keys of a distinct projection
    """
    fd = encode_fd(ast.Left(), ast.Right(), R)
    assert fd.kind == "fd"
    assert fd.keyed_query() == ast.Distinct(ast.Select(ast.Pair(ast.Left(), ast.Right()), R))
    assert fd.key_proj() == ast.Compose(ast.Left(), ast.Star())

    with pytest.raises(PathMismatchError):
        encode_fd(ast.Left(), ast.Star(), R)

    with pytest.raises(ArgumentTypeError):
        encode_fd(ast.Left(), None, R)


def test_constraint_holds():
    """
    Constraints are checked on instances through their defining equation
    """
    key = encode_key(ast.Left(), R)
    fd = encode_fd(ast.Left(), ast.Right(), R)

    unique = _instance("(0, 1), (1, 1)")
    assert key.holds(unique)
    assert fd.holds(unique)

    clash = _instance("(0, 1), (0, 2)")
    assert not key.holds(clash)
    assert not fd.holds(clash)

    # duplicates break a key but not a functional dependency
    duplicated = _instance("(0, 1) * 2")
    assert not key.holds(duplicated)
    assert fd.holds(duplicated)


def test_constraints_pairwise():
    """
    The defining equations agree with the pairwise definitions of keys and dependencies
    """
    key = encode_key(ast.Left(), R)
    fd = encode_fd(ast.Left(), ast.Right(), R)
    values = tuple(Value(INT, n) for n in range(3))
    rows = list(itertools.product(values, repeat=2))
    seen = 0
    for size in range(4):
        for support in itertools.combinations(rows, size):
            for counts in itertools.product((1, 2), repeat=size):
                bag = Bag(dict(zip(support, counts)))
                inst = Instance(relations={"R": bag}, domains={INT: values})
                pairs = list(itertools.product(support, repeat=2))
                determined = all(t1[1] == t2[1] for t1, t2 in pairs if t1[0] == t2[0])
                distinct_keys = all(t1 == t2 for t1, t2 in pairs if t1[0] == t2[0])
                unique = distinct_keys and all(n == 1 for n in counts)
                assert fd.holds(inst) == determined, bag
                assert key.holds(inst) == unique, bag
                seen += 1
    assert seen == 1 + 9 * 2 + 36 * 4 + 84 * 8


def test_index_def():
    """
    Index definitions select the key and the indexed attribute
    """
    assert index_def(ast.Right(), ast.Left(), R) == ast.Select(ast.Pair(ast.Left(), ast.Right()), R)


def test_desugar_groupby():
    """
    Sugar nodes become distinct selections with correlated aggregates
    """
    q = desugar_groupby(ast.GroupBy((ast.Left(), ast.AggItem("COUNT", ast.Right())), (ast.Left(),), R))
    assert isinstance(q, ast.Distinct)
    select = q.query
    assert select.query == R
    assert select.proj.left == ast.Left()
    agg = select.proj.right.expr
    assert agg.name == "COUNT"
    assert agg.query == ast.Select(
        ast.Right(),
        ast.Where(
            R,
            ast.Eq(
                ast.Var(ast.Compose(ast.Left(), ast.Left())),
                ast.Var(ast.Compose(ast.Right(), ast.Left())),
            ),
        ),
    )

    two_keys = desugar_groupby(ast.GroupBy((ast.Left(), ast.Right()), (ast.Left(), ast.Right()), R))
    assert two_keys == ast.Distinct(ast.Select(ast.Pair(ast.Left(), ast.Right()), R))


def test_desugar_groupby_pair_key():
    """
    A pair key groups like its components given as separate keys
    """
    count = ast.AggItem("COUNT", ast.Right())
    pair_key = desugar_groupby(ast.GroupBy((count,), (ast.Pair(ast.Left(), ast.Right()),), R))
    two_keys = desugar_groupby(ast.GroupBy((count,), (ast.Left(), ast.Right()), R))
    assert pair_key == two_keys
    same_group = pair_key.query.proj.expr.query.query.pred
    assert isinstance(same_group, ast.And)

    pair_item = desugar_groupby(ast.GroupBy((ast.Pair(ast.Left(), ast.Left()),), (ast.Left(),), R))
    assert pair_item == ast.Distinct(ast.Select(ast.Pair(ast.Left(), ast.Left()), R))


def test_desugar_groupby_errors():
    """
    Unsupported GROUP BY shapes are rejected
    """
    count = ast.AggItem("COUNT", ast.Right())

    with pytest.raises(UnsupportedSugarError):
        desugar_groupby(ast.GroupBy((count,), (), R))

    with pytest.raises(UnsupportedSugarError, match="pair"):
        desugar_groupby(ast.GroupBy((count,), (ast.Pair(ast.Left(), ast.EmptyProj()),), R))

    with pytest.raises(UnsupportedSugarError):
        desugar_groupby(ast.GroupBy((), (ast.Left(),), R))

    with pytest.raises(UnsupportedSugarError):
        desugar_groupby(ast.GroupBy((ast.EmptyProj(),), (ast.Left(),), R))

    with pytest.raises(ArgumentTypeError):
        desugar_groupby(R)


def _small_bags(values):
    rows = list(itertools.product(values, repeat=2))
    for size in range(4):
        for support in itertools.combinations(rows, size):
            for counts in itertools.product((1, 2), repeat=size):
                yield Bag(dict(zip(support, counts)))


def _grouped(bag, agg):
    groups = {}
    for (k, v), m in bag.items():
        groups.setdefault(k, []).extend([v.payload] * m)
    folds = {"COUNT": len, "SUM": sum, "MAX": max, "MIN": min}
    return Bag({(k, Value(INT, folds[agg](vs))): 1 for k, vs in groups.items()})


def test_desugar_groupby_evaluates():
    """
    De-sugared GROUP BY queries agree with grouping the rows directly
    """
    values = tuple(Value(INT, n) for n in range(3))
    queries = {
        agg: desugar_groupby(ast.GroupBy((ast.Left(), ast.AggItem(agg, ast.Right())), (ast.Left(),), R))
        for agg in ("COUNT", "SUM", "MAX", "MIN")
    }
    per_row = desugar_groupby(
        ast.GroupBy(
            (ast.Left(), ast.Right(), ast.AggItem("COUNT", ast.Right())),
            (ast.Pair(ast.Left(), ast.Right()),),
            R,
        )
    )
    for bag in _small_bags(values):
        inst = Instance(relations={"R": bag}, domains={INT: values})
        for agg, q in queries.items():
            assert eval_query(inst, (), q) == _grouped(bag, agg), (agg, bag)
        rows = Bag({(k, (v, Value(INT, m))): 1 for (k, v), m in bag.items()})
        assert eval_query(inst, (), per_row) == rows, bag
