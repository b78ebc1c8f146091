"""
Test suite for the conjunctive query decision procedure

Tests
-----
test_to_cq
    Atoms, head and collapsed equalities read from a join

test_to_cq_outside_fragment
    Queries outside the fragment have no CQ

test_set_equiv_redundant_join
    A redundant self join is set but not bag equivalent

test_redundant_join_mappings
    Both containment mappings of the corpus redundant join pair, atom by atom

test_bag_equiv_isomorphic
    Reordered FROM lists with matching heads are isomorphic

test_canonical_database
    The canonical database holds one frozen tuple per atom

test_homomorphism_matches_containment
    Random CQ pairs: a homomorphism exists exactly when the canonical database shows containment

test_set_decision_matches_evaluation
    Set equivalent pairs agree on small set instances, others differ on a canonical database

test_bag_decision_matches_evaluation
    Reordered FROM lists are bag equivalent and agree on every small bag instance
"""

import itertools
import random
import pytest
from pysqlequiv.error_handling import ArgumentTypeError
from pysqlequiv.core.rule import Declarations
from pysqlequiv.core.schema import INT, Leaf, Node
from pysqlequiv.cq import (
    canonical_database,
    contained_in,
    decide_bag_equiv,
    decide_set_equiv,
    describe,
    find_homomorphism,
    find_isomorphism,
    frozen_head,
    to_cq,
)
from pysqlequiv.interp import Bag, Instance, eval_query
from pysqlequiv.interp.values import Value
from pysqlequiv.parser import parse_query
from pysqlequiv.rules import builtin_rules

PAIR = Node(Leaf(INT), Leaf(INT))
DECLS = Declarations(tables={"R": PAIR, "S": Leaf(INT)})


def _cq(text):
    cq = to_cq(parse_query(text, DECLS))
    assert cq is not None, text
    return cq


def test_to_cq():
    """
    Atoms, head and collapsed equalities read from a join
    """
    cq = _cq("SELECT DISTINCT Left.Left FROM R, S WHERE VAR(Right.Left.Right) = VAR(Right.Right)")
    assert cq.distinct
    assert [atom.table for atom in cq.atoms] == ["R", "S"]
    assert cq.atoms[0].arity() == 2
    assert cq.equalities == ()
    # the join variable is shared by both atoms after collapsing
    assert cq.atoms[0].arg[1] == cq.atoms[1].arg
    assert cq.head == cq.atoms[0].arg[0]
    assert len(cq.variables) == 3
    assert len(cq.body_vars()) == 2
    assert cq.is_safe()
    assert str(cq).startswith("DISTINCT ")

    bag = _cq("SELECT * FROM S")
    assert not bag.distinct
    assert bag.head == bag.atoms[0].arg


def test_to_cq_outside_fragment():
    """
    Queries outside the fragment have no CQ
    """
    for text in [
        "S EXCEPT S",
        "SELECT * FROM S UNION ALL S",
        "SELECT * FROM S WHERE NOT VAR(Right) = VAR(Right)",
        "SELECT * FROM S WHERE EXISTS (SELECT * FROM R)",
    ]:
        assert to_cq(parse_query(text, DECLS)) is None, text

    assert to_cq(parse_query("S", DECLS), ctx=PAIR) is None

    with pytest.raises(ArgumentTypeError):
        to_cq("SELECT * FROM S")


def test_set_equiv_redundant_join():
    """
    A redundant self join is set but not bag equivalent
    """
    single = _cq("SELECT DISTINCT Left FROM R")
    joined = _cq("SELECT DISTINCT Left.Left FROM R, R WHERE VAR(Right.Left.Left) = VAR(Right.Right.Left)")
    assert decide_set_equiv(single, joined)
    assert not decide_bag_equiv(single, joined)

    h = find_homomorphism(joined, single)
    assert h is not None
    assert set(h.atom_map) == {0, 1}
    assert describe(h, joined, single).count("->") == 2

    other_column = _cq("SELECT DISTINCT Right FROM R")
    assert not decide_set_equiv(single, other_column)
    assert find_homomorphism(single, other_column) is None


def test_redundant_join_mappings():
    """
    Both containment mappings of the corpus redundant join pair, atom by atom
    """
    checked = builtin_rules().get("cq_redundant_join")
    a = to_cq(checked.lhs, checked.catalog)
    b = to_cq(checked.rhs, checked.catalog)
    assert [atom.table for atom in a.atoms] == ["R", "T"]
    assert [atom.table for atom in b.atoms] == ["R", "R", "T"]

    # the single R lands on the first R of the self join, which carries the T equality
    forward = find_homomorphism(a, b)
    assert forward.atom_map == {0: 0, 1: 2}
    # both R atoms of the self join collapse onto the single R
    backward = find_homomorphism(b, a)
    assert backward.atom_map == {0: 0, 1: 0, 2: 1}
    assert backward.mapping[b.atoms[0].arg] == backward.mapping[b.atoms[1].arg] == a.atoms[0].arg

    assert decide_set_equiv(a, b)
    assert not decide_bag_equiv(a, b)


def test_bag_equiv_isomorphic():
    """
    Reordered FROM lists with matching heads are isomorphic
    """
    a = _cq("SELECT Left, Right FROM R, S")
    b = _cq("SELECT Right, Left FROM S, R")
    h = find_isomorphism(a, b)
    assert h is not None
    assert h.atom_map == {0: 1, 1: 0}
    assert decide_bag_equiv(a, b)
    assert decide_set_equiv(a, b)

    swapped = _cq("SELECT Left, Right FROM S, R")
    assert find_isomorphism(a, swapped) is None

    with pytest.raises(ArgumentTypeError):
        decide_bag_equiv(a, "b")


def test_canonical_database():
    """
    The canonical database holds one frozen tuple per atom
    """
    joined = _cq("SELECT DISTINCT Left.Left FROM R, R WHERE VAR(Right.Left.Left) = VAR(Right.Right.Left)")
    single = _cq("SELECT DISTINCT Left FROM R")
    inst = canonical_database(joined, [single])
    assert len(inst.relations["R"]) == 2
    assert all(count == 1 for _, count in inst.relations["R"].items())
    head = frozen_head(joined, inst)
    assert any(t[0] == head for t in inst.relations["R"])

    assert contained_in(joined, single)
    assert contained_in(single, joined)
    assert not contained_in(_cq("SELECT DISTINCT Right FROM R"), single)


# ===================================
# Random conjunctive queries
# ===================================


def _item_path(j, k):
    if k == 1:
        return []
    if j == k - 1:
        return ["Right"]
    return ["Left"] + _item_path(j, k - 1)

def _random_cq(rng, arity):
    # at most 4 atoms and 4 leaf variables; references are (atom, column)
    while True:
        tables = [rng.choice("RS") for _ in range(rng.randint(1, 4))]
        if sum(2 if table == "R" else 1 for table in tables) <= 4:
            break
    refs = [
        (i, column)
        for i, table in enumerate(tables)
        for column in (("Left", "Right") if table == "R" else (None,))
    ]
    head = [rng.choice(refs) for _ in range(arity)]
    eqs = [(rng.choice(refs), rng.choice(refs)) for _ in range(rng.randint(0, 2))]
    return tables, head, eqs


def _render(cq, order=None, distinct=True):
    tables, head, eqs = cq
    order = order or list(range(len(tables)))
    position = {atom: p for p, atom in enumerate(order)}

    def path(ref):
        atom, column = ref
        return _item_path(position[atom], len(tables)) + ([column] if column else [])

    head_text = ", ".join(".".join(path(ref)) or "*" for ref in head)
    conds = [f"VAR({'.'.join(['Right'] + path(a))}) = VAR({'.'.join(['Right'] + path(b))})" for a, b in eqs]
    where = f" WHERE {' AND '.join(conds)}" if conds else ""
    select = "SELECT DISTINCT" if distinct else "SELECT"
    return f"{select} {head_text} FROM {', '.join(tables[atom] for atom in order)}{where}"


def _instances(mults):
    values = (Value(INT, 0), Value(INT, 1))

    def bags(rows):
        for size in range(3):
            for support in itertools.combinations(rows, size):
                for counts in itertools.product(mults, repeat=size):
                    yield Bag(dict(zip(support, counts)))

    pairs = list(itertools.product(values, repeat=2))
    for r in bags(pairs):
        for s in bags(values):
            yield Instance(relations={"R": r, "S": s}, domains={INT: values})


def test_homomorphism_matches_containment(random_cq_pairs, oracle_seed):
    """
    Random CQ pairs: a homomorphism exists exactly when the canonical database shows containment
    """
    rng = random.Random(oracle_seed)
    for _ in range(random_cq_pairs):
        arity = rng.randint(1, 2)
        a = _cq(_render(_random_cq(rng, arity)))
        b = _cq(_render(_random_cq(rng, arity)))
        assert len(a.atoms) <= 4 and len(a.body_vars()) <= 4
        assert (find_homomorphism(a, b) is not None) == contained_in(b, a), (str(a), str(b))
        assert (find_homomorphism(b, a) is not None) == contained_in(a, b), (str(a), str(b))
        assert decide_set_equiv(a, b) == (contained_in(a, b) and contained_in(b, a))


def test_set_decision_matches_evaluation(random_cq_pairs, oracle_seed):
    """
    Set equivalent pairs agree on small set instances, others differ on a canonical database
    """
    rng = random.Random(oracle_seed + 1)
    instances = list(_instances((1,)))
    assert len(instances) == 11 * 4
    for _ in range(random_cq_pairs):
        arity = rng.randint(1, 2)
        first = _random_cq(rng, arity)
        order = list(range(len(first[0])))
        rng.shuffle(order)
        pairs = [(_render(first), _render(_random_cq(rng, arity))), (_render(first), _render(first, order))]
        for texts in pairs:
            a, b = (_cq(text) for text in texts)
            if decide_set_equiv(a, b):
                for inst in instances:
                    assert eval_query(inst, (), a.query) == eval_query(inst, (), b.query), texts
                continue
            source, target = (b, a) if not contained_in(b, a) else (a, b)
            inst = canonical_database(source, [target])
            assert eval_query(inst, (), source.query) != eval_query(inst, (), target.query), texts
        assert decide_set_equiv(a, b), texts


def test_bag_decision_matches_evaluation(random_cq_pairs, oracle_seed):
    """
    Reordered FROM lists are bag equivalent and agree on every small bag instance
    """
    rng = random.Random(oracle_seed + 2)
    instances = list(_instances((1, 2)))
    assert len(instances) == 33 * 9
    for _ in range(max(1, random_cq_pairs // 4)):
        cq = _random_cq(rng, rng.randint(1, 2))
        order = list(range(len(cq[0])))
        rng.shuffle(order)
        texts = (_render(cq, distinct=False), _render(cq, order, distinct=False))
        a, b = (_cq(text) for text in texts)
        assert not a.distinct
        assert decide_bag_equiv(a, b), texts
        for inst in instances:
            assert eval_query(inst, (), a.query) == eval_query(inst, (), b.query), texts
