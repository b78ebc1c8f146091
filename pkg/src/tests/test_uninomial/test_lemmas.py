"""
Test suite for the named lemma rewrites

Tests
-----
test_sum_pair
    Swapping the components of a summed pair keeps the value

test_pair_eq
    Eliminating and introducing a pinned sum keeps the value

test_hprop_prod
    A squash implied by the other factors is dropped; an unproved side condition raises

test_lemma_errors
    Wrong shapes, positions and lemma names are rejected
"""

import pytest
from pysqlequiv.error_handling import ShapeMismatchError, SideConditionUnprovedError
from pysqlequiv.core.schema import BOOL, INT, Leaf, Node
from pysqlequiv.denote import EqAtom, Lam, One, RelAtom, Sigma, Squash, Times, VarRef
from pysqlequiv.interp import Bag, Instance, eval_uterm
from pysqlequiv.interp.values import Value
from pysqlequiv.uninomial import LEMMAS, apply_lemma

MIXED = Node(Leaf(INT), Leaf(BOOL))

INSTANCE = Instance(
    relations={
        "P": Bag({(Value(INT, 0), Value(BOOL, True)): 2, (Value(INT, 1), Value(BOOL, False)): 1}),
        "R": Bag({Value(INT, 0): 1, Value(INT, 1): 3}),
    },
    domains={INT: (Value(INT, 0), Value(INT, 1)), BOOL: (Value(BOOL, False), Value(BOOL, True))},
)


def test_sum_pair():
    """
    Swapping the components of a summed pair keeps the value
    """
    term = Sigma(MIXED, RelAtom("P", VarRef(0), MIXED))
    swapped = apply_lemma(term, "sumPair")
    assert isinstance(swapped, Sigma)
    assert swapped.schema == Node(Leaf(BOOL), Leaf(INT))
    assert eval_uterm(INSTANCE, [], swapped) == eval_uterm(INSTANCE, [], term) == 3


def test_pair_eq():
    """
    Eliminating and introducing a pinned sum keeps the value
    """
    pinned = Lam(
        Leaf(INT),
        Sigma(Leaf(INT), Times(EqAtom(VarRef(0), VarRef(1)), RelAtom("R", VarRef(0), Leaf(INT)))),
    )
    plain = apply_lemma(pinned, "pairEq", (0,))
    assert not isinstance(plain.body, Sigma)

    widened = apply_lemma(plain, "pairEq", (0,), witness=VarRef(0), schema=Leaf(INT))
    assert isinstance(widened.body, Sigma)

    for g in INSTANCE.domains[INT]:
        expected = eval_uterm(INSTANCE, [], pinned, g)
        assert eval_uterm(INSTANCE, [], plain, g) == expected
        assert eval_uterm(INSTANCE, [], widened, g) == expected


def test_hprop_prod():
    """
    A squash implied by the other factors is dropped; an unproved side condition raises
    """
    r = RelAtom("R", VarRef(0), Leaf(INT))
    term = Lam(Leaf(INT), Times(r, Squash(r)))
    dropped = apply_lemma(term, "hpropProd", (0,))
    assert dropped == Lam(Leaf(INT), r)
    for g in INSTANCE.domains[INT]:
        assert eval_uterm(INSTANCE, [], dropped, g) == eval_uterm(INSTANCE, [], term, g)

    asked = []

    def record(hyp, goal):
        asked.append((hyp, goal))
        return True

    assert apply_lemma(term, "hpropProd", (0,), witness=1, discharge=record) == dropped
    assert asked == [(Lam(Leaf(INT), Squash(r)), Lam(Leaf(INT), Squash(r)))]

    unrelated = Lam(Leaf(INT), Times(r, Squash(RelAtom("Q", VarRef(0), Leaf(INT)))))
    with pytest.raises(SideConditionUnprovedError):
        apply_lemma(unrelated, "hpropProd", (0,))

    with pytest.raises(SideConditionUnprovedError):
        apply_lemma(term, "hpropProd", (0,), discharge=lambda hyp, goal: False)

    with pytest.raises(ShapeMismatchError):
        apply_lemma(term, "hpropProd", (0,), witness=0)

    with pytest.raises(ShapeMismatchError):
        apply_lemma(Lam(Leaf(INT), r), "hpropProd", (0,))


def test_lemma_errors():
    """
    Wrong shapes, positions and lemma names are rejected
    """
    assert LEMMAS == ("sumPair", "pairEq", "hpropProd")

    with pytest.raises(ShapeMismatchError):
        apply_lemma(One(), "sumPair")

    with pytest.raises(ShapeMismatchError):
        apply_lemma(Sigma(Leaf(INT), One()), "sumPair")

    with pytest.raises(ShapeMismatchError):
        apply_lemma(Sigma(Leaf(INT), One()), "pairEq")

    with pytest.raises(ShapeMismatchError):
        apply_lemma(One(), "sumPair", (0,))

    with pytest.raises(ValueError):
        apply_lemma(One(), "commute")
