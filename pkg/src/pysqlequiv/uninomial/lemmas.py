"""
Named Lemmas as Term Rewrites

sumPair
    Σ x:node(A, B). P x  ==  Σ y:node(B, A). P (y.2, y.1)

pairEq
    P u  ==  Σ x. P x × (x = u), read in either direction

hpropProd
    T × ‖P‖  ==  T, provided T implies ‖P‖

Positions are paths of child indices through UniNomial sub-terms: `Plus`
and `Times` have children 0 and 1, `Squash`, `Negate`, `Sigma` and `Lam`
have child 0. Tuple terms are not positions.
"""

from __future__ import annotations
from dataclasses import fields, replace
from typing import Callable
from ..error_handling import (
    ArgumentTypeError,
    SchemaMismatchError,
    ShapeMismatchError,
    SideConditionUnprovedError,
)
from ..core.schema import Node, Schema
from ..denote import terms as tm
from ..denote.validate import term_schema

LEMMAS = ("sumPair", "pairEq", "hpropProd")

Discharge = Callable[[tm.UTerm, tm.UTerm], bool]


# ==============================
# Positions
# ==============================


def _uterm_fields(t: tm.UTerm) -> list[str]:
    return [f.name for f in fields(t) if isinstance(getattr(t, f.name), tm.UTerm)]


def subterm(t: tm.UTerm, position: tuple = ()) -> tuple[tm.UTerm, list[Schema]]:
    """
    Sub-term at `position` and the schemas of the binders crossed to reach
    it, outermost first.

    Raises
    ------
    ShapeMismatchError
        The path leaves the term.
    """
    binders = []
    current = t
    for step, index in enumerate(position):
        names = _uterm_fields(current)
        if not isinstance(index, int) or not 0 <= index < len(names):
            raise ShapeMismatchError("position", tuple(position[: step + 1]), t)
        if isinstance(current, tm.BINDERS):
            binders.append(current.schema)
        current = getattr(current, names[index])
    return current, binders


def replace_at(t: tm.UTerm, position: tuple, new: tm.UTerm) -> tm.UTerm:
    """
    `t` with the sub-term at `position` replaced by `new`.
    """
    if not position:
        return new
    names = _uterm_fields(t)
    name = names[position[0]]
    return replace(t, **{name: replace_at(getattr(t, name), position[1:], new)})


def flatten_times(t: tm.UTerm) -> list[tm.UTerm]:
    """
    Factors of a product tree, left to right.
    """
    if isinstance(t, tm.Times):
        return flatten_times(t.left) + flatten_times(t.right)
    return [t]


# ==============================
# Lemmas
# ==============================


def _sum_pair(t: tm.UTerm, position: tuple) -> tm.UTerm:
    if not isinstance(t, tm.Sigma) or not isinstance(t.schema, Node):
        raise ShapeMismatchError("sumPair", position, t)
    swapped = tm.MkPair(tm.Snd(tm.VarRef(0)), tm.Fst(tm.VarRef(0)))
    flipped = Node(t.schema.right, t.schema.left)
    return tm.Sigma(flipped, tm.substitute(t.body, 0, swapped))


def _eliminate(t: tm.UTerm, position: tuple) -> tm.UTerm:
    if not isinstance(t, tm.Sigma):
        raise ShapeMismatchError("pairEq", position, t)
    factors = flatten_times(t.body)
    for i, f in enumerate(factors):
        if not isinstance(f, tm.EqAtom):
            continue
        for var, other in ((f.left, f.right), (f.right, f.left)):
            if var == tm.VarRef(0) and 0 not in tm.free_indices(other):
                rest = tm.times(*(factors[:i] + factors[i + 1 :]))
                return tm.instantiate(rest, tm.shift(other, -1))
    raise ShapeMismatchError("pairEq", position, t)


def _abstract(t: tm.UTerm, witness: tm.TupleTerm) -> tm.UTerm:
    def fn(node, depth):
        if isinstance(node, tm.TupleTerm) and node == tm.shift(witness, 1 + depth):
            return tm.VarRef(depth)
        return None

    return tm.map_term(tm.shift(t, 1), fn)


def _introduce(t: tm.UTerm, position: tuple, witness: tm.TupleTerm, schema, env) -> tm.UTerm:
    if schema is None:
        try:
            schema = term_schema(witness, env)
        except SchemaMismatchError:
            raise ShapeMismatchError("pairEq", position, t) from None
    return tm.Sigma(
        schema, tm.Times(_abstract(t, witness), tm.EqAtom(tm.VarRef(0), tm.shift(witness, 1)))
    )


def _close(t: tm.UTerm, env: list) -> tm.UTerm:
    for schema in reversed(env):
        t = tm.Lam(schema, t)
    return t


def _default_discharge(hyp: tm.UTerm, goal: tm.UTerm) -> bool:
    # pylint: disable=import-outside-toplevel
    from ..prover.search import entails

    return entails(hyp, goal)


def _hprop_prod(t: tm.UTerm, position: tuple, witness, env, discharge: Discharge) -> tm.UTerm:
    factors = flatten_times(t)
    if len(factors) < 2:
        raise ShapeMismatchError("hpropProd", position, t)
    if witness is None:
        candidates = [i for i, f in enumerate(factors) if isinstance(f, tm.Squash)]
    elif (
        isinstance(witness, int)
        and 0 <= witness < len(factors)
        and isinstance(factors[witness], tm.Squash)
    ):
        candidates = [witness]
    else:
        raise ShapeMismatchError("hpropProd", position, t)
    if not candidates:
        raise ShapeMismatchError("hpropProd", position, t)
    for i in candidates:
        rest = tm.times(*(factors[:i] + factors[i + 1 :]))
        if discharge(_close(tm.Squash(rest), env), _close(factors[i], env)):
            return rest
    condition = " or ".join(
        f"{tm.times(*(factors[:i] + factors[i + 1 :]))} implies {factors[i]}" for i in candidates
    )
    raise SideConditionUnprovedError("hpropProd", condition)


def apply_lemma(
    t: tm.UTerm,
    which: str,
    position: tuple = (),
    *,
    witness=None,
    schema: Schema | None = None,
    discharge: Discharge | None = None,
) -> tm.UTerm:
    """
    Rewrite the sub-term of `t` at `position` with a named lemma.

    Parameters
    ----------
    t : pysqlequiv.denote.UTerm
        Term to rewrite.

    which : str
        `"sumPair"`, `"pairEq"` or `"hpropProd"`.

    position : tuple[int], optional
        Path to the sub-term, see the module docstring. Root by default.

    witness : TupleTerm|int, optional
        For `pairEq`, the tuple term to abstract: the sub-term `P u` becomes
        `Σ x. P x × (x = u)`. Without it `pairEq` eliminates a sum instead.
        For `hpropProd`, the index of the squash factor to drop.

    schema : pysqlequiv.core.Schema, optional
        Schema of the `pairEq` witness when it cannot be derived from the
        binders above `position`.

    discharge : Callable[[UTerm, UTerm], bool], optional
        Decides whether the first closed term implies the second; used for
        the `hpropProd` side condition. Defaults to the prover's
        entailment search.

    Returns
    -------
    pysqlequiv.denote.UTerm
        The rewritten term.

    Raises
    ------
    ShapeMismatchError
        The sub-term does not have the lemma's left-hand shape.

    SideConditionUnprovedError
        `hpropProd` could not show that the other factors imply the squash.
    """
    if not isinstance(t, tm.UTerm):
        raise ArgumentTypeError("t", t, tm.UTerm)
    if which not in LEMMAS:
        raise ValueError(f"unknown lemma '{which}', expected one of {LEMMAS}")
    position = tuple(position)
    target, env = subterm(t, position)
    if which == "sumPair":
        new = _sum_pair(target, position)
    elif which == "pairEq":
        if witness is None:
            new = _eliminate(target, position)
        else:
            if not isinstance(witness, tm.TupleTerm):
                raise ArgumentTypeError("witness", witness, tm.TupleTerm)
            new = _introduce(target, position, witness, schema, env)
    else:
        new = _hprop_prod(target, position, witness, env, discharge or _default_discharge)
    return replace_at(t, position, new)
