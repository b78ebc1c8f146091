"""
Tuple Terms and UniNomial Terms

Binders are nameless: `VarRef(0)` is the innermost enclosing `Sigma` or
`Lam`. `NamedVar` only appears in terms produced by the normalizer.
"""

from __future__ import annotations
from dataclasses import dataclass, fields, replace
from typing import Callable, Iterator
from ..core.ast import PredMeta, ProjMeta, ExprMeta
from ..core.schema import BaseType, Schema


class Term:
    """
    Base class of tuple terms and UniNomial terms.
    """

    __slots__ = ()

    def children(self) -> Iterator[Term]:
        """
        Direct sub-terms in field order.
        """
        for field in fields(self):
            value = getattr(self, field.name)
            if isinstance(value, Term):
                yield value
            elif isinstance(value, tuple):
                yield from (item for item in value if isinstance(item, Term))

    def walk(self) -> Iterator[Term]:
        """
        Pre-order traversal.
        """
        yield self
        for child in self.children():
            yield from child.walk()

    def size(self) -> int:
        """
        Number of nodes.
        """
        return sum(1 for _ in self.walk())

    def __str__(self) -> str:
        # pylint: disable=import-outside-toplevel
        from .pretty import print_term

        return print_term(self)


# ==============================
# Tuple terms
# ==============================


class TupleTerm(Term):
    """
    Term denoting a tuple or a scalar value.
    """

    __slots__ = ()


@dataclass(frozen=True, repr=True)
class VarRef(TupleTerm):
    """
    Reference to the binder `index` levels out.
    """

    index: int


@dataclass(frozen=True, repr=True)
class NamedVar(TupleTerm):
    """
    Named variable with its schema.
    """

    name: str
    schema: Schema


@dataclass(frozen=True, repr=True)
class Fst(TupleTerm):
    """
    First component of a pair.
    """

    arg: TupleTerm


@dataclass(frozen=True, repr=True)
class Snd(TupleTerm):
    """
    Second component of a pair.
    """

    arg: TupleTerm


@dataclass(frozen=True, repr=True)
class MkPair(TupleTerm):
    """
    Pair of two tuples.
    """

    left: TupleTerm
    right: TupleTerm


@dataclass(frozen=True, repr=True)
class Unit(TupleTerm):
    """
    The only tuple of the empty schema.
    """


@dataclass(frozen=True, repr=True)
class Const(TupleTerm):
    """
    Concrete tuple, used by ground terms.
    """

    value: object
    schema: Schema


@dataclass(frozen=True, repr=True)
class ProjApply(TupleTerm):
    """
    Projection meta-variable applied to a tuple.
    """

    meta: ProjMeta
    arg: TupleTerm


@dataclass(frozen=True, repr=True)
class FnApply(TupleTerm):
    """
    Uninterpreted function applied to scalar arguments.
    """

    name: str
    args: tuple
    result: BaseType


@dataclass(frozen=True, repr=True)
class ExprApply(TupleTerm):
    """
    Expression meta-variable applied to its context tuple.
    """

    meta: ExprMeta
    arg: TupleTerm


@dataclass(frozen=True, repr=True)
class AggApply(TupleTerm):
    """
    Aggregate of the bag denoted by `body`, a `Lam` over a single-leaf schema.
    """

    name: str
    body: Lam
    result: BaseType


# ==============================
# UniNomial terms
# ==============================


class UTerm(Term):
    """
    Term of the UniNomial algebra, denoting a cardinal.
    """

    __slots__ = ()


@dataclass(frozen=True, repr=True)
class Zero(UTerm):
    """
    0
    """


@dataclass(frozen=True, repr=True)
class One(UTerm):
    """
    1
    """


@dataclass(frozen=True, repr=True)
class Plus(UTerm):
    left: UTerm
    right: UTerm


@dataclass(frozen=True, repr=True)
class Times(UTerm):
    left: UTerm
    right: UTerm


@dataclass(frozen=True, repr=True)
class Squash(UTerm):
    """
    Truncation to 0 or 1.
    """

    arg: UTerm


@dataclass(frozen=True, repr=True)
class Negate(UTerm):
    """
    1 if the argument is 0, else 0.
    """

    arg: UTerm


@dataclass(frozen=True, repr=True)
class Sigma(UTerm):
    """
    Sum over every tuple of `schema`; `body` binds `VarRef(0)`.
    """

    schema: Schema
    body: UTerm


@dataclass(frozen=True, repr=True)
class RelAtom(UTerm):
    """
    Multiplicity of a tuple in a relation.
    """

    table: str
    arg: TupleTerm
    schema: Schema | None = None


@dataclass(frozen=True, repr=True)
class EqAtom(UTerm):
    """
    1 if the two tuples are equal, else 0.
    """

    left: TupleTerm
    right: TupleTerm


@dataclass(frozen=True, repr=True)
class PredAtom(UTerm):
    """
    Predicate meta-variable applied to its context tuple.
    """

    meta: PredMeta
    arg: TupleTerm


@dataclass(frozen=True, repr=True)
class Lam(UTerm):
    """
    Abstraction over a tuple of `schema`; `body` binds `VarRef(0)`.
    """

    schema: Schema
    body: UTerm


BINDERS = (Sigma, Lam)


def plus(*terms: UTerm) -> UTerm:
    """
    Right-nested sum, `Zero()` when empty.
    """
    if not terms:
        return Zero()
    result = terms[-1]
    for term in reversed(terms[:-1]):
        result = Plus(term, result)
    return result


def times(*terms: UTerm) -> UTerm:
    """
    Right-nested product, `One()` when empty.
    """
    if not terms:
        return One()
    result = terms[-1]
    for term in reversed(terms[:-1]):
        result = Times(term, result)
    return result


# ==============================
# Binder-aware traversal
# ==============================


def map_term(term: Term, fn: Callable[[Term, int], Term | None], depth: int = 0) -> Term:
    """
    Rebuild `term`, letting `fn(node, depth)` replace nodes.

    `fn` returns a replacement or `None` to recurse into the node. `depth`
    counts the binders crossed so far.
    """
    replacement = fn(term, depth)
    if replacement is not None:
        return replacement
    changes = {}
    for field in fields(term):
        value = getattr(term, field.name)
        child_depth = depth + 1 if isinstance(term, BINDERS) and field.name == "body" else depth
        if isinstance(value, Term):
            new = map_term(value, fn, child_depth)
        elif isinstance(value, tuple) and any(isinstance(item, Term) for item in value):
            new = tuple(
                map_term(item, fn, child_depth) if isinstance(item, Term) else item
                for item in value
            )
        else:
            continue
        if new is not value:
            changes[field.name] = new
    return replace(term, **changes) if changes else term


def shift(term: Term, amount: int, cutoff: int = 0) -> Term:
    """
    Add `amount` to every free `VarRef` at or above `cutoff`.
    """
    if amount == 0:
        return term

    def fn(node: Term, depth: int):
        if isinstance(node, VarRef):
            if node.index >= cutoff + depth:
                return VarRef(node.index + amount)
            return node
        return None

    return map_term(term, fn)


def substitute(term: Term, index: int, value: TupleTerm) -> Term:
    """
    Replace free `VarRef(index)` by `value`. `value` lives at the level of `term`.
    """

    def fn(node: Term, depth: int):
        if isinstance(node, VarRef):
            if node.index == index + depth:
                return shift(value, depth)
            return node
        return None

    return map_term(term, fn)


def instantiate(body: Term, value: TupleTerm) -> Term:
    """
    Body of a binder with its bound variable replaced by `value`.

    `value` lives outside the binder; the result does too.
    """
    return shift(substitute(body, 0, shift(value, 1)), -1)


def apply_lam(term: UTerm, *args: TupleTerm) -> UTerm:
    """
    Beta-reduce nested `Lam`s with the given arguments, outermost first.
    """
    for arg in args:
        if not isinstance(term, Lam):
            raise ValueError(f"cannot apply a non-lambda term: {term}")
        term = instantiate(term.body, arg)
    return term


def free_indices(term: Term) -> set[int]:
    """
    Indices of free `VarRef`s, relative to the top of `term`.
    """
    found = set()

    def fn(node: Term, depth: int):
        if isinstance(node, VarRef):
            if node.index >= depth:
                found.add(node.index - depth)
            return node
        return None

    map_term(term, fn)
    return found
