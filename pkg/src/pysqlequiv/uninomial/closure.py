"""
Congruence Closure over Equality Factors

Equalities of a monomial partition its tuple terms into classes. Each class
is represented by its smallest member; every other occurrence of a member
is replaced by the representative, except the equality recording it.
"""

from __future__ import annotations
from collections import Counter
from dataclasses import fields, replace
from typing import Callable
from ..denote import terms as tm
from .normal_form import rename

MAX_ROUNDS = 32


class UnionFind:
    """
    Disjoint sets of hashable items.
    """

    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, item):
        self.parent.setdefault(item, item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b) -> None:
        root_a, root_b = self.find(a), self.find(b)
        if root_a != root_b:
            self.parent[root_a] = root_b

    def classes(self) -> list[list]:
        groups: dict = {}
        for item in self.parent:
            groups.setdefault(self.find(item), []).append(item)
        return list(groups.values())


def representatives(eqs, order: Callable) -> dict:
    """
    Map every non-representative member of an equality class to its representative.
    """
    uf = UnionFind()
    for eq in eqs:
        uf.union(eq.left, eq.right)
    mapping = {}
    for members in uf.classes():
        rep = min(members, key=order)
        for member in members:
            if member != rep:
                mapping[member] = rep
    return mapping


def _rewrite_children(t: tm.TupleTerm, mapping: dict) -> tm.TupleTerm:
    changes = {}
    for field in fields(t):
        value = getattr(t, field.name)
        if isinstance(value, tm.Term):
            new = rename(value, mapping)
        elif isinstance(value, tuple) and any(isinstance(v, tm.Term) for v in value):
            new = tuple(rename(v, mapping) if isinstance(v, tm.Term) else v for v in value)
        else:
            continue
        if new != value:
            changes[field.name] = new
    return replace(t, **changes) if changes else t


def congruence_rewrite(factors: tuple, order: Callable) -> tuple:
    """
    Substitute class representatives into a monomial's factors until stable.

    Parameters
    ----------
    factors : tuple
        Factors of one monomial.

    order : Callable
        Sort key choosing the representative of a class.

    Returns
    -------
    tuple
        Non-equality factors with representatives substituted, followed by
        one equality `member = representative` per non-representative member.
    """
    for _ in range(MAX_ROUNDS):
        eqs = [f for f in factors if isinstance(f, tm.EqAtom) and f.left != f.right]
        mapping = representatives(eqs, order)
        if not mapping:
            return tuple(f for f in factors if not (isinstance(f, tm.EqAtom) and f.left == f.right))
        rewritten = [rename(f, mapping) for f in factors if not isinstance(f, tm.EqAtom)]
        recorded = []
        for member, rep in sorted(mapping.items(), key=lambda item: order(item[0])):
            member = _rewrite_children(member, mapping)
            if member != rep:
                recorded.append(tm.EqAtom(member, rep))
        new = tuple(rewritten + recorded)
        if Counter(new) == Counter(factors):
            return new
        factors = new
    return factors
