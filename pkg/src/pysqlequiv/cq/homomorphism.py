"""
Homomorphisms between Conjunctive Queries

A homomorphism from `a` to `b` maps the variables of `a` to variables of
`b` so that every atom of `a` lands on an atom of `b` with the same table,
every equality of `a` is entailed by `b`, and the head of `a` becomes the
head of `b`. It exists iff `b` is contained in `a` under set semantics.
"""

from __future__ import annotations
from dataclasses import dataclass
from ..error_handling import ArgumentTypeError
from .cq import CQ, CQVar, format_term, map_vars, term_vars


@dataclass(frozen=True)
class Homomorphism:
    """
    Attributes
    ----------
    mapping : dict[CQVar, CQVar]
        Variable of the source CQ to variable of the target CQ.

    atom_map : dict[int, int]
        Index of each source atom to the index of the target atom it lands on.
    """

    mapping: dict
    atom_map: dict

    __hash__ = None

    def __str__(self) -> str:
        pairs = ", ".join(f"{k} -> {v}" for k, v in sorted(self.mapping.items()))
        return "{" + pairs + "}"

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "Homomorphism",
            "mapping": {str(k): str(v) for k, v in sorted(self.mapping.items())},
            "atom_map": dict(sorted(self.atom_map.items())),
        }


def _unify(source, target, mapping: dict, injective: bool) -> dict | None:
    """
    Extend `mapping` so that `source` maps onto `target`, or return None.
    """
    if isinstance(source, CQVar):
        if not isinstance(target, CQVar) or source.schema != target.schema:
            return None
        if source in mapping:
            return mapping if mapping[source] == target else None
        if injective and target in mapping.values():
            return None
        extended = dict(mapping)
        extended[source] = target
        return extended
    if isinstance(source, tuple):
        if not isinstance(target, tuple) or len(source) != len(target):
            return None
        for s, t in zip(source, target):
            mapping = _unify(s, t, mapping, injective)
            if mapping is None:
                return None
        return mapping
    return None


def _head_ok(a: CQ, b: CQ, mapping: dict) -> bool:
    return b.congruence.equal(map_vars(a.head, mapping), b.head)


def _equalities_ok(a: CQ, b: CQ, mapping: dict) -> bool:
    return all(
        b.congruence.equal(map_vars(left, mapping), map_vars(right, mapping))
        for left, right in a.equalities
    )


def _order(a: CQ) -> list[int]:
    """
    Atoms by descending arity and table name, then most constrained first.
    """
    pending = sorted(range(len(a.atoms)), key=lambda i: (-a.atoms[i].arity(), a.atoms[i].table))
    order = []
    bound: set = set()
    while pending:
        best = max(pending, key=lambda i: sum(1 for v in set(_vars(a, i)) if v in bound))
        pending.remove(best)
        order.append(best)
        bound |= set(_vars(a, best))
    return order


def _vars(a: CQ, i: int) -> list:
    return term_vars(a.atoms[i].arg)


def _search(a: CQ, b: CQ, injective: bool, accept=None) -> Homomorphism | None:
    order = _order(a)

    def extend(position: int, mapping: dict, atom_map: dict, used: set):
        if position == len(order):
            if _head_ok(a, b, mapping) and _equalities_ok(a, b, mapping):
                if accept is None or accept(mapping):
                    return Homomorphism(mapping, atom_map)
            return None
        i = order[position]
        atom = a.atoms[i]
        for j, candidate in enumerate(b.atoms):
            if candidate.table != atom.table or (injective and j in used):
                continue
            extended = _unify(atom.arg, candidate.arg, mapping, injective)
            if extended is None:
                continue
            found = extend(position + 1, extended, {**atom_map, i: j}, used | {j})
            if found is not None:
                return found
        return None

    return extend(0, {}, {}, frozenset())


def find_homomorphism(source: CQ, target: CQ) -> Homomorphism | None:
    """
    First homomorphism from `source` to `target` in search order.

    The search is exhaustive: `None` means no homomorphism exists.

    Parameters
    ----------
    source, target : CQ
        Safe conjunctive queries.

    Returns
    -------
    Homomorphism|None
    """
    for arg_name, arg in (("source", source), ("target", target)):
        if not isinstance(arg, CQ):
            raise ArgumentTypeError(arg_name, arg, CQ)
    return _search(source, target, injective=False)


def find_isomorphism(a: CQ, b: CQ) -> Homomorphism | None:
    """
    Bijective homomorphism from `a` to `b` whose inverse is a homomorphism too.
    """
    if len(a.atoms) != len(b.atoms) or len(a.body_vars()) != len(b.body_vars()):
        return None

    def inverse_ok(mapping: dict) -> bool:
        inverse = {v: k for k, v in mapping.items()}
        return _head_ok(b, a, inverse) and _equalities_ok(b, a, inverse)

    return _search(a, b, injective=True, accept=inverse_ok)


def decide_set_equiv(a: CQ, b: CQ) -> bool:
    """
    Set-semantics equivalence: homomorphisms exist in both directions.
    """
    return find_homomorphism(a, b) is not None and find_homomorphism(b, a) is not None


def decide_bag_equiv(a: CQ, b: CQ) -> bool:
    """
    Bag-semantics equivalence: the two CQs are isomorphic.
    """
    for arg_name, arg in (("a", a), ("b", b)):
        if not isinstance(arg, CQ):
            raise ArgumentTypeError(arg_name, arg, CQ)
    return find_isomorphism(a, b) is not None


def describe(h: Homomorphism, source: CQ, target: CQ) -> str:
    """
    One line per source atom: `R1(x0) -> R1(x3)`.
    """
    return "\n".join(
        f"{source.atoms[i]} -> {target.atoms[j]}" for i, j in sorted(h.atom_map.items())
    ) or format_term(target.head)
