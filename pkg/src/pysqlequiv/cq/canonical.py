"""
Canonical Databases

The canonical database of a CQ freezes every variable class into a distinct
constant and stores one tuple per atom. `b` is contained in `a` iff
evaluating `a` on the canonical database of `b` yields the frozen head of
`b`.
"""

from __future__ import annotations
from ..core import ast
from ..core.schema import EmptySchema, Leaf, Node, Schema, SchemaMeta, abstract, substitute_schema
from ..interp.bag import Bag
from ..interp.evaluator import Evaluator
from ..interp.instance import Instance
from ..interp.values import Value
from .cq import CQ, CQApply, CQVar


class FrozenTable(dict):
    """
    Table of a projection meta-variable on a canonical database. Arguments
    without an entry get a fresh constant on first use.
    """

    def __init__(self, name: str, target: Schema, entries=None) -> None:
        super().__init__(entries or {})
        self.name = name
        self.target = target

    def __missing__(self, key):
        value = _fresh(self.target, f"{self.name}_m{len(self)}")
        self[key] = value
        return value


def _base(schema: Schema):
    if isinstance(schema, Leaf):
        return schema.base
    if isinstance(schema, SchemaMeta):
        return abstract(schema.name)
    raise ValueError(f"no constant of schema {schema}")


def _fresh(schema: Schema, label: str):
    if isinstance(schema, EmptySchema):
        return ()
    if isinstance(schema, Node):
        return (_fresh(schema.left, label + "l"), _fresh(schema.right, label + "r"))
    return Value(_base(schema), label)


def schema_bindings(q: CQ) -> dict[str, Schema]:
    """
    Every schema meta-variable of the CQ bound to a leaf of its own abstract type.
    """
    names = set()
    for var in q.variables:
        names |= var.schema.metas()
    for item in q.query.walk() if q.query is not None else ():
        if isinstance(item, ast.ProjMeta) and item.source is not None:
            names |= item.source.metas() | item.target.metas()
    return {name: Leaf(abstract(name)) for name in sorted(names)}


class _Freezer:
    def __init__(self, q: CQ, bindings: dict) -> None:
        self.q = q
        self.bindings = bindings
        self.applies: dict = {}

    def var(self, var: CQVar):
        return _fresh(substitute_schema(var.schema, self.bindings), f"c{var.index}")

    def term(self, term):
        if isinstance(term, tuple):
            return tuple(self.term(part) for part in term)
        canon = self.q.congruence.canon(term)
        if isinstance(canon, CQVar):
            return self.var(canon)
        if isinstance(canon, CQApply):
            key = (canon.meta.name, self.term(canon.arg))
            if key not in self.applies:
                target = substitute_schema(canon.meta.target, self.bindings)
                self.applies[key] = _fresh(target, f"{canon.meta.name}_a{len(self.applies)}")
            return self.applies[key]
        raise ValueError(f"cannot freeze {term!r}")


def _proj_metas(queries) -> dict[str, ast.ProjMeta]:
    metas = {}
    for query in queries:
        if query is None:
            continue
        for item in query.walk():
            if isinstance(item, ast.ProjMeta):
                metas[item.name] = item
    return metas


def canonical_database(q: CQ, others=()) -> Instance:
    """
    Frozen-variable instance of a CQ.

    Parameters
    ----------
    q : CQ
        Safe conjunctive query.

    others : Iterable[CQ], optional
        CQs that will be evaluated on the instance; their projection
        meta-variables get tables too.

    Returns
    -------
    pysqlequiv.interp.Instance
        One tuple per atom, schema meta-variables bound to fresh abstract
        leaves, and projection meta-variables interpreted consistently with
        the equalities of `q`.
    """
    bindings = schema_bindings(q)
    for other in others:
        bindings.update({k: v for k, v in schema_bindings(other).items() if k not in bindings})
    freezer = _Freezer(q, bindings)
    counts: dict = {}
    for atom in q.atoms:
        bag = counts.setdefault(atom.table, {})
        t = freezer.term(atom.arg)
        bag[t] = 1 if q.distinct else bag.get(t, 0) + 1
    # applications in the head and the equalities get their frozen value first
    freezer.term(q.head)
    for left, right in q.equalities:
        freezer.term(left)
        freezer.term(right)
    metas = _proj_metas([q.query] + [o.query for o in others])
    projs = {}
    for name, meta in sorted(metas.items()):
        entries = {}
        for (meta_name, arg), value in freezer.applies.items():
            if meta_name == name:
                entries[arg] = value
        for known in q.congruence.applies:
            if known.meta.name == name:
                entries[freezer.term(known.arg)] = freezer.term(known)
        projs[name] = FrozenTable(name, substitute_schema(meta.target, bindings), entries)
    for other in others:
        for atom in other.atoms:
            counts.setdefault(atom.table, {})
    return Instance(
        relations={name: Bag(bag) for name, bag in counts.items()},
        schemas=bindings,
        projs=projs,
    )


def frozen_head(q: CQ, inst: Instance | None = None):
    """
    The head of `q` with variables frozen as in its canonical database.
    """
    bindings = inst.schemas if inst is not None else schema_bindings(q)
    freezer = _Freezer(q, bindings)
    if inst is not None:
        for name, table in inst.projs.items():
            if isinstance(table, dict):
                for arg, value in table.items():
                    freezer.applies.setdefault((name, arg), value)
    return freezer.term(q.head)


def contained_in(b: CQ, a: CQ) -> bool:
    """
    Canonical database check of `b ⊆ a` under set semantics.
    """
    inst = canonical_database(b, [a])
    head = frozen_head(b, inst)
    return Evaluator(inst).query(a.query, ()).multiplicity(head) > 0
