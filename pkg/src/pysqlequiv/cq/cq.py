"""
Conjunctive Queries

A conjunctive query is `[DISTINCT] SELECT p FROM R1, ..., Rn WHERE e1 AND ...`
where every `ei` equates two projections of the FROM tuple. Each relation
atom gets one variable per schema leaf; equalities are closed under
congruence of projection meta-variables, and every variable is replaced by
the representative of its class.
"""

from __future__ import annotations
from dataclasses import dataclass, field
from ..error_handling import ArgumentTypeError
from ..core import ast
from ..core.schema import EMPTY, EmptySchema, Node, Schema
from ..core.typecheck import Catalog, query_typecheck
from ..uninomial.closure import UnionFind


@dataclass(frozen=True, order=True)
class CQVar:
    """
    Variable standing for one leaf (or one schema meta-variable) of an atom.
    """

    index: int
    schema: Schema = field(compare=False)

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class CQApply:
    """
    Projection meta-variable applied to a term.
    """

    meta: ast.ProjMeta
    arg: object

    def __str__(self) -> str:
        return f"{self.meta.name}({format_term(self.arg)})"


@dataclass(frozen=True)
class Atom:
    """
    Relation atom: the FROM tuple part read from `table`.
    """

    table: str
    arg: object

    def arity(self) -> int:
        return len(term_vars(self.arg))

    def __str__(self) -> str:
        return f"{self.table}{format_term(self.arg)}"


def format_term(term) -> str:
    """
    `x3`, `(x0, x1)`, `()`, `c(x2)`.
    """
    if isinstance(term, tuple):
        if not term:
            return "()"
        return f"({format_term(term[0])}, {format_term(term[1])})"
    return str(term)


def term_vars(term) -> list[CQVar]:
    """
    Variables of a term, left to right, with repetitions.
    """
    if isinstance(term, CQVar):
        return [term]
    if isinstance(term, CQApply):
        return term_vars(term.arg)
    if isinstance(term, tuple):
        return [v for part in term for v in term_vars(part)]
    return []


def map_vars(term, mapping):
    """
    Apply a variable mapping (a dict or a function) to a term.
    """
    if isinstance(term, CQVar):
        return mapping(term) if callable(mapping) else mapping.get(term, term)
    if isinstance(term, CQApply):
        return CQApply(term.meta, map_vars(term.arg, mapping))
    if isinstance(term, tuple):
        return tuple(map_vars(part, mapping) for part in term)
    return term


def _subterms(term):
    yield term
    if isinstance(term, CQApply):
        yield from _subterms(term.arg)
    elif isinstance(term, tuple):
        for part in term:
            yield from _subterms(part)


class Congruence:
    """
    Congruence closure of equalities between CQ terms.

    Methods
    -------
    canon(term)
        Canonical form: variables and applications replaced by class
        representatives, pairs kept as pairs.

    equal(a, b)
        Whether the equalities entail `a = b`.
    """

    def __init__(self, equalities=()) -> None:
        self.uf = UnionFind()
        self.applies: list[CQApply] = []
        pending = list(equalities)
        while pending:
            a, b = pending.pop()
            if isinstance(a, tuple) and isinstance(b, tuple):
                pending.extend(zip(a, b))
                continue
            for term in (a, b):
                self._register(term)
            self.uf.union(a, b)
        self._close()

    def _register(self, term) -> None:
        for sub in _subterms(term):
            if isinstance(sub, CQApply) and sub not in self.applies:
                self.applies.append(sub)
            if not isinstance(sub, tuple):
                self.uf.find(sub)

    def _close(self) -> None:
        changed = True
        while changed:
            changed = False
            signatures = {}
            for term in self.applies:
                key = (term.meta, self.canon(term.arg))
                if key in signatures and self.uf.find(signatures[key]) != self.uf.find(term):
                    self.uf.union(signatures[key], term)
                    changed = True
                signatures.setdefault(key, term)

    def _rep(self, term):
        members = [m for m in self.uf.parent if self.uf.find(m) == self.uf.find(term)]
        variables = [m for m in members if isinstance(m, CQVar)]
        if variables:
            return min(variables)
        return min(members, key=format_term)

    def canon(self, term):
        if isinstance(term, tuple):
            return tuple(self.canon(part) for part in term)
        if isinstance(term, CQApply):
            arg = self.canon(term.arg)
            for known in self.applies:
                if known.meta == term.meta and self.canon(known.arg) == arg:
                    return self._rep(known)
            return CQApply(term.meta, arg)
        if term in self.uf.parent:
            return self._rep(term)
        return term

    def equal(self, a, b) -> bool:
        return self.canon(a) == self.canon(b)

    def classes(self) -> list[list]:
        return self.uf.classes()


@dataclass(frozen=True)
class CQ:
    """
    Conjunctive query with collapsed equalities.

    Attributes
    ----------
    head : object
        Output term: a tree of variables, pairs and projection applications
        mirroring the output schema.

    atoms : tuple[Atom]
        Relation atoms in FROM order; variables are class representatives.

    equalities : tuple[tuple]
        Equalities that remain after collapsing variables, between
        projection applications.

    distinct : bool
        Set semantics iff true.

    variables : tuple[CQVar]
        Every variable, before collapsing.

    query : pysqlequiv.core.ast.Query
        The query the CQ was read from.
    """

    head: object
    atoms: tuple
    equalities: tuple = ()
    distinct: bool = True
    variables: tuple = ()
    query: ast.Query | None = None

    __hash__ = None

    @property
    def congruence(self) -> Congruence:
        cached = self.__dict__.get("_congruence")
        if cached is None:
            cached = Congruence(self.equalities)
            object.__setattr__(self, "_congruence", cached)
        return cached

    def body_vars(self) -> list[CQVar]:
        """
        Distinct variables of the atoms, in order of first occurrence.
        """
        seen = []
        for atom in self.atoms:
            for var in term_vars(atom.arg):
                if var not in seen:
                    seen.append(var)
        return seen

    def is_safe(self) -> bool:
        """
        Whether every head variable occurs in an atom.
        """
        body = set(self.body_vars())
        return all(v in body for v in term_vars(self.congruence.canon(self.head)))

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.atoms)
        eqs = "".join(f", {format_term(a)} = {format_term(b)}" for a, b in self.equalities)
        prefix = "DISTINCT " if self.distinct else ""
        return f"{prefix}{format_term(self.head)} :- {body}{eqs}"


# ==============================
# Reading a query
# ==============================


class _Unsupported(Exception):
    pass


class _Reader:
    def __init__(self, catalog: Catalog | None) -> None:
        self.catalog = catalog
        self.variables: list[CQVar] = []
        self.atoms: list[Atom] = []

    def fresh_tree(self, schema: Schema):
        if isinstance(schema, EmptySchema):
            return ()
        if isinstance(schema, Node):
            return (self.fresh_tree(schema.left), self.fresh_tree(schema.right))
        var = CQVar(len(self.variables), schema)
        self.variables.append(var)
        return var

    def from_tree(self, q: ast.Query):
        if isinstance(q, ast.Product):
            return (self.from_tree(q.left), self.from_tree(q.right))
        if isinstance(q, (ast.Table, ast.TableMeta)):
            tree = self.fresh_tree(query_typecheck(q, EMPTY, self.catalog))
            self.atoms.append(Atom(q.name, tree))
            return tree
        raise _Unsupported()

    def proj(self, p: ast.Proj, tree):
        if isinstance(p, ast.Star):
            return tree
        if isinstance(p, (ast.Left, ast.Right)):
            if not isinstance(tree, tuple) or len(tree) != 2:
                raise _Unsupported()
            return tree[0] if isinstance(p, ast.Left) else tree[1]
        if isinstance(p, ast.EmptyProj):
            return ()
        if isinstance(p, ast.Compose):
            return self.proj(p.second, self.proj(p.first, tree))
        if isinstance(p, ast.Pair):
            return (self.proj(p.left, tree), self.proj(p.right, tree))
        if isinstance(p, ast.ProjMeta):
            return CQApply(p, tree)
        if isinstance(p, ast.Eval) and isinstance(p.expr, ast.Var):
            return self.proj(p.expr.proj, tree)
        raise _Unsupported()

    def equalities(self, b: ast.Pred, context) -> list[tuple]:
        if isinstance(b, ast.TruePred):
            return []
        if isinstance(b, ast.And):
            return self.equalities(b.left, context) + self.equalities(b.right, context)
        if isinstance(b, ast.Eq) and isinstance(b.left, ast.Var) and isinstance(b.right, ast.Var):
            left = self.proj(b.left.proj, context)
            right = self.proj(b.right.proj, context)
            if isinstance(left, tuple) != isinstance(right, tuple):
                raise _Unsupported()
            return [(left, right)]
        raise _Unsupported()


def to_cq(q: ast.Query, catalog: Catalog | None = None, ctx: Schema = EMPTY) -> CQ | None:
    """
    Read a query as a conjunctive query.

    Parameters
    ----------
    q : pysqlequiv.core.ast.Query
        `[DISTINCT] [SELECT p FROM] R1, ..., Rn [WHERE conjunction of equalities]`.

    catalog : Mapping[str, Schema], optional
        Schemas of concrete tables.

    ctx : pysqlequiv.core.Schema, optional
        Context schema; only the empty context is supported.

    Returns
    -------
    CQ|None
        `None` when the query is outside the fragment.
    """
    if not isinstance(q, ast.Query):
        raise ArgumentTypeError("q", q, ast.Query)
    if not isinstance(ctx, EmptySchema):
        return None
    distinct = isinstance(q, ast.Distinct)
    body = q.query if distinct else q
    proj = ast.Star()
    if isinstance(body, ast.Select):
        proj, body = body.proj, body.query
    pred = ast.TruePred()
    if isinstance(body, ast.Where):
        body, pred = body.query, body.pred
    reader = _Reader(catalog)
    try:
        tree = reader.from_tree(body)
        eqs = reader.equalities(pred, ((), tree))
        head = reader.proj(proj, tree)
    except _Unsupported:
        return None

    congruence = Congruence(eqs)

    def collapse(var):
        rep = congruence.canon(var)
        return rep if isinstance(rep, CQVar) else var

    atoms = tuple(Atom(a.table, map_vars(a.arg, collapse)) for a in reader.atoms)
    remaining = []
    for members in congruence.classes():
        applies = [m for m in members if isinstance(m, CQApply)]
        anchor = [m for m in members if isinstance(m, CQVar)]
        first = collapse(anchor[0]) if anchor else None
        for term in applies:
            term = map_vars(term, collapse)
            if first is None:
                first = term
            elif term != first:
                remaining.append((term, first))
    remaining = [(a, b) for a, b in dict.fromkeys(remaining)]
    return CQ(
        head=map_vars(head, collapse),
        atoms=atoms,
        equalities=tuple(remaining),
        distinct=distinct,
        variables=tuple(reader.variables),
        query=q,
    )
