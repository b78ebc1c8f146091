"""
Normal Forms

A normal form is a sum of monomials. A monomial is

    coeff × Σ binders. f1 × ... × fn

where every factor is a relation atom, an equality, a predicate atom, a
squash of a normal form or a negation of a normal form. Bound and free
variables are `NamedVar`s with globally unique names.
"""

from __future__ import annotations
from dataclasses import dataclass, replace
from ..error_handling import ArgumentTypeError
from ..core.schema import EMPTY, BaseType, Leaf, Node, Schema
from ..denote import terms as tm


@dataclass(frozen=True, repr=True)
class NormAgg(tm.TupleTerm):
    """
    Aggregate over a normalized body binding `var`.
    """

    name: str
    var: tm.NamedVar
    body: NormalForm
    result: BaseType

    def __str__(self) -> str:
        return f"{self.name}(λ {self.var.name}. {self.body})"


@dataclass(frozen=True, repr=True)
class SquashFactor(tm.UTerm):
    nf: NormalForm

    def __str__(self) -> str:
        return f"‖{self.nf}‖"


@dataclass(frozen=True, repr=True)
class NegateFactor(tm.UTerm):
    nf: NormalForm

    def __str__(self) -> str:
        return f"¬({self.nf})"


ATOMS = (tm.RelAtom, tm.EqAtom, tm.PredAtom)
FACTORS = ATOMS + (SquashFactor, NegateFactor)


@dataclass(frozen=True, repr=True)
class Monomial(tm.Term):
    """
    Product of factors summed over `binders`, times `coeff`.
    """

    coeff: int
    binders: tuple = ()
    factors: tuple = ()

    def is_unit(self) -> bool:
        """
        Whether the monomial is the constant 1.
        """
        return self.coeff == 1 and not self.binders and not self.factors

    def __str__(self) -> str:
        body = " × ".join(_factor_text(f) for f in self.factors) or "1"
        if self.binders:
            body = f"Σ {' '.join(b.name for b in self.binders)}. {body}"
        return body if self.coeff == 1 else f"{self.coeff} × ({body})"


@dataclass(frozen=True, repr=True)
class NormalForm(tm.Term):
    """
    Sum of monomials.

    Attributes
    ----------
    monomials : tuple[Monomial]
        Summands; empty for 0.

    free : tuple[NamedVar]
        Variables bound by the lambdas the term was opened under, outermost
        first.

    complete : bool
        `False` when normalization ran out of fuel; `residual` then holds the
        original term body.

    residual : UTerm|None
        Unnormalized body of an incomplete normal form.
    """

    monomials: tuple = ()
    free: tuple = ()
    complete: bool = True
    residual: tm.UTerm | None = None

    def __str__(self) -> str:
        if not self.complete:
            return f"<incomplete: {self.residual}>"
        return " + ".join(str(m) for m in self.monomials) or "0"

    def __sqlequiv_json__(self) -> str:
        return str(self)


def _factor_text(f) -> str:
    if isinstance(f, tm.RelAtom):
        return f"{f.table} {f.arg}"
    if isinstance(f, tm.EqAtom):
        return f"({f.left} = {f.right})"
    if isinstance(f, tm.PredAtom):
        return f"{f.meta.name} {f.arg}"
    return str(f)


# ==============================
# Named variables
# ==============================


def named_vars(obj: tm.Term) -> set:
    """
    Every `NamedVar` occurring in `obj`, bound or free.
    """
    return {node for node in obj.walk() if isinstance(node, tm.NamedVar)}


def rename(obj: tm.Term, mapping: dict) -> tm.Term:
    """
    Replace tuple sub-terms by `mapping`, outermost first.

    Binder lists are left alone.
    """
    if not mapping:
        return obj

    def fn(node, _depth):
        if isinstance(node, NormalForm):
            return replace(node, monomials=tuple(tm.map_term(m, fn) for m in node.monomials))
        if isinstance(node, Monomial):
            return Monomial(
                node.coeff, node.binders, tuple(tm.map_term(f, fn) for f in node.factors)
            )
        if isinstance(node, NormAgg):
            return NormAgg(node.name, node.var, tm.map_term(node.body, fn), node.result)
        if isinstance(node, tm.TupleTerm) and node in mapping:
            return mapping[node]
        return None

    return tm.map_term(obj, fn)


# ==============================
# Embedding back into terms
# ==============================


def _index(var: tm.NamedVar, env: list) -> tm.VarRef:
    for position in range(len(env) - 1, -1, -1):
        if env[position] == var:
            return tm.VarRef(len(env) - 1 - position)
    raise ValueError(f"variable {var.name} is not in scope")


def _embed_tuple(t: tm.TupleTerm, env: list) -> tm.TupleTerm:
    if isinstance(t, tm.NamedVar):
        return _index(t, env)
    if isinstance(t, NormAgg):
        body = embed_body(t.body, env + [t.var])
        return tm.AggApply(t.name, tm.Lam(t.var.schema, body), t.result)
    if isinstance(t, (tm.Fst, tm.Snd)):
        return type(t)(_embed_tuple(t.arg, env))
    if isinstance(t, tm.MkPair):
        return tm.MkPair(_embed_tuple(t.left, env), _embed_tuple(t.right, env))
    if isinstance(t, (tm.ProjApply, tm.ExprApply)):
        return type(t)(t.meta, _embed_tuple(t.arg, env))
    if isinstance(t, tm.FnApply):
        return tm.FnApply(t.name, tuple(_embed_tuple(a, env) for a in t.args), t.result)
    if isinstance(t, (tm.Unit, tm.Const)):
        return t
    raise ArgumentTypeError("t", t, tm.TupleTerm)


def _embed_factor(f: tm.UTerm, env: list) -> tm.UTerm:
    if isinstance(f, tm.RelAtom):
        return tm.RelAtom(f.table, _embed_tuple(f.arg, env), f.schema)
    if isinstance(f, tm.EqAtom):
        return tm.EqAtom(_embed_tuple(f.left, env), _embed_tuple(f.right, env))
    if isinstance(f, tm.PredAtom):
        return tm.PredAtom(f.meta, _embed_tuple(f.arg, env))
    if isinstance(f, SquashFactor):
        return tm.Squash(embed_body(f.nf, env))
    if isinstance(f, NegateFactor):
        return tm.Negate(embed_body(f.nf, env))
    raise ArgumentTypeError("f", f, FACTORS)


def _embed_monomial(m: Monomial, env: list) -> tm.UTerm:
    inner_env = env + list(m.binders)
    body = tm.times(*(_embed_factor(f, inner_env) for f in m.factors))
    for binder in reversed(m.binders):
        body = tm.Sigma(binder.schema, body)
    return tm.plus(*([body] * m.coeff))


def embed_body(nf: NormalForm, env: list) -> tm.UTerm:
    """
    De Bruijn term of a normal form whose free variables are `env`.
    """
    if not nf.complete:
        return nf.residual
    return tm.plus(*(_embed_monomial(m, env) for m in nf.monomials))


def embed(nf: NormalForm) -> tm.UTerm:
    """
    Closed term equal to `nf`: its body under one `Lam` per free variable.

    Parameters
    ----------
    nf : NormalForm

    Returns
    -------
    pysqlequiv.denote.UTerm
    """
    if not isinstance(nf, NormalForm):
        raise ArgumentTypeError("nf", nf, NormalForm)
    term = embed_body(nf, list(nf.free))
    for var in reversed(nf.free):
        term = tm.Lam(var.schema, term)
    return term


def schema_of(t: tm.TupleTerm) -> Schema:
    """
    Schema of a named tuple term.
    """
    if isinstance(t, (tm.NamedVar, tm.Const)):
        return t.schema
    if isinstance(t, (NormAgg, tm.FnApply)):
        return Leaf(t.result)
    if isinstance(t, tm.ExprApply):
        return Leaf(t.meta.base)
    if isinstance(t, tm.ProjApply):
        return t.meta.target
    if isinstance(t, tm.Unit):
        return EMPTY
    if isinstance(t, tm.MkPair):
        return Node(schema_of(t.left), schema_of(t.right))
    if isinstance(t, (tm.Fst, tm.Snd)):
        inner = schema_of(t.arg)
        if not isinstance(inner, Node):
            raise ValueError(f"pair projection of {t.arg} with schema {inner}")
        return inner.left if isinstance(t, tm.Fst) else inner.right
    raise ArgumentTypeError("t", t, tm.TupleTerm)
