"""
Denotation of Queries as UniNomial Terms

A query `q` under context schema `ctx` denotes

    Lam(ctx, Lam(schema(q), body))

where `VarRef(1)` is the context tuple `g` and `VarRef(0)` the output tuple
`t`, and `body` is the multiplicity of `t` in `q` evaluated under `g`.
"""

from __future__ import annotations
from typing import Callable
from ..error_handling import ArgumentTypeError
from ..core import ast
from ..core.schema import Leaf, Node, Schema
from ..core.typecheck import Catalog, expr_typecheck, proj_typecheck, query_typecheck
from .terms import (
    AggApply,
    EqAtom,
    ExprApply,
    FnApply,
    Fst,
    Lam,
    MkPair,
    Negate,
    One,
    Plus,
    PredAtom,
    ProjApply,
    RelAtom,
    Sigma,
    Snd,
    Squash,
    Times,
    TupleTerm,
    UTerm,
    Unit,
    VarRef,
    Zero,
    shift,
)


class Denoter:
    """
    Translate AST nodes to terms under a fixed catalog of concrete tables.

    Attributes
    ----------
    catalog : Mapping[str, Schema]|None
        Schemas of concrete tables.

    Methods
    -------
    query_body(q, ctx, g, t)
        Multiplicity term of tuple `t` in `q` under context tuple `g`.

    pred_body(b, ctx, g)
        0/1 term of predicate `b` on context tuple `g`.

    expr_term(e, ctx, g)
        Scalar term of expression `e` on context tuple `g`.

    proj_term(p, source, x)
        Tuple term of projection `p` applied to `x`.
    """

    def __init__(self, catalog: Catalog | None = None) -> None:
        self.catalog = catalog

    # ==============================
    # Queries
    # ==============================

    def query_body(self, q: ast.Query, ctx: Schema, g: TupleTerm, t: TupleTerm) -> UTerm:
        if isinstance(q, (ast.Table, ast.TableMeta)):
            return RelAtom(q.name, t, query_typecheck(q, ctx, self.catalog))
        if isinstance(q, ast.Select):
            source = query_typecheck(q.query, ctx, self.catalog)
            row = VarRef(0)
            return Sigma(
                source,
                Times(
                    EqAtom(shift(t, 1), self.proj_term(q.proj, source, row)),
                    self.query_body(q.query, ctx, shift(g, 1), row),
                ),
            )
        if isinstance(q, ast.Product):
            return Times(
                self.query_body(q.left, ctx, g, Fst(t)),
                self.query_body(q.right, ctx, g, Snd(t)),
            )
        if isinstance(q, ast.Where):
            schema = query_typecheck(q.query, ctx, self.catalog)
            return Times(
                self.query_body(q.query, ctx, g, t),
                self.pred_body(q.pred, Node(ctx, schema), MkPair(g, t)),
            )
        if isinstance(q, ast.UnionAll):
            return Plus(self.query_body(q.left, ctx, g, t), self.query_body(q.right, ctx, g, t))
        if isinstance(q, ast.Except):
            return Times(
                self.query_body(q.left, ctx, g, t),
                Negate(Squash(self.query_body(q.right, ctx, g, t))),
            )
        if isinstance(q, ast.Distinct):
            return Squash(self.query_body(q.query, ctx, g, t))
        # GroupBy and unknown nodes
        query_typecheck(q, ctx, self.catalog)
        raise ArgumentTypeError("q", q, ast.Query)

    # ==============================
    # Predicates
    # ==============================

    def pred_body(self, b: ast.Pred, ctx: Schema, g: TupleTerm) -> UTerm:
        if isinstance(b, ast.Eq):
            return EqAtom(self.expr_term(b.left, ctx, g), self.expr_term(b.right, ctx, g))
        if isinstance(b, ast.And):
            return Times(self.pred_body(b.left, ctx, g), self.pred_body(b.right, ctx, g))
        if isinstance(b, ast.Or):
            return Squash(Plus(self.pred_body(b.left, ctx, g), self.pred_body(b.right, ctx, g)))
        if isinstance(b, ast.Not):
            return Negate(self.pred_body(b.pred, ctx, g))
        if isinstance(b, ast.TruePred):
            return One()
        if isinstance(b, ast.FalsePred):
            return Zero()
        if isinstance(b, ast.Exists):
            schema = query_typecheck(b.query, ctx, self.catalog)
            return Squash(Sigma(schema, self.query_body(b.query, ctx, shift(g, 1), VarRef(0))))
        if isinstance(b, ast.CastPred):
            target = proj_typecheck(b.proj, ctx, self.catalog)
            return self.pred_body(b.pred, target, self.proj_term(b.proj, ctx, g))
        if isinstance(b, ast.PredMeta):
            return PredAtom(b, g)
        raise ArgumentTypeError("b", b, ast.Pred)

    # ==============================
    # Expressions and projections
    # ==============================

    def expr_term(self, e: ast.Expr, ctx: Schema, g: TupleTerm) -> TupleTerm:
        if isinstance(e, ast.Var):
            return self.proj_term(e.proj, ctx, g)
        if isinstance(e, ast.Apply):
            return FnApply(
                e.name,
                tuple(self.expr_term(arg, ctx, g) for arg in e.args),
                expr_typecheck(e, ctx, self.catalog),
            )
        if isinstance(e, ast.Agg):
            schema = query_typecheck(e.query, ctx, self.catalog)
            body = self.query_body(e.query, ctx, shift(g, 1), VarRef(0))
            return AggApply(e.name, Lam(schema, body), expr_typecheck(e, ctx, self.catalog))
        if isinstance(e, ast.CastExpr):
            target = proj_typecheck(e.proj, ctx, self.catalog)
            return self.expr_term(e.expr, target, self.proj_term(e.proj, ctx, g))
        if isinstance(e, ast.ExprMeta):
            return ExprApply(e, g)
        raise ArgumentTypeError("e", e, ast.Expr)

    def proj_term(self, p: ast.Proj, source: Schema | None, x: TupleTerm) -> TupleTerm:
        if isinstance(p, ast.Star):
            return x
        if isinstance(p, ast.Left):
            return Fst(x)
        if isinstance(p, ast.Right):
            return Snd(x)
        if isinstance(p, ast.EmptyProj):
            return Unit()
        if isinstance(p, ast.Compose):
            middle = None if source is None else proj_typecheck(p.first, source, self.catalog)
            return self.proj_term(p.second, middle, self.proj_term(p.first, source, x))
        if isinstance(p, ast.Pair):
            return MkPair(self.proj_term(p.left, source, x), self.proj_term(p.right, source, x))
        if isinstance(p, ast.Eval):
            if source is None:
                raise ValueError("EVAL projections need the source schema")
            return self.expr_term(p.expr, source, x)
        if isinstance(p, ast.ProjMeta):
            return ProjApply(p, x)
        raise ArgumentTypeError("p", p, ast.Proj)


def denote_query(ctx: Schema, q: ast.Query, catalog: Catalog | None = None) -> Lam:
    """
    UniNomial denotation of a query.

    Parameters
    ----------
    ctx : pysqlequiv.core.Schema
        Context schema.

    q : pysqlequiv.core.ast.Query
        Well-typed query.

    catalog : Mapping[str, Schema], optional
        Schemas of concrete tables.

    Returns
    -------
    pysqlequiv.denote.Lam
        `Lam(ctx, Lam(schema(q), body))`.

    Raises
    ------
    SchemaMismatchError, PathMismatchError
        `q` does not typecheck under `ctx`.
    """
    if not isinstance(ctx, Schema):
        raise ArgumentTypeError("ctx", ctx, Schema)
    schema = query_typecheck(q, ctx, catalog)
    body = Denoter(catalog).query_body(q, ctx, VarRef(1), VarRef(0))
    return Lam(ctx, Lam(schema, body))


def denote_pred(ctx: Schema, b: ast.Pred, catalog: Catalog | None = None) -> Lam:
    """
    Denotation of a predicate: `Lam(ctx, body)` with a 0/1-valued body.
    """
    if not isinstance(ctx, Schema):
        raise ArgumentTypeError("ctx", ctx, Schema)
    return Lam(ctx, Denoter(catalog).pred_body(b, ctx, VarRef(0)))


def denote_expr(ctx: Schema, e: ast.Expr, catalog: Catalog | None = None) -> tuple[Leaf, TupleTerm]:
    """
    Denotation of an expression: its leaf schema and a scalar term over `VarRef(0)`.
    """
    base = expr_typecheck(e, ctx, catalog)
    return Leaf(base), Denoter(catalog).expr_term(e, ctx, VarRef(0))


def denote_proj(
    p: ast.Proj, source: Schema | None = None, catalog: Catalog | None = None
) -> Callable[[TupleTerm], TupleTerm]:
    """
    Denotation of a projection as a tuple-term transformer.

    `denote_proj(Left.Right)(VarRef(0))` is `Snd(Fst(VarRef(0)))`. `source`
    is only needed for projections containing EVAL.
    """
    if not isinstance(p, ast.Proj):
        raise ArgumentTypeError("p", p, ast.Proj)
    if source is not None:
        proj_typecheck(p, source, catalog)
    denoter = Denoter(catalog)
    return lambda x: denoter.proj_term(p, source, x)
