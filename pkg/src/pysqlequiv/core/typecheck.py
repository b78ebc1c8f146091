"""
Typechecking of Projections, Queries, Predicates and Expressions

Every judgment is deterministic: the same node and schema always give the
same result or the same error.
"""

from __future__ import annotations
from typing import Mapping
from ..error_handling import (
    ArgumentTypeError,
    PathMismatchError,
    SchemaMismatchError,
    UnboundMetaError,
    UnsupportedSugarError,
)
from .schema import INT, BaseType, Leaf, Node, Schema, EMPTY
from . import ast

Catalog = Mapping[str, Schema]


def proj_typecheck(p: ast.Proj, source: Schema, catalog: Catalog | None = None) -> Schema:
    """
    Target schema of a projection applied to a tuple of schema `source`.

    Parameters
    ----------
    p : pysqlequiv.core.ast.Proj
        Projection.

    source : pysqlequiv.core.Schema
        Schema of the tuple the projection reads.

    catalog : Mapping[str, Schema], optional
        Schemas of concrete tables, used by queries nested in EVAL expressions.

    Returns
    -------
    pysqlequiv.core.Schema
        Target schema.

    Raises
    ------
    PathMismatchError
        `Left`/`Right` on a non-node schema, or a meta-variable whose declared
        source differs from `source`.
    """
    if not isinstance(p, ast.Proj):
        raise ArgumentTypeError("p", p, ast.Proj)
    if not isinstance(source, Schema):
        raise ArgumentTypeError("source", source, Schema)

    if isinstance(p, ast.Star):
        return source
    if isinstance(p, ast.EmptyProj):
        return EMPTY
    if isinstance(p, (ast.Left, ast.Right)):
        if not isinstance(source, Node):
            raise PathMismatchError(p, source, "selector applied to a non-pair schema")
        return source.left if isinstance(p, ast.Left) else source.right
    if isinstance(p, ast.Compose):
        middle = proj_typecheck(p.first, source, catalog)
        return proj_typecheck(p.second, middle, catalog)
    if isinstance(p, ast.Pair):
        return Node(proj_typecheck(p.left, source, catalog), proj_typecheck(p.right, source, catalog))
    if isinstance(p, ast.Eval):
        return Leaf(expr_typecheck(p.expr, source, catalog))
    if isinstance(p, ast.ProjMeta):
        if p.source is None or p.target is None:
            raise UnboundMetaError(p.name, "projection")
        if p.source != source:
            raise PathMismatchError(p, source, f"declared source schema is {p.source}")
        return p.target
    raise ArgumentTypeError("p", p, ast.Proj)


def query_typecheck(q: ast.Query, ctx: Schema, catalog: Catalog | None = None) -> Schema:
    """
    Output schema of a query under context schema `ctx`.

    Raises
    ------
    SchemaMismatchError
        UNION ALL or EXCEPT with operands of different schemas.

    UnboundMetaError
        A concrete table missing from `catalog`.
    """
    if not isinstance(q, ast.Query):
        raise ArgumentTypeError("q", q, ast.Query)

    if isinstance(q, ast.Table):
        if catalog is None or q.name not in catalog:
            raise UnboundMetaError(q.name, "table")
        return catalog[q.name]
    if isinstance(q, ast.TableMeta):
        return q.schema
    if isinstance(q, ast.Select):
        return proj_typecheck(q.proj, query_typecheck(q.query, ctx, catalog), catalog)
    if isinstance(q, ast.Product):
        return Node(query_typecheck(q.left, ctx, catalog), query_typecheck(q.right, ctx, catalog))
    if isinstance(q, ast.Where):
        schema = query_typecheck(q.query, ctx, catalog)
        pred_typecheck(q.pred, Node(ctx, schema), catalog)
        return schema
    if isinstance(q, (ast.UnionAll, ast.Except)):
        left = query_typecheck(q.left, ctx, catalog)
        right = query_typecheck(q.right, ctx, catalog)
        if left != right:
            kind = "UNION ALL" if isinstance(q, ast.UnionAll) else "EXCEPT"
            raise SchemaMismatchError(left, right, kind)
        return left
    if isinstance(q, ast.Distinct):
        return query_typecheck(q.query, ctx, catalog)
    if isinstance(q, ast.GroupBy):
        raise UnsupportedSugarError("GROUP BY must be de-sugared before typechecking")
    raise ArgumentTypeError("q", q, ast.Query)


def pred_typecheck(b: ast.Pred, ctx: Schema, catalog: Catalog | None = None) -> None:
    """
    Check a predicate against its context schema.
    """
    if isinstance(b, ast.Eq):
        left = expr_typecheck(b.left, ctx, catalog)
        right = expr_typecheck(b.right, ctx, catalog)
        if left != right:
            raise SchemaMismatchError(left, right, "equality")
    elif isinstance(b, (ast.And, ast.Or)):
        pred_typecheck(b.left, ctx, catalog)
        pred_typecheck(b.right, ctx, catalog)
    elif isinstance(b, ast.Not):
        pred_typecheck(b.pred, ctx, catalog)
    elif isinstance(b, (ast.TruePred, ast.FalsePred)):
        pass
    elif isinstance(b, ast.Exists):
        query_typecheck(b.query, ctx, catalog)
    elif isinstance(b, ast.CastPred):
        pred_typecheck(b.pred, proj_typecheck(b.proj, ctx, catalog), catalog)
    elif isinstance(b, ast.PredMeta):
        if b.over is None:
            raise UnboundMetaError(b.name, "predicate")
        if b.over != ctx:
            raise SchemaMismatchError(b.over, ctx, f"predicate {b.name}")
    else:
        raise ArgumentTypeError("b", b, ast.Pred)


def expr_typecheck(e: ast.Expr, ctx: Schema, catalog: Catalog | None = None) -> BaseType:
    """
    Base type of an expression under context schema `ctx`.
    """
    if isinstance(e, ast.Var):
        target = proj_typecheck(e.proj, ctx, catalog)
        if not isinstance(target, Leaf):
            raise PathMismatchError(e.proj, ctx, f"Var must reach a leaf, reached {target}")
        return target.base
    if isinstance(e, ast.Apply):
        if e.params is None or e.result is None:
            raise UnboundMetaError(e.name, "function")
        if len(e.params) != len(e.args):
            raise SchemaMismatchError(
                f"{len(e.params)} arguments", f"{len(e.args)} arguments", f"call of {e.name}"
            )
        for param, arg in zip(e.params, e.args):
            actual = expr_typecheck(arg, ctx, catalog)
            if actual != param:
                raise SchemaMismatchError(param, actual, f"argument of {e.name}")
        return e.result
    if isinstance(e, ast.Agg):
        return agg_result_type(e.name, query_typecheck(e.query, ctx, catalog))
    if isinstance(e, ast.CastExpr):
        return expr_typecheck(e.expr, proj_typecheck(e.proj, ctx, catalog), catalog)
    if isinstance(e, ast.ExprMeta):
        if e.over is None or e.base is None:
            raise UnboundMetaError(e.name, "expression")
        if e.over != ctx:
            raise SchemaMismatchError(e.over, ctx, f"expression {e.name}")
        return e.base
    raise ArgumentTypeError("e", e, ast.Expr)


def agg_result_type(name: str, schema: Schema) -> BaseType:
    """
    Result type of aggregate `name` over a query of schema `schema`.

    COUNT accepts any single leaf, SUM and AVG need int, MAX and MIN keep the
    leaf type.
    """
    if name not in ast.AGGREGATES:
        raise UnboundMetaError(name, "aggregate")
    if not isinstance(schema, Leaf):
        raise SchemaMismatchError("a single-leaf schema", schema, f"aggregate {name}")
    if name == "COUNT":
        return INT
    if name in ("SUM", "AVG") and schema.base != INT:
        raise SchemaMismatchError(INT, schema.base, f"aggregate {name}")
    return schema.base
