"""
Query Language Abstract Syntax

Projections, queries, predicates and expressions over unnamed schemas.
Meta-variables are ordinary AST nodes so that instantiating a rule is a
plain tree map.
"""

from __future__ import annotations
from dataclasses import dataclass, fields, replace
from typing import Iterator
from .schema import BaseType, Schema

AGGREGATES = ("SUM", "COUNT", "AVG", "MAX", "MIN")

__all__ = [
    "AGGREGATES",
    "Ast",
    "Proj",
    "Star",
    "Left",
    "Right",
    "EmptyProj",
    "Compose",
    "Pair",
    "Eval",
    "ProjMeta",
    "path",
    "Query",
    "Table",
    "TableMeta",
    "Select",
    "Product",
    "Where",
    "UnionAll",
    "Except",
    "Distinct",
    "AggItem",
    "GroupBy",
    "Pred",
    "Eq",
    "And",
    "Or",
    "Not",
    "TruePred",
    "FalsePred",
    "Exists",
    "CastPred",
    "PredMeta",
    "Expr",
    "Var",
    "Apply",
    "Agg",
    "CastExpr",
    "ExprMeta",
    "transform",
    "meta_names",
]


class Ast:
    """
    Base class of every AST node.
    """

    __slots__ = ()

    def children(self) -> Iterator[Ast]:
        """
        Direct AST children, in field order.
        """
        for field in fields(self):
            value = getattr(self, field.name)
            if isinstance(value, Ast):
                yield value
            elif isinstance(value, tuple):
                for item in value:
                    if isinstance(item, Ast):
                        yield item

    def walk(self) -> Iterator[Ast]:
        """
        Pre-order traversal of the subtree.
        """
        yield self
        for child in self.children():
            yield from child.walk()

    def __str__(self) -> str:
        # pylint: disable=import-outside-toplevel
        from ..parser.printer import print_ast

        return print_ast(self)


# ==============================
# Projections
# ==============================


class Proj(Ast):
    """
    Projection from a source schema to a target schema.
    """

    __slots__ = ()


@dataclass(frozen=True, repr=True)
class Star(Proj):
    """
    Identity projection `*`.
    """


@dataclass(frozen=True, repr=True)
class Left(Proj):
    """
    First component of a pair.
    """


@dataclass(frozen=True, repr=True)
class Right(Proj):
    """
    Second component of a pair.
    """


@dataclass(frozen=True, repr=True)
class EmptyProj(Proj):
    """
    Projection to the unit tuple.
    """


@dataclass(frozen=True, repr=True)
class Compose(Proj):
    """
    `first.second`: apply `first`, then `second`.
    """

    first: Proj
    second: Proj


@dataclass(frozen=True, repr=True)
class Pair(Proj):
    """
    `(left, right)`: build a pair from two projections of the same source.
    """

    left: Proj
    right: Proj


@dataclass(frozen=True, repr=True)
class Eval(Proj):
    """
    Projection to a single leaf computed by an expression.
    """

    expr: Expr


@dataclass(frozen=True, repr=True)
class ProjMeta(Proj):
    """
    Projection meta-variable. Schemas are `None` until resolved by a declaration.
    """

    name: str
    source: Schema | None = None
    target: Schema | None = None


def path(*parts: Proj) -> Proj:
    """
    Right-nested composition of projections: `path(Left(), Right())` is `Left.Right`.
    """
    if not parts:
        return Star()
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Compose(part, result)
    return result


# ==============================
# Queries
# ==============================


class Query(Ast):
    """
    Query producing a bag of tuples.
    """

    __slots__ = ()


@dataclass(frozen=True, repr=True)
class Table(Query):
    """
    Concrete table resolved through a catalog.
    """

    name: str


@dataclass(frozen=True, repr=True)
class TableMeta(Query):
    """
    Relation meta-variable with a declared schema.
    """

    name: str
    schema: Schema


@dataclass(frozen=True, repr=True)
class Select(Query):
    """
    `SELECT proj FROM query`.
    """

    proj: Proj
    query: Query


@dataclass(frozen=True, repr=True)
class Product(Query):
    """
    `FROM left, right`.
    """

    left: Query
    right: Query


@dataclass(frozen=True, repr=True)
class Where(Query):
    """
    `query WHERE pred`.
    """

    query: Query
    pred: Pred


@dataclass(frozen=True, repr=True)
class UnionAll(Query):
    """
    `left UNION ALL right`.
    """

    left: Query
    right: Query


@dataclass(frozen=True, repr=True)
class Except(Query):
    """
    `left EXCEPT right`.
    """

    left: Query
    right: Query


@dataclass(frozen=True, repr=True)
class Distinct(Query):
    """
    `DISTINCT query`.
    """

    query: Query


@dataclass(frozen=True, repr=True)
class AggItem(Ast):
    """
    Aggregate item of a GROUP BY select list, e.g. `SUM(b)`.
    """

    agg: str
    proj: Proj


@dataclass(frozen=True, repr=True)
class GroupBy(Query):
    """
    GROUP BY sugar. Only exists between parsing and de-sugaring.
    """

    items: tuple
    keys: tuple
    source: Query


# ==============================
# Predicates
# ==============================


class Pred(Ast):
    """
    Boolean condition over a context tuple.
    """

    __slots__ = ()


@dataclass(frozen=True, repr=True)
class Eq(Pred):
    """
    `left = right`.
    """

    left: Expr
    right: Expr


@dataclass(frozen=True, repr=True)
class And(Pred):
    """
    Conjunction.
    """

    left: Pred
    right: Pred


@dataclass(frozen=True, repr=True)
class Or(Pred):
    """
    Disjunction.
    """

    left: Pred
    right: Pred


@dataclass(frozen=True, repr=True)
class Not(Pred):
    """
    Negation.
    """

    pred: Pred


@dataclass(frozen=True, repr=True)
class TruePred(Pred):
    """
    `TRUE`.
    """


@dataclass(frozen=True, repr=True)
class FalsePred(Pred):
    """
    `FALSE`.
    """


@dataclass(frozen=True, repr=True)
class Exists(Pred):
    """
    `EXISTS (query)`, the query is evaluated under the predicate's context.
    """

    query: Query


@dataclass(frozen=True, repr=True)
class CastPred(Pred):
    """
    `CASTPRED(proj, pred)`: evaluate `pred` on the projected context.
    """

    proj: Proj
    pred: Pred


@dataclass(frozen=True, repr=True)
class PredMeta(Pred):
    """
    Predicate meta-variable over a declared context schema.
    """

    name: str
    over: Schema | None = None


# ==============================
# Expressions
# ==============================


class Expr(Ast):
    """
    Scalar expression over a context tuple.
    """

    __slots__ = ()


@dataclass(frozen=True, repr=True)
class Var(Expr):
    """
    `Var(proj)`: the leaf value reached by a projection of the context.
    """

    proj: Proj


@dataclass(frozen=True, repr=True)
class Apply(Expr):
    """
    Uninterpreted function application. Zero arguments make a constant.
    """

    name: str
    args: tuple = ()
    params: tuple | None = None
    result: BaseType | None = None


@dataclass(frozen=True, repr=True)
class Agg(Expr):
    """
    Aggregate over a single-column query evaluated under the expression context.
    """

    name: str
    query: Query


@dataclass(frozen=True, repr=True)
class CastExpr(Expr):
    """
    `CASTEXPR(proj, expr)`.
    """

    proj: Proj
    expr: Expr


@dataclass(frozen=True, repr=True)
class ExprMeta(Expr):
    """
    Expression meta-variable reading a declared context schema.
    """

    name: str
    over: Schema | None = None
    base: BaseType | None = None


def transform(node: Ast, fn) -> Ast:
    """
    Rebuild a tree bottom-up, passing every rebuilt node through `fn`.

    Parameters
    ----------
    node : Ast
        Root of the tree.

    fn : Callable[[Ast], Ast]
        Called on each node after its children were transformed.

    Returns
    -------
    Ast
        The transformed tree. Unchanged subtrees are shared.
    """
    changes = {}
    for field in fields(node):
        value = getattr(node, field.name)
        if isinstance(value, Ast):
            new = transform(value, fn)
        elif isinstance(value, tuple) and any(isinstance(item, Ast) for item in value):
            new = tuple(transform(item, fn) if isinstance(item, Ast) else item for item in value)
        else:
            continue
        if new != value:
            changes[field.name] = new
    if changes:
        node = replace(node, **changes)
    return fn(node)


def meta_names(node: Ast) -> dict[str, set[str]]:
    """
    Names of meta-variables used in a subtree, grouped by kind.

    Returns
    -------
    dict
        Keys `"table"`, `"proj"`, `"pred"`, `"expr"`, `"function"`, `"schema"`.
    """
    found = {kind: set() for kind in ("table", "proj", "pred", "expr", "function", "schema")}
    for item in node.walk():
        if isinstance(item, (Table, TableMeta)):
            found["table"].add(item.name)
            if isinstance(item, TableMeta):
                found["schema"] |= item.schema.metas()
        elif isinstance(item, ProjMeta):
            found["proj"].add(item.name)
        elif isinstance(item, PredMeta):
            found["pred"].add(item.name)
        elif isinstance(item, ExprMeta):
            found["expr"].add(item.name)
        elif isinstance(item, Apply):
            found["function"].add(item.name)
    return found
