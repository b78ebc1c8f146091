"""
Key and Functional Dependency Constraints

A constraint is stored as its kind plus projections, and encodes to the
defining query equation: a key `k` of `R` holds iff

    SELECT * FROM R == SELECT Left.* FROM R, R WHERE Var(Right.Left.k) = Var(Right.Right.k)

and a functional dependency `a -> b` of `R` is the key `Left.*` of
`DISTINCT SELECT a, b FROM R`.
"""

from __future__ import annotations
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING
from ..error_handling import ArgumentTypeError, PathMismatchError
from ..core import ast
from ..core.schema import EMPTY, Leaf, Schema
from ..core.typecheck import Catalog, proj_typecheck, query_typecheck
from ..core.rule import instantiate_schemas

if TYPE_CHECKING:
    from ..interp.instance import Instance

CONSTRAINT_KINDS = ("key", "fd")


@dataclass(frozen=True)
class Constraint:
    """
    Premise of a rewrite rule.

    Attributes
    ----------
    kind : str
        `"key"` or `"fd"`.

    table : pysqlequiv.core.ast.Query
        Constrained relation, a `TableMeta` or `Table`.

    proj : pysqlequiv.core.ast.Proj
        Key projection, or the determinant of a functional dependency.

    dependent : pysqlequiv.core.ast.Proj|None
        Dependent projection of a functional dependency.
    """

    kind: str
    table: ast.Query
    proj: ast.Proj
    dependent: ast.Proj | None = None

    def __post_init__(self) -> None:
        if self.kind not in CONSTRAINT_KINDS:
            raise ValueError(f"Constraint 'kind' must be one of {CONSTRAINT_KINDS}, got '{self.kind}'")
        if not isinstance(self.table, (ast.Table, ast.TableMeta)):
            raise ArgumentTypeError("table", self.table, (ast.Table, ast.TableMeta))
        if (self.kind == "fd") != (self.dependent is not None):
            raise ValueError("Only functional dependencies carry a dependent projection")

    @property
    def table_name(self) -> str:
        return self.table.name

    def __str__(self) -> str:
        if self.kind == "key":
            return f"key({self.proj}, {self.table_name})"
        return f"fd({self.proj}, {self.dependent}, {self.table_name})"

    def typecheck(self, catalog: Catalog | None = None) -> None:
        """
        Check that the projections reach leaves of the table's schema.

        Raises
        ------
        PathMismatchError
            A projection does not typecheck or reaches a non-leaf.
        """
        schema = query_typecheck(self.table, EMPTY, catalog)
        for proj in (self.proj, self.dependent):
            if proj is None:
                continue
            target = proj_typecheck(proj, schema, catalog)
            if not isinstance(target, Leaf):
                raise PathMismatchError(proj, schema, f"constraint projection reaches {target}")

    def keyed_query(self) -> ast.Query:
        """
        Query whose key the constraint asserts: the table for a key, the
        distinct `(a, b)` projection for a functional dependency.
        """
        if self.kind == "key":
            return self.table
        return ast.Distinct(ast.Select(ast.Pair(self.proj, self.dependent), self.table))

    def key_proj(self) -> ast.Proj:
        """
        Key projection on `keyed_query()`.
        """
        if self.kind == "key":
            return self.proj
        return ast.Compose(ast.Left(), ast.Star())

    def equation(self) -> tuple[ast.Query, ast.Query]:
        """
        The defining query equation `(lhs, rhs)` of the constraint.
        """
        return key_equation(self.key_proj(), self.keyed_query())

    def holds(self, inst: Instance) -> bool:
        """
        Evaluate both sides of the defining equation on an instance.
        """
        # pylint: disable=import-outside-toplevel
        from ..interp.evaluator import eval_query

        lhs, rhs = self.equation()
        return eval_query(inst, (), lhs) == eval_query(inst, (), rhs)

    def instantiate(self, bindings: dict[str, Schema]) -> Constraint:
        """
        Substitute schema meta-variables.
        """
        if not bindings:
            return self
        return replace(
            self,
            table=instantiate_schemas(self.table, bindings),
            proj=instantiate_schemas(self.proj, bindings),
            dependent=None if self.dependent is None else instantiate_schemas(self.dependent, bindings),
        )


def key_equation(k: ast.Proj, query: ast.Query) -> tuple[ast.Query, ast.Query]:
    """
    `SELECT * FROM q` and its self-join on equal `k`, as a pair of queries.
    """
    lhs = ast.Select(ast.Star(), query)
    rhs = ast.Select(
        ast.Compose(ast.Left(), ast.Star()),
        ast.Where(
            ast.Product(query, query),
            ast.Eq(
                ast.Var(ast.path(ast.Right(), ast.Left(), k)),
                ast.Var(ast.path(ast.Right(), ast.Right(), k)),
            ),
        ),
    )
    return lhs, rhs


def encode_key(k: ast.Proj, table: ast.Query, catalog: Catalog | None = None) -> Constraint:
    """
    Build a key constraint `key(k, R)`.

    Parameters
    ----------
    k : pysqlequiv.core.ast.Proj
        Key projection, must reach a leaf of the table's schema.

    table : pysqlequiv.core.ast.TableMeta|pysqlequiv.core.ast.Table
        Constrained relation.

    catalog : Mapping[str, Schema], optional
        Schemas for a concrete `Table`.

    Returns
    -------
    Constraint

    Raises
    ------
    PathMismatchError
        `k` does not typecheck to a leaf.
    """
    if not isinstance(k, ast.Proj):
        raise ArgumentTypeError("k", k, ast.Proj)
    constraint = Constraint("key", table, k)
    constraint.typecheck(catalog)
    return constraint


def encode_fd(a: ast.Proj, b: ast.Proj, table: ast.Query, catalog: Catalog | None = None) -> Constraint:
    """
    Build a functional dependency constraint `fd(a, b, R)`.
    """
    for arg_name, arg in (("a", a), ("b", b)):
        if not isinstance(arg, ast.Proj):
            raise ArgumentTypeError(arg_name, arg, ast.Proj)
    constraint = Constraint("fd", table, a, b)
    constraint.typecheck(catalog)
    return constraint


def index_def(a: ast.Proj, k: ast.Proj, table: ast.Query) -> ast.Query:
    """
    Defining query of an index on attribute `a` of a relation keyed by `k`:
    `SELECT k, a FROM R`.
    """
    return ast.Select(ast.Pair(k, a), table)

