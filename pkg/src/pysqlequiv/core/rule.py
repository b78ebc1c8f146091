"""
Rewrite Rules

A rewrite rule is a named pair of queries sharing meta-variable
declarations, optionally guarded by key and functional dependency premises.
"""

from __future__ import annotations
from dataclasses import dataclass, field, replace
from pprint import pformat
import textwrap
from ..error_handling import (
    ArgumentTypeError,
    SchemaMismatchError,
    SqlEquivError,
    UnboundMetaError,
)
from . import ast
from .schema import EMPTY, Schema, substitute_schema
from .typecheck import query_typecheck


@dataclass(frozen=True)
class Declarations:
    """
    Meta-variable declarations shared by the two sides of a rule.

    Attributes
    ----------
    types : tuple[str]
        Abstract base type names.

    schemas : tuple[str]
        Schema meta-variable names.

    tables : dict[str, Schema]
        Relation name to schema.

    projs : dict[str, pysqlequiv.core.ast.ProjMeta]
        Projection meta-variables with their source and target schemas.

    preds : dict[str, pysqlequiv.core.ast.PredMeta]
        Predicate meta-variables with their context schemas.

    exprs : dict[str, pysqlequiv.core.ast.ExprMeta]
        Expression meta-variables with their context schemas and types.

    functions : dict[str, tuple]
        Uninterpreted function name to `(param_types, result_type)`.
    """

    types: tuple = ()
    schemas: tuple = ()
    tables: dict = field(default_factory=dict)
    projs: dict = field(default_factory=dict)
    preds: dict = field(default_factory=dict)
    exprs: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)

    __hash__ = None

    def names(self) -> set[str]:
        """
        Every declared name.
        """
        return (
            set(self.types)
            | set(self.schemas)
            | set(self.tables)
            | set(self.projs)
            | set(self.preds)
            | set(self.exprs)
            | set(self.functions)
        )

    def instantiate(self, bindings: dict[str, Schema]) -> Declarations:
        """
        Substitute schema meta-variables in every declared schema.
        """
        return Declarations(
            types=self.types,
            schemas=tuple(name for name in self.schemas if name not in bindings),
            tables={name: substitute_schema(s, bindings) for name, s in self.tables.items()},
            projs={name: _bind(m, bindings) for name, m in self.projs.items()},
            preds={name: _bind(m, bindings) for name, m in self.preds.items()},
            exprs={name: _bind(m, bindings) for name, m in self.exprs.items()},
            functions=dict(self.functions),
        )


@dataclass(frozen=True)
class RewriteRule:
    """
    Named query equivalence `lhs == rhs`.

    Attributes
    ----------
    name : str
        Rule name, unique within a rule file or corpus.

    lhs, rhs : pysqlequiv.core.ast.Query
        The two sides.

    declarations : Declarations
        Meta-variables both sides may use.

    premises : tuple
        Key and functional dependency constraints, see `pysqlequiv.rules`.

    context : pysqlequiv.core.Schema
        Context schema the sides are checked under, usually empty.

    category : str|None
        Corpus category.

    expect : str|None
        Expected verdict from an `@expect` pragma.

    fuel : int|None
        Per-rule fuel from an `@fuel` pragma.

    provenance : str|None
        `"literature"` or `"reconstructed"` for corpus rules.
    """

    name: str
    lhs: ast.Query
    rhs: ast.Query
    declarations: Declarations = field(default_factory=Declarations)
    premises: tuple = ()
    context: Schema = EMPTY
    category: str | None = None
    expect: str | None = None
    fuel: int | None = None
    provenance: str | None = None

    __hash__ = None

    def __post_init__(self) -> None:
        if not isinstance(self.name, str):
            raise ArgumentTypeError("name", self.name, str)
        for arg_name in ("lhs", "rhs"):
            if not isinstance(getattr(self, arg_name), ast.Query):
                raise ArgumentTypeError(arg_name, getattr(self, arg_name), ast.Query)
        if not isinstance(self.declarations, Declarations):
            raise ArgumentTypeError("declarations", self.declarations, Declarations)
        if not isinstance(self.context, Schema):
            raise ArgumentTypeError("context", self.context, Schema)
        object.__setattr__(self, "premises", tuple(self.premises))

    def __str__(self) -> str:
        return f"{self.name}: {self.lhs} == {self.rhs}"

    def __repr__(self) -> str:
        return f"RewriteRule(\n{textwrap.indent(pformat(self.__dict__), '    ')}\n)"


@dataclass(frozen=True)
class CheckedRule:
    """
    A rule that passed `rule_wellformed`, together with its output schema.
    """

    rule: RewriteRule
    schema: Schema

    __hash__ = None

    @property
    def name(self) -> str:
        return self.rule.name

    @property
    def lhs(self) -> ast.Query:
        return self.rule.lhs

    @property
    def rhs(self) -> ast.Query:
        return self.rule.rhs

    @property
    def premises(self) -> tuple:
        return self.rule.premises

    @property
    def context(self) -> Schema:
        return self.rule.context

    @property
    def declarations(self) -> Declarations:
        return self.rule.declarations

    @property
    def catalog(self) -> dict[str, Schema]:
        return self.rule.declarations.tables

    def instantiate(self, bindings: dict[str, Schema]) -> CheckedRule:
        """
        Substitute concrete schemas for schema meta-variables.

        Parameters
        ----------
        bindings : dict[str, Schema]
            Schema meta-variable name to schema.

        Returns
        -------
        CheckedRule
            The instantiated rule, re-checked.
        """
        if not bindings:
            return self
        rule = replace(
            self.rule,
            lhs=instantiate_schemas(self.rule.lhs, bindings),
            rhs=instantiate_schemas(self.rule.rhs, bindings),
            declarations=self.rule.declarations.instantiate(bindings),
            premises=tuple(p.instantiate(bindings) for p in self.rule.premises),
            context=substitute_schema(self.rule.context, bindings),
        )
        return rule_wellformed(rule)

    def __str__(self) -> str:
        return f"{self.rule} : {self.schema}"


def _bind(node: ast.Ast, bindings: dict[str, Schema]) -> ast.Ast:
    if isinstance(node, ast.TableMeta):
        return replace(node, schema=substitute_schema(node.schema, bindings))
    if isinstance(node, ast.ProjMeta) and node.source is not None:
        return replace(
            node,
            source=substitute_schema(node.source, bindings),
            target=substitute_schema(node.target, bindings),
        )
    if isinstance(node, (ast.PredMeta, ast.ExprMeta)) and node.over is not None:
        return replace(node, over=substitute_schema(node.over, bindings))
    return node


def instantiate_schemas(node: ast.Ast, bindings: dict[str, Schema]) -> ast.Ast:
    """
    Substitute schema meta-variables throughout an AST.
    """
    return ast.transform(node, lambda n: _bind(n, bindings))


def _check_declared(node: ast.Ast, decls: Declarations) -> None:
    for item in node.walk():
        if isinstance(item, ast.TableMeta):
            if item.name not in decls.tables:
                raise UnboundMetaError(item.name, "table")
            if decls.tables[item.name] != item.schema:
                raise SchemaMismatchError(decls.tables[item.name], item.schema, f"table {item.name}")
        elif isinstance(item, ast.ProjMeta) and item.name not in decls.projs:
            raise UnboundMetaError(item.name, "projection")
        elif isinstance(item, ast.PredMeta) and item.name not in decls.preds:
            raise UnboundMetaError(item.name, "predicate")
        elif isinstance(item, ast.ExprMeta) and item.name not in decls.exprs:
            raise UnboundMetaError(item.name, "expression")
        elif isinstance(item, ast.Apply) and item.name not in decls.functions:
            raise UnboundMetaError(item.name, "function")


def rule_wellformed(r: RewriteRule) -> CheckedRule:
    """
    Check that both sides of a rule use only declared meta-variables and
    typecheck to the same schema under the rule's context.

    Parameters
    ----------
    r : RewriteRule
        Rule to check.

    Returns
    -------
    CheckedRule
        The rule and its common output schema.

    Raises
    ------
    UnboundMetaError
        An undeclared table, projection, predicate, expression, or function.

    SchemaMismatchError
        The sides have different schemas, or a typing error inside a side.
    """
    if not isinstance(r, RewriteRule):
        raise ArgumentTypeError("r", r, RewriteRule)
    catalog = r.declarations.tables
    try:
        _check_declared(r.lhs, r.declarations)
        _check_declared(r.rhs, r.declarations)
        lhs_schema = query_typecheck(r.lhs, r.context, catalog)
        rhs_schema = query_typecheck(r.rhs, r.context, catalog)
        if lhs_schema != rhs_schema:
            raise SchemaMismatchError(lhs_schema, rhs_schema, "rule sides")
        for premise in r.premises:
            premise.typecheck(catalog)
    except SqlEquivError as err:
        raise err.with_rule(r.name)
    return CheckedRule(r, lhs_schema)
