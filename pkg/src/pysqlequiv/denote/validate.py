"""
Schema Validation of Terms

Denotations of well-typed queries always pass `check_term`; the normalizer
and the lemma applier use it to catch ill-scoped rewrites.
"""

from __future__ import annotations
from ..error_handling import ArgumentTypeError, SchemaMismatchError
from ..core.schema import EMPTY, Leaf, Node, Schema
from ..core.typecheck import agg_result_type
from . import terms as tm


def term_schema(term: tm.TupleTerm, env: list[Schema]) -> Schema:
    """
    Schema of a tuple term whose free `VarRef`s index into `env` (outermost first).

    Raises
    ------
    SchemaMismatchError
        A projection of a non-pair, a dangling index, or an argument of the
        wrong schema.
    """
    if isinstance(term, tm.VarRef):
        if not 0 <= term.index < len(env):
            raise SchemaMismatchError(f"a binder for index {term.index}", f"{len(env)} binders", "variable")
        return env[len(env) - 1 - term.index]
    if isinstance(term, (tm.NamedVar, tm.Const)):
        return term.schema
    if isinstance(term, (tm.Fst, tm.Snd)):
        schema = term_schema(term.arg, env)
        if not isinstance(schema, Node):
            raise SchemaMismatchError("a node schema", schema, "pair projection")
        return schema.left if isinstance(term, tm.Fst) else schema.right
    if isinstance(term, tm.MkPair):
        return Node(term_schema(term.left, env), term_schema(term.right, env))
    if isinstance(term, tm.Unit):
        return EMPTY
    if isinstance(term, tm.ProjApply):
        _expect(term.meta.source, term_schema(term.arg, env), f"projection {term.meta.name}")
        return term.meta.target
    if isinstance(term, tm.ExprApply):
        _expect(term.meta.over, term_schema(term.arg, env), f"expression {term.meta.name}")
        return Leaf(term.meta.base)
    if isinstance(term, tm.FnApply):
        for arg in term.args:
            if not isinstance(term_schema(arg, env), Leaf):
                raise SchemaMismatchError("a leaf", term_schema(arg, env), f"argument of {term.name}")
        return Leaf(term.result)
    if isinstance(term, tm.AggApply):
        check_term(term.body, env)
        _expect(Leaf(agg_result_type(term.name, term.body.schema)), Leaf(term.result), term.name)
        return Leaf(term.result)
    raise ArgumentTypeError("term", term, tm.TupleTerm)


def check_term(term: tm.UTerm, env: list[Schema] | None = None) -> None:
    """
    Check that every tuple term in `term` is well-scoped and well-schemed.
    """
    env = list(env or [])
    if isinstance(term, (tm.Zero, tm.One)):
        return
    if isinstance(term, (tm.Plus, tm.Times)):
        check_term(term.left, env)
        check_term(term.right, env)
    elif isinstance(term, (tm.Squash, tm.Negate)):
        check_term(term.arg, env)
    elif isinstance(term, (tm.Sigma, tm.Lam)):
        check_term(term.body, env + [term.schema])
    elif isinstance(term, tm.RelAtom):
        actual = term_schema(term.arg, env)
        if term.schema is not None:
            _expect(term.schema, actual, f"relation {term.table}")
    elif isinstance(term, tm.EqAtom):
        _expect(term_schema(term.left, env), term_schema(term.right, env), "equality")
    elif isinstance(term, tm.PredAtom):
        _expect(term.meta.over, term_schema(term.arg, env), f"predicate {term.meta.name}")
    else:
        raise ArgumentTypeError("term", term, tm.UTerm)


def _expect(expected: Schema | None, actual: Schema, where: str) -> None:
    if expected is not None and expected != actual:
        raise SchemaMismatchError(expected, actual, where)
