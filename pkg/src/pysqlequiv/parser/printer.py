"""
Pretty Printer for the Rule DSL

Output reparses to a structurally equal AST.
"""

from __future__ import annotations
from ..error_handling import ArgumentTypeError
from ..core import ast
from ..core.rule import Declarations, RewriteRule
from ..core.schema import EMPTY


# ==============================
# Projections
# ==============================


def _spine(p: ast.Proj) -> list[ast.Proj]:
    items = [p.left]
    while isinstance(p.right, ast.Pair):
        p = p.right
        items.append(p.left)
    items.append(p.right)
    return items


def print_proj(p: ast.Proj, top: bool = False) -> str:
    """
    Print a projection. Top-level pairs (select lists) print without parentheses.
    """
    if isinstance(p, ast.Star):
        return "*"
    if isinstance(p, ast.Left):
        return "Left"
    if isinstance(p, ast.Right):
        return "Right"
    if isinstance(p, ast.EmptyProj):
        return "Empty"
    if isinstance(p, ast.ProjMeta):
        return p.name
    if isinstance(p, ast.Eval):
        return f"EVAL({print_expr(p.expr)})"
    if isinstance(p, ast.Pair):
        text = ", ".join(print_proj(item) for item in _spine(p))
        return text if top else f"({text})"
    if isinstance(p, ast.Compose):
        first = print_proj(p.first)
        if isinstance(p.first, ast.Compose):
            first = f"({first})"
        return f"{first}.{print_proj(p.second)}"
    raise ArgumentTypeError("p", p, ast.Proj)


# ==============================
# Queries
# ==============================


def _from_item(q: ast.Query) -> str:
    if isinstance(q, (ast.Table, ast.TableMeta)):
        return q.name
    return f"({print_query(q)})"


def _from_list(q: ast.Query) -> str:
    if isinstance(q, ast.Product):
        return f"{_from_list(q.left)}, {_from_item(q.right)}"
    return _from_item(q)


def _from_clause(q: ast.Query) -> str:
    if isinstance(q, ast.Where):
        return f"{_from_list(q.query)} WHERE {print_pred(q.pred)}"
    return _from_list(q)


def print_query(q: ast.Query) -> str:
    """
    Print a query.
    """
    if isinstance(q, (ast.Table, ast.TableMeta)):
        return q.name
    if isinstance(q, ast.Select):
        return f"SELECT {print_proj(q.proj, top=True)} FROM {_from_clause(q.query)}"
    if isinstance(q, ast.Product):
        return f"FROM {_from_list(q)}"
    if isinstance(q, ast.Where):
        if isinstance(q.query, ast.Product):
            return f"FROM {_from_clause(q)}"
        return f"{_from_item(q.query)} WHERE {print_pred(q.pred)}"
    if isinstance(q, ast.Distinct):
        inner = q.query
        if isinstance(inner, (ast.UnionAll, ast.Except)):
            return f"DISTINCT ({print_query(inner)})"
        return f"DISTINCT {print_query(inner)}"
    if isinstance(q, (ast.UnionAll, ast.Except)):
        keyword = "UNION ALL" if isinstance(q, ast.UnionAll) else "EXCEPT"
        right = print_query(q.right)
        if isinstance(q.right, (ast.UnionAll, ast.Except)):
            right = f"({right})"
        return f"{print_query(q.left)} {keyword} {right}"
    if isinstance(q, ast.GroupBy):
        items = ", ".join(
            f"{i.agg}({print_proj(i.proj)})" if isinstance(i, ast.AggItem) else print_proj(i)
            for i in q.items
        )
        keys = ", ".join(print_proj(k) for k in q.keys)
        return f"SELECT {items} FROM {_from_clause(q.source)} GROUP BY {keys}"
    raise ArgumentTypeError("q", q, ast.Query)


# ==============================
# Predicates and expressions
# ==============================


def _pred_level(b: ast.Pred) -> int:
    if isinstance(b, ast.Or):
        return 1
    if isinstance(b, ast.And):
        return 2
    if isinstance(b, ast.Not):
        return 3
    return 4


def _pred_at(b: ast.Pred, level: int) -> str:
    text = print_pred(b)
    return f"({text})" if _pred_level(b) < level else text


def print_pred(b: ast.Pred) -> str:
    """
    Print a predicate with the fewest parentheses that keep its shape.
    """
    if isinstance(b, ast.Or):
        return f"{_pred_at(b.left, 1)} OR {_pred_at(b.right, 2)}"
    if isinstance(b, ast.And):
        return f"{_pred_at(b.left, 2)} AND {_pred_at(b.right, 3)}"
    if isinstance(b, ast.Not):
        return f"NOT {_pred_at(b.pred, 3)}"
    if isinstance(b, ast.TruePred):
        return "TRUE"
    if isinstance(b, ast.FalsePred):
        return "FALSE"
    if isinstance(b, ast.Exists):
        return f"EXISTS ({print_query(b.query)})"
    if isinstance(b, ast.CastPred):
        return f"CASTPRED({print_proj(b.proj)}, {print_pred(b.pred)})"
    if isinstance(b, ast.PredMeta):
        return b.name
    if isinstance(b, ast.Eq):
        return f"{print_expr(b.left)} = {print_expr(b.right)}"
    raise ArgumentTypeError("b", b, ast.Pred)


def print_expr(e: ast.Expr) -> str:
    """
    Print an expression.
    """
    if isinstance(e, ast.Var):
        return f"Var({print_proj(e.proj, top=True)})"
    if isinstance(e, ast.Apply):
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, ast.Agg):
        return f"{e.name}({print_query(e.query)})"
    if isinstance(e, ast.CastExpr):
        return f"CASTEXPR({print_proj(e.proj)}, {print_expr(e.expr)})"
    if isinstance(e, ast.ExprMeta):
        return e.name
    raise ArgumentTypeError("e", e, ast.Expr)


def print_ast(node: ast.Ast) -> str:
    """
    Print any AST node.
    """
    if isinstance(node, ast.Proj):
        return print_proj(node)
    if isinstance(node, ast.Query):
        return print_query(node)
    if isinstance(node, ast.Pred):
        return print_pred(node)
    if isinstance(node, ast.Expr):
        return print_expr(node)
    if isinstance(node, ast.AggItem):
        return f"{node.agg}({print_proj(node.proj)})"
    raise ArgumentTypeError("node", node, ast.Ast)


# ==============================
# Declarations and rules
# ==============================


def print_declarations(decls: Declarations) -> list[str]:
    """
    Declaration lines in dependency order: types, schemas, then the rest.
    """
    lines = [f"type {name}" for name in decls.types]
    lines += [f"schema {name}" for name in decls.schemas]
    lines += [f"table {name} : {schema}" for name, schema in decls.tables.items()]
    lines += [f"proj {name} : {m.source} -> {m.target}" for name, m in decls.projs.items()]
    lines += [f"pred {name} : {m.over}" for name, m in decls.preds.items()]
    lines += [f"expr {name} : {m.over} -> {m.base}" for name, m in decls.exprs.items()]
    for name, (params, result) in decls.functions.items():
        lines.append(f"function {name} : ({', '.join(str(p) for p in params)}) -> {result}")
    return lines


def print_rule(rule: RewriteRule) -> str:
    """
    Print a rule block preceded by its pragmas.
    """
    lines = []
    for pragma in ("category", "provenance", "expect", "fuel"):
        value = getattr(rule, pragma)
        if value is not None:
            lines.append(f"-- @{pragma} {value}")
    header = f"rule {rule.name}"
    if rule.context != EMPTY:
        header += f" context {rule.context}"
    lines.append(header)
    for premise in rule.premises:
        lines.append(f"  ASSUME {premise}")
    lines.append(f"  {print_query(rule.lhs)}")
    lines.append("equiv")
    lines.append(f"  {print_query(rule.rhs)}")
    lines.append("end")
    return "\n".join(lines)


def print_rule_file(decls: Declarations, rules) -> str:
    """
    Print declarations followed by rule blocks.
    """
    blocks = ["\n".join(print_declarations(decls))] if print_declarations(decls) else []
    blocks += [print_rule(rule) for rule in rules]
    return "\n\n".join(blocks) + "\n"
