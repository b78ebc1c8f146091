"""
GROUP BY De-sugaring

`SELECT k, agg(v) FROM q GROUP BY k` becomes a correlated aggregate:

    DISTINCT SELECT k, EVAL(agg(SELECT v FROM q WHERE Var(Left.k) = Var(Right.k))) FROM q

The aggregate's subquery runs under the outer FROM tuple, so `Left` reads the
group representative and `Right` the tuple being aggregated.
"""

from __future__ import annotations
from ..error_handling import ArgumentTypeError, UnsupportedSugarError
from ..core import ast


def _is_path(p: ast.Proj) -> bool:
    if isinstance(p, (ast.Star, ast.Left, ast.Right, ast.ProjMeta)):
        return True
    if isinstance(p, ast.Compose):
        return _is_path(p.first) and _is_path(p.second)
    return False


def _key_paths(key: ast.Proj) -> list[ast.Proj]:
    # a pair of keys groups like the keys themselves
    if isinstance(key, ast.Pair):
        return _key_paths(key.left) + _key_paths(key.right)
    if not _is_path(key):
        raise UnsupportedSugarError(f"group-by key {key} is not a projection path or a pair of them")
    return [key]


def _is_tuple_of_paths(p: ast.Proj) -> bool:
    if isinstance(p, ast.Pair):
        return _is_tuple_of_paths(p.left) and _is_tuple_of_paths(p.right)
    return _is_path(p)


def _pair_all(projs: list[ast.Proj]) -> ast.Proj:
    result = projs[-1]
    for proj in reversed(projs[:-1]):
        result = ast.Pair(proj, result)
    return result


def desugar_groupby(q: ast.GroupBy) -> ast.Query:
    """
    Rewrite a GROUP BY query into the core language.

    Parameters
    ----------
    q : pysqlequiv.core.ast.GroupBy
        Sugar node with select items, key projections and the source query.

    Returns
    -------
    pysqlequiv.core.ast.Query
        `DISTINCT SELECT ... FROM source` with aggregates as EVAL projections.

    Raises
    ------
    UnsupportedSugarError
        Empty key list, a key that is neither a projection path nor a pair
        of them, or an item that is neither such a projection nor an
        aggregate. Pair keys are split into one key per component.
    """
    if not isinstance(q, ast.GroupBy):
        raise ArgumentTypeError("q", q, ast.GroupBy)
    if not q.keys:
        raise UnsupportedSugarError("GROUP BY needs at least one key")
    keys = [path for key in q.keys for path in _key_paths(key)]
    if not q.items:
        raise UnsupportedSugarError("empty select list")

    same_group = None
    for key in keys:
        eq = ast.Eq(
            ast.Var(ast.Compose(ast.Left(), key)),
            ast.Var(ast.Compose(ast.Right(), key)),
        )
        same_group = eq if same_group is None else ast.And(same_group, eq)

    projs = []
    for item in q.items:
        if isinstance(item, ast.AggItem):
            group = ast.Select(item.proj, ast.Where(q.source, same_group))
            projs.append(ast.Eval(ast.Agg(item.agg, group)))
        elif isinstance(item, ast.Proj) and _is_tuple_of_paths(item):
            projs.append(item)
        else:
            raise UnsupportedSugarError(f"select item {item} is neither a path nor an aggregate")
    return ast.Distinct(ast.Select(_pair_all(projs), q.source))
