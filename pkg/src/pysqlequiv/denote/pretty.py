"""
Term Printer

Renders terms in `λ g t. ...` notation: the outer two lambdas bind `g` and
`t`, sums bind `t1`, `t2`, ... by depth.
"""

from __future__ import annotations
from ..error_handling import ArgumentTypeError
from . import terms as tm


def _binder_name(names: list[str], top: bool) -> str:
    if top and len(names) < 2:
        return ("g", "t")[len(names)]
    taken = sum(1 for name in names if name.startswith("t") and name != "t")
    return f"t{taken + 1}"


def _tuple(term: tm.TupleTerm, names: list[str]) -> str:
    if isinstance(term, tm.VarRef):
        position = len(names) - 1 - term.index
        return names[position] if 0 <= position < len(names) else f"#{term.index}"
    if isinstance(term, tm.NamedVar):
        return term.name
    if isinstance(term, tm.Fst):
        return f"{_tuple(term.arg, names)}.1"
    if isinstance(term, tm.Snd):
        return f"{_tuple(term.arg, names)}.2"
    if isinstance(term, tm.MkPair):
        return f"({_tuple(term.left, names)}, {_tuple(term.right, names)})"
    if isinstance(term, tm.Unit):
        return "()"
    if isinstance(term, tm.Const):
        return str(term.value)
    if isinstance(term, tm.ProjApply):
        return f"{term.meta.name} {_tuple(term.arg, names)}"
    if isinstance(term, tm.FnApply):
        return f"{term.name}({', '.join(_tuple(a, names) for a in term.args)})"
    if isinstance(term, tm.ExprApply):
        return f"{term.meta.name} {_tuple(term.arg, names)}"
    if isinstance(term, tm.AggApply):
        return f"{term.name}({_uterm(term.body, names, False)})"
    if type(term).__str__ is not tm.Term.__str__:
        return str(term)
    raise ArgumentTypeError("term", term, tm.TupleTerm)


def _factor(term: tm.UTerm, names: list[str]) -> str:
    text = _uterm(term, names, False)
    if isinstance(term, (tm.Plus, tm.Sigma, tm.Lam)):
        return f"({text})"
    return text


def _uterm(term: tm.UTerm, names: list[str], top: bool) -> str:
    if isinstance(term, tm.Zero):
        return "0"
    if isinstance(term, tm.One):
        return "1"
    if isinstance(term, tm.Plus):
        return f"{_uterm(term.left, names, False)} + {_uterm(term.right, names, False)}"
    if isinstance(term, tm.Times):
        return f"{_factor(term.left, names)} × {_factor(term.right, names)}"
    if isinstance(term, tm.Squash):
        return f"‖{_uterm(term.arg, names, False)}‖"
    if isinstance(term, tm.Negate):
        return f"¬({_uterm(term.arg, names, False)})"
    if isinstance(term, tm.Sigma):
        name = _binder_name(names, False)
        return f"Σ {name}. {_uterm(term.body, names + [name], False)}"
    if isinstance(term, tm.Lam):
        bound = []
        while isinstance(term, tm.Lam):
            name = _binder_name(names, top)
            names = names + [name]
            bound.append(name)
            term = term.body
        return f"λ {' '.join(bound)}. {_uterm(term, names, False)}"
    if isinstance(term, tm.RelAtom):
        return f"{term.table} {_tuple(term.arg, names)}"
    if isinstance(term, tm.EqAtom):
        return f"({_tuple(term.left, names)} = {_tuple(term.right, names)})"
    if isinstance(term, tm.PredAtom):
        return f"{term.meta.name} {_tuple(term.arg, names)}"
    if type(term).__str__ is not tm.Term.__str__:
        return str(term)
    raise ArgumentTypeError("term", term, tm.UTerm)


def print_term(term: tm.Term, names: list[str] | None = None) -> str:
    """
    Render a term.

    Parameters
    ----------
    term : pysqlequiv.denote.Term
        Tuple term or UniNomial term.

    names : list[str], optional
        Names of the binders enclosing `term`, outermost first.

    Returns
    -------
    str
    """
    names = list(names or [])
    if isinstance(term, tm.TupleTerm):
        return _tuple(term, names)
    return _uterm(term, names, not names)
