"""
Alpha-Canonical Keys

Two normal forms are equal up to renaming of bound variables,
commutativity and associativity iff their keys are equal. Bound variables
are renamed to positional placeholders `#d.i` (depth `d`, position `i`);
every binder order of a monomial is tried and the smallest key wins.
"""

from __future__ import annotations
from functools import lru_cache
import itertools
from ..denote import terms as tm
from .closure import congruence_rewrite
from .normal_form import Monomial, NegateFactor, NormAgg, NormalForm, SquashFactor, named_vars, rename

MAX_PERMUTED_BINDERS = 6


@lru_cache(maxsize=None)
def term_key(t: tm.TupleTerm, depth: int = 0) -> str:
    """
    Key of a tuple term. Named variables contribute their names.
    """
    if isinstance(t, tm.NamedVar):
        return t.name
    if isinstance(t, tm.VarRef):
        return f"^{t.index}"
    if isinstance(t, tm.Fst):
        return f"{term_key(t.arg, depth)}.1"
    if isinstance(t, tm.Snd):
        return f"{term_key(t.arg, depth)}.2"
    if isinstance(t, tm.MkPair):
        return f"({term_key(t.left, depth)},{term_key(t.right, depth)})"
    if isinstance(t, tm.Unit):
        return "()"
    if isinstance(t, tm.Const):
        return f"'{t.value}'"
    if isinstance(t, tm.ProjApply):
        return f"{t.meta.name}[{term_key(t.arg, depth)}]"
    if isinstance(t, tm.ExprApply):
        return f"{t.meta.name}<{term_key(t.arg, depth)}>"
    if isinstance(t, tm.FnApply):
        return f"{t.name}({','.join(term_key(a, depth) for a in t.args)})"
    if isinstance(t, NormAgg):
        return f"{t.name}{{{nf_key(t.body, (t.var,), depth + 1)}}}"
    if isinstance(t, tm.AggApply):
        return f"{t.name}{{{t.body}}}"
    raise TypeError(f"no key for {type(t).__name__}")


def term_order(t: tm.TupleTerm) -> tuple:
    """
    Order used to pick class representatives: smaller terms first.
    """
    return (t.size(), term_key(t))


@lru_cache(maxsize=None)
def factor_key(f: tm.UTerm, depth: int = 0) -> str:
    """
    Key of a factor. Equalities are unordered.
    """
    if isinstance(f, tm.RelAtom):
        return f"{f.table}[{term_key(f.arg, depth)}]"
    if isinstance(f, tm.EqAtom):
        left, right = sorted((term_key(f.left, depth), term_key(f.right, depth)))
        return f"[{left}={right}]"
    if isinstance(f, tm.PredAtom):
        return f"{f.meta.name}?[{term_key(f.arg, depth)}]"
    if isinstance(f, SquashFactor):
        return f"‖{nf_key(f.nf, (), depth + 1)}‖"
    if isinstance(f, NegateFactor):
        return f"¬({nf_key(f.nf, (), depth + 1)})"
    raise TypeError(f"no key for {type(f).__name__}")


def _is_trivial(f: tm.UTerm) -> bool:
    return isinstance(f, tm.EqAtom) and f.left == f.right


def _factor_keys(factors, depth: int) -> tuple:
    keys = []
    props = set()
    for f in factors:
        if _is_trivial(f):
            continue
        key = factor_key(f, depth)
        if isinstance(f, tm.RelAtom):
            keys.append(key)
        elif key not in props:
            props.add(key)
            keys.append(key)
    return tuple(sorted(keys))


def _binder_orders(m: Monomial):
    if len(m.binders) <= MAX_PERMUTED_BINDERS:
        return itertools.permutations(m.binders)
    return [tuple(sorted(m.binders, key=lambda b: _binder_signature(b, m)))]


def _binder_signature(binder: tm.NamedVar, m: Monomial) -> tuple:
    others = {b: tm.NamedVar("*", b.schema) for b in m.binders if b != binder}
    others[binder] = tm.NamedVar("?", binder.schema)
    mentions = [
        factor_key(rename(f, others))
        for f in m.factors
        if binder in named_vars(f)
    ]
    return (str(binder.schema), tuple(sorted(mentions)))


def mono_key(m: Monomial, depth: int = 0, with_coeff: bool = True) -> str:
    """
    Key of a monomial, minimal over binder orders.
    """
    best = None
    for order in _binder_orders(m):
        mapping = {b: tm.NamedVar(f"#{depth}.{i}", b.schema) for i, b in enumerate(order)}
        factors = congruence_rewrite(tuple(rename(f, mapping) for f in m.factors), term_order)
        schemas = ",".join(str(b.schema) for b in order)
        key = f"Σ[{schemas}]" + "·".join(_factor_keys(factors, depth))
        if best is None or key < best:
            best = key
    if best is None:
        best = "Σ[]" + "·".join(_factor_keys(m.factors, depth))
    return f"{m.coeff}*{best}" if with_coeff else best


def nf_key(nf: NormalForm, bound: tuple = (), depth: int = 0) -> str:
    """
    Key of a normal form. `bound` variables are renamed positionally first.
    """
    if not nf.complete:
        return f"<{nf.residual!r}>"
    if bound:
        mapping = {v: tm.NamedVar(f"#{depth}.v{i}", v.schema) for i, v in enumerate(bound)}
        nf = rename(nf, mapping)
    counts: dict[str, int] = {}
    for m in nf.monomials:
        key = mono_key(m, depth, with_coeff=False)
        counts[key] = counts.get(key, 0) + m.coeff
    free = ",".join(f"{v.name}:{v.schema}" for v in nf.free)
    return f"λ[{free}]" + " + ".join(f"{c}*{k}" for k, c in sorted(counts.items()))


def ac_equal(a: NormalForm, b: NormalForm) -> bool:
    """
    Whether two normal forms are equal up to alpha-renaming and the
    commutative semiring laws.

    Incomplete normal forms are never equal to anything.
    """
    if not (a.complete and b.complete):
        return False
    return nf_key(a) == nf_key(b)
