"""
UniNomial Normalization

`normalize` rewrites a term into a sum of monomials and simplifies each
monomial to a fixpoint:

- sums and products distribute, sums over pairs split into sums over the
  components and sums move outward;
- pair projections of pairs reduce, equalities of pairs split, and an
  equality between a bound variable and a term without it eliminates the
  variable;
- equalities are closed under congruence and every class is replaced by its
  smallest member, including inside squashes, negations and aggregates;
- key and functional dependency premises add the equalities they imply;
- inside a squash coefficients drop to 1, duplicate factors and unused
  binders vanish and nested squashes are inlined;
- factors of a squash that do not mention its bound variables move out.

Every rewrite costs one unit of fuel.
"""

from __future__ import annotations
from collections import Counter
import itertools
import logging
import warnings
from ..error_handling import ArgumentTypeError, FuelExhaustedError
from ..core.schema import EmptySchema, Node
from ..denote import terms as tm
from ..denote.denote import Denoter
from .closure import congruence_rewrite, representatives
from .keys import factor_key, mono_key, term_order
from .normal_form import (
    Monomial,
    NegateFactor,
    NormAgg,
    NormalForm,
    SquashFactor,
    named_vars,
    rename,
    schema_of,
)

logger = logging.getLogger(__name__)

UNIT = Monomial(1)
_ZERO = "zero"
FREE_NAMES = ("g", "t")


class OutOfFuel(Exception):
    """
    Raised inside the normalizer when the fuel budget is spent.
    """


class Normalizer:
    """
    Stateful normalizer: owns the fuel counter and the fresh-name supply.

    Attributes
    ----------
    fuel : int|None
        Maximum number of rewrite steps, `None` for unlimited.

    steps : int
        Rewrite steps spent so far.

    premises : tuple[pysqlequiv.rules.Constraint]
        Key and functional dependency constraints that may be used.

    prefix : str
        First letters of fresh variable names.

    Methods
    -------
    normalize(term)
        Normal form of a closed term.

    normalize_sum(monomials, squash)
        Simplify a list of monomials, under a squash if `squash`.
    """

    def __init__(self, fuel: int | None = None, premises: tuple = (), prefix: str = "x") -> None:
        if fuel is not None and (not isinstance(fuel, int) or fuel <= 0):
            raise ValueError(f"fuel must be a positive integer, got {fuel!r}")
        self.fuel = fuel
        self.steps = 0
        self.premises = tuple(premises)
        self.keyed = {p.table_name for p in self.premises if p.kind == "key"}
        self.prefix = prefix
        self._names = itertools.count(1)
        self._denoter = Denoter()

    def tick(self, amount: int = 1) -> None:
        self.steps += amount
        if self.fuel is not None and self.steps > self.fuel:
            raise OutOfFuel()

    def fresh(self, schema) -> tm.NamedVar:
        return tm.NamedVar(f"{self.prefix}{next(self._names)}", schema)

    # ==============================
    # Conversion to monomials
    # ==============================

    def open(self, term: tm.UTerm) -> tuple[list, tm.UTerm]:
        """
        Strip leading lambdas, naming their variables `g`, `t`, `t2`, ...
        """
        free = []
        while isinstance(term, tm.Lam):
            position = len(free)
            name = FREE_NAMES[position] if position < len(FREE_NAMES) else f"t{position}"
            free.append(tm.NamedVar(name, term.schema))
            term = term.body
        return free, term

    def named_tuple(self, t: tm.TupleTerm, env: list) -> tm.TupleTerm:
        if isinstance(t, tm.VarRef):
            if not 0 <= t.index < len(env):
                raise ValueError(f"dangling variable index {t.index}")
            return env[len(env) - 1 - t.index]
        if isinstance(t, tm.AggApply):
            var = self.fresh(t.body.schema)
            body = self.normalize_sum(self.sop(t.body.body, env + [var]), squash=False)
            return NormAgg(t.name, var, NormalForm(tuple(body)), t.result)
        if isinstance(t, (tm.Fst, tm.Snd)):
            return type(t)(self.named_tuple(t.arg, env))
        if isinstance(t, tm.MkPair):
            return tm.MkPair(self.named_tuple(t.left, env), self.named_tuple(t.right, env))
        if isinstance(t, (tm.ProjApply, tm.ExprApply)):
            return type(t)(t.meta, self.named_tuple(t.arg, env))
        if isinstance(t, tm.FnApply):
            return tm.FnApply(t.name, tuple(self.named_tuple(a, env) for a in t.args), t.result)
        return t

    def sop(self, term: tm.UTerm, env: list) -> list[Monomial]:
        """
        Sum-of-products form of a term whose free variables are `env`.
        """
        self.tick()
        if isinstance(term, tm.Zero):
            return []
        if isinstance(term, tm.One):
            return [UNIT]
        if isinstance(term, tm.Plus):
            return self.sop(term.left, env) + self.sop(term.right, env)
        if isinstance(term, tm.Times):
            left = self.sop(term.left, env)
            if not left:
                return []
            right = self.sop(term.right, env)
            products = []
            for a in left:
                for b in right:
                    self.tick()
                    products.append(self._multiply(a, b))
            return products
        if isinstance(term, tm.Sigma):
            var = self.fresh(term.schema)
            return [
                Monomial(m.coeff, (var,) + m.binders, m.factors)
                for m in self.sop(term.body, env + [var])
            ]
        if isinstance(term, tm.Squash):
            return self._squash_of(self.normalize_sum(self.sop(term.arg, env), squash=True))
        if isinstance(term, tm.Negate):
            inner = self.normalize_sum(self.sop(term.arg, env), squash=True)
            if not inner:
                return [UNIT]
            if any(m.is_unit() for m in inner):
                return []
            return [Monomial(1, (), (NegateFactor(NormalForm(tuple(inner))),))]
        if isinstance(term, tm.RelAtom):
            return [Monomial(1, (), (tm.RelAtom(term.table, self.named_tuple(term.arg, env), term.schema),))]
        if isinstance(term, tm.EqAtom):
            atom = tm.EqAtom(self.named_tuple(term.left, env), self.named_tuple(term.right, env))
            return [Monomial(1, (), (atom,))]
        if isinstance(term, tm.PredAtom):
            return [Monomial(1, (), (tm.PredAtom(term.meta, self.named_tuple(term.arg, env)),))]
        raise ArgumentTypeError("term", term, tm.UTerm)

    def _squash_of(self, inner: list) -> list[Monomial]:
        if not inner:
            return []
        if any(m.is_unit() for m in inner):
            return [UNIT]
        return [Monomial(1, (), (SquashFactor(NormalForm(tuple(inner))),))]

    def _multiply(self, a: Monomial, b: Monomial) -> Monomial:
        b = self._freshen(b) if set(a.binders) & set(b.binders) else b
        return Monomial(a.coeff * b.coeff, a.binders + b.binders, a.factors + b.factors)

    def _freshen(self, m: Monomial) -> Monomial:
        if not m.binders:
            return m
        mapping = {b: self.fresh(b.schema) for b in m.binders}
        return Monomial(
            m.coeff,
            tuple(mapping[b] for b in m.binders),
            tuple(rename(f, mapping) for f in m.factors),
        )

    # ==============================
    # Sums
    # ==============================

    def normalize_sum(self, monomials, squash: bool) -> list[Monomial]:
        """
        Simplify every monomial and merge equal ones.

        Under a squash equal monomials collapse and a unit absorbs the sum;
        otherwise their coefficients add.
        """
        out = []
        for m in monomials:
            out.extend(self.simplify_monomial(m, squash))
        if squash and any(m.is_unit() for m in out):
            return [UNIT]
        merged: dict[str, Monomial] = {}
        for m in out:
            key = mono_key(m, with_coeff=False)
            if key in merged:
                if not squash:
                    old = merged[key]
                    merged[key] = Monomial(old.coeff + m.coeff, old.binders, old.factors)
            else:
                merged[key] = m
        return [merged[key] for key in sorted(merged)]

    def simplify_monomial(self, m: Monomial, squash: bool) -> list[Monomial]:
        """
        Rewrite one monomial to a fixpoint; the result may be empty (zero)
        or several monomials (a distributed squash).
        """
        work = [m]
        done = []
        while work:
            current = work.pop()
            self.tick()
            result = self._step(current, squash)
            if result is None:
                done.append(current)
            else:
                work.extend(result)
        return done

    # ==============================
    # Tuple terms
    # ==============================

    def simp_tuple(self, t: tm.TupleTerm) -> tm.TupleTerm:
        """
        Reduce pair projections of pairs and eta-contract pairs of projections.
        """
        if isinstance(t, (tm.Fst, tm.Snd)):
            arg = self.simp_tuple(t.arg)
            if isinstance(arg, tm.MkPair):
                result = arg.left if isinstance(t, tm.Fst) else arg.right
            elif isinstance(arg, tm.Const) and isinstance(arg.schema, Node):
                if isinstance(t, tm.Fst):
                    result = tm.Const(arg.value[0], arg.schema.left)
                else:
                    result = tm.Const(arg.value[1], arg.schema.right)
            else:
                result = type(t)(arg)
        elif isinstance(t, tm.MkPair):
            left, right = self.simp_tuple(t.left), self.simp_tuple(t.right)
            if isinstance(left, tm.Fst) and isinstance(right, tm.Snd) and left.arg == right.arg:
                result = left.arg
            else:
                result = tm.MkPair(left, right)
        elif isinstance(t, (tm.ProjApply, tm.ExprApply)):
            result = type(t)(t.meta, self.simp_tuple(t.arg))
        elif isinstance(t, tm.FnApply):
            result = tm.FnApply(t.name, tuple(self.simp_tuple(a) for a in t.args), t.result)
        else:
            result = t
        if not isinstance(result, tm.Unit) and isinstance(schema_of(result), EmptySchema):
            return tm.Unit()
        return result

    def _simp_atom(self, f: tm.UTerm) -> tm.UTerm:
        if isinstance(f, tm.RelAtom):
            return tm.RelAtom(f.table, self.simp_tuple(f.arg), f.schema)
        if isinstance(f, tm.EqAtom):
            return tm.EqAtom(self.simp_tuple(f.left), self.simp_tuple(f.right))
        if isinstance(f, tm.PredAtom):
            return tm.PredAtom(f.meta, self.simp_tuple(f.arg))
        return f

    def _split_eq(self, f: tm.EqAtom):
        left, right = f.left, f.right
        if left == right or isinstance(schema_of(left), EmptySchema):
            return []
        if isinstance(left, tm.Const) and isinstance(right, tm.Const):
            return [] if left.value == right.value else _ZERO
        if isinstance(left, tm.MkPair) or isinstance(right, tm.MkPair):
            return [
                tm.EqAtom(self.simp_tuple(tm.Fst(left)), self.simp_tuple(tm.Fst(right))),
                tm.EqAtom(self.simp_tuple(tm.Snd(left)), self.simp_tuple(tm.Snd(right))),
            ]
        return None

    # ==============================
    # Factors
    # ==============================

    def is_prop(self, f: tm.UTerm) -> bool:
        """
        Whether a factor is always 0 or 1.
        """
        if isinstance(f, tm.RelAtom):
            return f.table in self.keyed
        return True

    def refresh(self, f: tm.UTerm) -> tm.UTerm:
        """
        Re-normalize the normal forms nested in a factor after a substitution.
        """
        if isinstance(f, SquashFactor):
            return SquashFactor(NormalForm(tuple(self.normalize_sum(f.nf.monomials, squash=True))))
        if isinstance(f, NegateFactor):
            return NegateFactor(NormalForm(tuple(self.normalize_sum(f.nf.monomials, squash=True))))

        def fn(node, _depth):
            if isinstance(node, NormAgg):
                body = self.normalize_sum(node.body.monomials, squash=False)
                return NormAgg(node.name, node.var, NormalForm(tuple(body)), node.result)
            return None

        return tm.map_term(f, fn)

    def _substitute(self, m: Monomial, mapping: dict, binders: tuple, skip: int = -1) -> Monomial:
        factors = []
        for i, f in enumerate(m.factors):
            if i == skip:
                continue
            new = rename(f, mapping)
            factors.append(self.refresh(new) if new != f and _has_nested(new) else new)
        return Monomial(m.coeff, binders, tuple(factors))

    # ==============================
    # One rewrite step
    # ==============================

    def _step(self, m: Monomial, squash: bool):
        factors = tuple(self._simp_atom(f) for f in m.factors)
        if factors != m.factors:
            return [Monomial(m.coeff, m.binders, factors)]

        for b in m.binders:
            if isinstance(b.schema, Node):
                left, right = self.fresh(b.schema.left), self.fresh(b.schema.right)
                binders = _replace_binder(m.binders, b, (left, right))
                return [self._substitute(m, {b: tm.MkPair(left, right)}, binders)]
            if isinstance(b.schema, EmptySchema):
                return [self._substitute(m, {b: tm.Unit()}, _replace_binder(m.binders, b, ()))]

        for i, f in enumerate(factors):
            if isinstance(f, tm.EqAtom):
                split = self._split_eq(f)
                if split == _ZERO:
                    return []
                if split is not None:
                    return [Monomial(m.coeff, m.binders, factors[:i] + tuple(split) + factors[i + 1 :])]

        result = self._nested_laws(m, squash)
        if result is not None:
            return result

        if squash and m.coeff != 1:
            return [Monomial(1, m.binders, m.factors)]
        deduped = []
        for f in factors:
            if (squash or self.is_prop(f)) and f in deduped:
                continue
            deduped.append(f)
        if len(deduped) != len(factors):
            return [Monomial(m.coeff, m.binders, tuple(deduped))]

        result = self._one_point(m)
        if result is not None:
            return result

        if squash:
            used = set()
            for f in factors:
                used |= named_vars(f)
            kept = tuple(b for b in m.binders if b in used)
            if kept != m.binders:
                return [Monomial(m.coeff, kept, factors)]

        result = self._premise_step(m)
        if result is not None:
            return result

        closed = congruence_rewrite(factors, term_order)
        if Counter(closed) != Counter(factors):
            refreshed = tuple(
                self.refresh(f) if f not in factors and _has_nested(f) else f for f in closed
            )
            return [Monomial(m.coeff, m.binders, refreshed)]

        if not squash:
            result = self._hoist(m)
            if result is not None:
                return result

        ordered = tuple(sorted(factors, key=factor_key))
        if ordered != factors:
            return [Monomial(m.coeff, m.binders, ordered)]
        return None

    def _nested_laws(self, m: Monomial, squash: bool):
        factors = m.factors
        for i, f in enumerate(factors):
            rest = factors[:i] + factors[i + 1 :]
            if isinstance(f, SquashFactor):
                inner = f.nf.monomials
                if not inner:
                    return []
                if any(n.is_unit() for n in inner):
                    return [Monomial(m.coeff, m.binders, rest)]
                if squash:
                    out = []
                    for n in inner:
                        n = self._freshen(n)
                        out.append(Monomial(1, m.binders + n.binders, rest + n.factors))
                    return out
                if len(inner) == 1:
                    n = inner[0]
                    if not n.binders and n.coeff == 1 and all(self.is_prop(g) for g in n.factors):
                        return [Monomial(m.coeff, m.binders, rest + n.factors)]
            elif isinstance(f, NegateFactor):
                inner = f.nf.monomials
                if not inner:
                    return [Monomial(m.coeff, m.binders, rest)]
                if any(n.is_unit() for n in inner):
                    return []
                if len(inner) == 1 and not inner[0].binders and len(inner[0].factors) == 1:
                    only = inner[0].factors[0]
                    if isinstance(only, NegateFactor):
                        return [Monomial(m.coeff, m.binders, rest + (SquashFactor(only.nf),))]

        if not squash:
            squashes = [f for f in factors if isinstance(f, SquashFactor)]
            if len(squashes) > 1:
                others = tuple(f for f in factors if not isinstance(f, SquashFactor))
                product = [UNIT]
                for s in squashes:
                    product = [self._multiply(a, self._freshen(b)) for a in product for b in s.nf.monomials]
                    self.tick(len(product))
                squashed = self._squash_of(self.normalize_sum(product, squash=True))
                if not squashed:
                    return []
                return [Monomial(m.coeff, m.binders, others + squashed[0].factors)]
        return None

    def _one_point(self, m: Monomial):
        binders = set(m.binders)
        best = None
        for i, f in enumerate(m.factors):
            if not isinstance(f, tm.EqAtom):
                continue
            for var, other in ((f.left, f.right), (f.right, f.left)):
                if var in binders and var not in named_vars(other):
                    rank = m.binders.index(var)
                    if best is None or rank > best[0]:
                        best = (rank, i, var, other)
        if best is None:
            return None
        _, index, var, other = best
        remaining = tuple(b for b in m.binders if b != var)
        return [self._substitute(m, {var: other}, remaining, skip=index)]

    def _premise_step(self, m: Monomial):
        if not self.premises:
            return None
        eqs = [f for f in m.factors if isinstance(f, tm.EqAtom)]
        reps = representatives(eqs, term_order)

        def rep(t):
            t = self.simp_tuple(t)
            return reps.get(t, t)

        for premise in self.premises:
            atoms = [f for f in m.factors if isinstance(f, tm.RelAtom) and f.table == premise.table_name]
            for a, b in itertools.combinations(atoms, 2):
                if a.arg == b.arg:
                    continue
                det_a = rep(self._denoter.proj_term(premise.proj, None, a.arg))
                det_b = rep(self._denoter.proj_term(premise.proj, None, b.arg))
                if det_a != det_b:
                    continue
                if premise.kind == "key":
                    new = tm.EqAtom(a.arg, b.arg)
                    if rep(a.arg) == rep(b.arg):
                        continue
                else:
                    dep_a = self.simp_tuple(self._denoter.proj_term(premise.dependent, None, a.arg))
                    dep_b = self.simp_tuple(self._denoter.proj_term(premise.dependent, None, b.arg))
                    if rep(dep_a) == rep(dep_b):
                        continue
                    new = tm.EqAtom(dep_a, dep_b)
                logger.debug("premise %s adds %s", premise, new)
                return [Monomial(m.coeff, m.binders, m.factors + (new,))]
        return None

    def _hoist(self, m: Monomial):
        for i, f in enumerate(m.factors):
            if not isinstance(f, SquashFactor) or len(f.nf.monomials) != 1:
                continue
            inner = f.nf.monomials[0]
            bound = set(inner.binders)
            movable = [
                g for g in inner.factors if self.is_prop(g) and not named_vars(g) & bound
            ]
            if not movable:
                continue
            kept = tuple(g for g in inner.factors if g not in movable)
            rest = m.factors[:i] + m.factors[i + 1 :]
            squashed = self._squash_of(
                self.normalize_sum([Monomial(1, inner.binders, kept)], squash=True)
            )
            if not squashed:
                return []
            return [Monomial(m.coeff, m.binders, rest + tuple(movable) + squashed[0].factors)]
        return None

    # ==============================
    # Entry point
    # ==============================

    def normalize(self, term: tm.UTerm) -> NormalForm:
        """
        Normal form of a closed term. Leading lambdas become free variables.

        Raises
        ------
        OutOfFuel
            The fuel budget ran out.
        """
        free, body = self.open(term)
        monomials = self.normalize_sum(self.sop(body, free), squash=False)
        return NormalForm(tuple(monomials), tuple(free))


def _replace_binder(binders: tuple, old, new: tuple) -> tuple:
    index = binders.index(old)
    return binders[:index] + new + binders[index + 1 :]


def _has_nested(f: tm.UTerm) -> bool:
    return any(isinstance(node, (SquashFactor, NegateFactor, NormAgg)) for node in f.walk())


def normalize(
    term: tm.UTerm,
    fuel: int | None = None,
    premises: tuple = (),
    strict: bool = False,
    rule: str | None = None,
) -> NormalForm:
    """
    Normal form of a UniNomial term.

    Parameters
    ----------
    term : pysqlequiv.denote.UTerm
        Closed term, typically `denote_query(...)`.

    fuel : int, optional
        Rewrite step budget. Unlimited when omitted.

    premises : tuple[pysqlequiv.rules.Constraint], optional
        Key and functional dependency constraints to use.

    strict : bool, optional
        Raise instead of returning an incomplete normal form when the fuel
        runs out.

    rule : str, optional
        Rule name for messages.

    Returns
    -------
    NormalForm
        `complete` is `False` when the fuel ran out.

    Raises
    ------
    FuelExhaustedError
        Only when `strict` is set.
    """
    if not isinstance(term, tm.UTerm):
        raise ArgumentTypeError("term", term, tm.UTerm)
    normalizer = Normalizer(fuel, premises)
    try:
        return normalizer.normalize(term)
    except OutOfFuel:
        if strict:
            raise FuelExhaustedError(fuel, rule) from None
        where = f" in rule {rule}" if rule else ""
        warnings.warn(f"normalization ran out of fuel ({fuel} steps){where}", UserWarning)
        free, body = normalizer.open(term)
        return NormalForm((), tuple(free), complete=False, residual=body)


def normalize_nf(nf: NormalForm, fuel: int | None = None, premises: tuple = ()) -> NormalForm:
    """
    Re-normalize an existing normal form, e.g. under additional premises.
    """
    if not nf.complete:
        return nf
    normalizer = Normalizer(fuel, premises)
    return NormalForm(tuple(normalizer.normalize_sum(nf.monomials, squash=False)), nf.free)

