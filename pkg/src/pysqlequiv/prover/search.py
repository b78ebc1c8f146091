"""
Entailment Search

Decides, soundly but incompletely, whether a normal form is nonzero
whenever some hypotheses are. Hypotheses are saturated by normalizing them
under a squash: nested squashes split into cases, equalities close under
congruence and premises add the equalities they imply. A goal is shown by
picking one of its monomials and instantiating its bound variables so that
every factor is a hypothesis, follows from the equalities or holds
recursively. Hypotheses that contradict one of their negations prove
anything.

Witnesses for bound variables come from matching goal atoms against
hypothesis atoms, from equalities that fix a variable, and otherwise from
the terms the hypotheses mention closed under pair projections, smallest
first.
"""

from __future__ import annotations
from collections import deque
import itertools
import logging
from typing import Callable, Iterator
from ..error_handling import ArgumentTypeError
from ..core.schema import Node
from ..denote import terms as tm
from ..uninomial.closure import representatives
from ..uninomial.keys import term_key, term_order
from ..uninomial.normal_form import (
    Monomial,
    NegateFactor,
    NormAgg,
    NormalForm,
    SquashFactor,
    named_vars,
    rename,
    schema_of,
)
from ..uninomial.normalize import Normalizer, OutOfFuel
from .trace import ProofStep

logger = logging.getLogger(__name__)

MAX_DEPTH = 6
MAX_CANDIDATES = 32
MAX_ROUNDS = 16
PROJECTION_DEPTH = 2
DEFAULT_FUEL = 3000

FALSE = NormalForm()
ATOMS = (tm.RelAtom, tm.EqAtom, tm.PredAtom)


def _schema(t: tm.TupleTerm):
    try:
        return schema_of(t)
    except (ValueError, ArgumentTypeError):
        return None


def _tuple_subterms(t: tm.Term) -> Iterator[tm.TupleTerm]:
    if isinstance(t, tm.TupleTerm):
        yield t
    if isinstance(t, NormAgg):
        return
    for child in t.children():
        yield from _tuple_subterms(child)


def _has_nested(f: tm.UTerm) -> bool:
    return any(isinstance(node, (SquashFactor, NegateFactor, NormAgg)) for node in f.walk())


def _invertible(pattern: tm.TupleTerm, unbound: set) -> bool:
    if isinstance(pattern, tm.NamedVar):
        return True
    if isinstance(pattern, tm.MkPair):
        return _invertible(pattern.left, unbound) and _invertible(pattern.right, unbound)
    return not named_vars(pattern) & unbound


def describe_assignment(index: int, assignment: dict) -> str:
    pairs = ", ".join(f"{var.name} := {value}" for var, value in assignment.items())
    return f"monomial {index}: {pairs}" if pairs else f"monomial {index}"


# ==============================
# Saturated hypotheses
# ==============================


class Facts:
    """
    Saturated hypotheses of one case.

    Attributes
    ----------
    factors : tuple
        Hypotheses in normal form.

    mapping : dict
        Member of an equality class to its representative.

    negations : list[NegateFactor]
        Negated hypotheses.
    """

    def __init__(self, factors: tuple, simp: Callable) -> None:
        self.factors = tuple(factors)
        self.simp = simp
        eqs = [f for f in self.factors if isinstance(f, tm.EqAtom)]
        self.mapping = representatives(eqs, term_order)
        self.atoms: dict = {}
        for f in self.factors:
            if isinstance(f, (tm.RelAtom, tm.PredAtom)):
                arg = self.canon(f.arg)
                self.atoms.setdefault(_atom_key(f), {})[term_key(arg)] = arg
        self.negations = [f for f in self.factors if isinstance(f, NegateFactor)]

    def canon(self, t: tm.TupleTerm) -> tm.TupleTerm:
        """
        Representative of the class of `t`.
        """
        for _ in range(MAX_ROUNDS):
            new = self.simp(rename(t, self.mapping))
            if new == t:
                break
            t = new
        return t

    def same(self, a: tm.TupleTerm, b: tm.TupleTerm) -> bool:
        return term_key(self.canon(a)) == term_key(self.canon(b))

    def args(self, f: tm.UTerm) -> list:
        """
        Arguments of the hypothesis atoms with the same table or predicate as `f`.
        """
        return list(self.atoms.get(_atom_key(f), {}).values())

    def holds(self, f: tm.UTerm) -> bool:
        if isinstance(f, tm.EqAtom):
            return self.same(f.left, f.right)
        return term_key(self.canon(f.arg)) in self.atoms.get(_atom_key(f), {})

    def candidates(self, schema, roots=()) -> list:
        """
        Terms of `schema` the hypotheses mention, closed under pair
        projections, smallest first.
        """
        pool: dict = {}

        def add(t, depth):
            t = self.canon(t)
            key = term_key(t)
            if key in pool:
                return
            pool[key] = t
            if depth < PROJECTION_DEPTH and isinstance(_schema(t), Node):
                add(tm.Fst(t), depth + 1)
                add(tm.Snd(t), depth + 1)

        for var in roots:
            add(var, 0)
        for f in self.factors:
            if isinstance(f, ATOMS):
                for sub in _tuple_subterms(f):
                    add(sub, 0)
        found = [t for t in pool.values() if _schema(t) == schema]
        return sorted(found, key=term_order)[:MAX_CANDIDATES]


def _atom_key(f: tm.UTerm) -> tuple:
    if isinstance(f, tm.RelAtom):
        return ("rel", f.table)
    return ("pred", f.meta.name)


# ==============================
# Search
# ==============================


class Search:
    """
    Backtracking entailment search that records a proof trace.

    Attributes
    ----------
    premises : tuple[pysqlequiv.rules.Constraint]
        Key and functional dependency constraints of the rule.

    fuel : int|None
        Budget shared by search steps and the normalizations they trigger.

    spent : int
        Fuel used so far.

    roots : tuple[NamedVar]
        Free variables of the terms being compared.

    steps : list[ProofStep]
        Trace of the current proof attempt; failed branches are removed.

    Methods
    -------
    prove(hyps, goal, depth)
        Whether `goal` is nonzero whenever every hypothesis factor is.

    implies(hyp, goal)
        Whether `goal` is nonzero whenever `hyp` is.

    biimpl(lhs, rhs)
        Both implications between two squash-valued normal forms.
    """

    def __init__(self, premises: tuple = (), fuel: int | None = None, roots=(), replay=None) -> None:
        self.premises = tuple(premises)
        self.fuel = fuel
        self.spent = 0
        self.roots = tuple(roots)
        self.steps: list[ProofStep] = []
        self.replay = deque(replay) if replay is not None else None
        self._simp = Normalizer(None, self.premises).simp_tuple

    def tick(self, amount: int = 1) -> None:
        self.spent += amount
        if self.fuel is not None and self.spent > self.fuel:
            raise OutOfFuel()

    def _normalizer(self, prefix: str) -> Normalizer:
        if self.fuel is None:
            return Normalizer(None, self.premises, prefix=prefix)
        remaining = self.fuel - self.spent
        if remaining <= 0:
            raise OutOfFuel()
        return Normalizer(remaining, self.premises, prefix=prefix)

    def normalize_sum(self, monomials, squash: bool, prefix: str) -> list[Monomial]:
        """
        `Normalizer.normalize_sum` charged to the search fuel.

        Fresh names start over for every call, so the names of a
        successful branch do not depend on the branches tried before it.
        """
        normalizer = self._normalizer(prefix)
        try:
            return normalizer.normalize_sum(monomials, squash)
        finally:
            self.spent += normalizer.steps

    def _refresh(self, factors: list, prefix: str) -> list:
        if not any(_has_nested(f) for f in factors):
            return factors
        normalizer = self._normalizer(prefix)
        try:
            return [normalizer.refresh(f) if _has_nested(f) else f for f in factors]
        finally:
            self.spent += normalizer.steps

    def choose(self, step: ProofStep, attempt: Callable, *args) -> bool:
        """
        Record `step` and run `attempt`; drop the record if it fails.

        When replaying, only the recorded choice is attempted.
        """
        if self.replay is not None:
            if not self.replay or not _same_choice(self.replay[0], step):
                return False
            self.replay.popleft()
        mark = len(self.steps)
        self.steps.append(step)
        if attempt(*args):
            return True
        del self.steps[mark:]
        return False

    # ==============================
    # Proving
    # ==============================

    def prove(self, hyps, goal: NormalForm, depth: int = 0) -> bool:
        """
        Whether `goal` is nonzero whenever every factor of `hyps` is.

        Variables free in `hyps` are treated as arbitrary constants.
        """
        self.tick()
        if depth > MAX_DEPTH:
            return False
        if any(m.is_unit() for m in goal.monomials):
            return True
        cases = self.normalize_sum([Monomial(1, (), tuple(hyps))], True, f"h{depth}_")
        # no case left means the hypotheses are contradictory
        return all(self._prove_case(case, goal, depth) for case in cases)

    def _prove_case(self, case: Monomial, goal: NormalForm, depth: int) -> bool:
        facts = Facts(case.factors, self._simp)
        if self.replay is not None:
            upcoming = self.replay[0] if self.replay else None
            if upcoming is not None and upcoming.kind == "sigmaWitness":
                index, assignment = upcoming.data
                if index >= len(goal.monomials):
                    return False
                return self.choose(
                    upcoming, self._holds_all, goal.monomials[index], assignment, facts, depth
                )
        else:
            for index, m in enumerate(goal.monomials):
                for assignment in self._assignments(m, facts):
                    self.tick()
                    step = ProofStep(
                        "sigmaWitness", describe_assignment(index, assignment), data=(index, assignment)
                    )
                    if self.choose(step, self._holds_all, m, assignment, facts, depth):
                        return True
        for index, negation in enumerate(facts.negations):
            rest = tuple(f for f in facts.factors if f is not negation)
            step = ProofStep(
                "lemma", f"hypotheses contradict {negation}", name="exFalso", data=index
            )
            if self.choose(step, self.prove, rest, negation.nf, depth + 1):
                return True
        return False

    def _holds_all(self, m: Monomial, assignment: dict, facts: Facts, depth: int) -> bool:
        factors = self._refresh([rename(f, assignment) for f in m.factors], f"h{depth}r_")
        for f in factors:
            if not isinstance(f, ATOMS):
                continue
            if not facts.holds(f):
                return False
            if isinstance(f, tm.EqAtom) and f.left != f.right:
                self.steps.append(ProofStep("eqRewrite", f"{f.left} = {f.right}"))
        for f in factors:
            if isinstance(f, SquashFactor) and not self.prove(facts.factors, f.nf, depth + 1):
                return False
        for f in factors:
            if isinstance(f, NegateFactor):
                for n in f.nf.monomials:
                    if not self.prove(facts.factors + n.factors, FALSE, depth + 1):
                        return False
        return True

    # ==============================
    # Witnesses
    # ==============================

    def _assignments(self, m: Monomial, facts: Facts) -> Iterator[dict]:
        used = set()
        for f in m.factors:
            used |= named_vars(f)
        wanted = [b for b in m.binders if b in used]
        yield from self._bind(list(m.factors), {}, wanted, facts)

    def _bind(self, todo: list, assignment: dict, wanted: list, facts: Facts) -> Iterator[dict]:
        unbound = [b for b in wanted if b not in assignment]
        if not unbound:
            yield dict(assignment)
            return
        free = set(unbound)
        # atoms first: a goal atom can only hold through a hypothesis atom
        for i, f in enumerate(todo):
            if not isinstance(f, (tm.RelAtom, tm.PredAtom)):
                continue
            if not named_vars(f.arg) & free or not _invertible(f.arg, free):
                continue
            rest = todo[:i] + todo[i + 1 :]
            for arg in facts.args(f):
                self.tick()
                extended = self._match(f.arg, arg, assignment, free, facts)
                if extended is not None:
                    yield from self._bind(rest, extended, wanted, facts)
            return
        for i, f in enumerate(todo):
            if not isinstance(f, tm.EqAtom):
                continue
            for var, other in ((f.left, f.right), (f.right, f.left)):
                if var in free and not named_vars(other) & free:
                    value = facts.canon(rename(other, assignment))
                    if _schema(value) != var.schema:
                        continue
                    rest = todo[:i] + todo[i + 1 :]
                    yield from self._bind(rest, {**assignment, var: value}, wanted, facts)
                    return
        pools = [facts.candidates(b.schema, self.roots) for b in unbound]
        for values in itertools.product(*pools):
            yield {**assignment, **dict(zip(unbound, values))}

    def _match(self, pattern, value, assignment: dict, free: set, facts: Facts):
        open_vars = free - assignment.keys()
        if not named_vars(pattern) & open_vars:
            return assignment if facts.same(rename(pattern, assignment), value) else None
        if isinstance(pattern, tm.NamedVar):
            if _schema(value) != pattern.schema:
                return None
            return {**assignment, pattern: value}
        if isinstance(value, tm.MkPair):
            left, right = value.left, value.right
        else:
            left, right = facts.canon(tm.Fst(value)), facts.canon(tm.Snd(value))
        first = self._match(pattern.left, left, assignment, free, facts)
        if first is None:
            return None
        return self._match(pattern.right, right, first, free, facts)

    # ==============================
    # Entry points
    # ==============================

    def implies(self, hyp: NormalForm, goal: NormalForm, depth: int = 0) -> bool:
        """
        Whether `goal` is nonzero whenever `hyp` is: every monomial of
        `hyp`, with its bound variables as constants, must prove `goal`.
        """
        return all(self.prove(m.factors, goal, depth) for m in hyp.monomials)

    def biimpl(self, lhs: NormalForm, rhs: NormalForm) -> bool:
        """
        Both implications between two normal forms that are always 0 or 1.
        """
        self.steps.append(ProofStep("biimplSplit", "lhs implies rhs"))
        if not self.implies(lhs, rhs):
            return False
        self.steps.append(ProofStep("biimplSplit", "rhs implies lhs"))
        return self.implies(rhs, lhs)


def _same_choice(recorded: ProofStep, step: ProofStep) -> bool:
    return (
        recorded.kind == step.kind and recorded.name == step.name and recorded.data == step.data
    )


def entails(hyp: tm.UTerm, goal: tm.UTerm, premises: tuple = (), fuel: int = DEFAULT_FUEL) -> bool:
    """
    Whether the closed term `goal` is nonzero wherever `hyp` is.

    Parameters
    ----------
    hyp, goal : pysqlequiv.denote.UTerm
        Closed terms under the same leading lambdas.

    premises : tuple[pysqlequiv.rules.Constraint], optional
        Constraints the search may use.

    fuel : int, optional
        Budget for normalizing both terms and for the search.

    Returns
    -------
    bool
        `False` also when the budget runs out.
    """
    for arg_name, arg in (("hyp", hyp), ("goal", goal)):
        if not isinstance(arg, tm.UTerm):
            raise ArgumentTypeError(arg_name, arg, tm.UTerm)
    normalizer = Normalizer(fuel, premises)
    try:
        hyp_nf = normalizer.normalize(hyp)
        goal_nf = normalizer.normalize(goal)
        return Search(premises, fuel, roots=hyp_nf.free).implies(hyp_nf, goal_nf)
    except OutOfFuel:
        logger.debug("entailment search ran out of fuel after %d steps", fuel)
        return False
