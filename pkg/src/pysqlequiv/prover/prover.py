"""
Equivalence Prover

`prove_equiv` tries, in order:

1. the conjunctive query decision procedure, when the rule has no premises
   and both sides are conjunctive queries of the same semantics;
2. normalization of both denotations, premises installed, and comparison up
   to the commutative semiring laws;
3. removal of squash factors implied by the rest of their monomial, followed
   by a second comparison;
4. monomial matching in which monomials with the same relation atoms are
   shown equal by proving that their remaining 0/1-valued factors imply
   each other, using the witness search.

When no strategy applies the differential oracle looks for a
counterexample. A `Proved` verdict is only ever produced by steps 1 to 4.
"""

from __future__ import annotations
import logging
import warnings
from ..error_handling import ArgumentTypeError, EmptyAggregateError, EvaluationError
from ..core.rule import CheckedRule
from ..core.schema import EmptySchema
from ..cq import canonical_database, describe, find_homomorphism, find_isomorphism, to_cq
from ..denote.denote import denote_query
from ..interp.evaluator import Evaluator
from ..interp.oracle import CounterExample, OracleConfig, run_oracle
from ..interp.values import Value, tuple_key
from ..uninomial.keys import ac_equal, mono_key
from ..uninomial.normal_form import Monomial, NormalForm, SquashFactor
from ..uninomial.normalize import Normalizer, OutOfFuel
from ..util.config import ProverBudget
from .search import Search
from .trace import ProofStep, ProofTrace, Proved, Refuted, Unknown, Verdict

logger = logging.getLogger(__name__)


# ==============================
# Conjunctive queries
# ==============================


def _with_domains(inst):
    domains: dict = {}

    def collect(t):
        if isinstance(t, Value):
            domains.setdefault(t.base, set()).add(t)
        elif isinstance(t, tuple):
            for part in t:
                collect(part)

    for bag in inst.relations.values():
        for t in bag:
            collect(t)
    for table in inst.projs.values():
        if isinstance(table, dict):
            for arg, value in table.items():
                collect(arg)
                collect(value)
    inst.domains = {base: tuple(sorted(v, key=tuple_key)) for base, v in domains.items()}
    return inst


def _canonical_counterexample(checked: CheckedRule, frozen, other) -> CounterExample | None:
    inst = _with_domains(canonical_database(frozen, [other]))
    evaluator = Evaluator(inst)
    try:
        lhs = evaluator.query(checked.lhs, ())
        rhs = evaluator.query(checked.rhs, ())
    except (EmptyAggregateError, EvaluationError):
        return None
    if lhs == rhs:
        return None
    return CounterExample(checked.name, inst, (), lhs, rhs, dict(inst.schemas))


def _one_line(text: str) -> str:
    return "; ".join(line for line in text.splitlines() if line)


def cq_verdict(checked: CheckedRule) -> Verdict | None:
    """
    Decide a rule whose sides are conjunctive queries.

    Returns
    -------
    Verdict|None
        `Proved` with a `lemma(cq)` step holding the homomorphisms,
        `Refuted` with the canonical database of the side that is not
        contained in the other, or `None` when the procedure does not apply
        or cannot decide.
    """
    if checked.premises or not isinstance(checked.context, EmptySchema):
        return None
    a = to_cq(checked.lhs, checked.catalog)
    b = to_cq(checked.rhs, checked.catalog)
    if a is None or b is None or not (a.is_safe() and b.is_safe()):
        return None
    if a.distinct and b.distinct:
        forward = find_homomorphism(a, b)
        backward = find_homomorphism(b, a)
        if forward is not None and backward is not None:
            detail = (
                f"lhs -> rhs: {_one_line(describe(forward, a, b))}; "
                + f"rhs -> lhs: {_one_line(describe(backward, b, a))}"
            )
            step = ProofStep("lemma", detail, name="cq", data=(forward, backward))
            return Proved(ProofTrace((step,)))
        # no homomorphism from a to b: b is not contained in a
        frozen, other = (b, a) if forward is None else (a, b)
        counterexample = _canonical_counterexample(checked, frozen, other)
        return Refuted(counterexample) if counterexample is not None else None
    if not a.distinct and not b.distinct:
        iso = find_isomorphism(a, b)
        if iso is not None:
            detail = f"isomorphic bodies: {_one_line(describe(iso, a, b))}"
            return Proved(ProofTrace((ProofStep("lemma", detail, name="cq", data=(iso,)),)))
    return None


# ==============================
# Symbolic pipeline
# ==============================


class _Attempt:
    """
    State of one symbolic proof attempt; `replay` makes the search follow
    recorded choices.
    """

    def __init__(self, checked: CheckedRule, budget: ProverBudget, replay=None) -> None:
        self.checked = checked
        self.normalizer = Normalizer(budget.normalize_fuel, checked.premises)
        self.search = Search(checked.premises, budget.search_fuel, replay=replay)
        self.steps = self.search.steps

    def normalize(self) -> tuple[NormalForm, NormalForm]:
        rule = self.checked
        lhs = self.normalizer.normalize(denote_query(rule.context, rule.lhs, rule.catalog))
        rhs = self.normalizer.normalize(denote_query(rule.context, rule.rhs, rule.catalog))
        self.search.roots = lhs.free
        self.steps.append(ProofStep("normalize", f"lhs = {lhs}"))
        self.steps.append(ProofStep("normalize", f"rhs = {rhs}"))
        return lhs, rhs

    def split(self, m: Monomial) -> tuple[str, tuple] | None:
        """
        Key of the factors of a binder-free monomial that are not 0/1-valued,
        with its coefficient, and the 0/1-valued factors. `None` for a
        monomial with binders.
        """
        if m.binders:
            return None
        props = tuple(f for f in m.factors if self.normalizer.is_prop(f))
        rest = tuple(f for f in m.factors if not self.normalizer.is_prop(f))
        return mono_key(Monomial(m.coeff, (), rest)), props

    def eliminate(self, nf: NormalForm, side: str) -> NormalForm:
        """
        Drop every squash factor implied by the other factors of its monomial.
        """
        monomials = []
        changed = False
        for i, m in enumerate(nf.monomials):
            factors = list(m.factors)
            j = 0
            while j < len(factors):
                f = factors[j]
                if isinstance(f, SquashFactor) and len(factors) > 1:
                    rest = tuple(factors[:j] + factors[j + 1 :])
                    step = ProofStep(
                        "lemma", f"{side} monomial {i}: rest implies {f}", name="hpropProd", data=(side, i, j)
                    )
                    if self.search.choose(step, self.search.prove, rest, f.nf):
                        factors = list(rest)
                        changed = True
                        continue
                j += 1
            monomials.append(Monomial(m.coeff, m.binders, tuple(factors)))
        if not changed:
            return nf
        return NormalForm(tuple(self.normalizer.normalize_sum(monomials, squash=False)), nf.free)

    def match(self, lhs: NormalForm, rhs: NormalForm) -> bool:
        """
        Pair the monomials of both sides: equal keys first, then monomials
        with the same relation atoms by bi-implication of their 0/1-valued
        factors.
        """
        if len(lhs.monomials) != len(rhs.monomials):
            return False
        remaining = list(range(len(rhs.monomials)))
        unmatched = []
        for i, m in enumerate(lhs.monomials):
            key = mono_key(m)
            for j in remaining:
                if mono_key(rhs.monomials[j]) == key:
                    remaining.remove(j)
                    self.steps.append(ProofStep("acMatch", f"lhs monomial {i} = rhs monomial {j}"))
                    break
            else:
                unmatched.append(i)
        return self._pair(unmatched, remaining, lhs, rhs)

    def _pair(self, left: list, right: list, lhs: NormalForm, rhs: NormalForm) -> bool:
        if not left:
            return True
        i = left[0]
        m_split = self.split(lhs.monomials[i])
        if m_split is None:
            return False
        for j in right:
            n_split = self.split(rhs.monomials[j])
            if n_split is None or n_split[0] != m_split[0]:
                continue
            step = ProofStep("biimplSplit", f"lhs monomial {i} iff rhs monomial {j}", data=(i, j))
            rest = [r for r in right if r != j]
            if self.search.choose(step, self._both, m_split[1], n_split[1], left[1:], rest, lhs, rhs):
                return True
        return False

    def _both(self, m_props, n_props, left, right, lhs, rhs) -> bool:
        a = NormalForm((Monomial(1, (), m_props),), lhs.free)
        b = NormalForm((Monomial(1, (), n_props),), rhs.free)
        return self.search.biimpl(a, b) and self._pair(left, right, lhs, rhs)

    def run(self) -> Verdict:
        name = self.checked.name
        try:
            lhs, rhs = self.normalize()
        except OutOfFuel:
            warnings.warn(
                f"normalization ran out of fuel ({self.normalizer.fuel} steps) in rule {name}",
                UserWarning,
            )
            return Unknown("fuel", "normalization ran out of fuel")
        if ac_equal(lhs, rhs):
            self.steps.append(ProofStep("acMatch", "normal forms are equal"))
            return Proved(ProofTrace(self.steps))
        try:
            logger.debug("%s: eliminating implied squashes", name)
            lhs = self.eliminate(lhs, "lhs")
            rhs = self.eliminate(rhs, "rhs")
            if ac_equal(lhs, rhs):
                self.steps.append(ProofStep("acMatch", "normal forms are equal"))
                return Proved(ProofTrace(self.steps))
            logger.debug("%s: matching monomials", name)
            if self.match(lhs, rhs):
                return Proved(ProofTrace(self.steps))
        except OutOfFuel:
            logger.debug("%s: out of fuel after %d search steps", name, self.search.spent)
            return Unknown("fuel", "witness search ran out of fuel")
        return Unknown("fragment", f"no proof found: lhs = {lhs}, rhs = {rhs}")


# ==============================
# Entry points
# ==============================


def _check_rule(checked) -> None:
    if not isinstance(checked, CheckedRule):
        raise ArgumentTypeError("checked", checked, CheckedRule)


def _budget(checked: CheckedRule, budget: ProverBudget | None) -> ProverBudget:
    budget = budget or ProverBudget()
    if not isinstance(budget, ProverBudget):
        raise ArgumentTypeError("budget", budget, ProverBudget)
    return budget.with_fuel(checked.rule.fuel)


def prove_equiv(
    checked: CheckedRule,
    budget: ProverBudget | None = None,
    *,
    use_cq: bool = True,
    refute: bool = True,
    oracle_cfg: OracleConfig | None = None,
) -> Verdict:
    """
    Prove, refute or give up on a rule.

    Parameters
    ----------
    checked : CheckedRule
        Well-formed rule; its premises are used as assumptions.

    budget : ProverBudget, optional
        Fuel of the attempt. A rule's `@fuel` pragma overrides the total.

    use_cq : bool, optional
        Try the conjunctive query decision procedure first.

    refute : bool, optional
        Run the differential oracle when no proof is found.

    oracle_cfg : OracleConfig, optional
        Bounds of that oracle run.

    Returns
    -------
    Verdict
        `Proved`, `Refuted` or `Unknown`; failures inside the prover become
        `Unknown`.
    """
    _check_rule(checked)
    budget = _budget(checked, budget)
    verdict = None
    if use_cq:
        verdict = cq_verdict(checked)
        if verdict is not None:
            logger.debug("%s: decided as conjunctive queries", checked.name)
    if verdict is None:
        verdict = _Attempt(checked, budget).run()
    if isinstance(verdict, Unknown) and refute:
        logger.debug("%s: %s, running the oracle", checked.name, verdict.detail)
        outcome = run_oracle(checked, oracle_cfg)
        if outcome.counterexample is not None:
            verdict = Refuted(outcome.counterexample)
        else:
            verdict = Unknown(verdict.reason, verdict.detail, outcome)
    logger.info("%s: %s", checked.name, verdict.kind)
    return verdict


def prove_biimpl(
    lhs: NormalForm, rhs: NormalForm, budget: ProverBudget | None = None, premises: tuple = ()
) -> ProofTrace | None:
    """
    Prove that two squash-valued normal forms imply each other.

    Parameters
    ----------
    lhs, rhs : NormalForm
        Normal forms over the same free variables whose values are 0 or 1.

    budget : ProverBudget, optional
        Its search share bounds the search.

    premises : tuple[pysqlequiv.rules.Constraint], optional
        Constraints the saturation may use.

    Returns
    -------
    ProofTrace|None
        `None` when either direction fails or the budget runs out.
    """
    for arg_name, arg in (("lhs", lhs), ("rhs", rhs)):
        if not isinstance(arg, NormalForm):
            raise ArgumentTypeError(arg_name, arg, NormalForm)
    budget = budget or ProverBudget()
    search = Search(premises, budget.search_fuel, roots=lhs.free)
    if ac_equal(lhs, rhs):
        return ProofTrace((ProofStep("acMatch", "normal forms are equal"),))
    try:
        if search.biimpl(lhs, rhs):
            return ProofTrace(search.steps)
    except OutOfFuel:
        logger.debug("bi-implication search ran out of fuel")
    return None


def prove_with_premises(checked: CheckedRule, budget: ProverBudget | None = None, **kwargs) -> Verdict:
    """
    `prove_equiv` for a rule with key and functional dependency premises.

    The premises become equalities available to normalization and to the
    hypothesis saturation of the witness search; the conjunctive query
    procedure, which ignores constraints, is skipped. Without premises this
    is `prove_equiv`.
    """
    _check_rule(checked)
    for premise in checked.premises:
        if getattr(premise, "kind", None) not in ("key", "fd"):
            raise ValueError(f"premise {premise!r} of rule {checked.name} is not a key or fd constraint")
    return prove_equiv(checked, budget, **kwargs)


def replay_trace(checked: CheckedRule, trace: ProofTrace, budget: ProverBudget | None = None) -> Verdict:
    """
    Re-derive a proof from a recorded trace.

    Normalization and matching are rerun; every choice the search made
    (witnesses, dropped squashes, monomial pairings, contradictions) is
    taken from the trace instead of being searched for.

    Returns
    -------
    Verdict
        `Proved` with the re-derived trace, or `Unknown("fragment")` when
        the trace does not fit the rule.
    """
    _check_rule(checked)
    if not isinstance(trace, ProofTrace):
        raise ArgumentTypeError("trace", trace, ProofTrace)
    budget = _budget(checked, budget)
    if any(step.label == "lemma(cq)" for step in trace):
        verdict = cq_verdict(checked)
        if isinstance(verdict, Proved):
            return verdict
        return Unknown("fragment", "recorded conjunctive query proof does not apply")
    verdict = _Attempt(checked, budget, replay=trace.choices()).run()
    if isinstance(verdict, Proved):
        return verdict
    return Unknown("fragment", "recorded trace does not replay")
