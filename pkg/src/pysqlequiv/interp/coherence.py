"""
Denotation Coherence

For every instance the oracle would visit, the value of a query's
denotation at `(g, t)` must equal the multiplicity of `t` in the query's
result under `g`. Sums in the denotation range over the active domain of
the evaluation, so values produced by aggregates are enumerated too.
"""

from __future__ import annotations
from dataclasses import dataclass, replace
import logging
from ..error_handling import ArgumentTypeError, EmptyAggregateError, EvaluationError
from ..core.rule import CheckedRule
from ..denote.denote import denote_query
from .evaluator import Evaluator, eval_uterm
from .instance import Instance
from .oracle import OracleConfig, instance_spaces, round_robin
from .values import Value, enumerate_tuples, format_tuple, tuple_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Discrepancy:
    """
    A tuple whose denoted multiplicity differs from the evaluated one.
    """

    rule: str
    side: str
    instance: Instance
    context: object
    tuple: object
    expected: int
    actual: int

    __hash__ = None

    def __str__(self) -> str:
        return (
            f"{self.rule} ({self.side}): multiplicity of {format_tuple(self.tuple)} "
            + f"is {self.expected} by evaluation and {self.actual} by denotation"
        )

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "Discrepancy",
            "rule": self.rule,
            "side": self.side,
            "instance": self.instance.to_dsl(),
            "context": format_tuple(self.context),
            "tuple": format_tuple(self.tuple),
            "expected": self.expected,
            "actual": self.actual,
        }


class _Total(dict):
    """
    Finite table answering `default` outside its entries.
    """

    def __init__(self, entries: dict, default) -> None:
        super().__init__(entries)
        self.default = default

    def __missing__(self, key):
        return self.default


def _total(table: dict):
    if not isinstance(table, dict) or not table:
        return table
    return _Total(table, table[min(table, key=tuple_key)])


def widen(inst: Instance, seen: set) -> Instance:
    """
    Copy of `inst` whose domains also hold the observed values and whose
    finite tables are total.
    """
    domains = {base: list(values) for base, values in inst.domains.items()}
    for value in seen:
        if isinstance(value, Value):
            carrier = domains.setdefault(value.base, [])
            if value not in carrier:
                carrier.append(value)
    return replace(
        inst,
        domains={base: tuple(sorted(v, key=tuple_key)) for base, v in domains.items()},
        projs={name: _total(t) for name, t in inst.projs.items()},
        exprs={name: _total(t) for name, t in inst.exprs.items()},
        functions={name: _total(t) for name, t in inst.functions.items()},
    )


def check_coherence(checked: CheckedRule, cfg: OracleConfig | None = None) -> list[Discrepancy]:
    """
    Compare denotation and evaluation of both sides of a rule.

    Parameters
    ----------
    checked : CheckedRule
        Well-formed rule.

    cfg : OracleConfig, optional
        Bounds and budget of the instances visited, in oracle order.

    Returns
    -------
    list[Discrepancy]
        Empty when the two semantics agree everywhere visited.
    """
    if not isinstance(checked, CheckedRule):
        raise ArgumentTypeError("checked", checked, CheckedRule)
    cfg = cfg or OracleConfig()
    found = []
    denotations = {}
    visited = 0
    for space, inst in round_robin(instance_spaces(checked, cfg)):
        if visited >= cfg.budget:
            break
        visited += 1
        rule = space.rule
        for side, query in (("lhs", rule.lhs), ("rhs", rule.rhs)):
            key = (space, side)
            if key not in denotations:
                denotations[key] = denote_query(rule.context, query, rule.catalog)
            term = denotations[key]
            for g in space.contexts:
                evaluator = Evaluator(inst, observe=True)
                try:
                    bag = evaluator.query(query, g)
                except (EmptyAggregateError, EvaluationError):
                    continue
                evaluator.seen.update(_values(g))
                wide = widen(inst, evaluator.seen)
                for t in enumerate_tuples(rule.schema, wide.domains):
                    try:
                        actual = eval_uterm(wide, [], term, g, t)
                    except EmptyAggregateError:
                        logger.debug("empty aggregate in the denotation of %s at %s", rule.name, t)
                        continue
                    expected = bag.multiplicity(t)
                    if actual != expected:
                        found.append(Discrepancy(rule.name, side, inst, g, t, expected, actual))
    logger.debug("coherence of %s: %d instances, %d discrepancies", checked.name, visited, len(found))
    return found


def _values(t):
    if isinstance(t, Value):
        yield t
    elif t != ():
        yield from _values(t[0])
        yield from _values(t[1])
