"""
Differential Oracle

Evaluates both sides of a rule on small concrete instances. Schema
meta-variables range over schemas of bounded depth built from the base
types the rule mentions; relations range over bags with a bounded number of
distinct tuples and bounded multiplicities; projection meta-variables range
over the paths between their schemas; predicate, expression and function
meta-variables range over finite tables.

Instances are visited smallest first: the candidates of every component are
sorted by size and combinations are enumerated by increasing sum of
candidate indices. Schema instantiations are interleaved round-robin so a
budget cut still samples every instantiation.

The oracle refutes. A rule that survives it is corroborated, not proved.
"""

from __future__ import annotations
from dataclasses import dataclass, field
import itertools
import logging
import random
from typing import Iterator
import warnings
from ..error_handling import (
    ArgumentTypeError,
    EmptyAggregateError,
    EvaluationError,
    SqlEquivError,
)
from ..core import ast
from ..core.rule import CheckedRule
from ..core.schema import EMPTY, INT, BaseType, EmptySchema, Leaf, Node, Schema, abstract
from .bag import Bag
from .evaluator import Evaluator
from .instance import Instance
from .values import default_domain, enumerate_tuples, format_tuple, tuple_key

logger = logging.getLogger(__name__)

MODES = ("exhaustive", "random")

# larger families are cut down; an exhaustive run over a cut family is not exhaustive
MAX_TABLES = 16
MAX_SUBSET_BASE = 4


@dataclass(frozen=True)
class OracleConfig:
    """
    Bounds of the instance space.

    Attributes
    ----------
    depth : int
        Maximum depth of schemas substituted for schema meta-variables.

    domain : int
        Number of values of every base type.

    tuples : int
        Maximum number of distinct tuples per relation.

    mult : int
        Maximum multiplicity of a tuple.

    mode : str
        `"exhaustive"` or `"random"`.

    seed : int
        Seed of the random mode.

    budget : int
        Maximum number of instances examined.

    jobs : int
        Number of rules checked in parallel by the command line driver.
    """

    depth: int = 1
    domain: int = 2
    tuples: int = 2
    mult: int = 2
    mode: str = "exhaustive"
    seed: int = 0
    budget: int = 1000
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"OracleConfig 'mode' must be one of {MODES}, got '{self.mode}'")
        for name in ("depth", "tuples", "seed"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"OracleConfig '{name}' must be a non-negative integer, got {value!r}")
        for name in ("domain", "mult", "budget", "jobs"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"OracleConfig '{name}' must be a positive integer, got {value!r}")

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "OracleConfig",
            "depth": self.depth,
            "domain": self.domain,
            "tuples": self.tuples,
            "mult": self.mult,
            "mode": self.mode,
            "seed": self.seed,
            "budget": self.budget,
        }


@dataclass(frozen=True)
class CounterExample:
    """
    Instance on which the two sides of a rule differ.

    Attributes
    ----------
    rule : str
        Rule name.

    instance : Instance
        Relations and meta-variable interpretations.

    context : tuple|Value
        Context tuple both sides were evaluated under.

    lhs, rhs : Bag
        Results of the two sides.

    bindings : dict[str, Schema]
        Schemas substituted for schema meta-variables.
    """

    rule: str
    instance: Instance
    context: object
    lhs: Bag
    rhs: Bag
    bindings: dict = field(default_factory=dict)

    __hash__ = None

    def differing(self) -> list:
        """
        Tuples whose multiplicities differ, in canonical order.
        """
        support = set(self.lhs) | set(self.rhs)
        return sorted(
            (t for t in support if self.lhs.multiplicity(t) != self.rhs.multiplicity(t)),
            key=tuple_key,
        )

    def describe(self) -> str:
        """
        Replayable text: the instance block followed by both results.
        """
        lines = [self.instance.to_dsl()]
        if self.context != ():
            lines.append(f"context = {format_tuple(self.context)}")
        lines.append(f"lhs = {self.lhs}")
        lines.append(f"rhs = {self.rhs}")
        return "\n".join(lines)

    def __str__(self) -> str:
        return f"{self.rule}: lhs = {self.lhs}, rhs = {self.rhs}"

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "CounterExample",
            "rule": self.rule,
            "instance": self.instance.to_dsl(),
            "context": format_tuple(self.context),
            "bindings": {name: str(s) for name, s in sorted(self.bindings.items())},
            "lhs": self.lhs.__sqlequiv_json__(),
            "rhs": self.rhs.__sqlequiv_json__(),
        }


@dataclass(frozen=True)
class OracleOutcome:
    """
    Result of one oracle run.

    Attributes
    ----------
    counterexample : CounterExample|None
        First instance on which the sides differ.

    checked : int
        Instances on which both sides were compared.

    skipped : int
        Instances violating a premise or with an undefined aggregate.

    exhausted : bool
        Whether the whole bounded space was enumerated.
    """

    counterexample: CounterExample | None
    checked: int
    skipped: int
    exhausted: bool

    __hash__ = None

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "OracleOutcome",
            "counterexample": self.counterexample,
            "checked": self.checked,
            "skipped": self.skipped,
            "exhausted": self.exhausted,
        }


# ==============================
# Candidates
# ==============================


def rule_bases(checked: CheckedRule) -> list[BaseType]:
    """
    Base types mentioned by a rule's declarations and context; `int` if none.
    """
    decls = checked.declarations
    schemas = [checked.context] + list(decls.tables.values())
    for meta in decls.projs.values():
        schemas += [meta.source, meta.target]
    schemas += [meta.over for meta in decls.preds.values()]
    schemas += [meta.over for meta in decls.exprs.values()]
    bases = []
    for schema in schemas:
        if schema is not None:
            bases += schema.leaves()
    bases += [meta.base for meta in decls.exprs.values() if meta.base is not None]
    for params, result in decls.functions.values():
        bases += list(params) + [result]
    bases += [abstract(name) for name in decls.types]
    unique = sorted(set(bases), key=str)
    return unique or [INT]


def schemas_up_to(bases: list[BaseType], depth: int) -> list[Schema]:
    """
    Schemas of at most `depth` over `bases`, leaves first.
    """
    level = [Leaf(b) for b in bases] + [EMPTY]
    found = list(level)
    for _ in range(depth):
        level = [Node(a, b) for a in found for b in found]
        found += [s for s in level if s not in found]
    return found


def bag_candidates(schema: Schema, domains: dict, tuples: int, mult: int) -> list[Bag]:
    """
    Bags over `schema` with at most `tuples` distinct tuples of multiplicity
    at most `mult`, smallest first.
    """
    support = sorted(enumerate_tuples(schema, domains), key=tuple_key)
    bags = []
    for size in range(min(tuples, len(support)) + 1):
        for chosen in itertools.combinations(support, size):
            for counts in itertools.product(range(1, mult + 1), repeat=size):
                bags.append(Bag(dict(zip(chosen, counts))))
    bags.sort(key=lambda b: (len(b.counts), len(b)))
    return bags


def _paths(source: Schema, target: Schema, prefix: ast.Proj | None = None) -> list[ast.Proj]:
    here = prefix or ast.Star()
    found = [here] if source == target else []
    if isinstance(source, Node):
        for part, sub in ((ast.Left(), source.left), (ast.Right(), source.right)):
            step = part if prefix is None else ast.Compose(prefix, part)
            found += _paths(sub, target, step)
    return found


def proj_candidates(source: Schema, target: Schema, domains: dict) -> tuple[list, bool]:
    """
    Interpretations of a projection meta-variable: the paths from `source`
    to `target` and pairs of them, or function tables when there is no path.

    Returns
    -------
    tuple[list, bool]
        The candidates and whether they are all of them.
    """
    if isinstance(target, EmptySchema):
        return [ast.EmptyProj()], True
    found = _paths(source, target)
    complete = True
    if isinstance(target, Node):
        lefts, left_complete = proj_candidates(source, target.left, domains)
        rights, right_complete = proj_candidates(source, target.right, domains)
        pairs = [
            ast.Pair(a, b)
            for a in lefts
            for b in rights
            if isinstance(a, ast.Proj) and isinstance(b, ast.Proj)
        ]
        found += pairs
        if pairs:
            complete = left_complete and right_complete
    if found:
        return found, complete
    args = list(enumerate_tuples(source, domains))
    return table_candidates(args, tuple(enumerate_tuples(target, domains)))


def pred_candidates(schema: Schema, domains: dict) -> tuple[list[frozenset], bool]:
    """
    Sets of tuples a predicate meta-variable may hold on.

    Every subset when the support has at most `MAX_SUBSET_BASE` tuples, else
    the empty and full sets, singletons and their complements.

    Returns
    -------
    tuple[list[frozenset], bool]
        The candidates and whether they are all of them.
    """
    support = sorted(enumerate_tuples(schema, domains), key=tuple_key)
    if len(support) <= MAX_SUBSET_BASE:
        subsets = []
        for size in range(len(support) + 1):
            subsets += [frozenset(c) for c in itertools.combinations(support, size)]
        return subsets, True
    family = [frozenset(), frozenset(support)]
    family += [frozenset([t]) for t in support]
    family += [frozenset(support) - {t} for t in support]
    return family, False


def table_candidates(args: list, values: tuple, projections=()) -> tuple[list[dict], bool]:
    """
    Finite function tables from `args` to `values`: all of them when there
    are at most `MAX_TABLES`, else the constant ones and the given
    projection-like ones.

    Returns
    -------
    tuple[list[dict], bool]
        The candidates and whether they are all of them.
    """
    if len(values) ** len(args) <= MAX_TABLES:
        tables = [dict(zip(args, image)) for image in itertools.product(values, repeat=len(args))]
        return tables, True
    tables = [{arg: value for arg in args} for value in values]
    tables += [{arg: fn(arg) for arg in args} for fn in projections]
    return tables, False


def _leaf_readers(schema: Schema, base: BaseType, read=lambda t: t) -> list:
    if isinstance(schema, Leaf):
        return [read] if schema.base == base else []
    if isinstance(schema, Node):
        return _leaf_readers(schema.left, base, lambda t, r=read: r(t)[0]) + _leaf_readers(
            schema.right, base, lambda t, r=read: r(t)[1]
        )
    return []


# ==============================
# Instance spaces
# ==============================


def ranked(lengths: list[int]) -> Iterator[tuple]:
    """
    Every index vector below `lengths`, by increasing sum of indices.
    """
    if any(n == 0 for n in lengths):
        return
    for total in range(sum(n - 1 for n in lengths) + 1):
        yield from _compositions(total, list(lengths))


def _compositions(total: int, lengths: list[int]) -> Iterator[tuple]:
    if not lengths:
        if total == 0:
            yield ()
        return
    first, rest = lengths[0], lengths[1:]
    rest_max = sum(n - 1 for n in rest)
    for i in range(max(0, total - rest_max), min(first - 1, total) + 1):
        for tail in _compositions(total - i, rest):
            yield (i,) + tail


class InstanceSpace:
    """
    Bounded instances of one schema instantiation of a rule.

    Attributes
    ----------
    rule : CheckedRule
        The rule with schema meta-variables substituted.

    bindings : dict[str, Schema]
        The substitution.

    domains : dict[BaseType, tuple]
        Carrier of every base type.

    components : list[tuple[str, str, list]]
        `(kind, name, candidates)` per relation and meta-variable.

    truncated : list[str]
        Meta-variables whose candidates are only part of their interpretations.
    """

    def __init__(self, rule: CheckedRule, bindings: dict, cfg: OracleConfig, bases) -> None:
        self.rule = rule
        self.bindings = bindings
        self.domains = {base: default_domain(base, cfg.domain) for base in bases}
        decls = rule.declarations
        components = []
        self.truncated: list[str] = []

        def family(name, found):
            candidates, complete = found
            if not complete:
                self.truncated.append(name)
            return candidates

        for name, schema in sorted(decls.tables.items()):
            components.append(
                ("table", name, bag_candidates(schema, self.domains, cfg.tuples, cfg.mult))
            )
        for name, meta in sorted(decls.projs.items()):
            components.append(
                ("proj", name, family(name, proj_candidates(meta.source, meta.target, self.domains)))
            )
        for name, meta in sorted(decls.preds.items()):
            components.append(("pred", name, family(name, pred_candidates(meta.over, self.domains))))
        for name, meta in sorted(decls.exprs.items()):
            args = list(enumerate_tuples(meta.over, self.domains))
            readers = _leaf_readers(meta.over, meta.base)
            components.append(
                ("expr", name, family(name, table_candidates(args, self.domains[meta.base], readers)))
            )
        for name, (params, result) in sorted(decls.functions.items()):
            args = list(itertools.product(*(self.domains[p] for p in params)))
            readers = [lambda a, i=i: a[i] for i, p in enumerate(params) if p == result]
            components.append(
                ("function", name, family(name, table_candidates(args, self.domains[result], readers)))
            )
        self.components = components
        self.contexts = list(enumerate_tuples(rule.context, self.domains))

    def lengths(self) -> list[int]:
        return [len(candidates) for _, _, candidates in self.components]

    def instance(self, indices: tuple) -> Instance:
        inst = Instance(schemas=dict(self.bindings), domains=dict(self.domains))
        slots = {
            "table": inst.relations,
            "proj": inst.projs,
            "pred": inst.preds,
            "expr": inst.exprs,
            "function": inst.functions,
        }
        for (kind, name, candidates), i in zip(self.components, indices):
            slots[kind][name] = candidates[i]
        return inst

    def ordered(self) -> Iterator[Instance]:
        for indices in ranked(self.lengths()):
            yield self.instance(indices)

    def sample(self, rng: random.Random) -> Instance:
        return self.instance(tuple(rng.randrange(n) for n in self.lengths()))


def instance_spaces(checked: CheckedRule, cfg: OracleConfig) -> list[InstanceSpace]:
    """
    One space per schema instantiation, smallest schemas first.
    """
    bases = rule_bases(checked)
    metas = list(checked.declarations.schemas)
    options = schemas_up_to(bases, cfg.depth)
    spaces = []
    for indices in ranked([len(options)] * len(metas)):
        bindings = {name: options[i] for name, i in zip(metas, indices)}
        try:
            rule = checked.instantiate(bindings)
        except SqlEquivError as err:
            logger.debug("skipping instantiation %s of %s: %s", bindings, checked.name, err)
            continue
        spaces.append(InstanceSpace(rule, bindings, cfg, bases))
    return spaces


def round_robin(spaces: list[InstanceSpace]) -> Iterator[tuple[InstanceSpace, Instance]]:
    """
    Instances of every space, one space at a time in turn.
    """
    streams = [(space, space.ordered()) for space in spaces]
    while streams:
        alive = []
        for space, stream in streams:
            inst = next(stream, None)
            if inst is not None:
                alive.append((space, stream))
                yield space, inst
        streams = alive


# ==============================
# Running
# ==============================


def _compare(space: InstanceSpace, inst: Instance) -> CounterExample | None:
    rule = space.rule
    evaluator = Evaluator(inst)
    for g in space.contexts:
        lhs = evaluator.query(rule.lhs, g)
        rhs = evaluator.query(rule.rhs, g)
        if lhs != rhs:
            return CounterExample(rule.name, inst, g, lhs, rhs, dict(space.bindings))
    return None


def _premises_hold(rule: CheckedRule, inst: Instance) -> bool:
    return all(p.holds(inst) for p in rule.premises)


def run_oracle(checked: CheckedRule, cfg: OracleConfig | None = None) -> OracleOutcome:
    """
    Search the bounded instance space of a rule for a counterexample.

    Parameters
    ----------
    checked : CheckedRule
        Well-formed rule.

    cfg : OracleConfig, optional
        Bounds; defaults to `OracleConfig()`.

    Returns
    -------
    OracleOutcome
        The first counterexample in enumeration order, if any, and counts.
        In exhaustive mode a run that stops at the budget before covering
        the space, or that only tried part of the interpretations of a
        meta-variable, is not `exhausted` and warns.
    """
    if not isinstance(checked, CheckedRule):
        raise ArgumentTypeError("checked", checked, CheckedRule)
    cfg = cfg or OracleConfig()
    if not isinstance(cfg, OracleConfig):
        raise ArgumentTypeError("cfg", cfg, OracleConfig)
    spaces = instance_spaces(checked, cfg)
    if cfg.mode == "random":
        rng = random.Random(cfg.seed)
        stream = (
            (space, space.sample(rng))
            for space in (rng.choice(spaces) for _ in range(cfg.budget))
        ) if spaces else iter(())
    else:
        stream = round_robin(spaces)
    checked_count = skipped = 0
    exhausted = cfg.mode == "exhaustive"
    for space, inst in stream:
        if checked_count + skipped >= cfg.budget:
            exhausted = False
            break
        try:
            if not _premises_hold(space.rule, inst):
                skipped += 1
                continue
            found = _compare(space, inst)
        except (EmptyAggregateError, EvaluationError) as err:
            logger.debug("skipping instance of %s: %s", checked.name, err)
            skipped += 1
            continue
        checked_count += 1
        if found is not None:
            logger.debug("counterexample for %s after %d instances", checked.name, checked_count)
            return OracleOutcome(found, checked_count, skipped, False)
    logger.debug(
        "oracle on %s: %d checked, %d skipped by premises or empty aggregates",
        checked.name,
        checked_count,
        skipped,
    )
    if cfg.mode == "exhaustive" and not exhausted:
        warnings.warn(
            f"oracle on rule {checked.name} stopped at its budget of {cfg.budget} instances "
            + "before covering the bounded space",
            UserWarning,
        )
    truncated = sorted({name for space in spaces for name in space.truncated})
    if cfg.mode == "exhaustive" and exhausted and truncated:
        exhausted = False
        warnings.warn(
            f"oracle on rule {checked.name} only tried part of the interpretations of "
            + f"{', '.join(truncated)}",
            UserWarning,
        )
    return OracleOutcome(None, checked_count, skipped, exhausted)


def differential_test(checked: CheckedRule, cfg: OracleConfig | None = None) -> CounterExample | None:
    """
    First counterexample to a rule within the bounds of `cfg`, or `None`.

    Parameters
    ----------
    checked : CheckedRule
        Well-formed rule.

    cfg : OracleConfig, optional
        Bounds; defaults to `OracleConfig()`.

    Returns
    -------
    CounterExample|None
    """
    return run_oracle(checked, cfg).counterexample
