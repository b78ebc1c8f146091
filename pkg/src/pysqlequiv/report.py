"""
Check Reports

One entry per rule. The text rendering is derived from the same fields as
the JSON one. Wall times are left out unless asked for, so two runs
with the same settings give byte-identical reports.
"""

from __future__ import annotations
from collections import Counter
from dataclasses import dataclass, field
import json
from . import __version__
from .interp.oracle import CounterExample, OracleOutcome
from .prover.trace import ProofTrace, Proved, Refuted, Unknown, Verdict
from .util.json_encoder import SqlEquivJsonEncoder

VERDICTS = ("proved", "refuted", "corroborated", "unknown")

# expectation -> verdicts that satisfy it; None is a rule without @expect
ACCEPTED = {
    None: ("proved", "corroborated"),
    "proved": ("proved",),
    "refuted": ("refuted",),
    "corroborated": ("proved", "corroborated"),
    "unknown": ("unknown", "corroborated"),
}

# the oracle alone never proves
ACCEPTED_ORACLE_ONLY = {
    None: ("corroborated",),
    "proved": ("corroborated",),
    "refuted": ("refuted",),
    "corroborated": ("corroborated",),
    "unknown": ("unknown", "corroborated"),
}


def verdict_label(verdict: Verdict) -> str:
    """
    Report label of a prover verdict.
    """
    if isinstance(verdict, Unknown) and verdict.corroborated:
        return "corroborated"
    return verdict.kind


def outcome_label(outcome: OracleOutcome) -> str:
    """
    Report label of an oracle-only run.
    """
    if outcome.counterexample is not None:
        return "refuted"
    return "corroborated" if outcome.checked > 0 else "unknown"


@dataclass
class ReportEntry:
    """
    Result for one rule.

    Attributes
    ----------
    name : str
        Rule name.

    category : str|None
        `@category` pragma.

    verdict : str
        One of `VERDICTS`.

    expect : str|None
        `@expect` pragma.

    time : float|None
        Wall time in seconds, None unless timings were asked for.

    trace : ProofTrace|None
        Proof of a proved rule.

    counterexample : CounterExample|None
        Instance of a refuted rule.

    oracle : OracleOutcome|None
        Differential test run, if any.

    detail : str
        Why the prover gave up, for unknown and corroborated entries.

    notes : list[str]
        Warnings raised while checking the rule.

    oracle_only : bool
        Whether the verdict comes from the oracle alone.

    contradicted : bool
        Set when the oracle found a counterexample to a proved rule.

    discrepancies : list[pysqlequiv.interp.Discrepancy]
        Tuples on which denotation and evaluation disagree, from `--coherence`.
    """

    name: str
    category: str | None
    verdict: str
    expect: str | None = None
    time: float | None = None
    trace: ProofTrace | None = None
    counterexample: CounterExample | None = None
    oracle: OracleOutcome | None = None
    detail: str = ""
    notes: list = field(default_factory=list)
    oracle_only: bool = False
    contradicted: bool = False
    discrepancies: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"ReportEntry 'verdict' must be one of {VERDICTS}, got '{self.verdict}'")

    @classmethod
    def from_verdict(cls, checked, verdict: Verdict, time: float | None = None, notes=()) -> ReportEntry:
        """
        Entry of a rule checked by `prove_equiv`.
        """
        rule = checked.rule
        entry = cls(checked.name, rule.category, verdict_label(verdict), rule.expect, time, notes=list(notes))
        if isinstance(verdict, Proved):
            entry.trace = verdict.trace
        elif isinstance(verdict, Refuted):
            entry.counterexample = verdict.counterexample
        elif isinstance(verdict, Unknown):
            entry.oracle = verdict.oracle
            entry.detail = f"{verdict.reason}: {verdict.detail}" if verdict.detail else verdict.reason
        return entry

    @classmethod
    def from_outcome(
        cls, checked, outcome: OracleOutcome, time: float | None = None, notes=()
    ) -> ReportEntry:
        """
        Entry of a rule checked by the oracle alone.
        """
        rule = checked.rule
        return cls(
            checked.name,
            rule.category,
            outcome_label(outcome),
            rule.expect,
            time,
            counterexample=outcome.counterexample,
            oracle=outcome,
            notes=list(notes),
            oracle_only=True,
        )

    @property
    def matched(self) -> bool:
        """
        Whether the verdict satisfies the rule's expectation.
        """
        if self.contradicted or self.discrepancies:
            return False
        accepted = ACCEPTED_ORACLE_ONLY if self.oracle_only else ACCEPTED
        return self.verdict in accepted[self.expect]

    def __str__(self) -> str:
        status = "ok" if self.matched else "MISMATCH"
        expect = self.expect or "default"
        timing = "" if self.time is None else f", {self.time:.3f}s"
        return f"{self.name}: {self.verdict} (expect {expect}, {status}{timing})"

    def render_text(self, trace: bool = False) -> str:
        lines = [str(self)]
        if self.category:
            lines.append(f"  category: {self.category}")
        if self.oracle is not None:
            lines.append(
                f"  oracle: {self.oracle.checked} instances checked, {self.oracle.skipped} skipped"
                + ("" if self.oracle.exhausted else ", budget reached")
            )
        if self.detail and self.verdict != "proved":
            lines.append(f"  detail: {self.detail}")
        if self.counterexample is not None:
            lines.append("  counterexample:")
            lines += ["    " + line for line in self.counterexample.describe().splitlines()]
        if trace and self.trace is not None:
            lines.append("  trace:")
            lines += ["    " + str(step) for step in self.trace]
        lines += [f"  discrepancy: {d}" for d in self.discrepancies]
        lines += [f"  note: {note}" for note in self.notes]
        return "\n".join(lines)

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "ReportEntry",
            "name": self.name,
            "category": self.category,
            "verdict": self.verdict,
            "expect": self.expect,
            "matched": self.matched,
            "contradicted": self.contradicted,
            "time": None if self.time is None else round(self.time, 6),
            "trace": self.trace,
            "counterexample": self.counterexample,
            "oracle": self.oracle,
            "detail": self.detail,
            "notes": list(self.notes),
            "discrepancies": list(self.discrepancies),
        }


@dataclass
class Report:
    """
    Entries of one command run, in input order.

    Methods
    -------
    summary()
        Number of entries per verdict, plus mismatches.

    exit_code()
        0 when every entry matches its expectation, 1 otherwise.

    render_text(trace=False)
        Human-readable report.

    to_json()
        Machine-readable report.
    """

    command: str
    entries: list = field(default_factory=list)
    version: str = __version__

    def __len__(self) -> int:
        return len(self.entries)

    def summary(self) -> dict[str, int]:
        counts = Counter(entry.verdict for entry in self.entries)
        result = {verdict: counts.get(verdict, 0) for verdict in VERDICTS}
        result["total"] = len(self.entries)
        result["mismatched"] = sum(1 for entry in self.entries if not entry.matched)
        return result

    def exit_code(self) -> int:
        return 0 if all(entry.matched for entry in self.entries) else 1

    def __str__(self) -> str:
        summary = self.summary()
        counts = ", ".join(f"{summary[v]} {v}" for v in VERDICTS)
        return f"{summary['total']} rules: {counts}; {summary['mismatched']} mismatched"

    def render_text(self, trace: bool = False) -> str:
        blocks = [f"pysqlequiv {self.version} {self.command}"]
        blocks += [entry.render_text(trace) for entry in self.entries]
        blocks.append(str(self))
        return "\n".join(blocks) + "\n"

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "Report",
            "version": self.version,
            "command": self.command,
            "summary": self.summary(),
            "entries": self.entries,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self, cls=SqlEquivJsonEncoder, indent=indent) + "\n"
