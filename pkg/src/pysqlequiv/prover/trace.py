"""
Proof Traces and Verdicts
"""

from __future__ import annotations
from dataclasses import dataclass, field
from ..interp.oracle import CounterExample, OracleOutcome

STEP_KINDS = ("normalize", "acMatch", "biimplSplit", "sigmaWitness", "eqRewrite", "lemma")

# lemma steps that record a choice made by the search
CHOICE_LEMMAS = ("hpropProd", "exFalso")

UNKNOWN_REASONS = ("fuel", "fragment")


@dataclass(frozen=True)
class ProofStep:
    """
    One step of a proof.

    Attributes
    ----------
    kind : str
        One of `STEP_KINDS`.

    detail : str
        Human-readable description.

    name : str|None
        Lemma name for `lemma` steps.

    data : object
        Machine-readable payload: witness assignments, chosen indices,
        homomorphisms. Steps carrying a choice are replayed from it.
    """

    kind: str
    detail: str = ""
    name: str | None = None
    data: object = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in STEP_KINDS:
            raise ValueError(f"unknown proof step kind '{self.kind}', expected one of {STEP_KINDS}")
        if (self.kind == "lemma") != (self.name is not None):
            raise ValueError("exactly the lemma steps carry a lemma name")

    @property
    def label(self) -> str:
        return f"lemma({self.name})" if self.kind == "lemma" else self.kind

    def is_choice(self) -> bool:
        """
        Whether replay must follow this step instead of searching.
        """
        if self.kind == "sigmaWitness":
            return True
        if self.kind == "biimplSplit":
            return self.data is not None
        return self.kind == "lemma" and self.name in CHOICE_LEMMAS

    def __str__(self) -> str:
        return f"{self.label}: {self.detail}" if self.detail else self.label

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "ProofStep",
            "kind": self.label,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ProofTrace:
    """
    Ordered proof steps, one per line when printed.
    """

    steps: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def kinds(self) -> list[str]:
        """
        Step labels in order, e.g. `["normalize", "lemma(cq)"]`.
        """
        return [step.label for step in self.steps]

    def choices(self) -> list[ProofStep]:
        return [step for step in self.steps if step.is_choice()]

    def __str__(self) -> str:
        return "\n".join(str(step) for step in self.steps)

    def __sqlequiv_json__(self) -> list:
        return [step.__sqlequiv_json__() for step in self.steps]


# ==============================
# Verdicts
# ==============================


class Verdict:
    """
    Base class of prover verdicts.
    """

    kind = ""


@dataclass(frozen=True)
class Proved(Verdict):
    """
    The two sides are equal on every instance.
    """

    trace: ProofTrace
    kind = "proved"

    def __sqlequiv_json__(self) -> dict:
        return {"__sqlequiv_type__": "Proved", "trace": self.trace}


@dataclass(frozen=True)
class Refuted(Verdict):
    """
    The two sides differ on `counterexample`.
    """

    counterexample: CounterExample
    kind = "refuted"

    __hash__ = None

    def __sqlequiv_json__(self) -> dict:
        return {"__sqlequiv_type__": "Refuted", "counterexample": self.counterexample}


@dataclass(frozen=True)
class Unknown(Verdict):
    """
    Neither proved nor refuted.

    Attributes
    ----------
    reason : str
        `"fuel"` when a budget ran out, `"fragment"` when no strategy
        applies.

    detail : str
        What was tried.

    oracle : OracleOutcome|None
        The differential test run after the prover gave up, if any.
    """

    reason: str
    detail: str = ""
    oracle: OracleOutcome | None = None
    kind = "unknown"

    __hash__ = None

    def __post_init__(self) -> None:
        if self.reason not in UNKNOWN_REASONS:
            raise ValueError(f"unknown reason '{self.reason}', expected one of {UNKNOWN_REASONS}")

    @property
    def corroborated(self) -> bool:
        """
        Whether the oracle compared both sides on some instance and found no difference.
        """
        return (
            self.oracle is not None
            and self.oracle.counterexample is None
            and self.oracle.checked > 0
        )

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "Unknown",
            "reason": self.reason,
            "detail": self.detail,
            "oracle": self.oracle,
        }
