"""
Equivalence Prover
"""

from .trace import (
    STEP_KINDS,
    ProofStep,
    ProofTrace,
    Verdict,
    Proved,
    Refuted,
    Unknown,
)
from .search import Search, Facts, entails
from .prover import cq_verdict, prove_equiv, prove_biimpl, prove_with_premises, replay_trace
