"""
Test suite for the equivalence prover

Tests
-----
test_cq_verdict
    Conjunctive query rules are proved with a homomorphism step

test_symbolic_proof
    Rules outside the conjunctive fragment are proved by normalization and search

test_squash_factor_pairing
    Monomials that differ only in equivalent squash factors are proved equal

test_replay_trace
    A recorded trace re-derives the proof of its own rule only

test_mutants_refuted
    Every mutant rule gets a counterexample

test_keyed_rules
    Key premises are used by the prover and rejected when malformed

test_magic_set
    The magic-set rewrite is never refuted; a wrong magic filter is

test_prove_biimpl
    Equal squash-valued normal forms match directly, unrelated ones are not proved

test_prover_arguments
    Wrong argument types are rejected
"""

from dataclasses import replace
import pytest
from pysqlequiv.error_handling import ArgumentTypeError
from pysqlequiv.prover import (
    Proved,
    Refuted,
    Unknown,
    cq_verdict,
    prove_biimpl,
    prove_equiv,
    prove_with_premises,
    replay_trace,
)
from pysqlequiv.core.schema import INT, Leaf, Node
from pysqlequiv.denote import Lam, MkPair, RelAtom, Sigma, Squash, VarRef
from pysqlequiv.report import verdict_label
from pysqlequiv.rules import builtin_rules
from pysqlequiv.uninomial import normalize
from pysqlequiv.util.config import ProverBudget

from ..sample_rules import DISTINCT_SELF_JOIN, JOIN_COMMUTE, KEYED, MAGIC_SET, MUTANTS, UNION_SELECTION, load


def test_cq_verdict():
    """
    Conjunctive query rules are proved with a homomorphism step
    """
    for text in (DISTINCT_SELF_JOIN, JOIN_COMMUTE):
        (checked,) = load(text)
        verdict = cq_verdict(checked)
        assert isinstance(verdict, Proved)
        assert verdict.trace.kinds() == ["lemma(cq)"]
        assert verdict.trace.steps[0].detail

        assert prove_equiv(checked, refute=False) == verdict

    # unions are not conjunctive queries
    assert cq_verdict(load(UNION_SELECTION, "union_selection")) is None

    verdict = cq_verdict(load(MUTANTS, "cq_missing_join_equality"))
    assert isinstance(verdict, Refuted)
    assert verdict.counterexample.differing()


def test_symbolic_proof():
    """
    Rules outside the conjunctive fragment are proved by normalization and search
    """
    verdict = prove_equiv(load(UNION_SELECTION, "union_selection"), refute=False)
    assert isinstance(verdict, Proved)
    assert verdict.trace.kinds()[0] == "normalize"
    assert "lemma(cq)" not in verdict.trace.kinds()

    verdict = prove_equiv(load(DISTINCT_SELF_JOIN, "distinct_self_join"), use_cq=False, refute=False)
    assert isinstance(verdict, Proved)
    assert "lemma(cq)" not in verdict.trace.kinds()


def test_squash_factor_pairing():
    """
    Monomials that differ only in equivalent squash factors are proved equal
    """
    checked = builtin_rules().get("semijoin_idempotent")
    verdict = prove_equiv(checked, use_cq=False, refute=False)
    assert isinstance(verdict, Proved), verdict
    assert "biimplSplit" in verdict.trace.kinds()
    assert isinstance(replay_trace(checked, verdict.trace), Proved)


def test_replay_trace():
    """
    A recorded trace re-derives the proof of its own rule only
    """
    checked = load(DISTINCT_SELF_JOIN, "distinct_self_join")
    proof = prove_equiv(checked, use_cq=False, refute=False)
    assert isinstance(proof, Proved)

    replayed = replay_trace(checked, proof.trace)
    assert isinstance(replayed, Proved)
    assert replayed.trace.kinds() == proof.trace.kinds()

    cq_proof = cq_verdict(checked)
    assert isinstance(replay_trace(checked, cq_proof.trace), Proved)

    mutant = load(MUTANTS, "cq_missing_join_equality")
    verdict = replay_trace(mutant, cq_proof.trace)
    assert isinstance(verdict, Unknown)
    assert verdict.reason == "fragment"

    with pytest.raises(ArgumentTypeError):
        replay_trace(checked, list(proof.trace))


def test_mutants_refuted(oracle_cfg):
    """
    Every mutant rule gets a counterexample
    """
    for checked in load(MUTANTS):
        verdict = prove_equiv(checked, oracle_cfg=oracle_cfg)
        assert isinstance(verdict, Refuted), checked.name
        counterexample = verdict.counterexample
        assert counterexample.differing(), checked.name
        assert counterexample.describe()


def test_keyed_rules(oracle_cfg):
    """
    Key premises are used by the prover and rejected when malformed
    """
    for checked in load(KEYED):
        assert checked.premises
        assert cq_verdict(checked) is None
        verdict = prove_with_premises(checked, oracle_cfg=oracle_cfg)
        assert verdict_label(verdict) in ("proved", "corroborated"), checked.name

    # without its key the index lookup does not hold
    verdict = prove_equiv(load(MUTANTS, "index_lookup_without_key"), oracle_cfg=oracle_cfg)
    assert isinstance(verdict, Refuted)

    checked = load(KEYED, "index_lookup")
    malformed = replace(checked, rule=replace(checked.rule, premises=("not a constraint",)))
    with pytest.raises(ValueError):
        prove_with_premises(malformed)


def test_magic_set(oracle_cfg):
    """
    The magic-set rewrite is never refuted; a wrong magic filter is
    """
    verdict = prove_equiv(load(MAGIC_SET, "magic_dep_avg_sal"), oracle_cfg=oracle_cfg)
    assert verdict_label(verdict) in ("proved", "corroborated")

    verdict = prove_equiv(load(MAGIC_SET, "magic_wrong_filter"), oracle_cfg=oracle_cfg)
    assert isinstance(verdict, Refuted)


def test_prove_biimpl():
    """
    Equal squash-valued normal forms match directly, unrelated ones are not proved
    """
    int_leaf = Leaf(INT)
    pair = Node(int_leaf, int_leaf)
    in_r = normalize(Lam(int_leaf, Squash(RelAtom("R", VarRef(0), int_leaf))))
    in_s = normalize(
        Lam(int_leaf, Squash(Sigma(int_leaf, RelAtom("S", MkPair(VarRef(1), VarRef(0)), pair))))
    )

    trace = prove_biimpl(in_r, in_r)
    assert trace.kinds() == ["acMatch"]
    assert prove_biimpl(in_r, in_s) is None
    assert prove_biimpl(in_s, in_r, ProverBudget(fuel=50)) is None

    with pytest.raises(ArgumentTypeError):
        prove_biimpl(in_r, "R")


def test_prover_arguments():
    """
    Wrong argument types are rejected
    """
    checked = load(JOIN_COMMUTE, "join_commute")

    with pytest.raises(ArgumentTypeError):
        prove_equiv(checked.rule)

    with pytest.raises(ArgumentTypeError):
        prove_equiv(checked, budget=100)

    verdict = prove_equiv(checked, ProverBudget(fuel=50), use_cq=False, refute=False)
    assert isinstance(verdict, (Proved, Unknown))
