"""
Test suite for the builtin rule corpus

Tests
-----
test_corpus_counts
    The corpus has its documented number of rules per category

test_corpus_lookup
    Rules are found by name and keep their pragmas

test_corpus_rule_metadata
    Every rule has a known category and provenance

test_corpus_rule_verdict
    Every rule gets the verdict its expectation accepts

test_corpus_rule_exhaustive
    Every rule survives the whole space of one-value domains and leaf schemas

test_corpus_coherence
    Denotation and evaluation agree on every rule
"""

import pytest
from pysqlequiv.cli import check_rule
from pysqlequiv.interp import OracleConfig, check_coherence, run_oracle
from pysqlequiv.rules import CATEGORIES, CATEGORY_COUNTS, builtin_rules
from pysqlequiv.util.config import ProverBudget


def test_corpus_counts():
    """
    The corpus has its documented number of rules per category
    """
    corpus = builtin_rules()
    assert len(corpus) == 23
    assert corpus.counts() == CATEGORY_COUNTS
    assert sum(CATEGORY_COUNTS.values()) == len(corpus)
    assert list(corpus.by_category()) == list(CATEGORIES)
    assert len(set(corpus.names)) == len(corpus)
    assert builtin_rules() is corpus
    assert str(corpus) == "RuleCorpus(23 rules)"


def test_corpus_lookup():
    """
    Rules are found by name and keep their pragmas
    """
    corpus = builtin_rules()
    checked = corpus.get("distinct_self_join")
    assert checked.rule.category == "Basic"
    assert corpus.expected("distinct_self_join") == "proved"
    assert corpus.expected("cq_join_commute") == "proved"
    assert corpus.expected("groupby_key_selection") == "proved"
    assert corpus.expected("semijoin_idempotent") == "proved"
    assert corpus.expected("semijoin_push_groupby") == "corroborated"
    assert corpus.expected("selection_pushdown") is None
    assert corpus.get("index_lookup").premises

    with pytest.raises(KeyError):
        corpus.get("no_such_rule")


def test_corpus_rule_metadata(corpus_rule):
    """
    Every rule has a known category and provenance
    """
    rule = corpus_rule.rule
    assert rule.category in CATEGORIES
    assert rule.provenance in ("literature", "reconstructed")
    assert rule.expect in (None, "proved", "refuted", "corroborated", "unknown")


def test_corpus_rule_verdict(corpus_rule, oracle_cfg):
    """
    Every rule gets the verdict its expectation accepts
    """
    entry = check_rule(corpus_rule, ProverBudget(), oracle_cfg)
    assert entry.matched, entry.render_text(trace=True)
    assert not entry.contradicted


def test_corpus_rule_exhaustive(corpus_rule):
    """
    Every rule survives the whole space of one-value domains and leaf schemas
    """
    outcome = run_oracle(corpus_rule, OracleConfig(depth=0, domain=1, tuples=1, mult=1, budget=100000))
    assert outcome.counterexample is None, outcome.counterexample.describe()
    assert outcome.exhausted
    assert outcome.checked > 0


def test_corpus_coherence(corpus_rule):
    """
    Denotation and evaluation agree on every rule
    """
    assert check_coherence(corpus_rule, OracleConfig(budget=200)) == []
