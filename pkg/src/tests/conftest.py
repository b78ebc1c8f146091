"""
Settings for all pySqlEquiv tests
"""

import os
import json
import copy
import pytest
from pysqlequiv.interp import OracleConfig
from pysqlequiv.rules import builtin_rules

# ======================================
# Import Settings from settings.json
# ======================================

TEST_SETTINGS = {}

if os.path.exists(os.path.join(os.path.dirname(os.path.abspath(__file__)), "settings.json")):

    with open(
        os.path.join(os.path.dirname(os.path.abspath(__file__)), "settings.json"), "r", encoding="utf-8"
    ) as settings_file:
        TEST_SETTINGS = json.load(settings_file)

for pysqlequiv_test_setting in ["ORACLE_BUDGET", "ORACLE_SEED", "RANDOM_CQ_PAIRS", "RANDOM_UTERMS"]:
    if pysqlequiv_test_setting not in TEST_SETTINGS:
        TEST_SETTINGS[pysqlequiv_test_setting] = None

# ===================================
# TEST VARIABLES
# ===================================

# Instances the oracle may visit per rule
# Uses ORACLE_BUDGET from settings.json if specified. Default is 1000

ORACLE_BUDGET = TEST_SETTINGS["ORACLE_BUDGET"] or 1000

# Seed of random instances and random terms

ORACLE_SEED = TEST_SETTINGS["ORACLE_SEED"] or 0

# Number of random conjunctive query pairs compared against the canonical database oracle

RANDOM_CQ_PAIRS = TEST_SETTINGS["RANDOM_CQ_PAIRS"] or 100

# Number of random ground terms used by the normalizer soundness tests

RANDOM_UTERMS = TEST_SETTINGS["RANDOM_UTERMS"] or 1000

# ===================================
# TEST FIXTURES/PARAMETERIZATION
# ===================================


@pytest.fixture
def oracle_cfg():
    """
    Default oracle bounds with ORACLE_BUDGET and ORACLE_SEED
    """
    return OracleConfig(budget=ORACLE_BUDGET, seed=ORACLE_SEED)


@pytest.fixture
def oracle_seed():
    """
    Corresponds to ORACLE_SEED
    """
    return copy.deepcopy(ORACLE_SEED)


@pytest.fixture
def random_cq_pairs():
    """
    Corresponds to RANDOM_CQ_PAIRS
    """
    return copy.deepcopy(RANDOM_CQ_PAIRS)


@pytest.fixture
def random_uterms():
    """
    Corresponds to RANDOM_UTERMS
    """
    return copy.deepcopy(RANDOM_UTERMS)


# ================================
# Corpus Parameterization
# ================================


def pytest_generate_tests(metafunc):
    """
    Generates parameterized test for each builtin rule
    """
    if "corpus_rule" in metafunc.fixturenames:
        rules = list(builtin_rules())
        metafunc.parametrize("corpus_rule", rules, ids=[checked.name for checked in rules])
