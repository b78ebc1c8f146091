"""
Rule Corpus and Derived Constructs
"""

from .constraints import (
    CONSTRAINT_KINDS,
    Constraint,
    key_equation,
    encode_key,
    encode_fd,
    index_def,
)
from .groupby import desugar_groupby
from .corpus import CATEGORIES, CATEGORY_COUNTS, RuleCorpus, builtin_rules, corpus_source
