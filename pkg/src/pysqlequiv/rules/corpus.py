"""
Builtin Rule Corpus

The rules live in the rule-file `corpus.rules` shipped with the package;
`builtin_rules` parses and checks it.
"""

from __future__ import annotations
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

CORPUS_FILE = "corpus.rules"

CATEGORIES = ("Basic", "Aggregation", "Subquery", "MagicSet", "Index", "ConjunctiveQuery")

CATEGORY_COUNTS = {
    "Basic": 8,
    "Aggregation": 1,
    "Subquery": 2,
    "MagicSet": 7,
    "Index": 3,
    "ConjunctiveQuery": 2,
}


@dataclass(frozen=True)
class RuleCorpus:
    """
    Checked rules grouped by category.

    Attributes
    ----------
    rules : tuple[pysqlequiv.core.CheckedRule]
        Rules in file order.

    source : str
        Text of the rule file the rules were parsed from.

    Methods
    -------
    get(name)
        Rule by name.

    by_category()
        Category name to the rules of that category.

    counts()
        Category name to its number of rules.
    """

    rules: tuple
    source: str = ""

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __str__(self) -> str:
        return f"RuleCorpus({len(self.rules)} rules)"

    @property
    def names(self) -> list[str]:
        return [checked.name for checked in self.rules]

    def get(self, name: str):
        """
        Raises
        ------
        KeyError
            No rule has that name.
        """
        for checked in self.rules:
            if checked.name == name:
                return checked
        raise KeyError(f"no builtin rule named '{name}'")

    def by_category(self) -> dict[str, list]:
        grouped = {category: [] for category in CATEGORIES}
        for checked in self.rules:
            grouped.setdefault(checked.rule.category, []).append(checked)
        return grouped

    def counts(self) -> dict[str, int]:
        found = Counter(checked.rule.category for checked in self.rules)
        return {category: found.get(category, 0) for category in CATEGORIES}

    def expected(self, name: str) -> str | None:
        """
        The `@expect` pragma of a rule, None when the rule has none.
        """
        return self.get(name).rule.expect


def corpus_source() -> str:
    """
    Text of the builtin rule file.
    """
    return resources.files(__package__).joinpath(CORPUS_FILE).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def builtin_rules() -> RuleCorpus:
    """
    Parse and check the builtin corpus.

    Returns
    -------
    RuleCorpus
        The 23 builtin rules.

    Raises
    ------
    ValueError
        The shipped file does not have the documented category counts.
    """
    # pylint: disable=import-outside-toplevel
    from ..parser.parser import parse_rule_file

    source = corpus_source()
    corpus = RuleCorpus(parse_rule_file(source).checked, source)
    counts = corpus.counts()
    if counts != CATEGORY_COUNTS:
        raise ValueError(f"builtin corpus has category counts {counts}, expected {CATEGORY_COUNTS}")
    return corpus
