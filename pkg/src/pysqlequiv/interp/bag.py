"""
Bags of Tuples
"""

from __future__ import annotations
from collections import Counter
from typing import Iterable, Iterator
from .values import format_tuple, tuple_key


class Bag:
    """
    Finite multiset of tuples.

    Attributes
    ----------
    counts : collections.Counter
        Tuple to positive multiplicity.

    Methods
    -------
    multiplicity(t)
        Number of copies of `t`, 0 if absent.

    union_all(other)
        Sum of multiplicities.

    except_(other)
        Tuples of `self` with no copy in `other`, keeping their multiplicity.

    distinct()
        Every multiplicity capped at 1.
    """

    __slots__ = ("counts",)

    def __init__(self, items: Iterable | dict | None = None) -> None:
        counts = Counter()
        if isinstance(items, dict):
            for t, m in items.items():
                if m < 0:
                    raise ValueError(f"negative multiplicity {m} for {format_tuple(t)}")
                counts[t] += m
        elif items is not None:
            for t in items:
                counts[t] += 1
        self.counts = +counts

    def multiplicity(self, t) -> int:
        return self.counts.get(t, 0)

    def union_all(self, other: Bag) -> Bag:
        return Bag(dict(self.counts + other.counts))

    def except_(self, other: Bag) -> Bag:
        return Bag({t: m for t, m in self.counts.items() if other.multiplicity(t) == 0})

    def distinct(self) -> Bag:
        return Bag({t: 1 for t in self.counts})

    def sorted_items(self) -> list[tuple]:
        """
        `(tuple, multiplicity)` pairs in canonical order.
        """
        return sorted(self.counts.items(), key=lambda item: tuple_key(item[0]))

    def __iter__(self) -> Iterator:
        return iter(self.counts)

    def items(self):
        return self.counts.items()

    def __len__(self) -> int:
        return sum(self.counts.values())

    def __bool__(self) -> bool:
        return bool(self.counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bag):
            return NotImplemented
        return self.counts == other.counts

    def __hash__(self) -> int:
        return hash(frozenset(self.counts.items()))

    def __str__(self) -> str:
        parts = []
        for t, m in self.sorted_items():
            parts.append(format_tuple(t) if m == 1 else f"{format_tuple(t)} * {m}")
        return "{" + ", ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"Bag({self})"

    def __sqlequiv_json__(self) -> list:
        return [[format_tuple(t), m] for t, m in self.sorted_items()]
