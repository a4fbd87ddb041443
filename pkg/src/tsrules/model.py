"""Core data model: time series of itemsets, multisets, rules and occurrences.

Timestamps are integer milliseconds. Items are plain strings; Python's string
ordering (code point order, identical to UTF-8 byte order) is the item order
expansion relies on.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

Timestamp = int
Item = str
# item -> ascending timestamps, sorted by item
OccurrenceMap = tuple[tuple[Item, tuple[Timestamp, ...]], ...]


@dataclass(frozen=True)
class TimeSeries:
    """Ordered ``(timestamp, itemset)`` entries with strictly increasing timestamps."""

    entries: tuple[tuple[Timestamp, frozenset[Item]], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for t, itemset in self.entries:
            if not itemset:
                raise ValueError(f"empty itemset at t={t}")
            if prev is not None and t <= prev:
                raise ValueError(f"timestamps must be strictly increasing ({prev} -> {t})")
            prev = t

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[Timestamp, frozenset[Item]]]:
        return iter(self.entries)

    @cached_property
    def timestamps(self) -> list[Timestamp]:
        return [t for t, _ in self.entries]

    @cached_property
    def item_timestamps(self) -> dict[Item, list[Timestamp]]:
        """T(e) for every item: ascending timestamps of the itemsets containing it."""
        index: dict[Item, list[Timestamp]] = {}
        for t, itemset in self.entries:
            for item in itemset:
                index.setdefault(item, []).append(t)
        return index

    @cached_property
    def items(self) -> list[Item]:
        return sorted(self.item_timestamps)

    def flatten(self) -> list[tuple[Timestamp, Item]]:
        return [(t, item) for t, itemset in self.entries for item in sorted(itemset)]


def build_time_series(events: Iterable[tuple[Timestamp, Item]]) -> TimeSeries:
    """Group raw ``(timestamp, item)`` events into a time series.

    Events sharing a timestamp merge into one itemset (duplicates collapse);
    entries come out sorted by timestamp. Empty input gives an empty series.
    """
    grouped: dict[Timestamp, set[Item]] = {}
    for t, item in events:
        if not item:
            raise ValueError("item ids must be non-empty")
        grouped.setdefault(int(t), set()).add(item)
    return TimeSeries(tuple((t, frozenset(grouped[t])) for t in sorted(grouped)))


@dataclass(frozen=True, order=True)
class Multiset:
    """A bag of items; ``counts`` is kept sorted by item so equal bags compare equal."""

    counts: tuple[tuple[Item, int], ...]

    def __post_init__(self) -> None:
        if any(m < 1 for _, m in self.counts):
            raise ValueError("multiplicities must be >= 1")

    @classmethod
    def of(cls, items: Iterable[Item] | Mapping[Item, int]) -> Multiset:
        counter = Counter(items) if not isinstance(items, Mapping) else Counter(dict(items))
        return cls(tuple(sorted((k, v) for k, v in counter.items() if v)))

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Item]:
        for item, m in self.counts:
            yield from [item] * m

    def __contains__(self, item: object) -> bool:
        return any(k == item for k, _ in self.counts)

    @property
    def size(self) -> int:
        return sum(m for _, m in self.counts)

    @property
    def max_item(self) -> Item:
        return self.counts[-1][0]

    def multiplicity(self, item: Item) -> int:
        for k, m in self.counts:
            if k == item:
                return m
        return 0

    def as_dict(self) -> dict[Item, int]:
        return dict(self.counts)

    def add(self, item: Item) -> Multiset:
        d = self.as_dict()
        d[item] = d.get(item, 0) + 1
        return Multiset.of(d)

    def key(self) -> str:
        return ",".join(f"{item}:{m}" for item, m in self.counts)

    def __str__(self) -> str:
        return "{" + ", ".join(self) + "}"


@dataclass(frozen=True)
class Rule:
    condition: Multiset
    prediction: Multiset
    support: int = 0
    rel_support: float = 0.0
    interest: float = 0.0
    # distinct occurrences behind ``support``; empty when not recorded
    occurrences: tuple[RuleOccurrence, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.condition.counts or not self.prediction.counts:
            raise ValueError("rule sides must be non-empty")

    @property
    def key(self) -> str:
        return canonical_rule_key(self)

    def __str__(self) -> str:
        return f"{self.condition} => {self.prediction}"


def canonical_rule_key(rule: Rule) -> str:
    """``"b:1,c:1=>x:1,y:1"``: sorted items with multiplicities, both sides."""
    return f"{rule.condition.key()}=>{rule.prediction.key()}"


@dataclass(frozen=True)
class RuleOccurrence:
    """One placement of a rule in the series: timestamps per item on each side."""

    cond: OccurrenceMap
    pred: OccurrenceMap

    @classmethod
    def of(cls, cond: Mapping[Item, Iterable[Timestamp]], pred: Mapping[Item, Iterable[Timestamp]]) -> RuleOccurrence:
        def norm(side):
            return tuple(sorted((k, tuple(sorted(v))) for k, v in side.items()))

        return cls(norm(cond), norm(pred))

    @property
    def cond_min(self) -> Timestamp:
        return min(ts[0] for _, ts in self.cond)

    @property
    def cond_max(self) -> Timestamp:
        return max(ts[-1] for _, ts in self.cond)

    @property
    def pred_min(self) -> Timestamp:
        return min(ts[0] for _, ts in self.pred)

    @property
    def pred_max(self) -> Timestamp:
        return max(ts[-1] for _, ts in self.pred)

    def is_valid(self, window: int) -> bool:
        return self.cond_max < self.pred_min and self.pred_max - self.cond_min <= window

    def sort_key(self) -> tuple:
        """Order in which occurrences are considered for distinct counting.

        Ascending by the occurrence's latest timestamp, ties broken by content.
        """
        return (self.pred_max, self.cond, self.pred)
