"""Rule mining over a time series by seeding basic rules and growing them.

Every frequent basic rule ``{i} => {j}`` is grown one item at a time, either on
the condition side or on the prediction side. Two structural constraints keep
each rule reachable through exactly one path:

* once the condition has been grown, the prediction is frozen;
* an added item must be >= the largest item already on that side, and when it
  equals it, only timestamps strictly later than that item's recorded ones are
  used.

All window-compatible occurrences of a rule are carried along so that growth
never misses a placement; the support itself counts only distinct ones.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Collection, Iterable

from .interest import Measure, UndefinedMeasureError
from .model import Item, Multiset, Rule, RuleOccurrence, TimeSeries, canonical_rule_key
from .support import basic_rule_support, count_distinct, count_multiset_support, timestamps_between

log = logging.getLogger(__name__)

ItemFilter = Callable[[Item], bool]

_CODOMAIN = {
    Measure.NETCONF: (-1.0, 1.0),
    Measure.CONFIDENCE: (0.0, 1.0),
    Measure.LIFT: (0.0, float("inf")),
    Measure.CONVICTION: (0.0, float("inf")),
}


@dataclass(frozen=True)
class MiningParams:
    window: int
    min_sup: int
    min_int: float
    condition_filter: ItemFilter | None = None
    prediction_filter: ItemFilter | None = None
    max_condition_size: int | None = None
    max_prediction_size: int | None = None
    measure: Measure = Measure.NETCONF

    def __post_init__(self) -> None:
        object.__setattr__(self, "measure", Measure(self.measure))
        if self.window <= 0:
            raise ValueError(f"window must be > 0 ms, got {self.window}")
        if self.min_sup < 1:
            raise ValueError(f"min_sup must be >= 1, got {self.min_sup}")
        lo, hi = _CODOMAIN[self.measure]
        if not lo <= self.min_int <= hi:
            raise ValueError(f"min_int={self.min_int} outside [{lo}, {hi}] for {self.measure.value}")
        for name in ("max_condition_size", "max_prediction_size"):
            cap = getattr(self, name)
            if cap is not None and cap < 1:
                raise ValueError(f"{name} must be >= 1 or None")


def items_in(allowed: Collection[Item]) -> ItemFilter:
    allowed = frozenset(allowed)
    return allowed.__contains__


def search_zones(occ: RuleOccurrence, window: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Where an occurrence may be grown.

    Returns ``((c_lo, c_hi), (p_lo, p_hi))``: condition items may come from
    ``c_lo <= t < c_hi`` and prediction items from ``p_lo < t <= p_hi``.
    Both zones keep the grown occurrence within ``window``.
    """
    return (occ.pred_max - window, occ.pred_min), (occ.cond_max, occ.cond_min + window)


@dataclass
class ExpansionState:
    """A frequent rule on its way to being grown, with every occurrence seen."""

    condition: Multiset
    prediction: Multiset
    occurrences: list[RuleOccurrence]
    support: int = 0
    distinct: list[RuleOccurrence] = field(default_factory=list)
    # set once the condition has been grown; the prediction is then frozen
    left_expanded: bool = False

    @classmethod
    def basic(cls, i: Item, j: Item, ts: TimeSeries, window: int) -> ExpansionState:
        res = basic_rule_support(i, j, ts, window)
        return cls(Multiset(((i, 1),)), Multiset(((j, 1),)), res.occurrences, res.support, res.distinct)


class _Search:
    def __init__(self, ts: TimeSeries, params: MiningParams):
        self.ts = ts
        self.p = params
        self.n = len(ts)
        cf = params.condition_filter or (lambda _: True)
        pf = params.prediction_filter or (lambda _: True)
        self.cond_ok = {e: bool(cf(e)) for e in ts.items}
        self.pred_ok = {e: bool(pf(e)) for e in ts.items}
        self.cond_items = [sorted(e for e in s if self.cond_ok[e]) for _, s in ts.entries]
        self.pred_items = [sorted(e for e in s if self.pred_ok[e]) for _, s in ts.entries]
        self.max_c = params.max_condition_size or float("inf")
        self.max_p = params.max_prediction_size or float("inf")
        self._side_support: dict[Multiset, int] = {}
        self.rules: dict[str, Rule] = {}

    # -- support and emission -------------------------------------------

    def side_support(self, side: Multiset) -> int:
        if len(side.counts) == 1 and side.counts[0][1] == 1:
            return len(self.ts.item_timestamps.get(side.counts[0][0], ()))
        sup = self._side_support.get(side)
        if sup is None:
            sup = self._side_support[side] = count_multiset_support(side, self.ts, self.p.window)
        return sup

    def emit(self, state: ExpansionState) -> None:
        n = self.n
        cond, pred, support = state.condition, state.prediction, state.support
        try:
            value = self.p.measure(self.side_support(cond) / n, self.side_support(pred) / n, support / n)
        except UndefinedMeasureError:
            return
        if value < self.p.min_int:
            return
        rule = Rule(cond, pred, support, support / n, value, tuple(state.distinct))
        # registry guards against a rule reached twice
        self.rules.setdefault(canonical_rule_key(rule), rule)

    # -- seeds ----------------------------------------------------------

    def seeds(self) -> list[tuple[Item, Item]]:
        index = self.ts.item_timestamps
        min_sup = self.p.min_sup
        conds = [e for e in self.ts.items if self.cond_ok[e] and len(index[e]) >= min_sup]
        preds = [e for e in self.ts.items if self.pred_ok[e] and len(index[e]) >= min_sup]
        return [(i, j) for i in conds for j in preds]

    def grow_seed(self, i: Item, j: Item) -> None:
        state = ExpansionState.basic(i, j, self.ts, self.p.window)
        if state.support < self.p.min_sup:
            return
        self.expand_condition(state)
        self.expand_prediction(state)
        self.emit(state)

    # -- growth ---------------------------------------------------------

    def extensions(self, state: ExpansionState, on_condition: bool) -> list[ExpansionState]:
        """Every one-item extension of ``state`` on one side, support counted, unfiltered."""
        side = state.condition if on_condition else state.prediction
        if side.size >= (self.max_c if on_condition else self.max_p):
            return []
        top = side.max_item
        times = self.ts.timestamps
        allowed = self.cond_items if on_condition else self.pred_items
        window = self.p.window
        grown: dict[Item, list[RuleOccurrence]] = {}
        for occ in state.occurrences:
            c_zone, p_zone = search_zones(occ, window)
            if on_condition:
                own, zone = occ.cond, timestamps_between(self.ts, *c_zone, lo_open=False, hi_open=True)
            else:
                own, zone = occ.pred, timestamps_between(self.ts, *p_zone, lo_open=True, hi_open=False)
            # the side's largest item sits last in the sorted occurrence map
            last = own[-1][1]
            for idx in range(zone.start, zone.stop):
                t = times[idx]
                items = allowed[idx]
                for k in items[bisect_left(items, top):]:
                    if k == top:
                        if t <= last[-1]:
                            continue
                        new = own[:-1] + ((k, last + (t,)),)
                    else:
                        new = own + ((k, (t,)),)
                    grown.setdefault(k, []).append(
                        RuleOccurrence(new, occ.pred) if on_condition else RuleOccurrence(occ.cond, new)
                    )
        children = []
        for k in sorted(grown):
            occs = grown[k]
            occs.sort(key=RuleOccurrence.sort_key)
            support, distinct = count_distinct(occs)
            if on_condition:
                child = ExpansionState(state.condition.add(k), state.prediction, occs, support, distinct, True)
            else:
                child = ExpansionState(state.condition, state.prediction.add(k), occs, support, distinct, False)
            children.append(child)
        return children

    def expand_condition(self, state: ExpansionState) -> None:
        for child in self.extensions(state, on_condition=True):
            if child.support >= self.p.min_sup:
                self.expand_condition(child)
                self.emit(child)

    def expand_prediction(self, state: ExpansionState) -> None:
        if state.left_expanded:
            raise ValueError("the prediction of a rule whose condition was grown cannot be grown")
        for child in self.extensions(state, on_condition=False):
            if child.support >= self.p.min_sup:
                self.expand_condition(child)
                self.expand_prediction(child)
                self.emit(child)


def candidate_extensions(state: ExpansionState, ts: TimeSeries, params: MiningParams, side: str) -> list[ExpansionState]:
    """One growth step on ``side`` ("condition" or "prediction"), before the support threshold."""
    if side not in ("condition", "prediction"):
        raise ValueError(side)
    return _Search(ts, params).extensions(state, on_condition=side == "condition")


def expand_condition(state: ExpansionState, ts: TimeSeries, params: MiningParams) -> list[Rule]:
    """Rules emitted by growing the condition of ``state`` (recursively, condition only)."""
    search = _Search(ts, params)
    search.expand_condition(state)
    return sort_rules(search.rules.values())


def expand_prediction(state: ExpansionState, ts: TimeSeries, params: MiningParams) -> list[Rule]:
    """Rules emitted by growing the prediction of ``state``, then either side."""
    search = _Search(ts, params)
    search.expand_prediction(state)
    return sort_rules(search.rules.values())


def sort_rules(rules: Iterable[Rule]) -> list[Rule]:
    return sorted(rules, key=lambda r: (-r.interest, -r.support, r.key))


def mine(ts: TimeSeries, params: MiningParams, workers: int = 1) -> list[Rule]:
    """Mine rules from ``ts``.

    Returns a duplicate-free list sorted by interest (desc), support (desc),
    then canonical key. ``workers > 1`` spreads the basic-rule seeds over
    forked processes; the result is identical to the serial run.
    """
    if len(ts) == 0:
        return []
    search = _Search(ts, params)
    seeds = search.seeds()
    if workers > 1 and len(seeds) > 1 and "fork" in mp.get_all_start_methods():
        return sort_rules(_mine_parallel(search, seeds, workers))
    for i, j in seeds:
        search.grow_seed(i, j)
    return sort_rules(search.rules.values())


_WORKER_SEARCH: _Search | None = None


def _grow_chunk(chunk: list[tuple[Item, Item]]) -> list[Rule]:
    search = _WORKER_SEARCH
    search.rules = {}
    for i, j in chunk:
        search.grow_seed(i, j)
    return list(search.rules.values())


def _mine_parallel(search: _Search, seeds: list[tuple[Item, Item]], workers: int) -> list[Rule]:
    global _WORKER_SEARCH
    _WORKER_SEARCH = search
    chunks = [seeds[k::workers * 4] for k in range(workers * 4)]
    merged: dict[str, Rule] = {}
    try:
        with mp.get_context("fork").Pool(workers) as pool:
            for rules in pool.imap_unordered(_grow_chunk, [c for c in chunks if c]):
                for rule in rules:
                    merged.setdefault(rule.key, rule)
    finally:
        _WORKER_SEARCH = None
    return list(merged.values())
