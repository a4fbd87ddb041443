"""Support over a time series: item support, windowed multiset support, basic rules."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass, field

from .model import Item, Multiset, RuleOccurrence, TimeSeries


@dataclass
class SupportResult:
    """Distinct-occurrence count plus every window-compatible occurrence seen."""

    support: int = 0
    occurrences: list[RuleOccurrence] = field(default_factory=list)
    distinct: list[RuleOccurrence] = field(default_factory=list)


def item_support(ts: TimeSeries, x: Item) -> int:
    """Number of itemsets containing ``x``."""
    return len(ts.item_timestamps.get(x, ()))


def relative_support(sup: int, ts: TimeSeries) -> float:
    if len(ts) == 0:
        raise ValueError("relative support is undefined on an empty series")
    return sup / len(ts)


def count_multiset_support(A: Multiset, ts: TimeSeries, window: int) -> int:
    """Distinct occurrences of the multiset ``A`` under a sliding duration window.

    The window is anchored on each itemset in turn and covers every later
    itemset within ``window`` ms (inclusive). At each position, if every item
    has at least its multiplicity of not-yet-consumed timestamps inside the
    window, one occurrence is counted and the oldest such timestamps are
    consumed (blacklisted).

    Per item we keep a deque of unconsumed timestamps inside the current
    window; consuming the oldest candidates is then a ``popleft``.
    """
    if not A.counts:
        raise ValueError("multiset must be non-empty")
    if window < 0:
        raise ValueError("window must be >= 0")
    times = ts.timestamps
    index = ts.item_timestamps
    wanted = [(index.get(a, []), m) for a, m in A.counts]
    if any(len(tl) < m for tl, m in wanted):
        return 0

    avail = [deque() for _ in wanted]
    nxt = [0] * len(wanted)  # next timestamp of each item not yet in the window
    support = 0
    for start in times:
        end = start + window
        ok = True
        for slot, (tl, m) in enumerate(wanted):
            q = avail[slot]
            while q and q[0] < start:
                q.popleft()
            k = nxt[slot]
            while k < len(tl) and tl[k] <= end:
                if tl[k] >= start:
                    q.append(tl[k])
                k += 1
            nxt[slot] = k
            if len(q) < m:
                ok = False
        if ok:
            support += 1
            for slot, (_, m) in enumerate(wanted):
                for _ in range(m):
                    avail[slot].popleft()
    return support


def basic_rule_support(i: Item, j: Item, ts: TimeSeries, window: int) -> SupportResult:
    """Support of ``{i} => {j}``: pairs with ``0 < t_j - t_i <= window``.

    Every qualifying pair is recorded as an occurrence. Pairs are visited in
    ascending ``(t_i, t_j)`` order and a pair counts as a new distinct
    occurrence only if neither timestamp was used before on its side.
    """
    ti_list = ts.item_timestamps.get(i, [])
    tj_list = ts.item_timestamps.get(j, [])
    result = SupportResult()
    used_c: set[int] = set()
    used_p: set[int] = set()
    for ti in ti_list:
        lo = bisect_right(tj_list, ti)
        hi = bisect_right(tj_list, ti + window, lo)
        for tj in tj_list[lo:hi]:
            occ = RuleOccurrence(((i, (ti,)),), ((j, (tj,)),))
            result.occurrences.append(occ)
            if ti not in used_c and tj not in used_p:
                used_c.add(ti)
                used_p.add(tj)
                result.support += 1
                result.distinct.append(occ)
    return result


def count_distinct(occurrences: list[RuleOccurrence]) -> tuple[int, list[RuleOccurrence]]:
    """Greedy distinct count over occurrences already in processing order.

    Blacklists are kept per (side, item): a timestamp consumed on the condition
    side of an item does not block the same timestamp on the prediction side.
    """
    used_c: dict[Item, set[int]] = {}
    used_p: dict[Item, set[int]] = {}
    distinct = []
    for occ in occurrences:
        if _free(occ.cond, used_c) and _free(occ.pred, used_p):
            _consume(occ.cond, used_c)
            _consume(occ.pred, used_p)
            distinct.append(occ)
    return len(distinct), distinct


def _free(side, used) -> bool:
    for item, stamps in side:
        bl = used.get(item)
        if bl and any(t in bl for t in stamps):
            return False
    return True


def _consume(side, used) -> None:
    for item, stamps in side:
        used.setdefault(item, set()).update(stamps)


def timestamps_between(ts: TimeSeries, lo: int, hi: int, *, lo_open: bool, hi_open: bool) -> slice:
    """Slice of entry indices whose timestamps fall in the given interval."""
    times = ts.timestamps
    a = bisect_right(times, lo) if lo_open else bisect_left(times, lo)
    b = bisect_left(times, hi) if hi_open else bisect_right(times, hi)
    return slice(a, b)
