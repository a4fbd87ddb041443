"""Transaction-based support, for comparison with the time-series support.

Cutting a series into fixed-duration transactions and counting "transactions
that contain the rule" over-credits rules: one ``i ... j`` anywhere in a
transaction validates the whole transaction.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .interest import UndefinedMeasureError, confidence, netconf
from .model import Item, TimeSeries
from .support import basic_rule_support, item_support, relative_support

Transaction = tuple[frozenset[Item], ...]


def split_into_transactions(ts: TimeSeries, delta_tr: int) -> list[Transaction]:
    """Half-open bins ``[t0 + k*delta_tr, t0 + (k+1)*delta_tr)`` anchored at the first timestamp.

    Timestamps are dropped; empty bins yield no transaction.
    """
    if delta_tr <= 0:
        raise ValueError("delta_tr must be > 0")
    if not ts.entries:
        return []
    t0 = ts.entries[0][0]
    bins: dict[int, list[frozenset[Item]]] = {}
    for t, itemset in ts:
        bins.setdefault((t - t0) // delta_tr, []).append(itemset)
    return [tuple(bins[k]) for k in sorted(bins)]


def _contains_before(tr: Transaction, i: Item, j: Item) -> bool:
    seen_i = False
    for itemset in tr:
        if seen_i and j in itemset:
            return True
        if i in itemset:
            seen_i = True
    return False


@dataclass(frozen=True)
class TransactionStats:
    sup_rule: int
    sup_i: int
    sup_j: int
    confidence: float


def transaction_rule_stats(i: Item, j: Item, trs: list[Transaction]) -> TransactionStats:
    """Transaction counts for ``i => j`` (some ``i`` strictly before some ``j``)."""
    sup_rule = sum(_contains_before(tr, i, j) for tr in trs)
    sup_i = sum(any(i in s for s in tr) for tr in trs)
    sup_j = sum(any(j in s for s in tr) for tr in trs)
    if sup_i == 0:
        raise UndefinedMeasureError(f"no transaction contains {i!r}")
    return TransactionStats(sup_rule, sup_i, sup_j, sup_rule / sup_i)


@dataclass
class PathologyReport:
    condition: Item
    prediction: Item
    delta_tr: int
    window: int
    n_transactions: int
    tr_sup_rule: int
    tr_sup_i: int
    tr_sup_j: int
    tr_confidence: float | None
    ts_sup_i: int
    ts_sup_j: int
    ts_sup_rule: int
    ts_confidence: float | None
    ts_netconf: float | None
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def pathology_report(ts: TimeSeries, delta_tr: int, window: int, i: Item, j: Item) -> PathologyReport:
    """Transaction confidence side by side with time-series confidence and netconf for ``i => j``."""
    flags = []
    trs = split_into_transactions(ts, delta_tr)
    try:
        tr = transaction_rule_stats(i, j, trs)
        tr_conf: float | None = tr.confidence
    except UndefinedMeasureError:
        tr = TransactionStats(0, 0, sum(any(j in s for s in t) for t in trs), 0.0)
        tr_conf = None
        flags.append("transaction confidence undefined")

    sup_i, sup_j = item_support(ts, i), item_support(ts, j)
    sup_r = basic_rule_support(i, j, ts, window).support
    ts_conf = ts_net = None
    if ts.entries:
        s_c, s_p, s_r = (relative_support(s, ts) for s in (sup_i, sup_j, sup_r))
        try:
            ts_conf = confidence(s_c, s_p, s_r)
        except UndefinedMeasureError:
            flags.append("time-series confidence undefined")
        try:
            ts_net = netconf(s_c, s_p, s_r)
        except UndefinedMeasureError:
            flags.append("netconf undefined")
    if i == j:
        flags.append("self rule")
    if sup_r == 0:
        flags.append("rule never observed in the series")
    if tr_conf is not None and ts_conf is not None and tr_conf > ts_conf:
        flags.append("transactions overstate confidence")
    return PathologyReport(
        condition=i,
        prediction=j,
        delta_tr=delta_tr,
        window=window,
        n_transactions=len(trs),
        tr_sup_rule=tr.sup_rule,
        tr_sup_i=tr.sup_i,
        tr_sup_j=tr.sup_j,
        tr_confidence=tr_conf,
        ts_sup_i=sup_i,
        ts_sup_j=sup_j,
        ts_sup_rule=sup_r,
        ts_confidence=ts_conf,
        ts_netconf=ts_net,
        flags=flags,
    )


def pathology_series() -> TimeSeries:
    """15 itemsets, three 5 s bursts of ``x x y x x`` spaced 10 s apart."""
    x_at = [0, 1, 3, 4, 10, 11, 13, 14, 20, 21, 23, 24]
    y_at = [2, 12, 22]
    return TimeSeries(tuple(sorted([(s * 1000, frozenset({"x"})) for s in x_at] + [(s * 1000, frozenset({"y"})) for s in y_at])))

