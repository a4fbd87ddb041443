"""Brute-force reference counters and a synthetic habit-log generator.

Nothing here calls into the mining engine: only the plain data classes are
shared. The counters are deliberately slow and literal so that they can be
trusted as ground truth on small inputs.
"""

from __future__ import annotations

import itertools
import math
import random
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .model import Item, Multiset, Rule, TimeSeries, build_time_series

MAX_ORACLE_ENTRIES = 60
MAX_ORACLE_ITEMS = 6
MAX_ORACLE_SIDE = 3


class InstanceTooLarge(ValueError):
    pass


def naive_multiset_support(A: Multiset, ts: TimeSeries, window: int) -> int:
    """Windowed multiset support, recomputed from scratch at every window position."""
    entries = list(ts)
    need = dict(A.counts)
    used: dict[Item, set[int]] = {a: set() for a in need}
    support = 0
    for t0, _ in entries:
        seen = {a: [] for a in need}
        for t, itemset in entries:
            if t0 <= t <= t0 + window:
                for a in need:
                    if a in itemset and t not in used[a]:
                        seen[a].append(t)
        if all(len(seen[a]) >= m for a, m in need.items()):
            support += 1
            for a, m in need.items():
                used[a] |= set(sorted(seen[a])[:m])
    return support


def _side_placements(ts: TimeSeries, side: Multiset, window: int):
    """Every way to pick distinct timestamps for each item of ``side``, span <= window."""
    per_item = []
    for item, m in side.counts:
        stamps = [t for t, itemset in ts if item in itemset]
        per_item.append([(item, combo) for combo in itertools.combinations(stamps, m) if combo[-1] - combo[0] <= window])
    for choice in itertools.product(*per_item):
        flat = [t for _, combo in choice for t in combo]
        if max(flat) - min(flat) <= window:
            yield tuple(choice), min(flat), max(flat)


def naive_rule_occurrences(ts: TimeSeries, cond: Multiset, pred: Multiset, window: int) -> list[tuple]:
    """All occurrences ``(cond_map, pred_map)`` with cond strictly before pred, span <= window.

    Returned in distinct-counting order: latest timestamp, then content.
    """
    found = []
    preds = list(_side_placements(ts, pred, window))
    for c, c_lo, c_hi in _side_placements(ts, cond, window):
        for p, p_lo, p_hi in preds:
            if c_hi < p_lo and p_hi - c_lo <= window:
                found.append((p_hi, c, p))
    found.sort()
    return [(c, p) for _, c, p in found]


def naive_rule_support(ts: TimeSeries, cond: Multiset, pred: Multiset, window: int) -> tuple[int, list[tuple]]:
    used_c: dict[Item, set[int]] = {}
    used_p: dict[Item, set[int]] = {}
    distinct = []
    for c, p in naive_rule_occurrences(ts, cond, pred, window):
        clash = any(t in used_c.get(item, ()) for item, combo in c for t in combo) or any(
            t in used_p.get(item, ()) for item, combo in p for t in combo
        )
        if clash:
            continue
        for item, combo in c:
            used_c.setdefault(item, set()).update(combo)
        for item, combo in p:
            used_p.setdefault(item, set()).update(combo)
        distinct.append((c, p))
    return len(distinct), distinct


def _measure(name: str, s_c: float, s_p: float, s_r: float) -> float | None:
    """Interest value, or None where the measure is undefined."""
    if name == "netconf":
        if not 0 < s_c < 1:
            return None
        return min(1.0, max(-1.0, (s_r - s_c * s_p) / (s_c * (1 - s_c))))
    if name == "confidence":
        return s_r / s_c if s_c > 0 else None
    if name == "lift":
        return s_r / (s_c * s_p) if s_c > 0 and s_p > 0 else None
    if name == "conviction":
        if s_c <= 0:
            return None
        conf = s_r / s_c
        return math.inf if conf >= 1 else (1 - s_p) / (1 - conf)
    raise ValueError(name)


def _multisets(items: Sequence[Item], cap: int):
    for size in range(1, cap + 1):
        for combo in itertools.combinations_with_replacement(items, size):
            yield Multiset.of(combo)


def naive_rule_enumeration(ts: TimeSeries, params) -> list[Rule]:
    """Every rule within the size caps, scored exhaustively.

    ``params`` is a MiningParams-like object; both size caps must be set.
    Output is sorted by canonical key.
    """
    items = sorted({e for _, s in ts for e in s})
    cap_c, cap_p = params.max_condition_size, params.max_prediction_size
    if (
        len(ts) > MAX_ORACLE_ENTRIES
        or len(items) > MAX_ORACLE_ITEMS
        or cap_c is None
        or cap_p is None
        or max(cap_c, cap_p) > MAX_ORACLE_SIDE
    ):
        raise InstanceTooLarge(f"n={len(ts)}, |E|={len(items)}, caps={cap_c}/{cap_p}")
    if not ts.entries:
        return []
    cf = params.condition_filter or (lambda _: True)
    pf = params.prediction_filter or (lambda _: True)
    n = len(ts)
    measure = getattr(params.measure, "value", params.measure)
    side_sup: dict[Multiset, int] = {}

    def sup_of(side):
        if side not in side_sup:
            side_sup[side] = naive_multiset_support(side, ts, params.window)
        return side_sup[side]

    rules = []
    for cond in _multisets([e for e in items if cf(e)], cap_c):
        for pred in _multisets([e for e in items if pf(e)], cap_p):
            sup, _ = naive_rule_support(ts, cond, pred, params.window)
            if sup < params.min_sup:
                continue
            value = _measure(measure, sup_of(cond) / n, sup_of(pred) / n, sup / n)
            if value is None or value < params.min_int:
                continue
            rules.append(Rule(cond, pred, sup, sup / n, value))
    rules.sort(key=lambda r: r.key)
    return rules


# -- synthetic logs -------------------------------------------------------


@dataclass(frozen=True)
class HabitSpec:
    """A repeated routine: ``steps[i]`` fires ``delays[i-1]`` ms after ``steps[i-1]``.

    The first ``condition_len`` steps form the rule's condition, the rest its
    prediction.
    """

    steps: tuple[Item, ...]
    delays: tuple[int, ...]
    condition_len: int = 1
    repetitions: int = 25
    jitter: int = 0

    def __post_init__(self) -> None:
        if len(self.delays) != len(self.steps) - 1:
            raise ValueError("need one delay between each pair of consecutive steps")
        if not 0 < self.condition_len < len(self.steps):
            raise ValueError("condition_len must leave both sides non-empty")
        if any(d <= 0 for d in self.delays[self.condition_len - 1 : self.condition_len]):
            raise ValueError("the prediction must start strictly after the condition")

    @property
    def rule(self) -> Rule:
        return Rule(
            Multiset.of(self.steps[: self.condition_len]),
            Multiset.of(self.steps[self.condition_len :]),
            support=self.repetitions,
        )

    @property
    def max_span(self) -> int:
        return sum(self.delays) + self.jitter * len(self.delays)


@dataclass(frozen=True)
class GroundTruth:
    rule: Rule
    recoverable: bool


@dataclass
class SyntheticLog:
    series: TimeSeries
    events: list[tuple[int, Item]]
    truth: list[GroundTruth] = field(default_factory=list)


def generate_synthetic(
    specs: Sequence[HabitSpec],
    length: int,
    seed: int,
    *,
    window: int | None = None,
    noise_items: Sequence[Item] | None = None,
    noise_mean_gap: int = 5_000,
    start: int = 0,
) -> SyntheticLog:
    """Embed habits into a Poisson stream of noise events.

    ``length`` is the total number of raw events. Habit instances never come
    closer than ``window`` (or their own span) to one another. With ``window``
    given, habits that cannot fit inside it are flagged unrecoverable.
    """
    rng = random.Random(seed)
    habit_events = sum(h.repetitions * len(h.steps) for h in specs)
    n_noise = length - habit_events
    if n_noise < 0:
        raise ValueError(f"length {length} smaller than the {habit_events} habit events")
    if noise_items is None:
        noise_items = [f"sensor {k}: {state}" for k in range(12) for state in ("ON", "OFF")]
    noise_items = list(noise_items)
    if n_noise and not noise_items:
        raise ValueError("noise requested but no noise items given")

    events: list[tuple[int, Item]] = []
    t = start
    for _ in range(n_noise):
        t += max(1, round(rng.expovariate(1.0 / noise_mean_gap)))
        events.append((t, rng.choice(noise_items)))
    horizon = max(t, start + noise_mean_gap * max(habit_events, 1))

    truth = []
    guard = max([window or 0] + [h.max_span for h in specs]) + 1
    taken: list[tuple[int, int]] = []
    for h in specs:
        recoverable = True
        if window is not None and (h.jitter > window or h.max_span > window):
            warnings.warn(f"habit {h.steps} cannot fit a {window} ms window; marked unrecoverable")
            recoverable = False
        for _ in range(h.repetitions):
            for _attempt in range(10_000):
                t0 = rng.randint(start, horizon)
                if all(t0 + guard <= lo or t0 >= hi + guard for lo, hi in taken):
                    break
            else:
                raise ValueError("could not place habit instances without overlap; increase length")
            ts_ = [t0]
            for d in h.delays:
                ts_.append(ts_[-1] + max(1, d + rng.randint(-h.jitter, h.jitter)))
            taken.append((t0, ts_[-1]))
            events.extend(zip(ts_, h.steps))
        truth.append(GroundTruth(h.rule, recoverable))

    events.sort()
    return SyntheticLog(build_time_series(events), events, truth)


def verify_rule_occurrences(ts: TimeSeries, rule: Rule, window: int) -> bool:
    """Independent post-hoc check of a mined rule's recorded distinct occurrences."""
    if len(rule.occurrences) != rule.support:
        return False
    lookup = {t: s for t, s in ts}
    used: set[tuple[str, Item, int]] = set()
    for occ in rule.occurrences:
        sides = {"c": dict(occ.cond), "p": dict(occ.pred)}
        for tag, side_ms in (("c", rule.condition), ("p", rule.prediction)):
            side = sides[tag]
            if {k: len(v) for k, v in side.items()} != side_ms.as_dict():
                return False
            for item, stamps in side.items():
                if len(set(stamps)) != len(stamps):
                    return False
                for t in stamps:
                    if item not in lookup.get(t, ()) or (tag, item, t) in used:
                        return False
                    used.add((tag, item, t))
        c_all = [t for v in sides["c"].values() for t in v]
        p_all = [t for v in sides["p"].values() for t in v]
        if not (max(c_all) < min(p_all) and max(p_all) - min(c_all) <= window):
            return False
    return True


FilterFn = Callable[[Item], bool]
