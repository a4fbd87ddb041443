"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
written straight to the terminal even when output capture is on.
"""

import functools
import random
import statistics
import time
from dataclasses import replace

import pytest
from conftest import XXY, random_series

from tsrules.baseline import pathology_report, pathology_series
from tsrules.cli import DEFAULT_HABITS
from tsrules.interest import netconf, netconf_raw
from tsrules.miner import ExpansionState, MiningParams, candidate_extensions, items_in, mine
from tsrules.model import Multiset
from tsrules.oracle import HabitSpec, generate_synthetic, naive_multiset_support, naive_rule_enumeration
from tsrules.support import basic_rule_support, count_multiset_support

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        return ok

    return emit


# -- corpora ---------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def random_corpus(count=500, seed=20_240):
    """Seeded small instances: n <= 40, |E| <= 5, windows covering 1 to 6 itemsets, caps 2/2."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        ts = random_series(rng, max_n=40, max_items=5, max_gap=3)
        mean_gap = 200  # random_series gaps are 100..300 ms
        p = MiningParams(
            window=rng.randint(1, 6) * mean_gap,
            min_sup=rng.choice([1, 2, 3]),
            min_int=rng.choice([0.0, 0.5, 0.9]),
            max_condition_size=2,
            max_prediction_size=2,
        )
        out.append((ts, p))
    return tuple(out)


HABIT_WINDOW = 2000


@functools.lru_cache(maxsize=None)
def habit_log():
    specs = [
        HabitSpec(tuple(h["steps"]), tuple(h["delays"]), h["condition_len"], h["repetitions"], h["jitter"])
        for h in DEFAULT_HABITS
    ]
    return generate_synthetic(specs, 10_000, seed=7, window=HABIT_WINDOW)


HABIT_PARAMS = MiningParams(window=HABIT_WINDOW, min_sup=20, min_int=0.9, measure="netconf")


@functools.lru_cache(maxsize=None)
def mined_habits():
    started = time.perf_counter()
    rules = mine(habit_log().series, HABIT_PARAMS)
    return rules, time.perf_counter() - started


# -- criteria --------------------------------------------------------------


def test_c1_oracle_equivalence(report):
    started = time.perf_counter()
    mismatches = []
    worst = 0.0
    for k, (ts, p) in enumerate(random_corpus()):
        got = {r.key: (r.support, r.interest) for r in mine(ts, p)}
        want = {r.key: (r.support, r.interest) for r in naive_rule_enumeration(ts, p)}
        if got.keys() != want.keys() or any(got[key][0] != want[key][0] for key in got):
            mismatches.append(k)
            continue
        for key in got:
            worst = max(worst, abs(got[key][1] - want[key][1]))
    elapsed = time.perf_counter() - started
    ok = not mismatches and worst <= 1e-9 and elapsed < 300
    report(1, ok, f"{len(random_corpus())} instances, key/support mismatches={mismatches[:5]}, "
                  f"max interest diff={worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_c2_support_engine_equivalence(report):
    rng = random.Random(2)
    bad = 0
    trials = 2000
    for _ in range(trials):
        ts = random_series(rng, max_n=30, max_items=4, max_itemset=3)
        alphabet = sorted(ts.items)
        A = Multiset.of(rng.choices(alphabet, k=rng.randint(1, 3)))
        window = rng.randint(0, 8) * 100
        if count_multiset_support(A, ts, window) != naive_multiset_support(A, ts, window):
            bad += 1
    ok = bad == 0
    report(2, ok, f"{trials} (A, ts, window) triples, {bad} mismatches")
    assert ok


def test_c3_transaction_pathology(report):
    rep = pathology_report(pathology_series(), 5000, 5000, "x", "y")
    got = (rep.tr_confidence, rep.tr_sup_rule, rep.ts_sup_i, rep.ts_sup_rule, rep.ts_confidence)
    ok = got == (1.0, 3, 12, 3, 0.25)
    report(3, ok, f"transactions conf={rep.tr_confidence} sup={rep.tr_sup_rule}; "
                  f"time series sup(x)={rep.ts_sup_i} sup(x=>y)={rep.ts_sup_rule} conf={rep.ts_confidence}")
    assert ok


def test_c4_occurrence_recording(report):
    basic = basic_rule_support("x", "y", XXY, 2000)
    state = ExpansionState.basic("x", "y", XXY, 2000)
    params = MiningParams(window=2000, min_sup=1, min_int=-1)
    grown = {c.condition.key(): c for c in candidate_extensions(state, XXY, params, "condition")}
    xx = grown.get("x:2")
    ok = basic.support == 1 and len(basic.occurrences) == 2 and xx is not None and len(xx.occurrences) == 1
    report(4, ok, f"x=>y support={basic.support} occurrences={len(basic.occurrences)}; "
                  f"{{x,x}}=>y occurrences={len(xx.occurrences) if xx else None}")
    assert ok


def test_c5_netconf_properties(report):
    rng = random.Random(5)
    worst = -2.0
    for _ in range(100_000):
        s_c = rng.uniform(1e-6, 1 - 1e-6)
        s_p = rng.uniform(0, 1)
        # a quarter of the draws sit on the s_r = min(s_c, s_p) edge, where the bound is tight
        s_r = min(s_c, s_p) if rng.random() < 0.25 else rng.uniform(0, min(s_c, s_p))
        worst = max(worst, netconf_raw(s_c, s_p, s_r))
    indep = max(abs(netconf(c, p, c * p)) for c, p in ((rng.uniform(0.01, 0.99), rng.uniform(0, 1)) for _ in range(10_000)))
    w1, w2 = netconf(0.2, 0.2, 0.2), netconf(0.5, 0.4, 0.1)
    ok = worst <= 1 + 1e-12 and indep <= 1e-12 and abs(w1 - 1.0) <= 1e-12 and abs(w2 + 0.4) <= 1e-12
    report(5, ok, f"max pre-clamp={worst:.15f}, max |independent|={indep:.1e}, worked={w1!r}, {w2!r}")
    assert ok


def test_c6_habit_recovery(report):
    log = habit_log()
    rules, elapsed = mined_habits()
    keys = [r.key for r in rules]
    truth = [g.rule.key for g in log.truth]
    missing = [k for k in truth if k not in keys]
    dupes = len(keys) - len(set(keys))
    ok = len(log.events) == 10_000 and not missing and dupes == 0 and elapsed < 60
    report(6, ok, f"{len(rules)} rules, truth recovered {len(truth) - len(missing)}/{len(truth)} "
                  f"(missing {missing}), duplicates={dupes}, {elapsed:.2f}s")
    assert ok


def test_c7_window_trend(report):
    ts = habit_log().series
    counts, means = [], []
    for seconds in (1, 2, 5, 10):
        rules = mine(ts, MiningParams(window=seconds * 1000, min_sup=20, min_int=0.9))
        counts.append(len(rules))
        means.append(statistics.fmean(r.interest for r in rules) if rules else float("nan"))
    ok = all(a <= b for a, b in zip(counts, counts[1:]))
    trend = ", ".join(f"{s}s: {c} rules, mean interest {m:.3f}" for s, c, m in zip((1, 2, 5, 10), counts, means))
    report(7, ok, trend)
    assert ok


def _stricter_runs(ts, p, rng):
    """Base rules by key, then runs with doubled min_sup, raised min_int and a random prediction filter."""
    base = {r.key: r for r in mine(ts, p)}
    doubled = mine(ts, replace(p, min_sup=p.min_sup * 2))
    raised = mine(ts, replace(p, min_int=min(1.0, p.min_int + 0.25)))
    items = sorted(ts.items)
    allowed = set(rng.sample(items, rng.randint(0, len(items))))
    filtered = mine(ts, replace(p, prediction_filter=items_in(allowed)))
    return base, doubled, raised, filtered, allowed


def test_c8_threshold_monotonicity_and_filter(report):
    rng = random.Random(8)
    corpus = list(random_corpus()) + [(habit_log().series, HABIT_PARAMS)]
    added, leaked = [], []
    for k, (ts, p) in enumerate(corpus):
        base, doubled, raised, filtered, allowed = _stricter_runs(ts, p, rng)
        for r in doubled + raised:
            if r.key not in base or base[r.key].support != r.support:
                added.append((k, r.key))
        for r in filtered:
            if any(item not in allowed for item in r.prediction):
                leaked.append((k, r.key))
    ok = not added and not leaked
    report(8, ok, f"{len(corpus)} instances, rules added by stricter thresholds={added[:3]}, "
                  f"filtered items in predictions={leaked[:3]}")
    assert ok
