import random

import pytest
from hypothesis import strategies as st

from tsrules.model import TimeSeries, build_time_series


def series(*entries) -> TimeSeries:
    """``series((1, "x"), (2, "xy"))``: seconds and item letters/iterables -> series in ms."""
    return TimeSeries(tuple((int(s * 1000), frozenset(items)) for s, items in entries))


def random_series(rng: random.Random, max_n: int = 40, max_items: int = 5, max_gap: int = 3, max_itemset: int = 2) -> TimeSeries:
    n = rng.randint(1, max_n)
    alphabet = [chr(ord("a") + k) for k in range(rng.randint(1, max_items))]
    t = 0
    events = []
    for _ in range(n):
        t += rng.randint(1, max_gap) * 100
        for item in rng.sample(alphabet, rng.randint(1, min(max_itemset, len(alphabet)))):
            events.append((t, item))
    return build_time_series(events)


@st.composite
def small_series(draw, max_n=30, max_items=4):
    alphabet = [chr(ord("a") + k) for k in range(draw(st.integers(1, max_items)))]
    gaps = draw(st.lists(st.integers(1, 4), min_size=1, max_size=max_n))
    entries = []
    t = 0
    for gap in gaps:
        t += gap * 100
        items = draw(st.sets(st.sampled_from(alphabet), min_size=1))
        entries.append((t, frozenset(items)))
    return TimeSeries(tuple(entries))


@pytest.fixture
def listing_series() -> TimeSeries:
    """The nine-entry presence/radio example (10:00 to 17:57, minute resolution)."""
    rows = [
        ("10:00", {"Présent"}),
        ("10:44", {"Radio allumée", "Musique"}),
        ("11:36", {"Radio éteinte"}),
        ("12:11", {"Absent"}),
        ("14:14", {"Présent"}),
        ("14:52", {"Radio allumée", "Informations"}),
        ("15:49", {"Musique"}),
        ("17:14", {"Radio éteinte"}),
        ("17:57", {"Absent"}),
    ]
    events = []
    for hhmm, items in rows:
        h, m = map(int, hhmm.split(":"))
        events.extend(((h * 60 + m) * 60_000, item) for item in items)
    return build_time_series(events)


XXY = series((1, "x"), (2, "x"), (3, "y"))
