"""Event-log ingestion: CSV/JSONL parsing, amplitude discretization, item filters."""

from __future__ import annotations

import csv
import fnmatch
import io
import json
import math
import re
from bisect import bisect_right
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence, TextIO

from .model import Item, TimeSeries, build_time_series

FIELDS = ("timestamp", "source", "value")


class DataError(ValueError):
    """Input data could not be used at all."""


@dataclass(frozen=True)
class EventRecord:
    timestamp: int
    source: str
    value: str | float | int

    @property
    def item(self) -> Item:
        return f"{self.source}: {self.value}"


@dataclass
class LineError:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass
class ParseResult:
    records: list[EventRecord] = field(default_factory=list)
    errors: list[LineError] = field(default_factory=list)


def parse_timestamp(raw) -> int:
    """Epoch milliseconds from an integer or an ISO-8601 string (naive means UTC)."""
    if isinstance(raw, bool):
        raise ValueError(f"bad timestamp {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        if not raw.is_integer():
            raise ValueError(f"fractional millisecond timestamp {raw!r}")
        return int(raw)
    text = str(raw).strip()
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ValueError(f"unparseable timestamp {raw!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return round(dt.timestamp() * 1000)


def _record(line_no: int, ts_raw, source, value) -> EventRecord:
    if source is None or str(source).strip() == "":
        raise ValueError("empty source")
    if value is None or (isinstance(value, str) and value.strip() == ""):
        raise ValueError("missing value")
    return EventRecord(parse_timestamp(ts_raw), str(source).strip(), value.strip() if isinstance(value, str) else value)


def parse_events(stream: TextIO | str, fmt: str = "csv") -> ParseResult:
    """Parse ``timestamp,source,value`` rows (CSV, optional header) or JSONL objects.

    Bad lines are collected in ``errors``; a :class:`DataError` is raised only
    when lines were present and none parsed.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    result = ParseResult()
    seen = 0
    if fmt == "csv":
        for line_no, row in enumerate(csv.reader(stream), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if line_no == 1 and [c.strip().lower() for c in row] == list(FIELDS):
                continue
            seen += 1
            try:
                if len(row) != 3:
                    raise ValueError(f"expected 3 columns, got {len(row)}")
                result.records.append(_record(line_no, *row))
            except ValueError as exc:
                result.errors.append(LineError(line_no, str(exc)))
    elif fmt == "jsonl":
        for line_no, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            seen += 1
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("not a JSON object")
                missing = [k for k in FIELDS if k not in obj]
                if missing:
                    raise ValueError(f"missing field(s) {', '.join(missing)}")
                result.records.append(_record(line_no, obj["timestamp"], obj["source"], obj["value"]))
            except ValueError as exc:
                result.errors.append(LineError(line_no, str(exc)))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if seen and not result.records:
        raise DataError(f"no valid events ({len(result.errors)} bad lines; first: {result.errors[0]})")
    return result


def serialize_events(records: Iterable[EventRecord], fmt: str = "csv") -> str:
    out = io.StringIO()
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(FIELDS)
        for r in records:
            w.writerow([r.timestamp, r.source, r.value])
    elif fmt == "jsonl":
        for r in records:
            out.write(json.dumps({"timestamp": r.timestamp, "source": r.source, "value": r.value}) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return out.getvalue()


def to_time_series(records: Iterable[EventRecord]) -> TimeSeries:
    return build_time_series((r.timestamp, r.item) for r in records)


# -- discretization -------------------------------------------------------


@dataclass(frozen=True)
class Binning:
    """Either fixed-width bins (``width``, anchored at ``origin``) or explicit ``cuts``."""

    width: float | None = None
    cuts: tuple[float, ...] | None = None
    origin: float = 0.0

    def __post_init__(self) -> None:
        if (self.width is None) == (self.cuts is None):
            raise ValueError("give exactly one of width or cuts")
        if self.width is not None and self.width <= 0:
            raise ValueError("bin width must be > 0")
        if self.cuts is not None and list(self.cuts) != sorted(set(self.cuts)):
            raise ValueError("cut points must be strictly increasing")

    @classmethod
    def from_dict(cls, d: Mapping) -> Binning:
        cuts = d.get("cuts")
        return cls(width=d.get("width"), cuts=tuple(cuts) if cuts is not None else None, origin=d.get("origin", 0.0))

    def label(self, v: float) -> str:
        # half-open bins: a value on an edge goes to the upper bin
        if self.width is not None:
            k = math.floor((v - self.origin) / self.width)
            lo = self.origin + k * self.width
            return f"[{_num(lo)},{_num(lo + self.width)})"
        edges = [-math.inf, *self.cuts, math.inf]
        k = bisect_right(self.cuts, v)
        return f"[{_num(edges[k])},{_num(edges[k + 1])})"


def _num(x: float) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{round(x, 9):g}"


def load_binning(spec: Mapping[str, Mapping]) -> dict[str, Binning]:
    return {source: Binning.from_dict(d) for source, d in spec.items()}


def discretize(records: Sequence[EventRecord], spec: Mapping[str, Binning]) -> ParseResult:
    """Map numeric values of the sources in ``spec`` to bin labels.

    Consecutive records of one source landing in the same bin collapse into
    the first of them, so only state changes remain. Records must be in time
    order; sources absent from ``spec`` pass through untouched.
    """
    result = ParseResult()
    last_bin: dict[str, str] = {}
    for pos, r in enumerate(records, start=1):
        binning = spec.get(r.source)
        if binning is None:
            result.records.append(r)
            continue
        try:
            v = float(r.value)
            if math.isnan(v):
                raise ValueError
        except (TypeError, ValueError):
            result.errors.append(LineError(pos, f"non-numeric value {r.value!r} for {r.source}"))
            continue
        label = binning.label(v)
        if last_bin.get(r.source) == label:
            continue
        last_bin[r.source] = label
        result.records.append(EventRecord(r.timestamp, r.source, label))
    return result


# -- filters and durations ------------------------------------------------


def read_patterns(stream: TextIO) -> list[str]:
    """One source id or glob per line; blank lines and ``#`` comments ignored."""
    out = []
    for line in stream:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def source_filter(patterns: Sequence[str], records: Iterable[EventRecord]) -> tuple[frozenset[Item], list[str]]:
    """Items whose source matches any pattern, plus the patterns that matched nothing."""
    by_source: dict[str, set[Item]] = {}
    for r in records:
        by_source.setdefault(r.source, set()).add(r.item)
    allowed: set[Item] = set()
    unmatched = []
    for pat in patterns:
        hits = [s for s in by_source if fnmatch.fnmatchcase(s, pat)]
        if not hits:
            unmatched.append(pat)
        for s in hits:
            allowed |= by_source[s]
    return frozenset(allowed), unmatched


_UNITS = {"ms": 1, "s": 1000, "m": 60_000, "min": 60_000, "h": 3_600_000}


def parse_duration(text: str | int) -> int:
    """``"500ms"``, ``"2s"``, ``"5m"``, ``"1.5s"`` or a bare integer of milliseconds."""
    if isinstance(text, int):
        return text
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*(ms|s|min|m|h)?\s*", text)
    if not m:
        raise ValueError(f"bad duration {text!r}")
    value, unit = m.groups()
    if unit is None and "." in value:
        raise ValueError(f"bare durations are integer milliseconds: {text!r}")
    return round(float(value) * _UNITS[unit or "ms"])
