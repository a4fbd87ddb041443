"""Command-line entry point: ``tsrules {mine,baseline,synth,stats}``.

Exit codes: 0 success, 1 data error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
import time
from pathlib import Path
from typing import Sequence, TextIO

from .baseline import pathology_report, pathology_series
from .ingest import (
    DataError,
    EventRecord,
    discretize,
    load_binning,
    parse_duration,
    parse_events,
    read_patterns,
    serialize_events,
    source_filter,
    to_time_series,
)
from .interest import Measure
from .miner import MiningParams, items_in, mine
from .model import Rule
from .oracle import HabitSpec, generate_synthetic

log = logging.getLogger("tsrules")

EXIT_OK, EXIT_DATA, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def rule_to_json(rule: Rule, window: int) -> dict:
    return {
        "condition": [[item, m] for item, m in rule.condition.counts],
        "prediction": [[item, m] for item, m in rule.prediction.counts],
        "support": rule.support,
        "rel_support": rule.rel_support,
        "interest": rule.interest,
        "window_ms": window,
    }


def summarize(rules: Sequence[dict]) -> dict:
    interests = [r["interest"] for r in rules]
    windows = sorted({r["window_ms"] for r in rules})
    return {
        "rule_count": len(rules),
        "mean_interest": statistics.fmean(interests) if interests else None,
        "mean_support": statistics.fmean(r["support"] for r in rules) if rules else None,
        "max_condition_size": max((sum(m for _, m in r["condition"]) for r in rules), default=0),
        "max_prediction_size": max((sum(m for _, m in r["prediction"]) for r in rules), default=0),
        "window_ms": windows[0] if len(windows) == 1 else windows or None,
    }


def _format_for(path: str, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "jsonl" if path.endswith((".jsonl", ".ndjson", ".json")) else "csv"


def _load_records(path: str, fmt: str | None) -> list[EventRecord]:
    try:
        with open(path, encoding="utf-8") as fh:
            result = parse_events(fh, _format_for(path, fmt))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for err in result.errors:
        log.warning("%s: %s", path, err)
    return sorted(result.records, key=lambda r: r.timestamp)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _read_patterns(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return read_patterns(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _duration(text: str) -> int:
    try:
        return parse_duration(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_mine(args, out: TextIO) -> int:
    records = _load_records(args.input, args.format)
    if args.discretize:
        try:
            binning = load_binning(_read_json(args.discretize))
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"bad discretization spec: {exc}") from exc
        result = discretize(records, binning)
        for err in result.errors:
            log.warning("discretize: %s", err)
        records = result.records
    ts = to_time_series(records)
    if len(ts) == 0:
        raise DataError("no events to mine")

    filters = {}
    for flag, key in (("predict_only", "prediction_filter"), ("condition_only", "condition_filter")):
        path = getattr(args, flag)
        if path:
            allowed, unmatched = source_filter(_read_patterns(path), records)
            for pat in unmatched:
                log.warning("%s: pattern %r matches no source in the input", path, pat)
            filters[key] = items_in(allowed)
    try:
        params = MiningParams(
            window=args.window,
            min_sup=args.min_sup,
            min_int=args.min_int,
            max_condition_size=args.max_condition,
            max_prediction_size=args.max_prediction,
            measure=Measure(args.measure),
            **filters,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    started = time.perf_counter()
    rules = mine(ts, params, workers=args.workers)
    elapsed = (time.perf_counter() - started) * 1000
    payload = [rule_to_json(r, params.window) for r in rules]

    target = open(args.output, "w", encoding="utf-8") if args.output else out
    try:
        for obj in payload:
            target.write(json.dumps(obj) + "\n")
    finally:
        if args.output:
            target.close()

    stats = summarize(payload)
    stats.update(window_ms=params.window, n_itemsets=len(ts), n_items=len(ts.items), elapsed_ms=round(elapsed, 3))
    if args.stats:
        Path(args.stats).write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    else:
        print(json.dumps(stats), file=sys.stderr)
    return EXIT_OK


def cmd_baseline(args, out: TextIO) -> int:
    if args.input:
        ts = to_time_series(_load_records(args.input, args.format))
        i, j = args.condition, args.prediction
        if not (i and j):
            raise ConfigError("--condition and --prediction are required with an input file")
    else:
        ts = pathology_series()
        i, j = args.condition or "x", args.prediction or "y"
    report = pathology_report(ts, args.delta_tr, args.window, i, j)
    out.write(json.dumps(report.to_dict(), indent=2) + "\n")
    return EXIT_OK


DEFAULT_HABITS = [
    {"steps": ["switch: ON", "light 1: 0", "light 2: 0"], "delays": [400, 200], "condition_len": 1, "repetitions": 30, "jitter": 100},
    {"steps": ["door: OPEN", "presence: ON", "hall light: 100"], "delays": [600, 700], "condition_len": 2, "repetitions": 25, "jitter": 150},
    {"steps": ["sound: CLAP", "sound: CLAP", "lamp: ON"], "delays": [300, 300], "condition_len": 2, "repetitions": 25, "jitter": 50},
]


def _habits(spec) -> list[HabitSpec]:
    try:
        return [
            HabitSpec(
                steps=tuple(h["steps"]),
                delays=tuple(h["delays"]),
                condition_len=h.get("condition_len", 1),
                repetitions=h.get("repetitions", 25),
                jitter=h.get("jitter", 0),
            )
            for h in spec
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad habit spec: {exc}") from exc


def cmd_synth(args, out: TextIO) -> int:
    habits = _habits(_read_json(args.habits) if args.habits else DEFAULT_HABITS)
    try:
        log_ = generate_synthetic(habits, args.length, args.seed, window=args.window, noise_mean_gap=args.noise_gap)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    records = []
    for t, item in log_.events:
        source, _, value = item.partition(": ")
        records.append(EventRecord(t, source, value))
    text = serialize_events(records, "csv")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    if args.truth:
        truth = [dict(rule_to_json(g.rule, args.window or 0), recoverable=g.recoverable) for g in log_.truth]
        for obj in truth:
            del obj["rel_support"], obj["interest"]
        Path(args.truth).write_text(json.dumps(truth, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_stats(args, out: TextIO) -> int:
    summaries = []
    for path in args.rules:
        try:
            with open(path, encoding="utf-8") as fh:
                rules = [json.loads(line) for line in fh if line.strip()]
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read rule file {path}: {exc}") from exc
        summaries.append(dict(summarize(rules), file=path))
    summaries.sort(key=lambda s: (s["window_ms"] if isinstance(s["window_ms"], int) else -1, s["file"]))
    counts = [s["rule_count"] for s in summaries]
    result = {
        "files": summaries,
        "rule_count_non_decreasing_with_window": all(a <= b for a, b in zip(counts, counts[1:])),
    }
    out.write(json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tsrules", description="Mine semi-ordered prediction rules from an event time series.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("mine", help="mine rules from an event log")
    m.add_argument("input")
    m.add_argument("--format", choices=["csv", "jsonl"])
    m.add_argument("--window", type=_duration, required=True, help="e.g. 500ms, 2s, 5m, or integer ms")
    m.add_argument("--min-sup", type=int, default=20)
    m.add_argument("--min-int", type=float, default=0.9)
    m.add_argument("--measure", choices=[x.value for x in Measure], default="netconf")
    m.add_argument("--predict-only", metavar="FILE", help="actuator source ids / globs, one per line")
    m.add_argument("--condition-only", metavar="FILE", help="source ids / globs allowed in conditions")
    m.add_argument("--max-condition", type=int)
    m.add_argument("--max-prediction", type=int)
    m.add_argument("--discretize", metavar="JSON", help='{"source": {"width": 1} | {"cuts": [..]}}')
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("-o", "--output", help="rule JSONL (default stdout)")
    m.add_argument("--stats", help="stats JSON (default: one line on stderr)")
    m.set_defaults(func=cmd_mine)

    b = sub.add_parser("baseline", help="compare transaction and time-series support for one rule")
    b.add_argument("input", nargs="?", help="event log; omit for the built-in x/y example")
    b.add_argument("--format", choices=["csv", "jsonl"])
    b.add_argument("--delta-tr", type=_duration, default=5000)
    b.add_argument("--window", type=_duration, default=5000)
    b.add_argument("--condition")
    b.add_argument("--prediction")
    b.set_defaults(func=cmd_baseline)

    s = sub.add_parser("synth", help="generate a synthetic habit log")
    s.add_argument("--habits", metavar="JSON")
    s.add_argument("--length", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--window", type=_duration)
    s.add_argument("--noise-gap", type=_duration, default=5000, help="mean gap between noise events")
    s.add_argument("-o", "--output", help="events CSV (default stdout)")
    s.add_argument("--truth", help="ground-truth rules JSON")
    s.set_defaults(func=cmd_synth)

    st = sub.add_parser("stats", help="summarize rule files")
    st.add_argument("rules", nargs="+")
    st.set_defaults(func=cmd_stats)
    return p


def run_cli(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        if getattr(args, "min_sup", 1) < 1:
            raise ConfigError("--min-sup must be >= 1")
        if getattr(args, "workers", 1) < 1:
            raise ConfigError("--workers must be >= 1")
        return args.func(args, out)
    except ConfigError as exc:
        print(f"tsrules: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"tsrules: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run_cli())
