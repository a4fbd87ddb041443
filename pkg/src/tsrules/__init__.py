"""Mining semi-ordered prediction rules from a time series of discrete events."""

from .interest import Measure, UndefinedMeasureError, confidence, conviction, lift, lift_and_conviction, netconf
from .miner import MiningParams, items_in, mine, search_zones
from .model import Multiset, Rule, RuleOccurrence, TimeSeries, build_time_series, canonical_rule_key
from .support import SupportResult, basic_rule_support, count_multiset_support, item_support, relative_support

__all__ = [
    "Measure",
    "MiningParams",
    "Multiset",
    "Rule",
    "RuleOccurrence",
    "SupportResult",
    "TimeSeries",
    "UndefinedMeasureError",
    "basic_rule_support",
    "build_time_series",
    "canonical_rule_key",
    "confidence",
    "conviction",
    "count_multiset_support",
    "item_support",
    "items_in",
    "lift",
    "lift_and_conviction",
    "mine",
    "netconf",
    "relative_support",
    "search_zones",
]

__version__ = "0.1.0"
