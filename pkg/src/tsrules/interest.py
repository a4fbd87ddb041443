"""Rule interestingness from relative supports.

All measures take ``(s_c, s_p, s_r)``: relative supports of the condition,
the prediction and the rule.
"""

from __future__ import annotations

import logging
import math
from enum import Enum
from typing import Callable

log = logging.getLogger(__name__)


class UndefinedMeasureError(ArithmeticError):
    """A measure's denominator vanishes for the given supports."""


def netconf_raw(s_c: float, s_p: float, s_r: float) -> float:
    if s_c <= 0.0 or s_c >= 1.0:
        raise UndefinedMeasureError(f"netconf undefined for s_c={s_c}")
    return (s_r - s_c * s_p) / (s_c * (1.0 - s_c))


def netconf(s_c: float, s_p: float, s_r: float) -> float:
    """netconf clamped to [-1, 1]."""
    value = netconf_raw(s_c, s_p, s_r)
    if value < -1.0 or value > 1.0:
        log.debug("netconf %.6g out of [-1, 1] for (%g, %g, %g); clamped", value, s_c, s_p, s_r)
        return max(-1.0, min(1.0, value))
    return value


def confidence(s_c: float, s_p: float, s_r: float) -> float:
    if s_c <= 0.0:
        raise UndefinedMeasureError("confidence undefined for s_c=0")
    return s_r / s_c


def lift(s_c: float, s_p: float, s_r: float) -> float:
    if s_c <= 0.0 or s_p <= 0.0:
        raise UndefinedMeasureError("lift undefined for zero side support")
    return s_r / (s_c * s_p)


def conviction(s_c: float, s_p: float, s_r: float) -> float:
    # confidence == 1 gives +inf rather than an error
    conf = confidence(s_c, s_p, s_r)
    if conf >= 1.0:
        return math.inf
    return (1.0 - s_p) / (1.0 - conf)


def lift_and_conviction(s_c: float, s_p: float, s_r: float) -> tuple[float, float]:
    return lift(s_c, s_p, s_r), conviction(s_c, s_p, s_r)


class Measure(str, Enum):
    NETCONF = "netconf"
    CONFIDENCE = "confidence"
    LIFT = "lift"
    CONVICTION = "conviction"

    def __call__(self, s_c: float, s_p: float, s_r: float) -> float:
        return _FUNCS[self](s_c, s_p, s_r)


_FUNCS: dict[Measure, Callable[[float, float, float], float]] = {
    Measure.NETCONF: netconf,
    Measure.CONFIDENCE: confidence,
    Measure.LIFT: lift,
    Measure.CONVICTION: conviction,
}
