"""Holt linear-trend forecasting of annual launch demand.

Two smoothing recursions (level and trend) plus an affine forecast
``level + h * trend``.  Initialization is the textbook one: level = first
observation, trend = first difference, which makes the forecaster exact on
affine series for any smoothing parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = ["HoltParams", "HoltState", "holt_fit", "holt_forecast", "demand_total"]

DEFAULT_ALPHA = 0.6
DEFAULT_BETA = 0.05
DEFAULT_TARGET_YEAR = 2030
DEFAULT_TOTAL_DEMAND = 273


@dataclass(frozen=True)
class HoltParams:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha out of [0, 1]: {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta out of [0, 1]: {self.beta}")


@dataclass(frozen=True)
class HoltState:
    level: float
    trend: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.level) and math.isfinite(self.trend)):
            raise ValueError("non-finite Holt state")


def holt_fit(series: Sequence[tuple[int, float]], params: HoltParams) -> HoltState:
    """Run the level/trend smoothing recursions over an annual series."""
    if len(series) < 2:
        raise ValueError("need at least 2 observations to estimate a trend")
    values = [float(v) for _, v in series]
    level = values[0]
    trend = values[1] - values[0]
    for y in values[1:]:
        prev_level = level
        level = params.alpha * y + (1.0 - params.alpha) * (level + trend)
        trend = params.beta * (level - prev_level) + (1.0 - params.beta) * trend
    return HoltState(level, trend)


def holt_forecast(state: HoltState, h: int) -> float:
    """h-step-ahead forecast, affine in h."""
    if h < 1:
        raise ValueError(f"horizon must be >= 1: {h}")
    return state.level + h * state.trend


def demand_total(
    series: Sequence[tuple[int, float]] | None,
    params: HoltParams = HoltParams(),
    target_year: int = DEFAULT_TARGET_YEAR,
    default_total: int = DEFAULT_TOTAL_DEMAND,
) -> int:
    """Forecast total annual demand for `target_year`, rounded half-up, >= 0.

    With no series supplied, returns the configured default total.
    """
    if series is None or len(series) == 0:
        return default_total
    last_year = series[-1][0]
    if target_year <= last_year:
        raise ValueError(f"target year {target_year} not after series end {last_year}")
    state = holt_fit(series, params)
    forecast = holt_forecast(state, target_year - last_year)
    return max(0, math.floor(forecast + 0.5))
