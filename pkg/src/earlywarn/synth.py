"""Synthetic tweet and case series with a planted ground truth."""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date

import numpy as np

from .series import ANALYSIS_START, DailySeries


@dataclass(frozen=True)
class SynthSpec:
    length_days: int
    breakpoint: int | None = None
    base_level: float = 10.0
    slope: float = 0.1
    growth_rate: float = 0.2
    noise_sigma: float = 0.0
    seed: int = 0
    start_date: date = ANALYSIS_START
    state_token: str = "Synthetic, USA"

    def validate(self) -> None:
        if self.length_days < 1:
            raise ValueError("length_days must be positive")
        if self.breakpoint is not None and not 1 <= self.breakpoint <= self.length_days - 1:
            raise ValueError(f"breakpoint {self.breakpoint} outside [1, {self.length_days - 1}]")
        if self.noise_sigma < 0 or not math.isfinite(self.noise_sigma):
            raise ValueError("noise_sigma must be finite and >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def noiseless_curve(spec: SynthSpec) -> np.ndarray:
    """Line up to the breakpoint, then an exponential anchored at the line's value there."""
    t = np.arange(spec.length_days, dtype=float)
    y = spec.base_level + spec.slope * t
    if spec.breakpoint is not None:
        b = spec.breakpoint
        anchor = spec.base_level + spec.slope * b
        y = np.where(t < b, y, anchor * np.exp(spec.growth_rate * (t - b)))
    return y


def generate_tweets(spec: SynthSpec) -> DailySeries:
    spec.validate()
    y = noiseless_curve(spec)
    if spec.noise_sigma > 0:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        y = y + rng.normal(0.0, spec.noise_sigma, size=spec.length_days)
    y = np.rint(np.maximum(y, 0.0))
    return DailySeries(spec.state_token, spec.start_date, y, "tweet_count")


def generate_cases(
    length_days: int,
    crossing_day: int,
    start_date: date = ANALYSIS_START,
    state_token: str = "Synthetic, USA",
) -> DailySeries:
    """Cumulative cases that are exactly 100 the day before ``crossing_day`` and 101 on it."""
    if not 1 <= crossing_day < length_days:
        raise ValueError(f"crossing_day must be in [1, {length_days - 1}], got {crossing_day}")
    t = np.arange(length_days)
    before = np.floor(100.0 * (t + 1) / crossing_day)
    after = np.rint(101.0 * 1.2 ** (t - crossing_day))
    vals = np.where(t < crossing_day, np.minimum(before, 100.0), after)
    return DailySeries(state_token, start_date, vals, "cumulative_cases")
