"""Formal and informal outbreak dates for one state, and the lag between them.

The formal outbreak is the first day cumulative confirmed cases exceed a
threshold.  The informal outbreak is the day a symptom-tweet series turns
from linear to exponential growth, found by exhaustive two-segment
least-squares search: a straight line up to the breakpoint day and an
exponential from that day on, both scored in count space.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DetectionError
from .report import OutbreakReportRow
from .series import ANALYSIS_START, DailySeries, smooth

# relative cost difference below which two breakpoints count as tied
TIE_RTOL = 1e-12
_GROWTH_BOUNDS = (-2.0, 5.0)


@dataclass(frozen=True)
class DetectorConfig:
    case_threshold: int = 100
    min_linear_days: int = 21
    min_exp_days: int = 5
    improvement_min: float = 0.10
    smoothing_window: int = 1
    baseline_start: date = ANALYSIS_START
    log_offset: float = 1.0

    def __post_init__(self):
        if self.case_threshold <= 0:
            raise ValueError("case_threshold must be positive")
        if self.min_linear_days < 2 or self.min_exp_days < 2:
            raise ValueError("segments need at least 2 days each")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise ValueError("smoothing_window must be an odd positive integer")
        if self.log_offset <= 0:
            raise ValueError("log_offset must be positive")


DEFAULT_CONFIG = DetectorConfig()


@dataclass(frozen=True)
class LinearFit:
    """``value(t) = intercept + slope * t`` with ``t`` the index in the fitted array."""

    slope: float
    intercept: float
    sse: float
    sigma_resid: float
    n: int

    def predict(self, t):
        return self.intercept + self.slope * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class ExpFit:
    """``value(t) = exp(log_level + growth_rate * t)``, ``t`` indexed like LinearFit."""

    log_level: float
    growth_rate: float
    sse_original_scale: float
    n: int

    def predict(self, t):
        return np.exp(self.log_level + self.growth_rate * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class ChangepointResult:
    informal_date: date
    linear: LinearFit
    exponential: ExpFit
    cost_piecewise: float
    cost_single_line: float
    improvement: float
    window_start: date
    breakpoint_index: int
    single_line: LinearFit = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "informal_date": self.informal_date.isoformat(),
            "window_start": self.window_start.isoformat(),
            "breakpoint_index": self.breakpoint_index,
            "cost_piecewise": self.cost_piecewise,
            "cost_single_line": self.cost_single_line,
            "improvement": self.improvement,
            "linear": {"slope": self.linear.slope, "intercept": self.linear.intercept,
                       "sse": self.linear.sse, "sigma_resid": self.linear.sigma_resid,
                       "n": self.linear.n},
            "exponential": {"log_level": self.exponential.log_level,
                            "growth_rate": self.exponential.growth_rate,
                            "sse_original_scale": self.exponential.sse_original_scale,
                            "n": self.exponential.n},
        }


def _values(series) -> np.ndarray:
    if isinstance(series, DailySeries):
        return series.values
    return np.asarray(series, dtype=float)


def _span(y: np.ndarray, lo: int, hi: int | None) -> tuple[int, int]:
    hi = len(y) if hi is None else hi
    if not 0 <= lo < hi <= len(y):
        raise DetectionError(f"index range [{lo}, {hi}) outside series of length {len(y)}")
    if hi - lo < 2:
        raise DetectionError(f"fit needs at least 2 points, got {hi - lo}")
    return lo, hi


def _ols(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    tm, ym = t.mean(), y.mean()
    dt = t - tm
    slope = float(dt @ (y - ym) / (dt @ dt))
    return slope, float(ym - slope * tm)


def fit_linear(series, lo: int = 0, hi: int | None = None) -> LinearFit:
    """Ordinary least squares of value on day index over ``[lo, hi)``."""
    y = _values(series)
    lo, hi = _span(y, lo, hi)
    t = np.arange(lo, hi, dtype=float)
    ys = y[lo:hi]
    slope, intercept = _ols(t, ys)
    r = ys - (intercept + slope * t)
    sse = float(r @ r)
    n = hi - lo
    sigma = math.sqrt(sse / (n - 2)) if n > 2 else math.nan
    return LinearFit(slope, intercept, sse, sigma, n)


def fit_exponential(series, lo: int = 0, hi: int | None = None, log_offset: float = 1.0) -> ExpFit:
    """Log-linear OLS: regress ``log(value + log_offset)`` on day index.

    The reported SSE is measured back on the count scale, against
    ``exp(fitted) - log_offset``.
    """
    if log_offset <= 0:
        raise ValueError("log_offset must be positive")
    y = _values(series)
    lo, hi = _span(y, lo, hi)
    t = np.arange(lo, hi, dtype=float)
    ys = y[lo:hi]
    g, a = _ols(t, np.log(ys + log_offset))
    r = ys - (np.exp(a + g * t) - log_offset)
    return ExpFit(a, g, float(r @ r), hi - lo)


def refine_exponential(series, lo: int = 0, hi: int | None = None, log_offset: float = 1.0) -> ExpFit:
    """Least-squares fit of ``exp(a + g*t)`` on the count scale.

    Starts from the log-linear fit, profiles the amplitude out (it is linear
    given the rate), minimises over the rate and finishes with Gauss-Newton.
    """
    y = _values(series)
    lo, hi = _span(y, lo, hi)
    ys = y[lo:hi]
    start = fit_exponential(y, lo, hi, log_offset)
    # measure time back from the last point so exp(g*tt) <= 1 for g > 0
    t_last = hi - 1
    tt = np.arange(lo - t_last, 1, dtype=float)

    def profile(g: float) -> tuple[float, float]:
        e = np.exp(g * tt)
        amp = float(ys @ e / (e @ e))
        r = ys - amp * e
        return float(r @ r), amp

    g0 = float(np.clip(start.growth_rate, *_GROWTH_BOUNDS))
    best_cost, _ = profile(g0)
    g = g0
    res = minimize_scalar(
        lambda x: profile(x)[0],
        bounds=(max(g0 - 1.0, _GROWTH_BOUNDS[0]), min(g0 + 1.0, _GROWTH_BOUNDS[1])),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if res.success and res.fun < best_cost:
        g = float(res.x)
    cost, amp = profile(g)
    if amp <= 0:
        return ExpFit(-math.inf, g, cost, hi - lo)

    # Gauss-Newton polish on (log amplitude, rate)
    p = np.array([math.log(amp), g])

    def sse(q):
        r = np.exp(q[0] + q[1] * tt) - ys
        return float(r @ r), r

    cost, r = sse(p)
    for _ in range(20):
        m = r + ys
        step, *_ = np.linalg.lstsq(np.column_stack([m, m * tt]), -r, rcond=None)
        q = p + step
        q[1] = np.clip(q[1], *_GROWTH_BOUNDS)
        new_cost, new_r = sse(q)
        if not new_cost < cost:
            break
        done = cost - new_cost <= 1e-15 * cost
        p, cost, r = q, new_cost, new_r
        if done:
            break
    return ExpFit(float(p[0] - p[1] * t_last), float(p[1]), cost, hi - lo)


def formal_outbreak_date(cases: DailySeries, threshold: int = 100) -> date | None:
    """First date whose cumulative count is strictly above ``threshold``."""
    v = cases.values
    if np.any(np.diff(v) < 0):
        raise DetectionError(f"{cases.state_token}: cumulative case series is not monotone")
    hits = np.flatnonzero(v > threshold)
    return cases.date_at(hits[0]) if hits.size else None


def candidate_breakpoints(n: int, cfg: DetectorConfig) -> range:
    """Admissible breakpoint indices for a window of ``n`` days.

    The breakpoint day closes the linear segment and opens the exponential one.
    """
    return range(cfg.min_linear_days - 1, n - cfg.min_exp_days + 1)


def breakpoint_costs(y: np.ndarray, cfg: DetectorConfig) -> list[tuple[int, float, LinearFit, ExpFit]]:
    n = len(y)
    out = []
    for k in candidate_breakpoints(n, cfg):
        lin = fit_linear(y, 0, k + 1)
        ex = refine_exponential(y, k, n, cfg.log_offset)
        out.append((k, lin.sse + ex.sse_original_scale, lin, ex))
    return out


def detect_informal_outbreak(
    tweets: DailySeries,
    formal_date: date | None = None,
    cfg: DetectorConfig = DEFAULT_CONFIG,
) -> ChangepointResult | None:
    """Estimate the first day of exponential growth in a tweet series.

    The search window runs from ``cfg.baseline_start`` to the formal outbreak
    date (or the series end).  Returns ``None`` when the best two-segment fit
    has non-positive growth or does not beat a single line by
    ``cfg.improvement_min``.
    """
    end = tweets.end_date if formal_date is None else min(formal_date, tweets.end_date)
    window = tweets.between(cfg.baseline_start, end) if end >= cfg.baseline_start else None
    n = 0 if window is None else len(window)
    if n < cfg.min_linear_days + cfg.min_exp_days:
        raise DetectionError(
            f"{tweets.state_token}: search window {cfg.baseline_start}..{end} has {n} days, "
            f"need {cfg.min_linear_days + cfg.min_exp_days}"
        )
    y = smooth(window, cfg.smoothing_window).values
    single = fit_linear(y)
    costs = breakpoint_costs(y, cfg)
    cmin = min(c for _, c, _, _ in costs)
    k, cost, lin, ex = next(item for item in costs if item[1] <= cmin * (1 + TIE_RTOL))

    cs = single.sse
    improvement = 1.0 - cost / cs if cs > 0 else 0.0
    if ex.growth_rate <= 0 or improvement < cfg.improvement_min:
        return None
    return ChangepointResult(
        informal_date=window.date_at(k),
        linear=lin,
        exponential=ex,
        cost_piecewise=cost,
        cost_single_line=cs,
        improvement=improvement,
        window_start=window.start_date,
        breakpoint_index=k,
        single_line=single,
    )


def compute_lag(informal: date, formal: date) -> int:
    """Days from the informal to the formal outbreak (negative if later)."""
    return (formal - informal).days


@dataclass(frozen=True)
class StateAnalysis:
    row: OutbreakReportRow
    result: ChangepointResult | None
    formal_date: date | None
    tweets: DailySeries
    cases: DailySeries


def _analyze(tweets: DailySeries, cases: DailySeries, cfg: DetectorConfig) -> StateAnalysis:
    formal = formal_outbreak_date(cases, cfg.case_threshold)
    result = detect_informal_outbreak(tweets, formal, cfg)
    informal = result.informal_date if result else None
    lag = compute_lag(informal, formal) if informal and formal else None
    row = OutbreakReportRow(
        state_token=tweets.state_token,
        informal_date=informal,
        formal_date=formal,
        lag_days=lag,
        improvement=result.improvement if result else None,
        tweet_total=int(round(tweets.total)),
    )
    return StateAnalysis(row, result, formal, tweets, cases)


def analyze_state(tweets: DailySeries, cases: DailySeries, cfg: DetectorConfig = DEFAULT_CONFIG) -> OutbreakReportRow:
    """Formal date, informal date and lag for one state.

    Missing pieces stay ``None``; no date is ever synthesised.
    """
    return _analyze(tweets, cases, cfg).row


def analyze_states(
    pairs: Iterable[tuple[DailySeries, DailySeries]],
    cfg: DetectorConfig = DEFAULT_CONFIG,
    max_workers: int | None = None,
) -> list[StateAnalysis]:
    """Analyse many states, possibly concurrently; results sorted by state token."""
    pairs = list(pairs)
    if max_workers == 1 or len(pairs) <= 1:
        out = [_analyze(t, c, cfg) for t, c in pairs]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            out = list(pool.map(lambda p: _analyze(p[0], p[1], cfg), pairs))
    return sorted(out, key=lambda a: a.row.state_token)


def shift_config(cfg: DetectorConfig, days: int) -> DetectorConfig:
    """Same config with the baseline start moved by ``days``."""
    return replace(cfg, baseline_start=cfg.baseline_start + timedelta(days=days))


__all__: Sequence[str] = [
    "DetectorConfig", "LinearFit", "ExpFit", "ChangepointResult", "StateAnalysis",
    "fit_linear", "fit_exponential", "refine_exponential", "formal_outbreak_date",
    "candidate_breakpoints", "breakpoint_costs", "detect_informal_outbreak",
    "compute_lag", "analyze_state", "analyze_states", "shift_config",
]
