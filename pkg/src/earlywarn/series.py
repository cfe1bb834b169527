"""Continuous per-state daily series: tweet counts and cumulative cases."""
from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass, replace
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geonorm import NormalizationOutcome, state_token_for_case_row
from .ingest import CASES_START, STUDY_END, CaseTable, TweetRecord

log = logging.getLogger(__name__)

ANALYSIS_START = date(2019, 12, 1)
ANALYSIS_WINDOW = (ANALYSIS_START, STUDY_END)

KINDS = ("tweet_count", "cumulative_cases", "smoothed_tweet_count")


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Gap-free daily values; ``values[i]`` belongs to ``start_date + i`` days."""

    state_token: str
    start_date: date
    values: np.ndarray
    kind: str = "tweet_count"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if self.kind not in KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("series values must be finite and non-negative")
        if self.kind == "cumulative_cases" and np.any(np.diff(v) < 0):
            raise ValueError("cumulative series must be non-decreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, DailySeries):
            return NotImplemented
        return (self.state_token, self.start_date, self.kind) == (
            other.state_token, other.start_date, other.kind
        ) and np.array_equal(self.values, other.values)

    @property
    def end_date(self) -> date:
        return self.start_date + timedelta(days=len(self.values) - 1)

    def dates(self) -> list[date]:
        return [self.start_date + timedelta(days=i) for i in range(len(self.values))]

    def index_of(self, d: date) -> int:
        return (d - self.start_date).days

    def date_at(self, i: int) -> date:
        return self.start_date + timedelta(days=int(i))

    def between(self, start: date, end: date) -> "DailySeries":
        """Sub-series for ``[start, end]``; both ends must be covered."""
        i, j = self.index_of(start), self.index_of(end)
        if i < 0 or j >= len(self.values) or j < i:
            raise ValueError(f"{self.state_token}: [{start}, {end}] not covered by "
                             f"[{self.start_date}, {self.end_date}]")
        return replace(self, start_date=start, values=self.values[i:j + 1])

    def shifted(self, days: int) -> "DailySeries":
        return replace(self, start_date=self.start_date + timedelta(days=days))

    @property
    def total(self) -> float:
        return float(self.values.sum())


def _days(window: tuple[date, date]) -> int:
    n = (window[1] - window[0]).days + 1
    if n <= 0:
        raise ValueError(f"empty window {window}")
    return n


def daily_tweet_counts(
    records: Sequence[TweetRecord],
    outcomes: Sequence[NormalizationOutcome],
    window: tuple[date, date] = ANALYSIS_WINDOW,
) -> dict[str, DailySeries]:
    """Per-state tweet counts per UTC day over ``window`` (zero-filled)."""
    if len(records) != len(outcomes):
        raise ValueError(f"records ({len(records)}) and outcomes ({len(outcomes)}) are misaligned")
    n = _days(window)
    start = window[0]
    counts: dict[str, np.ndarray] = {}
    for rec, out in zip(records, outcomes):
        if out.state_token is None:
            continue
        i = (rec.day - start).days
        if not 0 <= i < n:
            continue
        arr = counts.get(out.state_token)
        if arr is None:
            arr = counts[out.state_token] = np.zeros(n)
        arr[i] += 1
    return {tok: DailySeries(tok, start, counts[tok], "tweet_count") for tok in sorted(counts)}


def state_case_series(
    table: CaseTable,
    window: tuple[date, date] = ANALYSIS_WINDOW,
) -> dict[str, DailySeries]:
    """Sum county cumulative counts per state over ``window``.

    Days before the first reported date (and always before 2020-01-21) are 0;
    days after the last reported date carry the last value forward.
    """
    n = _days(window)
    start = window[0]
    per_state: dict[str, dict[date, float]] = defaultdict(lambda: defaultdict(float))
    for e in table.entries:
        tok = state_token_for_case_row(e.province_state)
        if tok is None:
            continue
        per_state[tok][e.date] += e.cumulative_cases
    last = table.last_date
    out = {}
    carried = 0
    for tok in sorted(per_state):
        by_date = per_state[tok]
        vals = np.zeros(n)
        running = 0.0
        for i in range(n):
            d = start + timedelta(days=i)
            if d < CASES_START:
                continue
            if d in by_date:
                running = by_date[d]
            elif last is not None and d > last:
                carried += 1
            vals[i] = running
        out[tok] = DailySeries(tok, start, vals, "cumulative_cases")
    if carried:
        log.warning("carried case counts forward past %s for %d state-days", last, carried)
    return out


def smooth(series: DailySeries, window_days: int) -> DailySeries:
    """Centred moving average; edges average over the neighbours that exist."""
    n = len(series)
    if window_days < 1 or window_days % 2 == 0:
        raise ValueError(f"smoothing window must be an odd positive integer, got {window_days}")
    if window_days > n:
        raise ValueError(f"smoothing window {window_days} longer than series ({n})")
    kind = "smoothed_tweet_count" if series.kind != "cumulative_cases" else series.kind
    if window_days == 1:
        return replace(series, kind=kind)
    h = window_days // 2
    csum = np.concatenate([[0.0], np.cumsum(series.values)])
    idx = np.arange(n)
    lo = np.maximum(idx - h, 0)
    hi = np.minimum(idx + h + 1, n)
    return replace(series, values=(csum[hi] - csum[lo]) / (hi - lo), kind=kind)


SERIES_HEADER = ("state_token", "date", "value", "kind")


def write_series_csv(series: Iterable[DailySeries], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for s in series:
            for d, v in zip(s.dates(), s.values):
                w.writerow([s.state_token, d.isoformat(), _fmt(v), s.kind])


def _fmt(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def read_series_csv(path: str | Path) -> list[DailySeries]:
    """Series in order of first appearance; one per (state_token, kind) pair."""
    rows: dict[tuple[str, str], list[tuple[date, float]]] = defaultdict(list)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != SERIES_HEADER:
            raise ValueError(f"{path}: expected header {','.join(SERIES_HEADER)}")
        for tok, d, v, kind in reader:
            rows[(tok, kind)].append((date.fromisoformat(d), float(v)))
    out = []
    for (tok, kind), pts in rows.items():
        pts.sort()
        start = pts[0][0]
        if any((d - start).days != i for i, (d, _) in enumerate(pts)):
            raise ValueError(f"{path}: series {tok!r} has gaps")
        out.append(DailySeries(tok, start, np.array([v for _, v in pts]), kind))
    return out

