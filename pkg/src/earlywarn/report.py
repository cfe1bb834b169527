"""Outbreak report tables, per-state SVG charts and the tweet distribution summary."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import EarlyWarnError

if TYPE_CHECKING:
    from .detect import ChangepointResult
    from .series import DailySeries

REPORT_COLUMNS = ("state", "informal_outbreak", "formal_outbreak", "time_lag_days")
JSON_KEYS = REPORT_COLUMNS + ("improvement", "tweet_total")


@dataclass(frozen=True)
class OutbreakReportRow:
    state_token: str
    informal_date: date | None = None
    formal_date: date | None = None
    lag_days: int | None = None
    improvement: float | None = None
    tweet_total: int = 0

    def __post_init__(self):
        both = self.informal_date is not None and self.formal_date is not None
        if both != (self.lag_days is not None):
            raise ValueError("lag_days must be present exactly when both dates are")
        if both and (self.formal_date - self.informal_date).days != self.lag_days:
            raise ValueError("lag_days disagrees with the dates")


def _iso(d: date | None) -> str:
    return d.isoformat() if d is not None else ""


def report_csv(rows: Sequence[OutbreakReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([r.state_token, _iso(r.informal_date), _iso(r.formal_date),
                    "" if r.lag_days is None else str(r.lag_days)])
    return buf.getvalue()


def report_json(rows: Sequence[OutbreakReportRow]) -> str:
    objs = []
    for r in rows:
        objs.append({
            "state": r.state_token,
            "informal_outbreak": r.informal_date.isoformat() if r.informal_date else None,
            "formal_outbreak": r.formal_date.isoformat() if r.formal_date else None,
            "time_lag_days": r.lag_days,
            "improvement": None if r.improvement is None else round(float(r.improvement), 6),
            "tweet_total": int(r.tweet_total),
        })
    return json.dumps(objs, indent=2) + "\n"


def write_report(rows: Sequence[OutbreakReportRow], format: str, path: str | Path) -> None:
    """Write Table-1 style rows (sorted by state token) as CSV or JSON."""
    keys = [r.state_token for r in rows]
    if keys != sorted(keys):
        raise ValueError("report rows must be sorted by state token")
    if format == "csv":
        text = report_csv(rows)
    elif format == "json":
        text = report_json(rows)
    else:
        raise ValueError(f"unknown report format {format!r}")
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise EarlyWarnError(f"cannot write report {path}: {exc}") from exc


def read_report_csv(path: str | Path) -> list[OutbreakReportRow]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise ValueError(f"{path}: unexpected report header {reader.fieldnames}")
        for rec in reader:
            rows.append(OutbreakReportRow(
                state_token=rec["state"],
                informal_date=date.fromisoformat(rec["informal_outbreak"]) if rec["informal_outbreak"] else None,
                formal_date=date.fromisoformat(rec["formal_outbreak"]) if rec["formal_outbreak"] else None,
                lag_days=int(rec["time_lag_days"]) if rec["time_lag_days"] else None,
            ))
    return rows


# --- distribution summary --------------------------------------------------

def state_distribution_summary(counts: Mapping[str, "DailySeries"]) -> list[tuple[str, int]]:
    """``(state, total_tweets)`` rows, largest total first (ties by name)."""
    rows = [(tok, int(round(s.total))) for tok, s in counts.items()]
    return sorted(rows, key=lambda r: (-r[1], r[0]))


def write_distribution_csv(rows: Iterable[tuple[str, int]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("state", "total_tweets"))
        w.writerows(rows)


# --- charts ----------------------------------------------------------------

WIDTH, HEIGHT = 900, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 830, 50, 360

TWEET_COLOR = "#1f77b4"
CASE_COLOR = "#ff7f0e"


def _f(x: float) -> str:
    return f"{x:.2f}"


def _headroom(vmax: float) -> float:
    return vmax * 1.1 if vmax > 0 else 1.0


def render_chart_svg(
    tweets: "DailySeries",
    cases: "DailySeries | None" = None,
    result: "ChangepointResult | None" = None,
    formal: date | None = None,
    title: str | None = None,
) -> str:
    """Tweet counts (left axis) against cumulative cases (right axis).

    Stable element ids: ``tweet-line``, ``case-line``, ``trend-line``,
    ``formal-marker``, ``informal-marker``; the last three appear only when
    their inputs are present.
    """
    n = len(tweets)
    if n == 0 or (cases is not None and len(cases) == 0):
        raise EarlyWarnError("cannot chart an empty series")
    x0 = tweets.start_date
    span = max(n - 1, 1)

    def x_of(d: date) -> float:
        return LEFT + (d - x0).days * (RIGHT - LEFT) / span

    def y_of(v: float, top: float) -> float:
        return BOTTOM - v * (BOTTOM - TOP) / top

    t_top = _headroom(float(tweets.values.max()))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text id="title" x="{WIDTH // 2}" y="28" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title or tweets.state_token)}</text>',
        f'<line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}" stroke="#444"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{BOTTOM}" stroke="{TWEET_COLOR}"/>',
        f'<line x1="{RIGHT}" y1="{TOP}" x2="{RIGHT}" y2="{BOTTOM}" stroke="{CASE_COLOR}"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        y = BOTTOM - frac * (BOTTOM - TOP)
        parts.append(f'<text x="{LEFT - 6}" y="{_f(y + 4)}" text-anchor="end" font-family="sans-serif" '
                     f'font-size="10" fill="{TWEET_COLOR}">{frac * t_top:.0f}</text>')
    for i in (0, n // 2, n - 1):
        d = tweets.date_at(i)
        parts.append(f'<text x="{_f(x_of(d))}" y="{BOTTOM + 16}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="10">{d.isoformat()}</text>')
    parts.append(f'<text id="x-label" x="{(LEFT + RIGHT) // 2}" y="{BOTTOM + 40}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">date</text>')
    parts.append(f'<text id="y-label-left" x="18" y="{(TOP + BOTTOM) // 2}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" fill="{TWEET_COLOR}" '
                 f'transform="rotate(-90 18 {(TOP + BOTTOM) // 2})">tweets per day</text>')

    pts = " ".join(f"{_f(x_of(d))},{_f(y_of(v, t_top))}" for d, v in zip(tweets.dates(), tweets.values))
    parts.append(f'<polyline id="tweet-line" points="{pts}" fill="none" stroke="{TWEET_COLOR}" stroke-width="1.5"/>')

    if cases is not None:
        lo = max(0, cases.index_of(tweets.start_date))
        hi = min(len(cases), cases.index_of(tweets.end_date) + 1)
        if hi > lo:
            seg = cases.values[lo:hi]
            c_top = _headroom(float(seg.max()))
            cpts = " ".join(f"{_f(x_of(cases.date_at(i)))},{_f(y_of(v, c_top))}"
                            for i, v in zip(range(lo, hi), seg))
            parts.append(f'<polyline id="case-line" points="{cpts}" fill="none" stroke="{CASE_COLOR}" '
                         f'stroke-width="1.5"/>')
            for frac in (0.0, 0.5, 1.0):
                y = BOTTOM - frac * (BOTTOM - TOP)
                parts.append(f'<text x="{RIGHT + 6}" y="{_f(y + 4)}" font-family="sans-serif" '
                             f'font-size="10" fill="{CASE_COLOR}">{frac * c_top:.0f}</text>')
            parts.append(f'<text id="y-label-right" x="{WIDTH - 14}" y="{(TOP + BOTTOM) // 2}" '
                         f'text-anchor="middle" font-family="sans-serif" font-size="12" fill="{CASE_COLOR}" '
                         f'transform="rotate(90 {WIDTH - 14} {(TOP + BOTTOM) // 2})">cumulative cases</text>')

    if result is not None:
        lin = result.linear
        d_a, d_b = result.window_start, result.informal_date
        ya = float(np.clip(lin.predict(0), 0, t_top))
        yb = float(np.clip(lin.predict(result.breakpoint_index), 0, t_top))
        parts.append(f'<line id="trend-line" x1="{_f(x_of(d_a))}" y1="{_f(y_of(ya, t_top))}" '
                     f'x2="{_f(x_of(d_b))}" y2="{_f(y_of(yb, t_top))}" stroke="#000000" stroke-width="2"/>')

    def marker(ident: str, d: date, color: str, label: str) -> str:
        x = _f(x_of(d))
        return (f'<g id={quoteattr(ident)}><line x1="{x}" y1="{TOP}" x2="{x}" y2="{BOTTOM}" '
                f'stroke="{color}" stroke-width="1.5"/><text x="{x}" y="{TOP - 6}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="10" fill="{color}">{escape(label)} {d.isoformat()}</text></g>')

    if formal is not None and tweets.start_date <= formal <= tweets.end_date:
        parts.append(marker("formal-marker", formal, "#d62728", "formal"))
    if result is not None:
        parts.append(marker("informal-marker", result.informal_date, "#2ca02c", "informal"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_chart(
    tweets: "DailySeries",
    cases: "DailySeries | None",
    result: "ChangepointResult | None",
    formal: date | None,
    path: str | Path,
    title: str | None = None,
) -> None:
    Path(path).write_text(render_chart_svg(tweets, cases, result, formal, title), encoding="utf-8")
