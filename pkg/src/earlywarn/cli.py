"""Command-line entry point: ``earlywarn run|fetch-cases|ingest|detect|synth|chart``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import shutil
import sys
import tempfile
from datetime import date, timedelta
from pathlib import Path

from . import geonorm, ingest, report, series, synth
from .detect import DetectorConfig, analyze_states, detect_informal_outbreak, formal_outbreak_date
from .errors import EarlyWarnError

log = logging.getLogger("earlywarn")

DEFAULTS: dict = {
    "tweets": None,
    "tweet_format": "jsonl",
    "cases": None,
    "cases_url": None,
    "gazetteer": None,
    "states": None,
    "keywords": sorted(ingest.DEFAULT_KEYWORDS),
    "exclude": [],
    "study_start": ingest.STUDY_START.isoformat(),
    "study_end": ingest.STUDY_END.isoformat(),
    "threshold": 100,
    "baseline_start": series.ANALYSIS_START.isoformat(),
    "min_linear_days": 21,
    "min_exp_days": 5,
    "improvement_min": 0.10,
    "smoothing_window": 1,
    "log_offset": 1.0,
    "out": None,
    "format": "csv",
    "workers": None,
    "max_age_hours": 12.0,
}

CONFIG_KEYS = frozenset(DEFAULTS)


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit flags (later wins)."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise EarlyWarnError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise EarlyWarnError(f"config {path} must hold a JSON object")
        unknown = set(loaded) - CONFIG_KEYS
        if unknown:
            raise EarlyWarnError(f"config {path}: unknown keys {sorted(unknown)}")
        cfg.update(loaded)
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if isinstance(cfg["states"], str):
        cfg["states"] = [cfg["states"]]
    if cfg["states"] is not None:
        cfg["states"] = sorted({s.strip() for item in cfg["states"] for s in item.split(";") if s.strip()})
    return cfg


def detector_config(cfg: dict) -> DetectorConfig:
    return DetectorConfig(
        case_threshold=int(cfg["threshold"]),
        min_linear_days=int(cfg["min_linear_days"]),
        min_exp_days=int(cfg["min_exp_days"]),
        improvement_min=float(cfg["improvement_min"]),
        smoothing_window=int(cfg["smoothing_window"]),
        baseline_start=date.fromisoformat(cfg["baseline_start"]),
        log_offset=float(cfg["log_offset"]),
    )


def _window(cfg: dict) -> tuple[date, date]:
    return date.fromisoformat(cfg["study_start"]), date.fromisoformat(cfg["study_end"])


def _analysis_window(cfg: dict) -> tuple[date, date]:
    return date.fromisoformat(cfg["baseline_start"]), date.fromisoformat(cfg["study_end"])


def _cases_path(cfg: dict) -> Path:
    if cfg["cases"]:
        return Path(cfg["cases"])
    if cfg["cases_url"]:
        return ingest.fetch_cases(cfg["cases_url"], max_age=timedelta(hours=float(cfg["max_age_hours"])))
    raise EarlyWarnError("one of --cases or --cases-url is required")


def _load_tweet_series(cfg: dict):
    if not cfg["tweets"]:
        raise EarlyWarnError("--tweets is required")
    records, stats = ingest.parse_tweet_file(cfg["tweets"], cfg["tweet_format"], _window(cfg))
    kept = ingest.filter_tweets(records, cfg["keywords"], cfg["exclude"])
    gaz = geonorm.compile_gazetteer(cfg["gazetteer"])
    outcomes = geonorm.normalize_all([r.raw_location for r in kept], gaz)
    counts = series.daily_tweet_counts(kept, outcomes, _analysis_window(cfg))
    summary = {
        "tweets": stats.as_dict(),
        "filtered_out": len(records) - len(kept),
        "located": sum(o.matched for o in outcomes),
        "unlocated": sum(not o.matched for o in outcomes),
    }
    return counts, summary, geonorm.miss_report(outcomes)


def _load_case_series(cfg: dict):
    table = ingest.parse_case_csv(_cases_path(cfg), (ingest.CASES_START, _window(cfg)[1]))
    summary = {
        "data_rows": table.data_rows,
        "date_columns": table.date_columns,
        "skipped_date_columns": table.skipped_date_columns,
        "bad_cells": table.bad_cells,
        "monotonic_repairs": table.monotonic_repairs,
    }
    return series.state_case_series(table, _analysis_window(cfg)), summary


def _file_stem(token: str) -> str:
    return token.split(",")[0].strip()


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


class _Staging:
    """Build outputs in a sibling temp dir; move into place only on success."""

    def __init__(self, out: Path):
        self.out = out
        out.parent.mkdir(parents=True, exist_ok=True)
        self.dir = Path(tempfile.mkdtemp(prefix=f".{out.name}.partial-", dir=out.parent))

    def __enter__(self) -> Path:
        return self.dir

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.out.mkdir(parents=True, exist_ok=True)
            for item in sorted(self.dir.iterdir()):
                dest = self.out / item.name
                if dest.is_dir():
                    shutil.rmtree(dest)
                elif dest.exists():
                    dest.unlink()
                shutil.move(str(item), str(dest))
        shutil.rmtree(self.dir, ignore_errors=True)
        return False


def _series_for(tokens, counts, cases, start, end):
    zeros = [0.0] * ((end - start).days + 1)
    pairs = []
    for tok in tokens:
        tw = counts[tok] if tok in counts else series.DailySeries(tok, start, zeros)
        cs = cases[tok] if tok in cases else series.DailySeries(tok, start, zeros, "cumulative_cases")
        pairs.append((tw, cs))
    return pairs


def cmd_run(cfg: dict) -> int:
    if not cfg["out"]:
        raise EarlyWarnError("--out is required")
    if cfg["format"] not in ("csv", "json"):
        raise EarlyWarnError(f"unknown format {cfg['format']!r}")
    dcfg = detector_config(cfg)
    counts, tweet_summary, misses = _load_tweet_series(cfg)
    cases, case_summary = _load_case_series(cfg)
    if cfg["states"] is not None:
        unknown = [s for s in cfg["states"] if s not in geonorm.STATE_TOKENS]
        if unknown:
            raise EarlyWarnError(f"unknown state tokens: {unknown}")
        tokens = cfg["states"]
    else:
        tokens = sorted(counts)
    start, end = _analysis_window(cfg)
    analyses = analyze_states(_series_for(tokens, counts, cases, start, end), dcfg, cfg["workers"])

    with _Staging(Path(cfg["out"])) as stage:
        rows = [a.row for a in analyses]
        report.write_report(rows, cfg["format"], stage / f"report.{cfg['format']}")
        charts = stage / "charts"
        charts.mkdir()
        for a in analyses:
            report.render_chart(a.tweets, a.cases, a.result, a.formal_date,
                                charts / f"{_file_stem(a.row.state_token)}.svg")
        shown = {t: counts[t] for t in tokens if t in counts}
        report.write_distribution_csv(report.state_distribution_summary(shown), stage / "distribution.csv")
        _write_json(stage / "resolved_config.json", cfg)
        _write_json(stage / "ingest_stats.json", {"tweets": tweet_summary, "cases": case_summary})
        with open(stage / "location_misses.csv", "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("raw_location", "count"))
            w.writerows(misses)
    log.info("wrote %d state rows to %s", len(analyses), cfg["out"])
    return 0


def cmd_fetch_cases(cfg: dict) -> int:
    url = cfg["cases_url"] or ingest.JHU_US_CONFIRMED_URL
    print(ingest.fetch_cases(url, max_age=timedelta(hours=float(cfg["max_age_hours"]))))
    return 0


def cmd_ingest(cfg: dict) -> int:
    if not cfg["out"]:
        raise EarlyWarnError("--out is required")
    counts, tweet_summary, misses = _load_tweet_series(cfg)
    with _Staging(Path(cfg["out"])) as stage:
        series.write_series_csv([counts[t] for t in sorted(counts)], stage / "tweet_series.csv")
        stats = {"tweets": tweet_summary}
        if cfg["cases"] or cfg["cases_url"]:
            cases, stats["cases"] = _load_case_series(cfg)
            series.write_series_csv([cases[t] for t in sorted(cases)], stage / "case_series.csv")
        _write_json(stage / "ingest_stats.json", stats)
    return 0


def _single_state(cfg: dict, state: str):
    if state not in geonorm.STATE_TOKENS:
        raise EarlyWarnError(f"unknown state token {state!r}")
    counts, _, _ = _load_tweet_series(cfg)
    cases, _ = _load_case_series(cfg)
    start, end = _analysis_window(cfg)
    return _series_for([state], counts, cases, start, end)[0]


def cmd_detect(cfg: dict, state: str) -> int:
    dcfg = detector_config(cfg)
    tweets, cases = _single_state(cfg, state)
    formal = formal_outbreak_date(cases, dcfg.case_threshold)
    result = detect_informal_outbreak(tweets, formal, dcfg)
    print(json.dumps({
        "state": state,
        "formal_outbreak": formal.isoformat() if formal else None,
        "changepoint": result.as_dict() if result else None,
    }, indent=2))
    return 0


def cmd_chart(cfg: dict, state: str, path: str) -> int:
    dcfg = detector_config(cfg)
    tweets, cases = _single_state(cfg, state)
    formal = formal_outbreak_date(cases, dcfg.case_threshold)
    result = detect_informal_outbreak(tweets, formal, dcfg)
    report.render_chart(tweets, cases, result, formal, path)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = synth.SynthSpec(
        length_days=args.length,
        breakpoint=args.breakpoint,
        base_level=args.base_level,
        slope=args.slope,
        growth_rate=args.growth_rate,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
        start_date=date.fromisoformat(args.start_date),
        state_token=args.state,
    )
    out = [synth.generate_tweets(spec)]
    if args.crossing_day is not None:
        out.append(synth.generate_cases(args.length, args.crossing_day, spec.start_date, args.state))
    series.write_series_csv(out, args.out)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON object of defaults; keys match long flag names")
    p.add_argument("--tweets", help="tweet record file")
    p.add_argument("--tweet-format", choices=["jsonl", "csv"], dest="tweet_format")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--cases", help="case-count CSV")
    src.add_argument("--cases-url", dest="cases_url", help="download case CSV (cached)")
    p.add_argument("--gazetteer", help="gazetteer CSV (default: bundled)")
    p.add_argument("--keywords", nargs="+")
    p.add_argument("--exclude", nargs="+", help="exclusion phrases")
    p.add_argument("--study-start", dest="study_start")
    p.add_argument("--study-end", dest="study_end")
    p.add_argument("--threshold", type=int)
    p.add_argument("--baseline-start", dest="baseline_start")
    p.add_argument("--min-linear-days", dest="min_linear_days", type=int)
    p.add_argument("--min-exp-days", dest="min_exp_days", type=int)
    p.add_argument("--improvement-min", dest="improvement_min", type=float)
    p.add_argument("--smoothing-window", dest="smoothing_window", type=int)
    p.add_argument("--log-offset", dest="log_offset", type=float)
    p.add_argument("--max-age-hours", dest="max_age_hours", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="earlywarn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full pipeline over all (or selected) states")
    _add_common(p)
    p.add_argument("--states", action="append", help="state tokens, ';'-separated or repeated")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--workers", type=int)

    p = sub.add_parser("fetch-cases", help="download and cache the case CSV")
    p.add_argument("--cases-url", dest="cases_url")
    p.add_argument("--max-age-hours", dest="max_age_hours", type=float)
    p.add_argument("--config")

    p = sub.add_parser("ingest", help="tweet (and case) files -> daily series CSV")
    _add_common(p)
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("detect", help="changepoint JSON for one state")
    _add_common(p)
    p.add_argument("--state", required=True)

    p = sub.add_parser("chart", help="SVG chart for one state")
    _add_common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--svg", required=True, help="output SVG path")

    p = sub.add_parser("synth", help="synthetic series CSV with a planted breakpoint")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--breakpoint", type=int)
    p.add_argument("--base-level", dest="base_level", type=float, default=10.0)
    p.add_argument("--slope", type=float, default=0.1)
    p.add_argument("--growth-rate", dest="growth_rate", type=float, default=0.2)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start-date", dest="start_date", default=series.ANALYSIS_START.isoformat())
    p.add_argument("--state", default="Synthetic, USA")
    p.add_argument("--crossing-day", dest="crossing_day", type=int)
    p.add_argument("--out", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args)
        cfg = resolve_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "fetch-cases":
            return cmd_fetch_cases(cfg)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "detect":
            return cmd_detect(cfg, args.state)
        if args.command == "chart":
            return cmd_chart(cfg, args.state, args.svg)
    except (EarlyWarnError, ValueError, OSError) as exc:
        print(f"earlywarn: error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
