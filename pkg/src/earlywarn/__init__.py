"""Early outbreak warning from symptom-mention tweets and official case counts."""
from __future__ import annotations

from .detect import (
    ChangepointResult,
    DetectorConfig,
    ExpFit,
    LinearFit,
    analyze_state,
    analyze_states,
    compute_lag,
    detect_informal_outbreak,
    fit_exponential,
    fit_linear,
    formal_outbreak_date,
    refine_exponential,
)
from .errors import DetectionError, EarlyWarnError, FetchError, GazetteerError, IngestError
from .geonorm import (
    Gazetteer,
    NormalizationOutcome,
    compile_gazetteer,
    default_gazetteer,
    normalize_location,
    state_token_for_case_row,
)
from .ingest import (
    CaseTable,
    IngestStats,
    TweetRecord,
    fetch_cases,
    filter_tweets,
    parse_case_csv,
    parse_tweet_file,
)
from .report import OutbreakReportRow, render_chart, state_distribution_summary, write_report
from .series import DailySeries, daily_tweet_counts, smooth, state_case_series
from .synth import SynthSpec, generate_cases, generate_tweets

__version__ = "0.1.0"

__all__ = [
    "CaseTable",
    "ChangepointResult",
    "DailySeries",
    "DetectionError",
    "DetectorConfig",
    "EarlyWarnError",
    "ExpFit",
    "FetchError",
    "Gazetteer",
    "GazetteerError",
    "IngestError",
    "IngestStats",
    "LinearFit",
    "NormalizationOutcome",
    "OutbreakReportRow",
    "SynthSpec",
    "TweetRecord",
    "analyze_state",
    "analyze_states",
    "compile_gazetteer",
    "compute_lag",
    "daily_tweet_counts",
    "default_gazetteer",
    "detect_informal_outbreak",
    "fetch_cases",
    "filter_tweets",
    "fit_exponential",
    "fit_linear",
    "formal_outbreak_date",
    "generate_cases",
    "generate_tweets",
    "normalize_location",
    "parse_case_csv",
    "parse_tweet_file",
    "refine_exponential",
    "render_chart",
    "smooth",
    "state_case_series",
    "state_distribution_summary",
    "state_token_for_case_row",
    "write_report",
]
