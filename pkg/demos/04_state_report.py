# %% [markdown]
# # Per-state report and charts
#
# Formal outbreak: the first day cumulative cases exceed 100.  Informal
# outbreak: the detected start of exponential tweet growth, searched only up
# to the formal date.  The lag between them is the early-warning margin.
#
# Run as `python demos/04_state_report.py [OUTDIR]`.

# %%
import sys
import tempfile
from datetime import date
from importlib import resources
from pathlib import Path

from earlywarn.detect import DetectorConfig, analyze_states
from earlywarn.geonorm import default_gazetteer, normalize_all
from earlywarn.ingest import filter_tweets, parse_case_csv, parse_tweet_file
from earlywarn.report import render_chart, write_report
from earlywarn.series import ANALYSIS_START, daily_tweet_counts, state_case_series

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="earlywarn-demo-"))
out.mkdir(parents=True, exist_ok=True)
fixture = Path(str(resources.files("earlywarn") / "data" / "fixture"))
window = (ANALYSIS_START, date(2020, 3, 31))

records, _ = parse_tweet_file(fixture / "tweets.jsonl")
kept = filter_tweets(records)
counts = daily_tweet_counts(kept, normalize_all([r.raw_location for r in kept], default_gazetteer()), window)
cases = state_case_series(parse_case_csv(fixture / "cases.csv"), window)

# %% [markdown]
# States are independent, so they are analysed on a thread pool; results
# come back in state-token order either way.

# %%
pairs = [(counts[t], cases[t]) for t in sorted(counts) if t in cases]
analyses = analyze_states(pairs, DetectorConfig(), max_workers=4)
for a in analyses:
    r = a.row
    print(f"{r.state_token:18} informal {r.informal_date!s:10}  formal {r.formal_date!s:10}  lag {r.lag_days}")

# %%
write_report([a.row for a in analyses], "csv", out / "report.csv")
for a in analyses:
    render_chart(a.tweets, a.cases, a.result, a.formal_date, out / f"{a.row.state_token.split(',')[0]}.svg")
print(f"report and charts written to {out}")
