# %% [markdown]
# # From raw records to daily series
#
# The bundled fixture holds a few thousand synthetic symptom tweets plus a
# county-level cumulative case file.  This walks them through parsing,
# keyword filtering, location matching and daily aggregation.

# %%
from datetime import date
from importlib import resources
from pathlib import Path

from earlywarn.geonorm import default_gazetteer, normalize_all
from earlywarn.ingest import filter_tweets, parse_case_csv, parse_tweet_file
from earlywarn.series import ANALYSIS_START, daily_tweet_counts, state_case_series

fixture = Path(str(resources.files("earlywarn") / "data" / "fixture"))
records, stats = parse_tweet_file(fixture / "tweets.jsonl")
print(stats.as_dict())

# %% [markdown]
# Keywords match whole tokens, so "COUGHING all night" does not count as a
# cough.  An exclusion list drops phrases such as "baby fever".

# %%
kept = filter_tweets(records, {"fever", "cough"}, {"baby fever"})
print(f"{len(records)} parsed, {len(kept)} kept after filtering")

window = (ANALYSIS_START, date(2020, 3, 31))
outcomes = normalize_all([r.raw_location for r in kept], default_gazetteer())
counts = daily_tweet_counts(kept, outcomes, window)
for tok, s in counts.items():
    print(f"{tok:18} {int(s.total):5d} tweets, busiest day {s.date_at(s.values.argmax())}")

# %% [markdown]
# Case counts are summed over counties.  Days before reporting started are
# zero, a negative cell reads as zero, and a downward revision is lifted to
# the running maximum so the state series stays cumulative.

# %%
table = parse_case_csv(fixture / "cases.csv")
print(f"bad cells {table.bad_cells}, repaired decreases {table.monotonic_repairs}")
cases = state_case_series(table, window)
for tok, s in cases.items():
    print(f"{tok:18} {int(s.values[-1]):6d} cases by {s.end_date}")
