"""Regenerate the bundled end-to-end fixture under src/earlywarn/data/fixture/.

Tweets are synthetic: a linear baseline that turns exponential on a chosen
day and decays after the formal outbreak date.  Case counts are synthetic
too, split over two counties per state, with a few deliberate defects
(negative cell, downward revision, non-state row) for the parser to repair.

    python tools/make_fixture.py
"""
from __future__ import annotations

import csv
import json
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from earlywarn.synth import SynthSpec, generate_cases, noiseless_curve

OUT = Path(__file__).resolve().parents[1] / "src" / "earlywarn" / "data" / "fixture"
START = date(2019, 12, 1)
END = date(2020, 3, 31)
CASE_END = date(2020, 4, 16)
N = (END - START).days + 1

# state name, informal (kink) date, formal date or None, locations, counties
STATES = [
    ("Arizona", date(2020, 3, 11), date(2020, 3, 21),
     ["Phoenix, AZ", "Tucson", "Arizona, USA", "Scottsdale, Arizona"], ["Maricopa", "Pima"]),
    ("California", date(2020, 2, 27), date(2020, 3, 9),
     ["Los Angeles, CA", "San Francisco", "Fresno, CA", "Southern California", "San Diego"],
     ["Los Angeles", "Santa Clara"]),
    ("New York", date(2020, 3, 1), date(2020, 3, 8),
     ["nyc", "Brooklyn, New York, USA", "Buffalo, NY", "Queens, NY", "New York City"],
     ["New York", "Westchester"]),
    ("Wyoming", None, None, ["Cheyenne, WY", "Wyoming"], ["Laramie", "Natrona"]),
]

TEXTS = [
    "fever and cough",
    "got a fever",
    "this cough!",
    "Cough + FEVER",
]


def tweet_counts(kink: date | None, formal: date | None, seed: int) -> np.ndarray:
    b = (kink - START).days if kink else None
    spec = SynthSpec(N, b, base_level=3.0, slope=0.03, growth_rate=0.22, noise_sigma=0.0, seed=seed)
    y = noiseless_curve(spec)
    if formal is not None:
        f = (formal - START).days
        tail = np.arange(1, N - f)
        y[f + 1:] = y[f] * np.exp(-0.15 * tail)
    rng = np.random.Generator(np.random.PCG64(seed))
    y = y + rng.normal(0.0, 0.6, size=N)
    return np.rint(np.maximum(y, 0)).astype(int)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    lines: list[str] = []
    n = 0

    def emit(day: date, loc: str, text: str, hour: int = 12, ident: str | None = None) -> None:
        nonlocal n
        n += 1
        obj = {"id": ident or f"{n}",
               "created_at": f"{day.isoformat()}T{hour:02d}:{(n * 7) % 60:02d}:00Z",
               "location": loc, "text": text}
        lines.append(json.dumps(obj))

    for si, (name, kink, formal, locs, _) in enumerate(STATES):
        counts = tweet_counts(kink, formal, seed=100 + si)
        for i, c in enumerate(counts):
            day = START + timedelta(days=i)
            for j in range(int(c)):
                emit(day, locs[(i + j) % len(locs)], TEXTS[(i * 3 + j) % len(TEXTS)], hour=(j * 5) % 24)

    # records the pipeline has to drop or tolerate
    emit(date(2020, 2, 2), "Gotham City", "fever dream about gotham")
    emit(date(2020, 2, 3), "", "cough cough")
    emit(date(2020, 2, 4), "Denver, CO", "I love coffee")
    emit(date(2020, 2, 5), "Denver, CO", "COUGHING all night")
    emit(date(2020, 2, 6), "Denver, CO", "baby fever is real")
    emit(date(2019, 10, 15), "Denver, CO", "fall fever")
    emit(date(2019, 8, 15), "Denver, CO", "summer cough")
    emit(date(2020, 2, 7), "Denver, CO", "duplicate id cough", ident="1")
    lines.append('{"id": "broken", "created_at": ')

    (OUT / "tweets.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    case_days = (CASE_END - date(2020, 1, 22)).days + 1
    headers = [(date(2020, 1, 22) + timedelta(days=i)) for i in range(case_days)]
    rows = []
    for si, (name, _, formal, _, counties) in enumerate(STATES):
        if formal is not None:
            total = generate_cases(case_days, (formal - date(2020, 1, 22)).days, date(2020, 1, 22)).values
        else:
            total = np.minimum(np.arange(case_days) // 2, 60).astype(float)
        a = np.floor(0.6 * total).astype(int)
        b = total.astype(int) - a
        if name == "California":
            a[10] = a[9] - 1  # downward revision, repaired to running max
        if name == "Wyoming":
            b[3] = -3  # bad cell, read as 0
        for k, (cty, vals) in enumerate(zip(counties, (a, b))):
            rows.append([str(84000000 + si * 10 + k), cty, name, "US"] + [str(v) for v in vals])
    rows.append(["84088888", "", "Diamond Princess", "US"] + ["0"] * case_days)

    with open(OUT / "cases.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["UID", "Admin2", "Province_State", "Country_Region"]
                   + [f"{d.month}/{d.day}/{d.strftime('%y')}" for d in headers])
        w.writerows(rows)

    (OUT / "config.json").write_text(json.dumps({
        "study_end": END.isoformat(),
        "format": "csv",
    }, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
