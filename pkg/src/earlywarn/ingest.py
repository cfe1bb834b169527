"""Tweet record files, case-count CSVs and the cached case-data fetcher."""
from __future__ import annotations

import csv
import json
import logging
import os
import re
import tempfile
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

from filelock import FileLock

from .errors import FetchError, IngestError

log = logging.getLogger(__name__)

STUDY_START = date(2019, 9, 1)
STUDY_END = date(2020, 4, 16)
CASES_START = date(2020, 1, 21)

DEFAULT_KEYWORDS = frozenset({"fever", "cough"})

JHU_US_CONFIRMED_URL = (
    "https://raw.githubusercontent.com/CSSEGISandData/COVID-19/master/"
    "csse_covid_19_data/csse_covid_19_time_series/time_series_covid19_confirmed_US.csv"
)

TWEET_FIELDS = ("id", "created_at", "location", "text")


@dataclass(frozen=True)
class TweetRecord:
    id: str
    timestamp: datetime  # tz-aware, UTC
    raw_location: str
    text: str

    @property
    def day(self) -> date:
        return self.timestamp.date()


@dataclass
class IngestStats:
    total_lines: int = 0
    parsed: int = 0
    rejected_window: int = 0
    malformed: int = 0
    duplicate_ids: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "total_lines": self.total_lines,
            "parsed": self.parsed,
            "rejected_window": self.rejected_window,
            "malformed": self.malformed,
            "duplicate_ids": self.duplicate_ids,
        }


def parse_timestamp(value: str) -> datetime:
    """ISO-8601 with a zone designator -> aware UTC datetime."""
    s = value.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    ts = datetime.fromisoformat(s)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp without zone designator: {value!r}")
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _record_from_mapping(obj) -> TweetRecord:
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    for key in TWEET_FIELDS:
        if not isinstance(obj.get(key), str):
            raise ValueError(f"missing or non-string field {key!r}")
    if not obj["id"]:
        raise ValueError("empty id")
    return TweetRecord(obj["id"], parse_timestamp(obj["created_at"]), obj["location"], obj["text"])


def _iter_jsonl(fh):
    for line in fh:
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError:
            yield None


def _iter_csv(fh, path):
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return
    if tuple(h.strip() for h in header) != TWEET_FIELDS:
        raise IngestError(f"{path}: expected header {','.join(TWEET_FIELDS)}, got {','.join(header)}")
    for row in reader:
        if not row:
            continue
        yield dict(zip(TWEET_FIELDS, row)) if len(row) == len(TWEET_FIELDS) else None


def parse_tweet_file(
    path: str | Path,
    format: str = "jsonl",
    window: tuple[date, date] = (STUDY_START, STUDY_END),
) -> tuple[list[TweetRecord], IngestStats]:
    """Read tweet records, skipping malformed lines and out-of-window posts.

    Order of the returned records follows the file.
    """
    if format not in ("jsonl", "csv"):
        raise IngestError(f"unknown tweet file format {format!r}")
    path = Path(path)
    stats = IngestStats()
    records: list[TweetRecord] = []
    seen: set[str] = set()
    lo, hi = window
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestError(f"cannot read tweet file {path}: {exc}") from exc
    with fh:
        rows = _iter_jsonl(fh) if format == "jsonl" else _iter_csv(fh, path)
        for obj in rows:
            stats.total_lines += 1
            try:
                rec = _record_from_mapping(obj)
            except (ValueError, TypeError):
                stats.malformed += 1
                continue
            if not lo <= rec.day <= hi:
                stats.rejected_window += 1
                continue
            if rec.id in seen:
                stats.duplicate_ids += 1
                continue
            seen.add(rec.id)
            records.append(rec)
            stats.parsed += 1
    if stats.rejected_window or stats.malformed or stats.duplicate_ids:
        log.warning(
            "%s: %d outside window, %d malformed, %d duplicate ids",
            path, stats.rejected_window, stats.malformed, stats.duplicate_ids,
        )
    return records, stats


def write_tweet_file(records: Iterable[TweetRecord], path: str | Path, format: str = "jsonl") -> None:
    path = Path(path)
    if format == "jsonl":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for r in records:
                obj = {"id": r.id, "created_at": format_timestamp(r.timestamp),
                       "location": r.raw_location, "text": r.text}
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    elif format == "csv":
        rows = [[r.id, format_timestamp(r.timestamp), r.raw_location, r.text] for r in records]
        if any("\0" in cell for row in rows for cell in row):
            raise IngestError("NUL characters cannot be stored in the CSV tweet format; use jsonl")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            # quoting every field keeps bare carriage returns intact
            w = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_ALL)
            w.writerow(TWEET_FIELDS)
            w.writerows(rows)
    else:
        raise IngestError(f"unknown tweet file format {format!r}")


_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def _contains_run(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    k = len(phrase)
    if k == 0:
        return False
    return any(list(tokens[i:i + k]) == list(phrase) for i in range(len(tokens) - k + 1))


def filter_tweets(
    records: Iterable[TweetRecord],
    keywords: Iterable[str] = DEFAULT_KEYWORDS,
    exclusions: Iterable[str] = (),
) -> list[TweetRecord]:
    """Keep records with at least one keyword token and no excluded phrase.

    Tokens are maximal alphanumeric runs, compared case-insensitively, so
    ``"coughing"`` does not match the keyword ``"cough"``.
    """
    kw = {k.lower() for k in keywords}
    if not kw:
        raise ValueError("keywords must be non-empty")
    phrases = [tokenize(p) for p in exclusions]
    phrases = [p for p in phrases if p]
    out = []
    for r in records:
        toks = tokenize(r.text)
        if kw.isdisjoint(toks):
            continue
        if any(_contains_run(toks, p) for p in phrases):
            continue
        out.append(r)
    return out


# --- case counts -----------------------------------------------------------

_DATE_HEADER = re.compile(r"^([1-9]|1[0-2])/([1-9]|[12][0-9]|3[01])/([0-9]{2})$")


@dataclass(frozen=True)
class CaseEntry:
    province_state: str
    county: str
    date: date
    cumulative_cases: int


@dataclass
class CaseTable:
    entries: list[CaseEntry] = field(default_factory=list)
    data_rows: int = 0
    date_columns: int = 0
    skipped_date_columns: int = 0
    bad_cells: int = 0
    monotonic_repairs: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def last_date(self) -> date | None:
        return max((e.date for e in self.entries), default=None)


def parse_date_header(h: str) -> date:
    """``"1/22/20"`` -> ``date(2020, 1, 22)``; anything else raises."""
    m = _DATE_HEADER.match(h)
    if not m:
        raise IngestError(f"unparseable date column header {h!r} (expected M/D/YY)")
    month, day, yy = (int(x) for x in m.groups())
    try:
        return date(2000 + yy, month, day)
    except ValueError as exc:
        raise IngestError(f"invalid date column header {h!r}") from exc


def parse_case_csv(
    path: str | Path,
    window: tuple[date, date] = (CASES_START, STUDY_END),
) -> CaseTable:
    """Parse a wide cumulative-cases CSV into one entry per (row, date column).

    Date columns outside ``window`` are skipped.  Non-integer or negative
    cells become 0; a county series that ever decreases is repaired to its
    running maximum.  Both are counted on the returned table.
    """
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8-sig", newline="")
    except OSError as exc:
        raise IngestError(f"cannot read case file {path}: {exc}") from exc
    table = CaseTable()
    lo, hi = window
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestError(f"{path}: empty case file (no header)")
        header = [h.strip() for h in header]
        if "Province_State" not in header:
            raise IngestError(f"{path}: missing Province_State column")
        i_state = header.index("Province_State")
        i_county = header.index("Admin2") if "Admin2" in header else None
        date_cols: list[tuple[int, date]] = []
        for i, h in enumerate(header):
            if "/" in h:
                d = parse_date_header(h)
                if lo <= d <= hi:
                    date_cols.append((i, d))
                else:
                    table.skipped_date_columns += 1
        date_cols.sort(key=lambda c: c[1])
        table.date_columns = len(date_cols)
        for row in reader:
            if not row:
                continue
            table.data_rows += 1
            state = row[i_state].strip() if i_state < len(row) else ""
            county = row[i_county].strip() if i_county is not None and i_county < len(row) else ""
            running = 0
            for i, d in date_cols:
                cell = row[i].strip() if i < len(row) else ""
                try:
                    v = int(cell)
                except ValueError:
                    try:
                        f = float(cell)
                        v = int(f) if f.is_integer() else -1
                    except ValueError:
                        v = -1
                if v < 0:
                    table.bad_cells += 1
                    v = 0
                if v < running:
                    table.monotonic_repairs += 1
                    v = running
                running = v
                table.entries.append(CaseEntry(state, county, d, v))
    if table.bad_cells or table.monotonic_repairs:
        log.warning("%s: %d bad cells set to 0, %d decreasing values repaired",
                    path, table.bad_cells, table.monotonic_repairs)
    return table


def fetch_cases(
    url: str = JHU_US_CONFIRMED_URL,
    cache_dir: str | Path | None = None,
    max_age: timedelta = timedelta(hours=12),
    timeout: float = 30.0,
) -> Path:
    """Return a local copy of ``url``, downloading only when the cache is stale.

    Writers serialise on a lock file inside ``cache_dir``; the download goes to
    a temp file that is renamed into place.  A failed download falls back to
    a stale copy if one exists.
    """
    cache = Path(cache_dir or os.environ.get("OUTBREAK_CACHE_DIR") or Path.home() / ".cache" / "earlywarn")
    cache.mkdir(parents=True, exist_ok=True)
    name = url.rstrip("/").rsplit("/", 1)[-1] or "cases.csv"
    target = cache / name
    if _fresh(target, max_age):
        return target
    with FileLock(str(cache / (name + ".lock"))):
        if _fresh(target, max_age):
            return target
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                payload = resp.read()
        except (urllib.error.URLError, OSError, ValueError) as exc:
            if target.exists():
                log.warning("download of %s failed (%s); using stale cache %s", url, exc, target)
                return target
            raise FetchError(f"cannot download {url}: {exc}", retryable=True) from exc
        fd, tmp = tempfile.mkstemp(dir=cache, prefix=name + ".", suffix=".part")
        try:
            with os.fdopen(fd, "wb") as out:
                out.write(payload)
            os.replace(tmp, target)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    return target


def _fresh(path: Path, max_age: timedelta) -> bool:
    try:
        age = time.time() - path.stat().st_mtime
    except FileNotFoundError:
        return False
    return age <= max_age.total_seconds()
