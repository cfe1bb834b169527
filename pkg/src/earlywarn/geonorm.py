"""Map free-text tweet locations onto canonical state tokens.

Tokens use the case-data naming convention, e.g. ``"New_York, USA"``.
Matching is driven by an ordered gazetteer of ``pattern -> token`` rules
and runs in three stages: exact match, component-aligned suffix match,
then any single comma-separated component.  The first rule in file order
wins inside a stage.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import GazetteerError

# (full name, USPS code); 50 states + DC.
STATES: tuple[tuple[str, str], ...] = (
    ("Alabama", "AL"), ("Alaska", "AK"), ("Arizona", "AZ"), ("Arkansas", "AR"),
    ("California", "CA"), ("Colorado", "CO"), ("Connecticut", "CT"),
    ("Delaware", "DE"), ("District of Columbia", "DC"), ("Florida", "FL"),
    ("Georgia", "GA"), ("Hawaii", "HI"), ("Idaho", "ID"), ("Illinois", "IL"),
    ("Indiana", "IN"), ("Iowa", "IA"), ("Kansas", "KS"), ("Kentucky", "KY"),
    ("Louisiana", "LA"), ("Maine", "ME"), ("Maryland", "MD"),
    ("Massachusetts", "MA"), ("Michigan", "MI"), ("Minnesota", "MN"),
    ("Mississippi", "MS"), ("Missouri", "MO"), ("Montana", "MT"),
    ("Nebraska", "NE"), ("Nevada", "NV"), ("New Hampshire", "NH"),
    ("New Jersey", "NJ"), ("New Mexico", "NM"), ("New York", "NY"),
    ("North Carolina", "NC"), ("North Dakota", "ND"), ("Ohio", "OH"),
    ("Oklahoma", "OK"), ("Oregon", "OR"), ("Pennsylvania", "PA"),
    ("Rhode Island", "RI"), ("South Carolina", "SC"), ("South Dakota", "SD"),
    ("Tennessee", "TN"), ("Texas", "TX"), ("Utah", "UT"), ("Vermont", "VT"),
    ("Virginia", "VA"), ("Washington", "WA"), ("West Virginia", "WV"),
    ("Wisconsin", "WI"), ("Wyoming", "WY"),
)


def state_token(name: str) -> str:
    """``"New York"`` -> ``"New_York, USA"``."""
    return name.replace(" ", "_") + ", USA"


STATE_TOKENS: frozenset[str] = frozenset(state_token(n) for n, _ in STATES)
_TOKEN_BY_NAME = {n.lower(): state_token(n) for n, _ in STATES}

DEFAULT_GAZETTEER = "gazetteer.csv"

_DROP = re.compile(r"[.'’`]")
_PUNCT = re.compile(r"[^\w,]+|_")
_SPACES = re.compile(r"\s+")


def normalize_text(raw: str) -> str:
    """Lowercase, strip punctuation (commas survive as separators), tidy spacing.

    >>> normalize_text("  Brooklyn,New York ,  USA!! ")
    'brooklyn, new york, usa'
    """
    s = _DROP.sub("", raw.lower())
    s = _PUNCT.sub(" ", s)
    parts = [_SPACES.sub(" ", p).strip() for p in s.split(",")]
    leading = bool(parts) and parts[0] == "" and len(parts) > 1
    parts = [p for p in parts if p]
    out = ", ".join(parts)
    # a leading comma marks a suffix-only pattern such as ", ny"
    return ", " + out if leading and out else out


@dataclass(frozen=True)
class Rule:
    pattern: str
    state_token: str
    line: int = 0

    @property
    def suffix_only(self) -> bool:
        return self.pattern.startswith(", ")

    @property
    def body(self) -> str:
        return self.pattern[2:] if self.suffix_only else self.pattern


@dataclass(frozen=True)
class Gazetteer:
    rules: tuple[Rule, ...]

    @property
    def state_tokens(self) -> frozenset[str]:
        return STATE_TOKENS

    def __len__(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class NormalizationOutcome:
    raw: str
    state_token: str | None = None
    matched_rule: str | None = None

    @property
    def matched(self) -> bool:
        return self.state_token is not None


def _compile(text: str, source: str) -> Gazetteer:
    rules: list[Rule] = []
    seen: dict[str, int] = {}
    reader = csv.reader(io.StringIO(text))
    header_done = False
    for row in reader:
        lineno = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].lstrip().startswith("#"):
            continue
        if not header_done:
            if [c.strip() for c in row[:2]] != ["pattern", "state_token"]:
                raise GazetteerError(f"{source}: expected header 'pattern,state_token', got {row!r}")
            header_done = True
            continue
        if len(row) != 2:
            raise GazetteerError(f"{source}:{lineno}: expected 2 fields, got {len(row)}")
        pattern = normalize_text(row[0])
        token = row[1].strip()
        if not pattern:
            raise GazetteerError(f"{source}:{lineno}: empty pattern")
        if token not in STATE_TOKENS:
            raise GazetteerError(f"{source}:{lineno}: unknown state token {token!r}")
        if pattern in seen:
            raise GazetteerError(
                f"{source}: duplicate pattern {pattern!r} on lines {seen[pattern]} and {lineno}"
            )
        seen[pattern] = lineno
        rules.append(Rule(pattern, token, lineno))
    return Gazetteer(tuple(rules))


def compile_gazetteer(path: str | Path | None = None) -> Gazetteer:
    """Load a gazetteer CSV (header ``pattern,state_token``; ``#`` comments).

    With no path, the gazetteer shipped with the package is used.
    """
    if path is None:
        return default_gazetteer()
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise GazetteerError(f"cannot read gazetteer {p}: {exc}") from exc
    return _compile(text, str(p))


@lru_cache(maxsize=1)
def default_gazetteer() -> Gazetteer:
    text = resources.files("earlywarn").joinpath("data", DEFAULT_GAZETTEER).read_text(encoding="utf-8")
    return _compile(text, DEFAULT_GAZETTEER)


def normalize_location(raw: str, g: Gazetteer) -> NormalizationOutcome:
    norm = normalize_text(raw)
    if not norm or norm.startswith(", "):
        return NormalizationOutcome(raw)

    for rule in g.rules:
        if not rule.suffix_only and rule.pattern == norm:
            return NormalizationOutcome(raw, rule.state_token, rule.pattern)

    for rule in g.rules:
        if norm.endswith(", " + rule.body):
            return NormalizationOutcome(raw, rule.state_token, rule.pattern)

    components = set(norm.split(", "))
    for rule in g.rules:
        if not rule.suffix_only and rule.pattern in components:
            return NormalizationOutcome(raw, rule.state_token, rule.pattern)

    return NormalizationOutcome(raw)


def normalize_all(raws, g: Gazetteer) -> list[NormalizationOutcome]:
    cache: dict[str, NormalizationOutcome] = {}
    out = []
    for raw in raws:
        hit = cache.get(raw)
        if hit is None:
            hit = cache[raw] = normalize_location(raw, g)
        out.append(hit)
    return out


def state_token_for_case_row(province_state: str) -> str | None:
    """Full state name from a case-data row -> token; ``None`` for non-states."""
    return _TOKEN_BY_NAME.get(_SPACES.sub(" ", province_state.strip().lower()))


def miss_report(outcomes) -> list[tuple[str, int]]:
    """Unmatched raw locations with their counts, most frequent first."""
    counts: dict[str, int] = {}
    for o in outcomes:
        if not o.matched:
            counts[o.raw] = counts.get(o.raw, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
