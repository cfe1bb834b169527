from __future__ import annotations

import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from earlywarn.errors import GazetteerError
from earlywarn.geonorm import (
    STATE_TOKENS,
    STATES,
    compile_gazetteer,
    default_gazetteer,
    miss_report,
    normalize_all,
    normalize_location,
    normalize_text,
    state_token_for_case_row,
)

NY, MA, CA = "New_York, USA", "Massachusetts, USA", "California, USA"

# Alias lists for the three example states, one string per alias.
ALIASES = {
    NY: ["nyc", "Rochester, NY", "New York, USA", "Staten Island, NY", "Brooklyn, New York, USA",
         "Bronx, NY", "Manhattan, NY", "Long Island, NY", "Queens, NY", "Buffalo, NY", "New York City"],
    MA: ["Boston, MA", "Massachusetts", "Boston"],
    CA: ["Fresno, CA", "Southern California", "Hesperia, CA", "Los Angeles, California",
         "Bakersfield, CA", "Coachella Valley, CA", "San Francisco", "San Diego", "Long Beach, CA",
         "Los Angeles, CA"],
}


@pytest.fixture(scope="module")
def g():
    return default_gazetteer()


@pytest.mark.parametrize("raw, token", [(a, t) for t, al in ALIASES.items() for a in al])
def test_listed_aliases(g, raw, token):
    assert normalize_location(raw, g).state_token == token


def test_gotham_misses(g):
    o = normalize_location("Gotham City", g)
    assert o.state_token is None and o.matched_rule is None and not o.matched


@pytest.mark.parametrize("token", sorted(STATE_TOKENS))
def test_canonical_self_map(g, token):
    assert normalize_location(token.replace("_", " "), g).state_token == token


def test_token_set_shape():
    assert len(STATE_TOKENS) == 51
    assert all(re.fullmatch(r"[A-Z][A-Za-z_]*, USA", t) for t in STATE_TOKENS)
    assert "District_of_Columbia, USA" in STATE_TOKENS


def test_default_gazetteer_coverage(g):
    patterns = {r.pattern for r in g.rules}
    for name, code in STATES:
        assert name.lower() in patterns
        assert ", " + code.lower() in patterns


@pytest.mark.parametrize("bare", ["springfield", "portland", "long beach", "hesperia", "rochester", "columbus"])
def test_no_bare_ambiguous_city(g, bare):
    assert bare not in {r.pattern for r in g.rules}


def test_match_stage_order(g):
    # exact beats suffix; suffix beats any-component
    assert normalize_location("Los Angeles, CA", g).matched_rule == "los angeles, ca"
    assert normalize_location("Harlem, New York, USA", g).matched_rule == "new york, usa"
    assert normalize_location("Somewhere, Texas, USA", g).matched_rule == "texas"
    assert normalize_location("Boston, somewhere", g).matched_rule == "boston"
    assert normalize_location("Oakland, CA", g).matched_rule == ", ca"


def test_suffix_is_component_aligned(g):
    # "xny" must not satisfy the ", ny" rule
    assert normalize_location("Albany, Xny", g).state_token is None


@pytest.mark.parametrize("raw", ["", "   ", ",", ", NY", "!!!"])
def test_degenerate_inputs_miss(g, raw):
    assert normalize_location(raw, g).state_token is None


@given(raw=st.text(max_size=40))
def test_total_deterministic_and_case_insensitive(raw):
    g = default_gazetteer()
    a = normalize_location(raw, g)
    assert a == normalize_location(raw, g)
    assert (a.state_token is None) == (a.matched_rule is None)
    assert normalize_location(raw.upper(), g).state_token == a.state_token


@given(name=st.sampled_from([n for n, _ in STATES]))
def test_case_insensitive_on_state_names(name):
    g = default_gazetteer()
    tok = normalize_location(name, g).state_token
    assert tok is not None
    assert normalize_location(name.upper(), g).state_token == tok
    assert normalize_location(name.lower(), g).state_token == tok


def test_normalize_text():
    assert normalize_text("  Brooklyn,New York ,  USA!! ") == "brooklyn, new york, usa"
    assert normalize_text("St. Louis, MO") == "st louis, mo"
    assert normalize_text(", NY") == ", ny"


def _gz(tmp_path, body: str):
    p = tmp_path / "g.csv"
    p.write_text(body, encoding="utf-8")
    return compile_gazetteer(p)


def test_compile_single_quoted_token(tmp_path):
    g = _gz(tmp_path, 'pattern,state_token\nnyc,"New_York, USA"\n')
    assert len(g) == 1 and g.rules[0].state_token == NY


def test_compile_empty_rules(tmp_path):
    g = _gz(tmp_path, "# nothing here\npattern,state_token\n")
    assert len(g) == 0
    assert normalize_location("New York", g).state_token is None


def test_compile_duplicate_names_both_lines(tmp_path):
    with pytest.raises(GazetteerError, match=r"lines 2 and 4"):
        _gz(tmp_path, 'pattern,state_token\nboston,"Massachusetts, USA"\nnyc,"New_York, USA"\n'
                      ' BOSTON.,"Massachusetts, USA"\n')


def test_compile_unknown_token(tmp_path):
    with pytest.raises(GazetteerError, match="Gotham"):
        _gz(tmp_path, 'pattern,state_token\ngotham,"Gotham, USA"\n')


def test_compile_bad_header(tmp_path):
    with pytest.raises(GazetteerError, match="header"):
        _gz(tmp_path, "alias,token\n")


def test_first_rule_wins(tmp_path):
    g = _gz(tmp_path, 'pattern,state_token\n", xx","Ohio, USA"\n'
                      'kansas city,"Missouri, USA"\nkansas,"Kansas, USA"\n')
    assert normalize_location("Kansas City, Kansas", g).state_token == "Kansas, USA"
    assert normalize_location("Kansas City", g).state_token == "Missouri, USA"


@pytest.mark.parametrize("row, token", [("New York", NY), ("California", CA), ("Diamond Princess", None),
                                        ("Guam", None), ("District of Columbia", "District_of_Columbia, USA"),
                                        ("  new  york ", NY)])
def test_case_row_tokens(row, token):
    assert state_token_for_case_row(row) == token


def test_miss_report(g):
    outs = normalize_all(["Gotham City", "nyc", "", "Gotham City", "Atlantis"], g)
    assert miss_report(outs) == [("Gotham City", 2), ("", 1), ("Atlantis", 1)]
