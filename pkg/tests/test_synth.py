from __future__ import annotations

import math
from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from earlywarn.detect import formal_outbreak_date
from earlywarn.series import ANALYSIS_START
from earlywarn.synth import SynthSpec, generate_cases, generate_tweets


def test_noiseless_line():
    s = generate_tweets(SynthSpec(4, None, base_level=2, slope=1))
    assert s.values.tolist() == [2, 3, 4, 5]
    assert s.start_date == ANALYSIS_START and s.kind == "tweet_count"


def test_noiseless_doubling_after_breakpoint():
    # t=0,1 on the line 0+t; from t=2 the anchor 2 doubles each day
    s = generate_tweets(SynthSpec(5, 2, base_level=0, slope=1, growth_rate=math.log(2)))
    assert s.values.tolist() == [0, 1, 2, 4, 8]


def test_seed_determinism():
    spec = SynthSpec(60, 30, 5.0, 0.1, 0.2, 3.0, seed=123)
    assert generate_tweets(spec) == generate_tweets(spec)
    assert generate_tweets(spec) != generate_tweets(SynthSpec(60, 30, 5.0, 0.1, 0.2, 3.0, seed=124))


def test_fixed_algorithm_stream():
    # PCG64 streams are stable across numpy releases and platforms
    s = generate_tweets(SynthSpec(6, None, 100.0, 0.0, 0.2, 10.0, seed=7))
    expect = np.rint(100.0 + np.random.Generator(np.random.PCG64(7)).normal(0, 10.0, 6))
    assert s.values.tolist() == expect.tolist()


@given(seed=st.integers(0, 2**64 - 1), sigma=st.floats(0, 50), n=st.integers(1, 80))
def test_values_are_non_negative_integers(seed, sigma, n):
    s = generate_tweets(SynthSpec(n, None, 1.0, -0.5, 0.2, sigma, seed))
    assert np.all(s.values >= 0) and np.all(s.values == np.rint(s.values))


@pytest.mark.parametrize("spec", [SynthSpec(0), SynthSpec(10, 0), SynthSpec(10, 10), SynthSpec(10, None, noise_sigma=-1),
                                  SynthSpec(10, seed=-1), SynthSpec(10, seed=2**64)])
def test_invalid_specs(spec):
    with pytest.raises(ValueError):
        generate_tweets(spec)


def test_cases_cross_on_day():
    c = generate_cases(30, 10, date(2020, 3, 1))
    assert c.values[9] == 100 and c.values[10] == 101
    assert formal_outbreak_date(c, 100) == date(2020, 3, 1) + timedelta(days=10)
    assert np.all(np.diff(c.values) >= 0)


def test_cases_cross_on_day_one():
    c = generate_cases(5, 1)
    assert formal_outbreak_date(c, 100) == ANALYSIS_START + timedelta(days=1)


def test_higher_threshold_fires_later():
    # hand evaluation: day 10 is 101, day 11 is rint(101 * 1.2) = 121
    c = generate_cases(30, 10, date(2020, 3, 1))
    assert c.values[11] == 121
    assert formal_outbreak_date(c, 101) == date(2020, 3, 12)
    assert formal_outbreak_date(generate_cases(11, 10), 101) is None


@pytest.mark.parametrize("cross", [0, 30, 31, -1])
def test_cases_reject_bad_crossing(cross):
    with pytest.raises(ValueError):
        generate_cases(30, cross)


@given(n=st.integers(2, 200), data=st.data())
def test_cases_invariant(n, data):
    c = data.draw(st.integers(1, n - 1))
    s = generate_cases(n, c)
    assert s.values[c - 1] == 100 and s.values[c] == 101
    assert np.all(np.diff(s.values) >= 0)
