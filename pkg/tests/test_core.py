import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from discdiv.core import (
    ConfigError,
    DividendPolicy,
    DividendSchedule,
    MarketParams,
    OptionKind,
    dividend_split,
    norm_cdf,
    pv_dividends,
    remaining_dividends,
)

MULTI = DividendSchedule.of([(0.5 + i, 9.0) for i in range(11)])


def test_market_rejects_bad_inputs():
    with pytest.raises(ConfigError):
        MarketParams(0.0, 100.0, 0.06, 0.3, 1.0)
    with pytest.raises(ConfigError):
        MarketParams(100.0, 100.0, 0.06, 0.0, 1.0)
    with pytest.raises(ConfigError):
        MarketParams(100.0, 100.0, 0.06, 0.3, -1.0)
    with pytest.raises(ConfigError):
        MarketParams(100.0, 100.0, math.nan, 0.3, 1.0)


@pytest.mark.parametrize(
    "pairs",
    [
        [(1.0, 5.0), (1.0, 5.0)],
        [(2.0, 5.0), (1.0, 5.0)],
        [(0.0, 5.0)],
        [(1.0, -1.0)],
    ],
)
def test_schedule_validation(pairs):
    with pytest.raises(ConfigError):
        DividendSchedule.of(pairs)


def test_active_drops_zero_amounts_and_late_dividends():
    sched = DividendSchedule.of([(0.5, 0.0), (1.0, 3.0), (2.0, 4.0)])
    assert sched.active(1.5).entries == ((1.0, 3.0),)
    assert sched.active(2.0).times == (1.0, 2.0)


@pytest.mark.parametrize("text", ["call", "CALL", " put "])
def test_kind_parse(text):
    assert OptionKind.parse(text).value == text.strip().lower()


def test_parse_errors_are_config_errors():
    with pytest.raises(ConfigError):
        OptionKind.parse("straddle")
    with pytest.raises(ConfigError):
        DividendPolicy.parse("bankrupt")


@pytest.mark.parametrize(
    "policy, spot, paid",
    [
        (DividendPolicy.LIQUIDATOR, 120.0, 50.0),
        (DividendPolicy.LIQUIDATOR, 30.0, 30.0),
        (DividendPolicy.SURVIVOR, 50.0, 50.0),
        (DividendPolicy.SURVIVOR, 49.99, 0.0),
    ],
)
def test_policy_payout(policy, spot, paid):
    assert policy.paid(spot, 50.0) == paid


@pytest.mark.parametrize(
    "x, expected",
    [
        (0.0, 0.5),
        (1.0, 0.8413447460685429),
        (-1.96, 0.024997895148220435),
        (-8.0, 6.220960574271785e-16),
    ],
)
def test_norm_cdf_values(x, expected):
    assert norm_cdf(x) == pytest.approx(expected, rel=1e-14)


@given(st.floats(-30.0, 30.0))
def test_norm_cdf_symmetry(x):
    assert norm_cdf(x) + norm_cdf(-x) == pytest.approx(1.0, abs=1e-15)


def test_pv_dividends_window_is_half_open():
    sched = DividendSchedule.of([(1.0, 10.0), (2.0, 10.0)])
    assert pv_dividends(sched, 0.0, (1.0, 2.0)) == 10.0
    assert pv_dividends(sched, 0.05, (0.0, 2.0)) == pytest.approx(
        10 * math.exp(-0.05) + 10 * math.exp(-0.1)
    )
    assert pv_dividends(sched, 0.05, (0.0, 2.0), valuation_time=1.0) == pytest.approx(
        10 + 10 * math.exp(-0.05)
    )
    with pytest.raises(ConfigError):
        pv_dividends(sched, 0.05, (2.0, 1.0))


@given(st.floats(0.6, 12.0), st.floats(-0.05, 0.15))
def test_dividend_split_sums_to_total(term, rate):
    d_s, d_k = dividend_split(MULTI, rate, term)
    assert d_s >= 0.0 and d_k >= 0.0
    assert d_s + d_k == pytest.approx(pv_dividends(MULTI, rate, (0.0, term)), rel=1e-12)


def test_remaining_dividends_inclusive_flag():
    sched = DividendSchedule.of([(1.0, 10.0)])
    total, spot_part, strike_part = remaining_dividends(sched, 0.0, 1.0, 4.0)
    assert (total, spot_part, strike_part) == (10.0, 7.5, 2.5)
    assert remaining_dividends(sched, 0.0, 1.0, 4.0, inclusive=False)[0] == 0.0
    assert remaining_dividends(sched, 0.06, 0.5, 4.0)[0] == pytest.approx(
        10 * math.exp(-0.03)
    )
