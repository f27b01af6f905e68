import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from khintchine.errors import DomainError
from khintchine.gauge import Exp, Identity, Linear, Log, exp_bracket, ln_bracket, parse_gauge

F = Fraction


@given(st.fractions(min_value=1, max_value=10**9))
def test_ln_bracket_contains_log(y):
    lo, hi = ln_bracket(y, 64)
    assert lo <= hi and hi - lo <= F(1, 2**60)
    v = math.log(float(y)) if y < 10**300 else None
    assert float(lo) <= v * (1 + 1e-15) + 1e-300 and float(hi) >= v * (1 - 1e-15) - 1e-300


@given(st.fractions(min_value=0, max_value=60))
def test_exp_bracket_contains_exp(t):
    lo, hi = exp_bracket(t, 64)
    v = math.exp(float(t))
    assert lo <= hi and (hi - lo) / lo <= F(1, 2**58)
    assert float(lo) <= v * (1 + 1e-14) and float(hi) >= v * (1 - 1e-14)


def test_bracket_identities():
    assert ln_bracket(F(1)) == (0, 0)
    assert exp_bracket(F(0)) == (1, 1)
    lo, hi = ln_bracket(F(2), 200)
    # exp(ln 2) = 2 exactly, so the two brackets must straddle it
    elo, _ = exp_bracket(lo, 200)
    _, ehi = exp_bracket(hi, 200)
    assert elo <= 2 <= ehi
    with pytest.raises(DomainError):
        ln_bracket(F(1, 2))
    with pytest.raises(DomainError):
        exp_bracket(F(-1))


def test_decide_ge():
    g = Log()
    assert g.decide_ge(F(2834, 1000), 16)  # ln 17 = 2.83321...
    assert not g.decide_ge(F(2833, 1000), 16)
    assert Identity().decide_ge(5, 5) and not Identity().decide_ge(F(49999, 10000), 5)
    assert Linear(F(1, 4)).decide_ge(4, 16)
    assert not Exp(2).decide_ge(10**13, 16)  # e^32 ~ 7.9e13
    assert Exp(2).decide_ge(8 * 10**13, 16)


def test_parse_gauge_roundtrip():
    for text, g in [("identity", Identity()), ("log", Log()), ("linear:1/4,0", Linear(F(1, 4))), ("exp:2", Exp(2))]:
        assert parse_gauge(text) == g
        assert parse_gauge(g.to_json()) == g
    for bad in ("cubic", "linear:0", "exp:-1"):
        with pytest.raises((DomainError, ValueError)):
            parse_gauge(bad)


@given(st.fractions(min_value=0, max_value=100), st.fractions(min_value=0, max_value=100))
def test_gauges_increasing(a, b):
    a, b = sorted((a, b))
    for g in (Identity(), Linear(F(1, 4), 1), Log(), Exp(F(1, 10))):
        assert g.bracket(a, 64)[0] <= g.bracket(b, 64)[1]
