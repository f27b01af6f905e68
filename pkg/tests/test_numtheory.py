import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from khintchine.numtheory import (
    SIX_OVER_PI2_LOWER,
    Factorization,
    divisor_count,
    divisors,
    euler_phi,
    factorize,
    format_rational,
    mobius,
    mobius_product,
    parse_rational,
    primes_upto,
    primorials,
    theta,
)


def test_factorize_examples():
    assert factorize(1) == Factorization()
    assert factorize(12).as_dict() == {2: 2, 3: 1}
    assert factorize(6469693230).primes == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def test_factorize_limits():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(2**64 + 1)
    assert factorize(2**64).as_dict() == {2: 64}
    big = 4294967291 * 4294967279  # two primes just below 2^32
    assert factorize(big).as_dict() == {4294967279: 1, 4294967291: 1}


@given(st.integers(min_value=1, max_value=2**48))
def test_factorize_roundtrip(v):
    f = factorize(v)
    assert f.value == v
    assert all(all(p % q for q in range(2, math.isqrt(p) + 1)) for p in f.primes if p < 10**6)


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_factorization_product(a, b):
    assert (factorize(a) * factorize(b)).value == a * b


def test_arithmetic_examples():
    assert [mobius(factorize(v)) for v in (1, 6, 12)] == [1, 1, 0]
    assert [euler_phi(factorize(v)) for v in (1, 12, 30)] == [1, 4, 8]
    assert [divisor_count(factorize(v)) for v in (1, 12, 210)] == [1, 6, 16]
    assert mobius_product(Factorization(), 3) == 1
    assert mobius_product(factorize(2), 1) == Fraction(1, 2)
    assert mobius_product(factorize(12), 2) == Fraction(2, 3)
    assert theta(Factorization()) == 1
    assert theta(factorize(6)) == 3
    # 29# / prod_{p<=29}(p-1)
    assert theta(factorize(6469693230)) == Fraction(6469693230, 1021870080)


def test_arithmetic_vs_sieve(small_tables):
    mu, phi, divs = small_tables
    for n in range(1, 10_001):
        f = factorize(n)
        assert mobius(f) == mu[n]
        assert euler_phi(f) == phi[n]
        assert divisor_count(f) == len(divs[n])


def test_mobius_product_divisor_sum(small_tables):
    mu, _, divs = small_tables
    for n in range(1, 10_001, 7):
        for m in (1, 2, 3):
            assert sum(Fraction(mu[d], d**m) for d in divs[n]) == mobius_product(factorize(n), m)


@given(st.lists(st.sampled_from(primes_upto(2000)), min_size=0, max_size=12, unique=True))
def test_mobius_product_above_six_over_pi2(ps):
    f = Factorization.from_primes(ps)
    v = mobius_product(f, 2)
    assert v > SIX_OVER_PI2_LOWER
    assert v >= mobius_product(Factorization.from_primes(primes_upto(max(ps, default=2))), 2)


def test_six_over_pi2_proxy_is_below():
    assert float(SIX_OVER_PI2_LOWER) < 6 / math.pi**2


def test_divisors_enumeration():
    assert sorted(d.value for d in divisors(factorize(360))) == [d for d in range(1, 361) if 360 % d == 0]


def test_primorials():
    assert [p.value for p in primorials(5)] == [2, 6, 30]
    assert len(list(primorials(7))) == 4
    seq = list(primorials(29))
    assert len(seq) == 10 and seq[-1].value == 6469693230
    with pytest.raises(ValueError):
        list(primorials(1))


def test_primes_upto():
    assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_upto(200_000)) == 17984


def test_text_forms():
    f = factorize(2**3 * 3 * 5**2)
    assert str(f) == "2^3*3*5^2"
    assert Factorization.parse("2^3*3*5^2") == f
    assert str(Factorization()) == "1" and Factorization.parse("1") == Factorization()
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert parse_rational("6/4") == Fraction(3, 2)
    assert parse_rational(" -3 ") == -3
    for bad in ("0.5", "1/0", "x", 0.5):
        with pytest.raises((ValueError, TypeError)):
            parse_rational(bad)


@given(st.fractions())
def test_rational_roundtrip(x):
    assert parse_rational(format_rational(x)) == x


def test_malformed_factorization():
    with pytest.raises(ValueError):
        Factorization(((3, 1), (2, 1)))
    with pytest.raises(ValueError):
        Factorization(((2, 0),))
