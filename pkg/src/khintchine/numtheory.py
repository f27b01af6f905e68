"""Exact arithmetic functions over factored integers.

Every multiplicative function here takes a :class:`Factorization` rather than
a raw integer, so primorial-scale arguments never need to be factored.
Rationals are :class:`fractions.Fraction`, which is always in lowest terms.
"""

from __future__ import annotations

import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator

__all__ = [
    "Factorization",
    "factorize",
    "mobius",
    "euler_phi",
    "divisor_count",
    "mobius_product",
    "theta",
    "primorials",
    "primes_upto",
    "divisors",
    "format_rational",
    "parse_rational",
    "SIX_OVER_PI2_LOWER",
]

# Certified rational lower bound for 6/pi^2 = 0.60792710...
SIX_OVER_PI2_LOWER = Fraction(6079, 10000)

_MAX_FACTORIZE = 2**64


@dataclass(frozen=True)
class Factorization:
    """A positive integer as an ascending tuple of ``(prime, exponent)`` pairs."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = 1
        for p, k in self.factors:
            if p <= prev or k < 1:
                raise ValueError(f"malformed factorization: {self.factors!r}")
            prev = p

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> "Factorization":
        return cls(tuple(sorted((int(p), int(k)) for p, k in d.items() if k)))

    @classmethod
    def from_primes(cls, primes: Iterable[int]) -> "Factorization":
        """Squarefree factorization from distinct primes (any order)."""
        return cls(tuple((p, 1) for p in sorted(primes)))

    @property
    def value(self) -> int:
        return math.prod(p**k for p, k in self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def is_squarefree(self) -> bool:
        return all(k == 1 for _, k in self.factors)

    def __mul__(self, other: "Factorization") -> "Factorization":
        d = self.as_dict()
        for p, k in other.factors:
            d[p] = d.get(p, 0) + k
        return Factorization.from_dict(d)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(str(p) if k == 1 else f"{p}^{k}" for p, k in self.factors)

    @classmethod
    def parse(cls, text: str) -> "Factorization":
        """Inverse of ``str``: ``"2^3*3*5^2"``. Primes are not re-verified."""
        text = text.strip()
        if text == "1":
            return cls()
        d: dict[int, int] = {}
        for part in text.split("*"):
            base, _, exp = part.strip().partition("^")
            p = int(base)
            d[p] = d.get(p, 0) + (int(exp) if exp else 1)
        return cls.from_dict(d)


# --- primes -----------------------------------------------------------------


def _sieve(limit: int) -> list[int]:
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


_prime_cache: list[int] = _sieve(1 << 16)


def primes_upto(limit: int) -> list[int]:
    """All primes ``<= limit``; the cache grows monotonically."""
    global _prime_cache
    if limit > _prime_cache[-1]:
        _prime_cache = _sieve(max(limit, 2 * _prime_cache[-1]))
    return _prime_cache[: bisect_right(_prime_cache, limit)]


def factorize(v: int) -> Factorization:
    """Trial division by primes below 2^16, then ``sympy.factorint``; ``1 <= v <= 2**64``."""
    v = int(v)
    if v < 1:
        raise ValueError("factorize needs a positive integer")
    if v > _MAX_FACTORIZE:
        raise ValueError("factorize is limited to integers <= 2**64")
    return _factorize_cached(v) if v < 1 << 20 else _factorize(v)


@lru_cache(maxsize=1 << 16)
def _factorize_cached(v: int) -> Factorization:
    return _factorize(v)


def _factorize(v: int) -> Factorization:
    out = []

    def strip(p: int) -> None:
        nonlocal v
        k = 0
        while v % p == 0:
            v //= p
            k += 1
        if k:
            out.append((p, k))

    for p in _prime_cache:
        if p * p > v:
            break
        strip(p)
    else:
        # No factor below 2^16 and v >= 2^32: hand the cofactor to sympy.
        from sympy import factorint

        out.extend(sorted(factorint(v).items()))
        v = 1
    if v > 1:
        out.append((v, 1))
    return Factorization(tuple(out))


# --- arithmetic functions ---------------------------------------------------


def mobius(f: Factorization) -> int:
    if any(k > 1 for _, k in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi(f: Factorization) -> int:
    return math.prod(p ** (k - 1) * (p - 1) for p, k in f.factors)


def divisor_count(f: Factorization) -> int:
    return math.prod(k + 1 for _, k in f.factors)


def mobius_product(f: Factorization, m: int) -> Fraction:
    """``prod_{p | d} (1 - p^-m)``, which equals ``sum_{l | d} mu(l) / l^m``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    num = math.prod(p**m - 1 for p in f.primes)
    den = math.prod(p**m for p in f.primes)
    return Fraction(num, den)


def theta(f: Factorization) -> Fraction:
    """``prod_{p | l} p / (p - 1)``."""
    return Fraction(math.prod(f.primes), math.prod(p - 1 for p in f.primes))


def divisors(f: Factorization) -> Iterator[Factorization]:
    """All divisors of ``f`` as factorizations (unordered)."""
    ranges = [range(k + 1) for _, k in f.factors]
    primes = f.primes
    for exps in product(*ranges):
        yield Factorization(tuple((p, e) for p, e in zip(primes, exps) if e))


def primorials(limit_prime: int) -> Iterator[Factorization]:
    """Yield ``2, 2*3, 2*3*5, ...`` for every prime up to ``limit_prime``."""
    if limit_prime < 2:
        raise ValueError("limit_prime must be >= 2")
    acc: list[tuple[int, int]] = []
    for p in primes_upto(limit_prime):
        acc.append((p, 1))
        yield Factorization(tuple(acc))


# --- text forms -------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"a/b"`` or an integer literal; floats are refused."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    match = _RATIONAL_RE.match(str(text))
    if not match:
        raise ValueError(f"not a rational literal: {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den else 1)
