"""Increasing gauges F: R+ -> R+ with certified rational brackets.

Comparisons ``lhs >= F(x)`` are decided by refining a rational interval
around ``F(x)`` until ``lhs`` falls outside it; floats are never compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .numtheory import format_rational, parse_rational

__all__ = ["Gauge", "Identity", "Linear", "Log", "Exp", "parse_gauge", "ln_bracket", "exp_bracket"]

MAX_PRECISION = 4096


def _round_out(lo: Fraction, hi: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    scale = 1 << bits
    return (
        Fraction(math.floor(lo * scale), scale),
        Fraction(math.ceil(hi * scale), scale),
    )


def _atanh_bracket(u: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """``atanh(u)`` for ``0 <= u <= 1/3``; all series terms are positive."""
    if u == 0:
        return Fraction(0), Fraction(0)
    u2 = u * u
    term, k, s = u, 1, Fraction(0)
    eps = Fraction(1, 1 << (bits + 4))
    while True:
        s += term / k
        term *= u2
        k += 2
        tail = term / k / (1 - u2)
        if tail < eps:
            return s, s + tail


def ln_bracket(y: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` with ``lo <= ln(y) <= hi``, width about ``2^-bits``; ``y >= 1``."""
    y = Fraction(y)
    if y < 1:
        raise DomainError("ln_bracket expects y >= 1")
    if y == 1:
        return Fraction(0), Fraction(0)
    k = max(0, y.numerator.bit_length() - y.denominator.bit_length() - 1)
    r = y / (1 << k)
    while r >= 2:
        r /= 2
        k += 1
    extra = bits + k.bit_length() + 4
    l2lo, l2hi = _atanh_bracket(Fraction(1, 3), extra)
    rlo, rhi = _atanh_bracket((r - 1) / (r + 1), extra)
    return _round_out(2 * (k * l2lo + rlo), 2 * (k * l2hi + rhi), bits)


def exp_bracket(t: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` around ``e^t`` for ``t >= 0``; relative width about ``2^-bits``."""
    t = Fraction(t)
    if t < 0:
        raise DomainError("exp_bracket expects t >= 0")
    if t == 0:
        return Fraction(1), Fraction(1)
    k = 0
    while t / (1 << k) > Fraction(1, 2):
        k += 1
    s = t / (1 << k)
    work = bits + k + 8 + max(0, math.ceil(float(t) * 1.4427))
    # Taylor series of e^s with a geometric tail bound.
    lo, term, i = Fraction(0), Fraction(1), 0
    eps = Fraction(1, 1 << work)
    while True:
        lo += term
        i += 1
        term = term * s / i
        tail = term / (1 - s / (i + 1))
        if tail < eps:
            break
    hi = lo + tail
    lo, hi = _round_out(lo, hi, work)
    for _ in range(k):
        lo, hi = _round_out(lo * lo, hi * hi, work)
    return lo, hi


@dataclass(frozen=True)
class Gauge:
    """Base gauge; subclasses implement ``bracket``."""

    def bracket(self, x: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    @property
    def name(self) -> str:
        raise NotImplementedError

    def decide_ge(self, lhs: Fraction, x: Fraction) -> bool:
        """Certified ``lhs >= F(x)``."""
        lhs, x = Fraction(lhs), Fraction(x)
        bits = 32
        while True:
            lo, hi = self.bracket(x, bits)
            if lhs >= hi:
                return True
            if lhs < lo:
                return False
            if lo == hi:
                return lhs >= hi
            if bits >= MAX_PRECISION:
                raise ArithmeticError(f"cannot separate {lhs} from {self.name}({x})")
            bits *= 2

    def to_json(self) -> dict:
        return {"name": self.name}


@dataclass(frozen=True)
class Identity(Gauge):
    def bracket(self, x, bits=64):
        x = Fraction(x)
        return x, x

    @property
    def name(self):
        return "identity"


@dataclass(frozen=True)
class Linear(Gauge):
    """``a x + b`` with ``a > 0``, ``b >= 0``."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", parse_rational(self.a))
        object.__setattr__(self, "b", parse_rational(self.b))
        if self.a <= 0 or self.b < 0:
            raise DomainError("linear gauge needs a > 0 and b >= 0")

    def bracket(self, x, bits=64):
        v = self.a * Fraction(x) + self.b
        return v, v

    @property
    def name(self):
        return f"linear:{format_rational(self.a)},{format_rational(self.b)}"

    def to_json(self):
        return {"name": "linear", "a": format_rational(self.a), "b": format_rational(self.b)}


@dataclass(frozen=True)
class Log(Gauge):
    """``ln(1 + x)``."""

    def bracket(self, x, bits=64):
        return ln_bracket(1 + Fraction(x), bits)

    @property
    def name(self):
        return "log"


@dataclass(frozen=True)
class Exp(Gauge):
    """``e^(a x)`` with ``a > 0``."""

    a: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "a", parse_rational(self.a))
        if self.a <= 0:
            raise DomainError("exp gauge needs a > 0")

    def bracket(self, x, bits=64):
        return exp_bracket(self.a * Fraction(x), bits)

    @property
    def name(self):
        return f"exp:{format_rational(self.a)}"

    def to_json(self):
        return {"name": "exp", "a": format_rational(self.a)}


def parse_gauge(spec: str | dict) -> Gauge:
    """``identity`` | ``log`` | ``linear:a,b`` | ``exp:a`` (or the JSON form)."""
    if isinstance(spec, dict):
        name = spec["name"]
        if name == "linear":
            return Linear(parse_rational(spec["a"]), parse_rational(spec.get("b", "0")))
        if name == "exp":
            return Exp(parse_rational(spec.get("a", "1")))
        return parse_gauge(name)
    name, _, args = spec.strip().partition(":")
    name = name.lower()
    if name == "identity":
        return Identity()
    if name == "log":
        return Log()
    if name == "linear":
        a, _, b = args.partition(",")
        return Linear(parse_rational(a), parse_rational(b or "0"))
    if name == "exp":
        return Exp(parse_rational(args or "1"))
    raise DomainError(f"unknown gauge {spec!r}")
