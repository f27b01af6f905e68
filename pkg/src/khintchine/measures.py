"""Exact measures of the slab sets B(q, delta) and B'(q, delta).

``B(q, delta)`` is the set of ``X`` in the unit cube ``[0, 1]^(n*m)`` with
``|qX + p| < delta`` (sup norm) for some integer vector ``p``; ``B'`` further
requires ``gcd(p, q) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .numtheory import (
    SIX_OVER_PI2_LOWER,
    Factorization,
    euler_phi,
    factorize,
    format_rational,
    mobius_product,
    parse_rational,
)

__all__ = [
    "IntVec",
    "SlabSpec",
    "measure_B",
    "measure_B_prime",
    "measure_B_prime_bounds",
    "intersection_measure_nonparallel",
    "intersection_upper_bound",
    "is_parallel",
    "membership",
    "torus_map",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class IntVec:
    coords: tuple[int, ...]
    sup_norm: int = field(init=False, compare=False)
    gcd: int = field(init=False, compare=False)

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not coords:
            raise DomainError("IntVec needs dimension >= 1")
        if not any(coords):
            raise DomainError("IntVec must be nonzero")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "sup_norm", max(abs(c) for c in coords))
        object.__setattr__(self, "gcd", math.gcd(*coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def d(self) -> Factorization:
        return factorize(self.gcd)

    @property
    def primitive_part(self) -> "IntVec":
        return IntVec(tuple(c // self.gcd for c in self.coords))

    def is_primitive(self) -> bool:
        return self.gcd == 1

    def __neg__(self) -> "IntVec":
        return IntVec(tuple(-c for c in self.coords))

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class SlabSpec:
    """``B(q, delta)`` (``coprime=False``) or ``B'(q, delta)`` in ``[0,1]^(n*m)``."""

    q: IntVec
    delta: Fraction
    m: int
    coprime: bool = False

    def __post_init__(self):
        if not isinstance(self.q, IntVec):
            object.__setattr__(self, "q", IntVec(tuple(self.q)))
        delta = parse_rational(self.delta)
        if not 0 < delta < HALF:
            raise DomainError(f"delta must lie in (0, 1/2), got {delta}")
        object.__setattr__(self, "delta", delta)
        if int(self.m) < 1:
            raise DomainError("m must be >= 1")

    @property
    def n(self) -> int:
        return self.q.n

    @property
    def dims(self) -> int:
        return self.q.n * self.m

    def to_json(self) -> dict:
        return {
            "q": list(self.q.coords),
            "m": self.m,
            "delta": format_rational(self.delta),
            "coprime": self.coprime,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SlabSpec":
        return cls(
            IntVec(tuple(obj["q"])),
            parse_rational(obj["delta"]),
            int(obj["m"]),
            bool(obj.get("coprime", False)),
        )


def measure_B(s: SlabSpec) -> Fraction:
    """``(2 delta)^m``, independent of ``q``."""
    return (2 * s.delta) ** s.m


def measure_B_prime(s: SlabSpec) -> Fraction:
    """``(2 delta)^m * prod_{p | gcd(q)} (1 - p^-m)``."""
    return (2 * s.delta) ** s.m * mobius_product(s.q.d, s.m)


def measure_B_prime_bounds(s: SlabSpec) -> tuple[Fraction, Fraction]:
    """Rational bracket around ``|B'(q, delta)|``.

    Exact (``2 delta phi(d)/d`` on both sides) when ``m == 1``; otherwise the
    lower side uses a certified rational below ``6/pi^2``.
    """
    base = (2 * s.delta) ** s.m
    if s.m == 1:
        d = s.q.gcd
        exact = base * Fraction(euler_phi(s.q.d), d)
        return exact, exact
    return SIX_OVER_PI2_LOWER * base, base


def is_parallel(q1: IntVec, q2: IntVec) -> bool:
    """Cross-product test in integer arithmetic."""
    a, b = q1.coords, q2.coords
    if len(a) != len(b):
        raise DomainError("vectors of different dimension")
    n = len(a)
    return all(a[i] * b[j] == a[j] * b[i] for i in range(n) for j in range(i + 1, n))


def _check_compatible(s1: SlabSpec, s2: SlabSpec) -> None:
    if s1.n != s2.n or s1.m != s2.m:
        raise DomainError("slab specs live in different spaces")


def intersection_measure_nonparallel(s1: SlabSpec, s2: SlabSpec) -> Fraction:
    """``|B(q1, d1) & B(q2, d2)| = |B(q1, d1)| * |B(q2, d2)|`` for ``q1`` not parallel to ``q2``."""
    _check_compatible(s1, s2)
    if s1.coprime or s2.coprime:
        raise DomainError("exact independence holds for B-type sets only")
    if is_parallel(s1.q, s2.q):
        raise DomainError(
            f"q1={s1.q.coords} and q2={s2.q.coords} are parallel; "
            "use intersection_upper_bound or the Monte Carlo oracle"
        )
    return measure_B(s1) * measure_B(s2)


def intersection_upper_bound(s1: SlabSpec, s2: SlabSpec, c: Fraction) -> Fraction:
    """``c * (d1 * d2)^m`` with ``c`` an audit constant supplied by the caller."""
    _check_compatible(s1, s2)
    if s1.q == s2.q or s1.q == -s2.q:
        raise DomainError("q1 = +-q2 is the diagonal case and has no such bound")
    return parse_rational(c) * (s1.delta * s2.delta) ** s1.m


def _as_matrix(X, n: int, m: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.size != n * m:
        raise DomainError(f"X has {X.size} entries, expected {n}x{m}")
    return X.reshape(n, m)


def membership(X, s: SlabSpec) -> bool:
    """Whether the ``n x m`` matrix ``X`` lies in the slab set ``s``.

    Since ``delta < 1/2`` the only candidate is ``p* = -round(qX)``.  A
    component of ``qX`` at exact half-integer distance is a non-member.
    """
    X = _as_matrix(X, s.n, s.m)
    v = np.zeros(s.m)
    for qi, row in zip(s.q.coords, X):
        v += qi * row
    p = -np.floor(v + 0.5)
    dist = np.abs(v + p)
    if not float(np.max(dist)) < float(s.delta):
        return False
    if not s.coprime:
        return True
    return math.gcd(s.q.gcd, *(int(x) for x in p)) == 1


def torus_map(X, q: IntVec | Sequence[int]) -> np.ndarray:
    """``X -> qX mod 1`` as an ``m``-vector in ``[0, 1)^m``."""
    q = q if isinstance(q, IntVec) else IntVec(tuple(q))
    X = np.asarray(X, dtype=np.float64)
    X = X.reshape(q.n, -1)
    v = np.zeros(X.shape[1])
    for qi, row in zip(q.coords, X):
        v += qi * row
    return v - np.floor(v)
