"""Slow brute-force oracles built from ``math.gcd`` and enumeration only.

Nothing here imports the rest of the package, so agreement with the fast
paths is meaningful.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product


def prime_factors(v: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= v:
        while v % p == 0:
            out[p] = out.get(p, 0) + 1
            v //= p
        p += 1
    if v > 1:
        out[v] = out.get(v, 0) + 1
    return out


def divisors(v: int) -> list[int]:
    return [d for d in range(1, v + 1) if v % d == 0]


def mobius(v: int) -> int:
    f = prime_factors(v)
    if any(k > 1 for k in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def phi(v: int) -> int:
    return sum(1 for k in range(1, v + 1) if math.gcd(k, v) == 1)


def tau(v: int) -> int:
    return len(divisors(v))


def totient_convolution(h: int) -> Fraction:
    return sum((Fraction(phi(d) * phi(h // d), d) for d in divisors(h)), Fraction(0))


def divisor_totient_convolution(l: int) -> int:
    return sum(tau(v) * phi(l // v) for v in divisors(l))


def shell(n: int, h: int):
    for q in product(range(-h, h + 1), repeat=n):
        if max(abs(c) for c in q) == h:
            yield q


def sphere_count(n: int, h: int) -> int:
    return sum(1 for _ in shell(n, h))


def primitive_count(n: int, h: int) -> int:
    return sum(1 for q in shell(n, h) if math.gcd(*q) == 1)


def count_solutions(X, Psi_float, h: int, n: int, m: int, coprime: bool) -> int:
    """Number of ``q`` with ``0 < |q| <= h`` and ``||q X_j|| < Psi(q)`` for every column."""
    total = 0
    for q in product(range(-h, h + 1), repeat=n):
        if not any(q):
            continue
        r = Psi_float(q)
        if r <= 0:
            continue
        ps = []
        for j in range(m):
            v = sum(q[i] * X[i * m + j] for i in range(n))
            p = math.floor(v + 0.5)
            if abs(v - p) >= r:
                break
            ps.append(p)
        else:
            total += not coprime or math.gcd(*q, *ps) == 1
    return total
