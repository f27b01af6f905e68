"""Invariant checks against the brute-force oracles, sized to run in seconds."""

from __future__ import annotations

import time
from fractions import Fraction
from typing import Callable

from . import reference as ref
from .approx import NormLift, Power, Table
from .counterexample import build_psi
from .gauge import Log
from .measures import SlabSpec, measure_B_prime
from .montecarlo import MCConfig, count_solutions, mc_measure, SlabPredicate, sample_block
from .numtheory import divisor_count, euler_phi, factorize, mobius, mobius_product
from .series import totient_convolution, divisor_totient_convolution, primitive_count, sphere_count, sum_B_prime_measures


def _mobius_sums(limit: int) -> bool:
    for n in range(1, limit + 1):
        divs = ref.divisors(n)
        if sum(mobius(factorize(d)) for d in divs) != (1 if n == 1 else 0):
            return False
        if sum(euler_phi(factorize(d)) for d in divs) != n:
            return False
        for m in (1, 2):
            lhs = sum((Fraction(ref.mobius(d), d**m) for d in divs), Fraction(0))
            if lhs != mobius_product(factorize(n), m):
                return False
    return True


def _arith_vs_oracle(limit: int) -> bool:
    for n in range(1, limit + 1):
        f = factorize(n)
        if (mobius(f), euler_phi(f), divisor_count(f)) != (ref.mobius(n), ref.phi(n), ref.tau(n)):
            return False
        if totient_convolution(f) != ref.totient_convolution(n) or divisor_totient_convolution(f) != ref.divisor_totient_convolution(n):
            return False
    return True


def _counts(limit: int) -> bool:
    return all(
        sphere_count(n, h) == ref.sphere_count(n, h) and primitive_count(n, h) == ref.primitive_count(n, h)
        for n in (2, 3)
        for h in range(1, limit + 1)
    )


def _solution_counts() -> bool:
    psi = Power(Fraction(1, 4), 1)
    X = sample_block(7, 0, 20, 2)
    for x in X:
        for cop in (False, True):
            got = count_solutions(x, NormLift(psi, 2), 12, cop)
            want = ref.count_solutions(x, lambda q: psi.float_value(max(map(abs, q))), 12, 2, 1, cop)
            if got != want:
                return False
    return True


def _expected_value() -> bool:
    return sum_B_prime_measures(Table({1: Fraction(1, 10)}), 2, 1, 1) == Fraction(8, 5)


def _slab_mc() -> bool:
    s = SlabSpec((2, 2), Fraction(1, 10), 1, True)
    return mc_measure(SlabPredicate(s), 2, MCConfig(seed=1, samples=200_000)).within(measure_B_prime(s))


def _certificate() -> bool:
    _, cert = build_psi(Log(), 1, 5)
    return all(cert.verdicts.values())


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("mobius and totient divisor sums, n <= 2000", lambda: _mobius_sums(2000)),
    ("arithmetic functions vs brute force, n <= 500", lambda: _arith_vs_oracle(500)),
    ("shell counts vs enumeration, n in {2,3}, h <= 12", lambda: _counts(12)),
    ("solution counts vs enumeration", _solution_counts),
    ("S_1 = 8/5 for the single-value table", _expected_value),
    ("coprime slab measure vs Monte Carlo", _slab_mc),
    ("log-gauge certificate replays", _certificate),
]


def run(echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        passed = fn()
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}  ({time.perf_counter() - t0:.2f}s)")
    return ok
