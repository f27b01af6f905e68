import math
import os

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# name -> (passed, detail); filled by test_acceptance.py and printed at the end
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def sieve_mobius_phi(limit: int):
    """Linear sieve for mu and phi, written independently of the package."""
    mu = [0] * (limit + 1)
    phi = [0] * (limit + 1)
    mu[1] = phi[1] = 1
    primes: list[int] = []
    composite = bytearray(limit + 1)
    for i in range(2, limit + 1):
        if not composite[i]:
            primes.append(i)
            mu[i] = -1
            phi[i] = i - 1
        for p in primes:
            if i * p > limit:
                break
            composite[i * p] = 1
            if i % p == 0:
                mu[i * p] = 0
                phi[i * p] = phi[i] * p
                break
            mu[i * p] = -mu[i]
            phi[i * p] = phi[i] * (p - 1)
    return mu, phi


def divisor_lists(limit: int) -> list[list[int]]:
    divs: list[list[int]] = [[] for _ in range(limit + 1)]
    for d in range(1, limit + 1):
        for k in range(d, limit + 1, d):
            divs[k].append(d)
    return divs


@pytest.fixture(scope="session")
def small_tables():
    mu, phi = sieve_mobius_phi(10_000)
    return mu, phi, divisor_lists(10_000)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")


def isclose(a, b, rel=1e-12):
    return math.isclose(float(a), float(b), rel_tol=rel)
