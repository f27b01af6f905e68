"""Acceptance criteria 1-10.

Each test prints one PASS/FAIL line and records it for the terminal summary.
Run standalone with ``python3 tests/test_acceptance.py`` or through pytest.
"""

from __future__ import annotations

import json
import math
import sys
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE, divisor_lists, sieve_mobius_phi  # noqa: E402

from khintchine.approx import NormLift, Power, Table  # noqa: E402
from khintchine.counterexample import build_psi, certify  # noqa: E402
from khintchine.errors import InfeasibleError  # noqa: E402
from khintchine.gauge import Exp, Log, exp_bracket  # noqa: E402
from khintchine.measures import (  # noqa: E402
    SlabSpec,
    intersection_measure_nonparallel,
    measure_B,
    measure_B_prime,
)
from khintchine.montecarlo import (  # noqa: E402
    AllOf,
    MCConfig,
    SlabPredicate,
    expected_count_check,
    mc_measure,
    parallel_pair_audit,
    qia_report,
    sample_block,
    schmidt_residual,
)
from khintchine.numtheory import (  # noqa: E402
    euler_phi,
    factorize,
    mobius,
    mobius_product,
)
from khintchine.series import (  # noqa: E402
    totient_convolution,
    divisor_totient_convolution,
    khintchine_partial_sum,
    phi_schmidt,
    primitive_count,
    sphere_count,
    sum_B_prime_measures,
)

F = Fraction
K_SE = 4  # standard errors allowed for MC agreement
SEEDS = range(10)
MC_SAMPLES = 1_000_000
COUNT_SAMPLES = 100_000


def record(key: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[key] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")


# --- 1 ----------------------------------------------------------------------


def test_c01_exact_identities():
    t0 = time.perf_counter()
    big, small = 100_000, 10_000
    mu, phi = sieve_mobius_phi(big)
    mu_sum = [0] * (big + 1)
    phi_sum = [0] * (big + 1)
    for d in range(1, big + 1):
        f = factorize(d)
        md, pd = mobius(f), euler_phi(f)
        assert md == mu[d] and pd == phi[d]
        for k in range(d, big + 1, d):
            mu_sum[k] += md
            phi_sum[k] += pd
    bad = sum(mu_sum[n] != (n == 1) for n in range(1, big + 1))
    bad += sum(phi_sum[n] != n for n in range(1, big + 1))
    divs = divisor_lists(small)
    for n in range(1, small + 1):
        ds = divs[n]
        fn = factorize(n)
        for m in (1, 2, 3):
            bad += sum((F(mu[d], d**m) for d in ds), F(0)) != mobius_product(fn, m)
        bad += sum((F(phi[d] * phi[n // d], d) for d in ds), F(0)) != totient_convolution(fn)
        bad += sum(len(divs[v]) * phi[n // v] for v in ds) != divisor_totient_convolution(fn)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 60
    record("1 exact identities", ok, f"{bad} mismatches (mu, phi sums to 1e5; mobius products, f, g to 1e4), {dt:.1f}s")
    assert ok


# --- 2 ----------------------------------------------------------------------

BATTERY = [
    SlabSpec((6,), F(1, 4), 1, True),
    SlabSpec((4,), F(2, 5), 1, False),
    SlabSpec((3,), F(1, 4), 2, True),
    SlabSpec((2,), F(1, 10), 2, True),
    SlabSpec((6,), F(2, 5), 3, True),
    SlabSpec((2, 2), F(1, 10), 1, True),
    SlabSpec((1, 2), F(1, 10), 1, False),
    SlabSpec((3, 6), F(1, 4), 1, True),
    SlabSpec((4, -8), F(2, 5), 1, True),
    SlabSpec((6, 0), F(1, 4), 1, True),
    SlabSpec((2, 4), F(1, 4), 2, True),
    SlabSpec((3, -3), F(2, 5), 2, True),
    SlabSpec((1, 7), F(1, 10), 2, False),
    SlabSpec((6, 6), F(2, 5), 3, True),
    SlabSpec((1, 10), F(1, 4), 3, True),
    SlabSpec((2, 4, 6), F(1, 4), 1, True),
    SlabSpec((1, 2, 3), F(1, 10), 1, False),
    SlabSpec((3, 0, 9), F(2, 5), 1, True),
    SlabSpec((4, 4, -8), F(2, 5), 2, True),
    SlabSpec((6, 6, 0), F(1, 4), 2, True),
]


def _exact(s: SlabSpec) -> Fraction:
    return measure_B_prime(s) if s.coprime else measure_B(s)


@lru_cache(maxsize=None)
def battery_results(workers: int):
    out = []
    for seed in SEEDS:
        cfg = MCConfig(seed=seed, samples=MC_SAMPLES, workers=workers)
        out.append(tuple(mc_measure(SlabPredicate(s), s.dims, cfg) for s in BATTERY))
    return tuple(out)


def test_c02_measure_battery():
    t0 = time.perf_counter()
    assert len(BATTERY) >= 20
    assert {s.q.gcd for s in BATTERY} == {1, 2, 3, 4, 6}
    assert all(s.n * s.m <= 6 and s.q.sup_norm <= 10 for s in BATTERY)
    per_seed = []
    for ests in battery_results(1):
        per_seed.append(sum(e.within(_exact(s), K_SE) for s, e in zip(BATTERY, ests)))
    dt = time.perf_counter() - t0
    ok = min(per_seed) >= 19 and dt < 600
    record("2 measure vs MC", ok, f"within {K_SE} SE per seed: {per_seed} of {len(BATTERY)}, {dt:.1f}s")
    assert ok


# --- 3 ----------------------------------------------------------------------

NONPARALLEL = [
    ((1, 0), (0, 1), 1, F(1, 10), F(1, 10)),
    ((1, 2), (2, 1), 2, F(1, 8), F(1, 4)),
    ((1, 1), (1, -1), 1, F(1, 4), F(2, 5)),
    ((2, 3), (3, 5), 1, F(1, 10), F(1, 4)),
    ((2, 2), (1, 3), 1, F(1, 4), F(1, 4)),
    ((3, 1), (1, -4), 1, F(2, 5), F(1, 10)),
    ((1, 0, 0), (0, 1, 1), 1, F(1, 4), F(1, 10)),
    ((1, 2, 3), (3, 2, 1), 2, F(1, 4), F(2, 5)),
    ((4, 0), (0, 6), 2, F(2, 5), F(1, 4)),
    ((1, 5), (5, 1), 3, F(2, 5), F(2, 5)),
    ((2, -1, 0), (1, 1, 1), 1, F(1, 10), F(2, 5)),
]

PARALLEL = [
    ((1, 1), (2, 2), 1, F(2, 5), F(2, 5)),
    ((2, 4), (-3, -6), 1, F(1, 4), F(1, 4)),
    ((1, 0), (3, 0), 1, F(2, 5), F(1, 4)),
    ((1, 2), (2, 4), 2, F(2, 5), F(2, 5)),
    ((1, 1, 0), (2, 2, 0), 1, F(1, 4), F(2, 5)),
]


def test_c03_independence_and_parallel_audit():
    t0 = time.perf_counter()
    cfg = MCConfig(seed=0, samples=MC_SAMPLES)
    hits = []
    for q1, q2, m, d1, d2 in NONPARALLEL:
        s1, s2 = SlabSpec(q1, d1, m), SlabSpec(q2, d2, m)
        est = mc_measure(AllOf([SlabPredicate(s1), SlabPredicate(s2)]), s1.dims, cfg)
        hits.append(est.within(intersection_measure_nonparallel(s1, s2), K_SE))
    pairs = [(SlabSpec(a, d1, m, True), SlabSpec(b, d2, m, True)) for a, b, m, d1, d2 in PARALLEL]
    audit = parallel_pair_audit(pairs, cfg)
    ratios = [r["ratio"] for r in audit["pairs"]]
    finite = all(math.isfinite(r) for r in ratios)
    bounded = all(r <= audit["max_ratio"] for r in ratios)
    dt = time.perf_counter() - t0
    ok = len(hits) >= 10 and all(hits) and finite and bounded
    record(
        "3 independence",
        ok,
        f"{sum(hits)}/{len(hits)} non-parallel pairs within {K_SE} SE; "
        f"parallel audit max |B'&B'|/(d1 d2)^m = {audit['max_ratio']:.3f} over {len(ratios)} pairs, {dt:.1f}s",
    )
    assert ok


# --- 4 ----------------------------------------------------------------------


def _enumerate(n: int, h: int):
    axis = np.arange(-h, h + 1)
    g = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), -1).reshape(-1, n)
    norms = np.abs(g).max(1)
    gcds = np.gcd.reduce(np.abs(g), axis=1)
    return np.bincount(norms, minlength=h + 1), np.bincount(norms[gcds == 1], minlength=h + 1)


def test_c04_counting():
    bad = 0
    for n in (2, 3):
        sph, prim = _enumerate(n, 50)
        bad += sum(sphere_count(n, h) != sph[h] or primitive_count(n, h) != prim[h] for h in range(1, 51))
    _, prim2 = _enumerate(2, 1000)
    _, phi = sieve_mobius_phi(1000)
    bad += sum(primitive_count(2, h) != 8 * phi[h] or prim2[h] != 8 * phi[h] for h in range(1, 1001))
    eight_l = all(sphere_count(2, l) == 8 * l for l in range(1, 1001))
    ok = bad == 0 and eight_l
    record("4 counting", ok, f"{bad} mismatches vs enumeration (n=2,3, h<=50; 8 phi(h), h<=1000); n=2 shell is 8l")
    assert ok


# --- 5 ----------------------------------------------------------------------


def test_c05_comparability():
    psi = Power(F(1, 4), 1)
    ratios, exact_quarter = [], True
    for N in (100, 300, 1000):
        ks = khintchine_partial_sum(psi, 2, 1, N)
        exact_quarter &= ks == F(N, 4)
        ratios.append(sum_B_prime_measures(psi, 2, 1, N) / ks)
    in_bracket = all(F(1, 20) <= r <= 20 for r in ratios)
    drift = max(ratios) / min(ratios)
    ok = exact_quarter and in_bracket and drift < 2
    record("5 comparability", ok, f"S_N/sum = {[round(float(r), 4) for r in ratios]}, drift {float(drift):.4f}x, sum = N/4 exactly: {exact_quarter}")
    assert ok


# --- 6 ----------------------------------------------------------------------

EXPECTATION_SETTINGS = [
    (Table({1: F(1, 10)}), 1),
    (Power(F(1, 4), 1), 10),
    (Power(F(1, 4), 1), 100),
]


@lru_cache(maxsize=None)
def expectation_results(workers: int):
    cfg = MCConfig(seed=0, samples=COUNT_SAMPLES, workers=workers)
    return tuple(expected_count_check(psi, 2, 1, h, cfg) for psi, h in EXPECTATION_SETTINGS)


def test_c06_expectation_identity():
    reps = expectation_results(1)
    s1 = reps[0].exact == F(8, 5)
    ok = s1 and all(r.passed for r in reps)
    detail = "; ".join(
        f"h={r.h}: {r.estimate.mean:.4f} +- {r.estimate.std_error:.4f} vs {float(r.exact):.4f}" for r in reps
    )
    record("6 expectation", ok, f"{detail}; S_1 = 8/5: {s1}")
    assert ok


# --- 7 ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def qia_results(workers: int):
    cfg = MCConfig(seed=0, samples=COUNT_SAMPLES, workers=workers)
    return tuple(qia_report(Power(F(1, 4), 1), 2, 1, N, cfg) for N in (50, 100))


def test_c07_qia():
    reps = qia_results(1)
    ratios = [r.ratio for r in reps]
    finite = all(math.isfinite(x) and x > 0 for x in ratios)
    stable = max(ratios) / min(ratios) < 2
    bc = all(0 < r.bc_lower_bound <= 1 for r in reps)
    diag = all(r.D_N_diag == 2 * r.S_N for r in reps)
    ok = finite and stable and bc and diag
    detail = "; ".join(f"N={r.N}: D/S^2 = {r.ratio:.4f} +- {r.ratio_std_error:.4f}, S^2/D = {r.bc_lower_bound:.4f}" for r in reps)
    record("7 quasi-independence", ok, detail)
    assert ok


# --- 8 ----------------------------------------------------------------------


def test_c08_counterexample():
    t0 = time.perf_counter()
    psi, cert = build_psi(Log(), 1, 5)
    rep = certify(psi, Log(), 2, 1, cert)
    families = ("block_sums", "monotone", "theta_sum", "dominance")
    verdicts_ok = all(rep.verdicts[k] for k in families) and rep.passed
    start_ok = cert.blocks[0].index <= 10
    try:
        build_psi(Exp(2), 1, 1)
        infeasible_ok, bracket = False, "no report"
    except InfeasibleError as exc:
        lo, hi = F(exc.report["required_theta_lower"]), F(exc.report["required_theta_upper"])
        elo, ehi = exp_bracket(F(32), 64)
        infeasible_ok = lo <= 2 * ehi and 2 * elo <= hi and hi - lo < F(1, 10**6) * lo
        bracket = f"theta(h_1) >= [{float(lo):.6e}, {float(hi):.6e}]"
    dt = time.perf_counter() - t0
    ok = verdicts_ok and start_ok and infeasible_ok and dt < 300
    record(
        "8 counterexample",
        ok,
        f"Log T=5: h_1 = {cert.blocks[0].h} (index {cert.blocks[0].index}), verdicts {rep.verdicts}; "
        f"Exp(2): {bracket} vs 2e^32 = {2 * math.exp(32):.6e}; {dt:.1f}s",
    )
    assert ok


# --- 9 ----------------------------------------------------------------------

SCHMIDT_GRID = [2**k for k in range(4, 11)]
SCHMIDT_BOUND = 1.0


@lru_cache(maxsize=None)
def schmidt_results(workers: int):
    X = sample_block(0, 0, 100, 2)
    return schmidt_residual(X, NormLift(Power(F(1, 4), 1), 2), 1, SCHMIDT_GRID, 0.1, workers)


def test_c09_schmidt_residual():
    rows = schmidt_results(1)
    Psi = NormLift(Power(F(1, 4), 1), 2)
    phi_exact = {h: phi_schmidt(Psi, 1, h) for h in SCHMIDT_GRID}
    phi_ok = all(r["Phi"] == phi_exact[r["h"]] == 4 * r["h"] for r in rows)
    worst: dict[int, float] = {}
    for r in rows:
        worst[r["sample_id"]] = max(worst.get(r["sample_id"], 0.0), abs(r["normalized_residual"]))
    frac = sum(v <= SCHMIDT_BOUND for v in worst.values()) / len(worst)
    ok = phi_ok and len(worst) == 100 and frac >= 0.95
    record(
        "9 Schmidt residual",
        ok,
        f"{frac:.0%} of samples have max |normalized residual| <= {SCHMIDT_BOUND} over h=16..1024 "
        f"(overall max {max(worst.values()):.4f}); Phi column exact: {phi_ok}",
    )
    assert ok


# --- 10 ---------------------------------------------------------------------


def _canon(x) -> str:
    def enc(o):
        if isinstance(o, Fraction):
            return f"{o.numerator}/{o.denominator}"
        if hasattr(o, "to_json"):
            return o.to_json()
        if hasattr(o, "__dict__"):
            return vars(o)
        raise TypeError(type(o))

    return json.dumps(x, default=enc, sort_keys=True)


def test_c10_determinism():
    checks = {
        "2": (battery_results(1), battery_results(4)),
        "6": (expectation_results(1), expectation_results(4)),
        "7": (qia_results(1), qia_results(4)),
        "9": (schmidt_results(1), schmidt_results(4)),
    }
    same = {k: _canon(a) == _canon(b) for k, (a, b) in checks.items()}
    ok = all(same.values())
    record("10 determinism", ok, f"workers 1 vs 4 identical: {same}")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
