"""Divergent approximating functions on primorials whose error weight chi
dominates F(Phi), built greedily and certified with exact rationals.

Blocks start at primorials ``h_1 < h_2 < ...`` chosen so that
``(1/2) sum_{t<=T} theta(h_t) >= F(8T + 8)``.  Inside block ``t`` every
primorial ``l`` gets ``l psi(l)^m = 1/s_t``, where ``s_t`` is the number of
primorials in the block, so each block contributes exactly 1 to
``sum l psi(l)^m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .approx import ApproxFunction, Capped, Constant, Power, PlaneLift, Sparse, Table
from .errors import DomainError, InfeasibleError
from .gauge import Gauge, parse_gauge
from .numtheory import Factorization, format_rational, parse_rational, primes_upto, theta
from .series import CONVENTIONS, chi_schmidt, khintchine_partial_sum, phi_schmidt

__all__ = [
    "Block",
    "Certificate",
    "CertifyReport",
    "build_psi",
    "certify",
    "divergence_trace",
    "lift_to_multivariable",
    "truncate_min",
]

DEFAULT_PRIME_BUDGET = 10_000


@dataclass(frozen=True)
class Block:
    h: Factorization  # first primorial of the block
    index: int  # h is the product of the first `index` primes
    s: int  # primorials in the block
    theta: Fraction

    def to_json(self) -> dict:
        return {"h": str(self.h), "index": self.index, "s": self.s, "theta": format_rational(self.theta)}

    @classmethod
    def from_json(cls, obj: dict) -> "Block":
        return cls(Factorization.parse(obj["h"]), int(obj["index"]), int(obj["s"]), parse_rational(obj["theta"]))


@dataclass
class Certificate:
    m: int
    gauge: Gauge
    blocks: list[Block]
    next_start: Block  # h_{T+1}; closes the last block, s unused (0)
    convention: str = "proof"
    thinned: list[int] = field(default_factory=list)  # skipped start indices
    checkpoints: list[dict] = field(default_factory=list)
    verdicts: dict[str, bool] = field(default_factory=dict)

    @property
    def T(self) -> int:
        return len(self.blocks)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "gauge": self.gauge.to_json(),
            "convention": self.convention,
            "s_monotonicity": "nondecreasing",
            "blocks": [b.to_json() for b in self.blocks],
            "next_start": self.next_start.to_json(),
            "thinned": list(self.thinned),
            "checkpoints": [
                {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in c.items()}
                for c in self.checkpoints
            ],
            "verdicts": dict(self.verdicts),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        def conv(v):
            return parse_rational(v) if isinstance(v, str) and "/" in v else v

        return cls(
            m=int(obj["m"]),
            gauge=parse_gauge(obj["gauge"]),
            blocks=[Block.from_json(b) for b in obj["blocks"]],
            next_start=Block.from_json(obj["next_start"]),
            convention=obj.get("convention", "proof"),
            thinned=list(obj.get("thinned", [])),
            checkpoints=[{k: conv(v) for k, v in c.items()} for c in obj.get("checkpoints", [])],
            verdicts=dict(obj.get("verdicts", {})),
        )


def _primorial(primes: Sequence[int], index: int) -> Factorization:
    return Factorization(tuple((p, 1) for p in primes[:index]))


def build_psi(
    F: Gauge,
    m: int,
    T_target: int,
    prime_budget: int = DEFAULT_PRIME_BUDGET,
    convention: str = "proof",
) -> tuple[Sparse, Certificate]:
    """Greedy construction of ``T_target`` blocks over the first ``prime_budget`` primorials.

    A primorial becomes the next block start once ``(1/2) sum theta``
    reaches ``F(8T + 8)`` and the block it closes is at least as long as
    the one before (keeping ``s_t`` nondecreasing); qualifying starts that
    would break monotonicity are skipped and listed in ``thinned``.
    Raises :class:`InfeasibleError` with the binding inequality when the
    budget runs out.
    """
    if T_target < 1:
        raise DomainError("T_target must be >= 1")
    if m < 1:
        raise DomainError("m must be >= 1")
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}")
    primes = _first_primes(prime_budget)

    starts: list[tuple[int, Fraction]] = []  # (index, theta)
    thinned: list[int] = []
    sum_theta = Fraction(0)
    prev_s = 0
    # theta(l_n) grows by p/(p-1); the float running value only screens
    # out hopeless candidates before the exact test.
    log_theta = 0.0
    target_cache: dict[int, tuple[Fraction, Fraction]] = {}
    for idx in range(1, len(primes) + 1):
        p = primes[idx - 1]
        log_theta += math.log(p / (p - 1))
        T = len(starts) + 1
        if T not in target_cache:
            target_cache[T] = F.bracket(Fraction(8 * T + 8), 64)
        lo, _ = target_cache[T]
        approx_lhs = 0.5 * (float(sum_theta) + math.exp(log_theta))
        if approx_lhs < float(lo) * (1 - 1e-9):
            continue
        th = theta(_primorial(primes, idx))
        if not F.decide_ge((sum_theta + th) / 2, Fraction(8 * T + 8)):
            continue
        if starts and idx - starts[-1][0] < prev_s:
            thinned.append(idx)
            continue
        if starts:
            prev_s = idx - starts[-1][0]
        starts.append((idx, th))
        sum_theta += th
        if len(starts) == T_target + 1:
            break
    else:
        T = len(starts) + 1
        lo, hi = F.bracket(Fraction(8 * T + 8), 64)
        best = theta(_primorial(primes, len(primes)))
        report = {
            "gauge": F.to_json(),
            "m": m,
            "prime_budget": prime_budget,
            "blocks_found": max(0, len(starts) - 1),
            "starts_found": len(starts),
            "binding_T": T,
            "binding_inequality": f"(1/2) * sum_{{t<={T}}} theta(h_t) >= {F.name}({8 * T + 8})",
            "required_theta_lower": format_rational(2 * lo - sum_theta),
            "required_theta_upper": format_rational(2 * hi - sum_theta),
            "required_theta_float": float(2 * lo - sum_theta),
            "best_theta_in_budget": float(best),
            "largest_prime_scanned": primes[-1],
        }
        raise InfeasibleError(
            f"prime budget {prime_budget} exhausted: need theta(h_{T}) >= {report['required_theta_float']:.6g}, "
            f"best available {float(best):.6g}",
            report,
        )

    blocks = []
    for (idx, th), (nxt, _) in zip(starts, starts[1:]):
        blocks.append(Block(_primorial(primes, idx), idx, nxt - idx, th))
    last_idx, last_th = starts[-1]
    next_start = Block(_primorial(primes, last_idx), last_idx, 0, last_th)

    entries = []
    for b in blocks:
        w = Fraction(1, b.s)
        entries.extend((_primorial(primes, j), w) for j in range(b.index, b.index + b.s))
    psi = Sparse(entries, m)
    cert = Certificate(m, F, blocks, next_start, convention, thinned)
    report = certify(psi, F, 2, m, cert)
    cert.checkpoints = report.checkpoints
    cert.verdicts = report.verdicts
    return psi, cert


def _first_primes(count: int) -> list[int]:
    if count < 1:
        raise DomainError("prime_budget must be >= 1")
    limit = max(16, int(count * (math.log(count + 1) + math.log(math.log(count + 3)) + 2)))
    primes = primes_upto(limit)
    while len(primes) < count:
        limit *= 2
        primes = primes_upto(limit)
    return primes[:count]


# --- certification ----------------------------------------------------------


@dataclass
class CertifyReport:
    verdicts: dict[str, bool]
    failures: list[dict]
    checkpoints: list[dict]

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "verdicts": dict(self.verdicts),
            "failures": self.failures,
            "checkpoints": [
                {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in c.items()}
                for c in self.checkpoints
            ],
        }


def _fail(name: str, lhs, rhs, **extra) -> dict:
    def fmt(v):
        if isinstance(v, tuple):
            return [format_rational(x) for x in v]
        return format_rational(v) if isinstance(v, (Fraction, int)) else v

    return {"inequality": name, "lhs": fmt(lhs), "rhs": fmt(rhs), **extra}


def certify(psi: Sparse, F: Gauge, n: int, m: int, cert: Certificate) -> CertifyReport:
    """Replay every inequality of the construction with exact rationals.

    Verdict families: ``block_sums`` (each block sums to 1), ``monotone``
    (psi nonincreasing on its support), ``theta_sum`` (the theta-sum condition
    for every ``T``), ``dominance`` (``chi(h_t) >= F(Phi(h_t))`` at every
    checkpoint ``t >= 2``, both through the bound chain and exactly), and
    ``structure`` (certificate matches ``psi``).
    """
    if n < 2:
        raise DomainError("certificate lives in dimension n >= 2")
    if psi.m != m or cert.m != m:
        raise DomainError("m mismatch between psi, certificate and call")
    failures: list[dict] = []
    verdicts = {}
    starts = list(cert.blocks) + [cert.next_start]
    support = list(psi.entries)

    ok = True
    for a, b in zip(starts, starts[1:]):
        if not a.h.value < b.h.value:
            ok = False
            failures.append(_fail("h_t < h_t+1", a.h.value, b.h.value))
    first = _first_primes(max(b.index for b in starts))
    for b in starts:
        if theta(b.h) != b.theta:
            ok = False
            failures.append(_fail("theta(h_t) recorded", b.theta, theta(b.h), h=str(b.h)))
        if b.h.primes != tuple(first[: b.index]):
            ok = False
            failures.append(_fail("h_t is a primorial", str(b.h), b.index))
    for t, (a, b) in enumerate(zip(cert.blocks, cert.blocks[1:]), start=1):
        if b.s < a.s:
            ok = False
            failures.append(_fail("s_t nondecreasing", a.s, b.s, t=t))
    for t, b in enumerate(cert.blocks, start=1):
        nxt = starts[t].h.value
        inside = [e for e in support if b.h.value <= e.value < nxt]
        if len(inside) != b.s:
            ok = False
            failures.append(_fail("support points per block = s_t", len(inside), b.s, t=t))
    if support and support[0].value < cert.blocks[0].h.value:
        ok = False
        failures.append(_fail("psi = 0 below h_1", support[0].value, cert.blocks[0].h.value))
    verdicts["structure"] = ok

    ok = True
    for t, b in enumerate(cert.blocks, start=1):
        nxt = starts[t].h.value
        total = sum((e.weight for e in support if b.h.value <= e.value < nxt), Fraction(0))
        if total != 1:
            ok = False
            failures.append(_fail("block sum of l psi(l)^m = 1", total, 1, t=t))
    verdicts["block_sums"] = ok

    ok = True
    for e1, e2 in zip(support, support[1:]):
        # psi(l1)^m >= psi(l2)^m  <=>  w1 * l2 >= w2 * l1
        if e1.weight * e2.value < e2.weight * e1.value:
            ok = False
            failures.append(_fail("psi nonincreasing on support", e1.weight / e1.value, e2.weight / e2.value, l1=str(e1.l), l2=str(e2.l)))
    verdicts["monotone"] = ok

    ok = True
    acc = Fraction(0)
    for T, b in enumerate(starts, start=1):
        acc += theta(b.h)
        if not F.decide_ge(acc / 2, Fraction(8 * T + 8)):
            ok = False
            failures.append(_fail("(1/2) sum theta(h_t) >= F(8T+8)", acc / 2, F.bracket(Fraction(8 * T + 8)), T=T))
    verdicts["theta_sum"] = ok

    checkpoints = []
    ok = True
    Psi = PlaneLift(psi, n)
    for t, b in enumerate(cert.blocks, start=1):
        h = b.h.value
        upto = [e for e in support if e.value <= h]
        phi_upper = 8 * sum((e.weight for e in upto), Fraction(0))
        chi_lower = sum((e.weight * theta(e.l) for e in upto), Fraction(0)) / 2
        phi = phi_schmidt(Psi, m, h, cert.convention)
        chi = chi_schmidt(Psi, m, h, cert.convention)
        row = {
            "t": t,
            "h": str(b.h),
            "Phi": phi,
            "chi": chi,
            "Phi_upper": phi_upper,
            "chi_lower": chi_lower,
        }
        if t >= 2:
            chain = F.decide_ge(chi_lower, phi_upper)
            direct = F.decide_ge(chi, phi)
            row["chain_holds"] = chain
            row["exact_holds"] = direct
            if not chain:
                ok = False
                failures.append(_fail("(1/2) sum l psi^m theta >= F(8 sum l psi^m)", chi_lower, F.bracket(phi_upper), t=t))
            if not direct:
                ok = False
                failures.append(_fail("chi(h_t) >= F(Phi(h_t))", chi, F.bracket(phi), t=t))
            if cert.convention == "proof" and not (chi >= chi_lower and phi <= phi_upper):
                ok = False
                failures.append(_fail("exact values inside the bound chain", chi, chi_lower, t=t))
        checkpoints.append(row)
    verdicts["dominance"] = ok
    return CertifyReport(verdicts, failures, checkpoints)


def divergence_trace(psi: ApproxFunction, n: int, m: int, checkpoints: Iterable[int]) -> list[tuple[int, Fraction]]:
    """``(h, sum_{l <= h} l^(n-1) psi(l)^m)`` at each checkpoint."""
    return [(h, khintchine_partial_sum(psi, n, m, h) if h >= 1 else Fraction(0)) for h in checkpoints]


def lift_to_multivariable(psi: ApproxFunction, n: int) -> PlaneLift:
    if n < 2:
        raise DomainError("the plane lift needs n >= 2")
    return PlaneLift(psi, n)


def truncate_min(psi: ApproxFunction, c: Fraction) -> ApproxFunction:
    """Pointwise ``min(c, psi)``."""
    c = parse_rational(c)
    if c <= 0:
        raise DomainError("c must be positive")
    if isinstance(psi, Constant):
        return Constant(min(c, psi.c))
    if isinstance(psi, Power):
        # c0 h^-tau peaks at h = 1
        return psi if psi.c <= c else Capped(psi, c)
    if isinstance(psi, Table):
        return Table({h: min(c, v) for h, v in psi.values.items()})
    if isinstance(psi, Sparse):
        cm = c**psi.m
        return Sparse([(e.l, min(e.weight, e.value * cm)) for e in psi.entries], psi.m)
    if isinstance(psi, Capped):
        return Capped(psi.psi, min(c, psi.cap))
    raise DomainError(f"cannot truncate {type(psi).__name__}")
