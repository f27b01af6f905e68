"""Seeded Monte Carlo oracle for slab measures and solution counts.

Randomness comes from Philox, a counter-based generator.  Samples are cut into
fixed-size chunks and chunk ``c`` is drawn from the stream keyed by
``(seed, c)``, so an estimate depends only on ``(seed, samples)``; ``workers``
changes wall time, never the result.  Reductions are integer sums.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .approx import ApproxFunction, MultiApproxFunction, MultiTable, NormLift, PlaneLift
from .errors import DomainError
from .lattice import halfspace_vectors
from .measures import SlabSpec, is_parallel
from .numtheory import format_rational
from .series import primitive_count, schmidt_pair, sum_B_prime_measures

__all__ = [
    "MCConfig",
    "MCEstimate",
    "SlabPredicate",
    "AllOf",
    "FuncPredicate",
    "mc_measure",
    "sample_block",
    "count_solutions",
    "expected_count_check",
    "QIAReport",
    "qia_report",
    "primitive_moments",
    "ExpectationReport",
    "parallel_pair_audit",
    "schmidt_residual",
    "SCHMIDT_COLUMNS",
]

CHUNK = 1 << 16
GUARD = 1e-12
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MCConfig:
    seed: int = 0
    samples: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("samples must be positive")
        if self.workers < 1:
            raise DomainError("workers must be positive")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int
    resampled: int = 0

    def within(self, exact, k: float = 4.0) -> bool:
        """``|mean - exact| <= k * std_error`` (exact equality when the error is 0)."""
        return abs(self.mean - float(exact)) <= k * self.std_error

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "seed": self.seed,
            "resampled": self.resampled,
        }


def _estimate(total: int, total_sq: int, n: int, seed: int, resampled: int = 0) -> MCEstimate:
    """Mean and standard error from exact integer moments."""
    mean = Fraction(total, n)
    if n > 1:
        var = Fraction(total_sq * n - total * total, n * (n - 1))
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return MCEstimate(float(mean), se, n, seed, resampled)


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed & _MASK64) | (chunk << 64)))


def _chunks(samples: int) -> list[tuple[int, int]]:
    return [(c, min(CHUNK, samples - c * CHUNK)) for c in range((samples + CHUNK - 1) // CHUNK)]


def _run(job: Callable, items: Sequence, workers: int) -> list:
    if workers == 1 or len(items) <= 1:
        return [job(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, items))


def sample_block(seed: int, start: int, count: int, dims: int) -> np.ndarray:
    """Rows ``start .. start+count`` of the uniform sample stream for ``seed``.

    Row ``i`` depends only on ``(seed, i)``; used wherever explicit ``X``
    samples are needed outside :func:`mc_measure`.
    """
    out = np.empty((count, dims))
    pos = 0
    while pos < count:
        i = start + pos
        c, off = divmod(i, CHUNK)
        take = min(count - pos, CHUNK - off)
        rows = _rng(seed, c).random((off + take, dims))
        out[pos : pos + take] = rows[off:]
        pos += take
    return out


# --- predicates -------------------------------------------------------------


class SlabPredicate:
    """Vectorized membership test for one :class:`SlabSpec`."""

    def __init__(self, spec: SlabSpec):
        self.spec = spec
        self.dims = spec.dims
        self._q = np.asarray(spec.q.coords, dtype=np.int64)
        self._delta = float(spec.delta)

    def status(self, X: np.ndarray) -> np.ndarray:
        s = self.spec
        return kernels.slab_status(X, self._q, s.m, s.q.gcd, self._delta, s.coprime, GUARD)


class AllOf:
    """Intersection; near-boundary in any component discards the sample."""

    def __init__(self, preds: Iterable):
        self.preds = list(preds)
        dims = {p.dims for p in self.preds}
        if len(dims) != 1:
            raise DomainError("predicates live in different dimensions")
        self.dims = dims.pop()

    def status(self, X):
        st = [p.status(X) for p in self.preds]
        out = np.ones(X.shape[0], dtype=np.int8)
        for s in st:
            out = np.where(s == 1, out, 0).astype(np.int8)
        for s in st:
            out[s == 2] = 2
        return out


class FuncPredicate:
    """Wrap ``fn(X) -> bool array`` over a batch of shape ``(k, dims)``."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], dims: int):
        self.fn = fn
        self.dims = dims

    def status(self, X):
        return np.asarray(self.fn(X), dtype=bool).astype(np.int8)


def mc_measure(pred, dims: int, cfg: MCConfig) -> MCEstimate:
    """Estimate the Lebesgue measure of ``{X in [0,1]^dims : pred(X)}``.

    Samples within ``GUARD`` of a slab boundary are redrawn from the same
    chunk stream, so the sample count stays exact.
    """
    if getattr(pred, "dims", dims) != dims:
        raise DomainError(f"predicate has {pred.dims} dims, asked for {dims}")
    if not hasattr(pred, "status"):
        pred = FuncPredicate(pred, dims)

    def job(item):
        c, k = item
        rng = _rng(cfg.seed, c)
        X = rng.random((k, dims))
        st = pred.status(X)
        redrawn = 0
        bad = np.flatnonzero(st == 2)
        while bad.size:
            redrawn += bad.size
            X[bad] = rng.random((bad.size, dims))
            st[bad] = pred.status(X[bad])
            bad = bad[st[bad] == 2]
        return int(np.count_nonzero(st == 1)), redrawn

    parts = _run(job, _chunks(cfg.samples), cfg.workers)
    hits = sum(p[0] for p in parts)
    return _estimate(hits, hits, cfg.samples, cfg.seed, sum(p[1] for p in parts))


# --- solution counts --------------------------------------------------------


@dataclass(frozen=True)
class _QList:
    qs: np.ndarray
    gcds: np.ndarray
    norms: np.ndarray
    thresh: np.ndarray


def _qlist(Psi: MultiApproxFunction, h: int) -> _QList:
    """Half-space vectors with ``Psi(q) > 0`` and their float thresholds."""
    n = Psi.n
    if isinstance(Psi, MultiTable):
        keys = sorted({_halfspace(q) for q, v in Psi.values.items() if max(map(abs, q)) <= h})
        qs = np.array(keys, dtype=np.int64).reshape(-1, n)
        norms = np.abs(qs).max(axis=1) if len(qs) else np.zeros(0, dtype=np.int64)
        gcds = np.gcd.reduce(np.abs(qs), axis=1) if len(qs) else np.zeros(0, dtype=np.int64)
        th = np.array([Psi.float_value(q) for q in keys], dtype=np.float64)
    else:
        if isinstance(Psi, PlaneLift):
            q2, norms, gcds = halfspace_vectors(2, h)
            qs = np.zeros((len(q2), n), dtype=np.int64)
            qs[:, :2] = q2
        else:
            qs, norms, gcds = halfspace_vectors(n, h)
        by_norm = np.zeros(h + 1)
        for l in Psi.psi.support(h):
            by_norm[l] = Psi.psi.float_value(l)
        th = by_norm[norms]
    keep = th > 0
    return _QList(
        np.ascontiguousarray(qs[keep]),
        np.ascontiguousarray(gcds[keep]),
        np.ascontiguousarray(norms[keep]),
        np.ascontiguousarray(th[keep]),
    )


def _halfspace(q: tuple[int, ...]) -> tuple[int, ...]:
    lead = next(c for c in q if c)
    return q if lead > 0 else tuple(-c for c in q)


def _check_half(Psi: MultiApproxFunction, h: int) -> None:
    """Raise unless ``Psi(q) < 1/2`` for ``|q| <= h`` (so ``p`` is unique)."""
    if isinstance(Psi, MultiTable):
        for q, v in Psi.values.items():
            if max(map(abs, q)) <= h and v >= Fraction(1, 2):
                raise DomainError(f"Psi(q) >= 1/2 at q={q}")
        for q, v in Psi.values.items():
            if Psi.values.get(tuple(-c for c in q), 0) != v:
                raise DomainError("table must satisfy Psi(q) = Psi(-q)")
        return
    psi = Psi.psi
    if psi.below_half(h):
        return
    for l in psi.support(h):
        if not psi.below_half(l):
            raise DomainError(f"Psi(q) >= 1/2 at q={(l,) + (0,) * (Psi.n - 1)}")


def count_solutions(X, Psi: MultiApproxFunction, h: int, coprime: bool = False, m: int | None = None) -> int:
    """``#{(p, q) : 0 < |q| <= h, |qX + p| < Psi(q)}``, optionally with ``gcd(p, q) = 1``.

    ``X`` is an ``n x m`` matrix; ``m`` is inferred from its shape.
    """
    X = np.asarray(X, dtype=np.float64)
    n = Psi.n
    if m is None:
        m = X.size // n
    if X.size != n * m:
        raise DomainError(f"X has {X.size} entries, not a multiple of n={n}")
    _check_half(Psi, h)
    ql = _qlist(Psi, h)
    counts = kernels.count_buckets(
        X.reshape(1, n * m), ql.qs, ql.gcds, ql.thresh, np.zeros(len(ql.qs), dtype=np.int64), 1, m, coprime
    )
    return 2 * int(counts[0, 0])


def _count_moments(cfg: MCConfig, Psi, h: int, m: int, coprime: bool) -> dict[str, int]:
    """Exact integer moments of the solution count ``C(X)`` over uniform ``X``.

    ``C = A + B`` with ``A`` counting primitive ``q``; the moments of
    ``C``, ``C^2`` and ``Y = 2AB + B^2`` are accumulated.
    """
    ql = _qlist(Psi, h)
    dims = Psi.n * m
    bucket = (ql.gcds != 1).astype(np.int64)

    def job(item):
        c, k = item
        X = _rng(cfg.seed, c).random((k, dims))
        out = 2 * kernels.count_buckets(X, ql.qs, ql.gcds, ql.thresh, bucket, 2, m, coprime)
        A, B = out[:, 0].astype(object), out[:, 1].astype(object)
        C = A + B
        C2 = C * C
        Y = 2 * A * B + B * B
        return {
            "C": int(C.sum()),
            "C2": int(C2.sum()),
            "C4": int((C2 * C2).sum()),
            "Y": int(Y.sum()),
            "Y2": int((Y * Y).sum()),
        }

    parts = _run(job, _chunks(cfg.samples), cfg.workers)
    return {key: sum(p[key] for p in parts) for key in parts[0]}


@dataclass
class ExpectationReport:
    psi: dict
    n: int
    m: int
    h: int
    exact: Fraction
    estimate: MCEstimate
    passed: bool

    def to_json(self) -> dict:
        return {
            "psi": self.psi,
            "n": self.n,
            "m": self.m,
            "h": self.h,
            "exact": format_rational(self.exact),
            "estimate": self.estimate.to_json(),
            "passed": self.passed,
        }


def expected_count_check(psi: ApproxFunction, n: int, m: int, h: int, cfg: MCConfig) -> ExpectationReport:
    """Compare the MC mean of the coprime count with the exact ``S_h``."""
    exact = sum_B_prime_measures(psi, n, m, h)
    Psi = NormLift(psi, n)
    _check_half(Psi, h)
    mom = _count_moments(cfg, Psi, h, m, True)
    est = _estimate(mom["C"], mom["C2"], cfg.samples, cfg.seed)
    return ExpectationReport(psi.to_json(), n, m, h, exact, est, est.within(exact))


# --- quasi-independence ------------------------------------------------------


@dataclass
class QIAReport:
    N: int
    n: int
    m: int
    S_N: Fraction
    D_N_diag: Fraction
    D_N_exact_part: Fraction
    D_N_offdiag: MCEstimate
    D_N: MCEstimate
    ratio: float
    ratio_std_error: float
    bc_lower_bound: float
    method: str

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "n": self.n,
            "m": self.m,
            "method": self.method,
            "S_N": format_rational(self.S_N),
            "D_N_diag": format_rational(self.D_N_diag),
            "D_N_exact_part": format_rational(self.D_N_exact_part),
            "D_N_offdiag": self.D_N_offdiag.to_json(),
            "D_N": self.D_N.to_json(),
            "ratio": self.ratio,
            "ratio_std_error": self.ratio_std_error,
            "bc_lower_bound": self.bc_lower_bound,
        }


def primitive_moments(psi: ApproxFunction, n: int, m: int, N: int) -> tuple[Fraction, Fraction]:
    """``(sum |B_q|, sum |B_q|^2)`` over primitive ``q`` with ``|q| <= N``."""
    p1 = p2 = Fraction(0)
    for h in psi.support(N):
        b = 2**m * psi.power(h, m)
        if b:
            c = primitive_count(n, psi.factorization(h))
            p1 += c * b
            p2 += c * b * b
    return p1, p2


def qia_report(psi: ApproxFunction, n: int, m: int, N: int, cfg: MCConfig, method: str = "hybrid") -> QIAReport:
    """Second-moment diagnostics of the sets ``B'_q = B'(q, psi(|q|))``, ``|q| <= N``.

    ``D_N = sum_{q1, q2} |B'_q1 & B'_q2|`` equals ``E[C(X)^2]`` where ``C``
    counts the ``q`` with ``X in B'_q``.  Writing ``C = A + B`` with ``A``
    over primitive ``q``: ``E[A^2]`` is exact (primitive pairs are either
    ``q2 = +-q1`` or non-parallel, where ``B' = B`` are independent), and
    only ``E[2AB + B^2]`` is sampled.  ``method="mc"`` samples all of ``E[C^2]``.
    """
    S = sum_B_prime_measures(psi, n, m, N)
    if S == 0:
        raise DomainError("S_N = 0: the family is empty")
    Psi = NormLift(psi, n)
    _check_half(Psi, N)
    diag = 2 * S
    if method not in ("hybrid", "mc"):
        raise DomainError(f"unknown method {method!r}")
    mom = _count_moments(cfg, Psi, N, m, True)
    if method == "hybrid":
        p1, p2 = primitive_moments(psi, n, m, N)
        exact_part = 2 * p1 + p1 * p1 - 2 * p2
        y = _estimate(mom["Y"], mom["Y2"], cfg.samples, cfg.seed)
    else:
        exact_part = Fraction(0)
        y = _estimate(mom["C2"], mom["C4"], cfg.samples, cfg.seed)
    D = MCEstimate(float(exact_part) + y.mean, y.std_error, cfg.samples, cfg.seed)
    off = MCEstimate(D.mean - float(diag), y.std_error, cfg.samples, cfg.seed)
    s2 = float(S * S)
    return QIAReport(
        N=N,
        n=n,
        m=m,
        S_N=S,
        D_N_diag=diag,
        D_N_exact_part=exact_part,
        D_N_offdiag=off,
        D_N=D,
        ratio=D.mean / s2,
        ratio_std_error=D.std_error / s2,
        bc_lower_bound=s2 / D.mean,
        method=method,
    )


def parallel_pair_audit(pairs: Sequence[tuple[SlabSpec, SlabSpec]], cfg: MCConfig) -> dict:
    """MC ratios ``|B'1 & B'2| / (d1 d2)^m`` for pairs of parallel ``q``."""
    rows = []
    for s1, s2 in pairs:
        if not is_parallel(s1.q, s2.q):
            raise DomainError("audit pairs must be parallel")
        est = mc_measure(AllOf([SlabPredicate(s1), SlabPredicate(s2)]), s1.dims, cfg)
        scale = float((s1.delta * s2.delta) ** s1.m)
        rows.append(
            {
                "q1": list(s1.q.coords),
                "q2": list(s2.q.coords),
                "m": s1.m,
                "delta1": format_rational(s1.delta),
                "delta2": format_rational(s2.delta),
                "estimate": est.to_json(),
                "ratio": est.mean / scale,
                "ratio_std_error": est.std_error / scale,
            }
        )
    return {"pairs": rows, "max_ratio": max((r["ratio"] for r in rows), default=0.0)}


# --- Schmidt residuals ------------------------------------------------------

SCHMIDT_COLUMNS = ("sample_id", "h", "N_count", "Phi", "chi", "residual", "normalized_residual")


def schmidt_residual(
    X_samples: np.ndarray,
    Psi: MultiApproxFunction,
    m: int,
    hs: Sequence[int],
    epsilon: float = 0.1,
    workers: int = 1,
) -> list[dict]:
    """Per ``(X, h)`` rows comparing the count with ``Phi(h)``.

    The normalized residual divides by ``chi^(1/2) log^(3/2 + eps) chi``
    (natural log); rows with ``chi <= 1`` carry ``None`` there.
    """
    hs = sorted(set(int(h) for h in hs))
    H = hs[-1]
    X_samples = np.atleast_2d(np.asarray(X_samples, dtype=np.float64))
    dims = Psi.n * m
    if X_samples.shape[1] != dims:
        raise DomainError(f"samples have {X_samples.shape[1]} columns, expected {dims}")
    _check_half(Psi, H)
    ql = _qlist(Psi, H)
    exact = {h: schmidt_pair(Psi, m, h, "theorem") for h in hs}

    parts = [X_samples[i : i + 8] for i in range(0, len(X_samples), 8)]
    counts = _run(
        lambda Xb: 2 * kernels.count_buckets(Xb, ql.qs, ql.gcds, ql.thresh, ql.norms, H + 1, m, False),
        parts,
        workers,
    )
    cum = np.cumsum(np.concatenate(counts, axis=0), axis=1)
    rows = []
    for sid in range(len(X_samples)):
        for h in hs:
            phi, chi = exact[h]
            N = int(cum[sid, h])
            resid = N - phi
            norm = None
            if chi > 1:
                c = float(chi)
                norm = float(resid) / (math.sqrt(c) * math.log(c) ** (1.5 + epsilon))
            rows.append(
                {
                    "sample_id": sid,
                    "h": h,
                    "N_count": N,
                    "Phi": phi,
                    "chi": chi,
                    "residual": resid,
                    "normalized_residual": norm,
                }
            )
    return rows
