"""Approximating functions psi: N -> Q>=0 and their lifts Psi: Z^n -> Q>=0."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import DomainError
from .numtheory import Factorization, factorize, format_rational, parse_rational

__all__ = [
    "ApproxFunction",
    "Constant",
    "Power",
    "Table",
    "Sparse",
    "Capped",
    "MultiApproxFunction",
    "NormLift",
    "PlaneLift",
    "MultiTable",
    "approx_from_json",
    "multi_from_json",
    "sup_norm",
]


def sup_norm(q: Iterable[int]) -> int:
    return max(abs(int(c)) for c in q)


class ApproxFunction:
    """Base class. Subclasses provide ``power``, ``float_value`` and ``support``."""

    kind = "abstract"

    def power(self, h: int, k: int) -> Fraction:
        """Exact ``psi(h)^k``; raises :class:`DomainError` when irrational."""
        raise NotImplementedError

    def float_value(self, h: int) -> float:
        raise NotImplementedError

    def support(self, N: int) -> Iterator[int]:
        """Every ``h <= N`` where ``psi(h)`` may be nonzero, ascending."""
        return iter(range(1, N + 1))

    def factorization(self, h: int) -> Factorization:
        return factorize(h)

    def below_half(self, N: int) -> bool:
        """Exact check that ``psi(h) < 1/2`` for ``1 <= h <= N``."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(ApproxFunction):
    c: Fraction
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, "c", parse_rational(self.c))
        if self.c < 0:
            raise DomainError("approximating functions are nonnegative")

    def power(self, h, k):
        return self.c**k

    def float_value(self, h):
        return float(self.c)

    def support(self, N):
        return iter(range(1, N + 1)) if self.c else iter(())

    def below_half(self, N):
        return self.c < Fraction(1, 2)

    def to_json(self):
        return {"kind": "constant", "c": format_rational(self.c)}


@dataclass(frozen=True)
class Power(ApproxFunction):
    """``c * h^-tau``."""

    c: Fraction
    tau: Fraction = Fraction(1)
    kind = "power"

    def __post_init__(self):
        object.__setattr__(self, "c", parse_rational(self.c))
        object.__setattr__(self, "tau", parse_rational(self.tau))
        if self.c < 0 or self.tau < 0:
            raise DomainError("power law needs c >= 0 and tau >= 0")

    def power(self, h, k):
        e = self.tau * k
        if e.denominator != 1:
            raise DomainError(f"psi(h)^{k} is not rational for tau={self.tau}")
        return self.c**k / Fraction(h) ** int(e)

    def float_value(self, h):
        if self.tau.denominator == 1:
            return float(self.c / Fraction(h) ** int(self.tau))
        return float(self.c) * float(h) ** -float(self.tau)

    def support(self, N):
        return iter(range(1, N + 1)) if self.c else iter(())

    def below_half(self, N):
        return self.c < Fraction(1, 2)

    def to_json(self):
        return {"kind": "power", "c": format_rational(self.c), "tau": format_rational(self.tau)}


@dataclass(frozen=True)
class Table(ApproxFunction):
    """Explicit values; zero off the table."""

    values: Mapping[int, Fraction]
    kind = "table"

    def __post_init__(self):
        vals = {}
        for h, v in dict(self.values).items():
            h, v = int(h), parse_rational(v)
            if h < 1 or v < 0:
                raise DomainError(f"bad table entry {h} -> {v}")
            if v:
                vals[h] = v
        object.__setattr__(self, "values", dict(sorted(vals.items())))

    def __hash__(self):
        return hash(tuple(self.values.items()))

    @property
    def horizon(self) -> int:
        return max(self.values, default=0)

    def power(self, h, k):
        return self.values.get(h, Fraction(0)) ** k

    def float_value(self, h):
        return float(self.values.get(h, 0))

    def support(self, N):
        return (h for h in self.values if h <= N)

    def below_half(self, N):
        return all(v < Fraction(1, 2) for h, v in self.values.items() if h <= N)

    def to_json(self):
        return {
            "kind": "table",
            "values": {str(h): format_rational(v) for h, v in self.values.items()},
        }


@dataclass(frozen=True)
class SparseEntry:
    l: Factorization
    weight: Fraction  # l * psi(l)^m
    value: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "value", self.l.value)


class Sparse(ApproxFunction):
    """Support on factored points ``l`` with ``l * psi(l)^m`` stored exactly.

    ``psi(l)`` itself is an ``m``-th root and is never formed for large ``l``.
    """

    kind = "sparse"

    def __init__(self, entries: Iterable[tuple[Factorization, Fraction]], m: int):
        if m < 1:
            raise DomainError("m must be >= 1")
        self.m = int(m)
        self.entries = tuple(SparseEntry(l, parse_rational(w)) for l, w in entries)
        prev = 0
        for e in self.entries:
            if e.value <= prev:
                raise DomainError("sparse support must be strictly increasing")
            if e.weight < 0:
                raise DomainError("negative weight")
            prev = e.value
        self._by_value = {e.value: e for e in self.entries}

    def __eq__(self, other):
        return isinstance(other, Sparse) and (self.m, self.entries) == (other.m, other.entries)

    def __hash__(self):
        return hash((self.m, self.entries))

    def __repr__(self):
        return f"Sparse(m={self.m}, support={len(self.entries)})"

    def weight(self, h: int) -> Fraction:
        e = self._by_value.get(h)
        return e.weight if e else Fraction(0)

    def power(self, h, k):
        if k != self.m:
            raise DomainError(f"sparse function stores psi^{self.m}, asked for psi^{k}")
        return self.weight(h) / h

    def float_value(self, h):
        w = self.weight(h)
        return (w / h) ** (1.0 / self.m) if w else 0.0

    def support(self, N):
        return (e.value for e in self.entries if e.value <= N)

    def factorization(self, h):
        e = self._by_value.get(h)
        return e.l if e else factorize(h)

    def below_half(self, N):
        # psi^m < 2^-m  <=>  w * 2^m < l
        return all(e.weight * 2**self.m < e.value for e in self.entries if e.value <= N)

    def to_json(self):
        return {
            "kind": "sparse",
            "m": self.m,
            "support": [{"l": str(e.l), "lpsim": format_rational(e.weight)} for e in self.entries],
        }


@dataclass(frozen=True)
class Capped(ApproxFunction):
    """``min(cap, psi(h))``."""

    psi: ApproxFunction
    cap: Fraction
    kind = "capped"

    def __post_init__(self):
        object.__setattr__(self, "cap", parse_rational(self.cap))
        if self.cap <= 0:
            raise DomainError("cap must be positive")

    def power(self, h, k):
        # both sides are nonnegative, so comparing k-th powers is enough
        return min(self.cap**k, self.psi.power(h, k))

    def float_value(self, h):
        return min(float(self.cap), self.psi.float_value(h))

    def support(self, N):
        return self.psi.support(N)

    def factorization(self, h):
        return self.psi.factorization(h)

    def below_half(self, N):
        return self.cap < Fraction(1, 2) or self.psi.below_half(N)

    def to_json(self):
        return {"kind": "capped", "cap": format_rational(self.cap), "psi": self.psi.to_json()}


def approx_from_json(obj: dict) -> ApproxFunction:
    kind = obj.get("kind")
    if kind == "constant":
        return Constant(parse_rational(obj["c"]))
    if kind == "power":
        return Power(parse_rational(obj["c"]), parse_rational(obj.get("tau", "1")))
    if kind == "table":
        return Table({int(h): parse_rational(v) for h, v in obj["values"].items()})
    if kind == "sparse":
        entries = [(Factorization.parse(e["l"]), parse_rational(e["lpsim"])) for e in obj["support"]]
        return Sparse(entries, int(obj["m"]))
    if kind == "capped":
        return Capped(approx_from_json(obj["psi"]), parse_rational(obj["cap"]))
    if kind in ("normlift", "planelift", "multitable"):
        raise DomainError(f"{kind!r} is a multivariable function; use multi_from_json")
    raise DomainError(f"unknown approximating function kind {kind!r}")


# --- multivariable ----------------------------------------------------------


class MultiApproxFunction:
    n: int

    def power(self, q: tuple[int, ...], k: int) -> Fraction:
        raise NotImplementedError

    def float_value(self, q: tuple[int, ...]) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class NormLift(MultiApproxFunction):
    """``Psi(q) = psi(|q|)`` on ``Z^n``."""

    psi: ApproxFunction
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")

    def power(self, q, k):
        return self.psi.power(sup_norm(q), k)

    def float_value(self, q):
        return self.psi.float_value(sup_norm(q))

    def to_json(self):
        return {"kind": "normlift", "n": self.n, "psi": self.psi.to_json()}


@dataclass(frozen=True)
class PlaneLift(MultiApproxFunction):
    """``Psi(q) = psi(|q|)`` when ``q = (q1, q2, 0, ..., 0)``, else 0."""

    psi: ApproxFunction
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("plane lift needs n >= 2")

    def in_plane(self, q) -> bool:
        return not any(q[2:])

    def power(self, q, k):
        return self.psi.power(sup_norm(q), k) if self.in_plane(q) else Fraction(0)

    def float_value(self, q):
        return self.psi.float_value(sup_norm(q)) if self.in_plane(q) else 0.0

    def to_json(self):
        return {"kind": "planelift", "n": self.n, "psi": self.psi.to_json()}


@dataclass(frozen=True)
class MultiTable(MultiApproxFunction):
    values: Mapping[tuple[int, ...], Fraction]
    n: int

    def __post_init__(self):
        vals = {}
        for q, v in dict(self.values).items():
            q = tuple(int(c) for c in q)
            if len(q) != self.n or not any(q):
                raise DomainError(f"bad table key {q}")
            v = parse_rational(v)
            if v < 0:
                raise DomainError("negative value")
            if v:
                vals[q] = v
        object.__setattr__(self, "values", vals)

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.values.items()))))

    def power(self, q, k):
        return self.values.get(tuple(q), Fraction(0)) ** k

    def float_value(self, q):
        return float(self.values.get(tuple(q), 0))

    def to_json(self):
        return {
            "kind": "multitable",
            "n": self.n,
            "values": [{"q": list(q), "value": format_rational(v)} for q, v in self.values.items()],
        }


def multi_from_json(obj: dict) -> MultiApproxFunction:
    kind = obj.get("kind")
    if kind == "normlift":
        return NormLift(approx_from_json(obj["psi"]), int(obj["n"]))
    if kind == "planelift":
        return PlaneLift(approx_from_json(obj["psi"]), int(obj["n"]))
    if kind == "multitable":
        return MultiTable({tuple(e["q"]): parse_rational(e["value"]) for e in obj["values"]}, int(obj["n"]))
    raise DomainError(f"unknown multivariable function kind {kind!r}")
