"""Counting functions and exact finite sums over sup-norm shells of Z^n.

All sums run over norm shells ``|q| = h``; the number of vectors in a shell,
and the distribution of their coordinate gcds, are closed-form, so nothing
here enumerates ``Z^n`` except the small dense-table path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .approx import ApproxFunction, MultiApproxFunction, MultiTable, NormLift, PlaneLift, sup_norm
from .errors import CapacityError, DomainError
from .numtheory import (
    Factorization,
    divisor_count,
    divisors,
    euler_phi,
    factorize,
    mobius,
    mobius_product,
    theta,
)

__all__ = [
    "sphere_count",
    "primitive_count",
    "khintchine_partial_sum",
    "sum_B_prime_measures",
    "shell_bprime_weight",
    "totient_convolution",
    "divisor_totient_convolution",
    "phi_schmidt",
    "chi_schmidt",
    "schmidt_pair",
    "schmidt_table",
    "CONVENTIONS",
    "DENSE_HORIZON",
]

CONVENTIONS = ("theorem", "proof")
DENSE_HORIZON = 1000


def sphere_count(n: int, h: int) -> int:
    """Number of ``q`` in ``Z^n`` with ``|q| = h`` (sup norm)."""
    if n < 1 or h < 1:
        raise DomainError("sphere_count needs n >= 1 and h >= 1")
    return (2 * h + 1) ** n - (2 * h - 1) ** n


def primitive_count(n: int, h: int | Factorization) -> int:
    """Number of primitive ``q`` with ``|q| = h``, by Mobius inversion.

    For ``n = 2`` this is ``8 * phi(h)`` and is evaluated that way.
    """
    hf = h if isinstance(h, Factorization) else factorize(h)
    if n == 2:
        return 8 * euler_phi(hf)
    return _primitive_count(n, hf)


@lru_cache(maxsize=1 << 14)
def _primitive_count(n: int, hf: Factorization) -> int:
    h = hf.value
    total = 0
    for v in divisors(hf):
        mu = mobius(v)
        if mu:
            total += mu * sphere_count(n, h // v.value)
    return total


def khintchine_partial_sum(psi: ApproxFunction, n: int, m: int, N: int) -> Fraction:
    """``sum_{h <= N} h^(n-1) psi(h)^m``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    return sum((h ** (n - 1) * psi.power(h, m) for h in psi.support(N)), Fraction(0))


def shell_bprime_weight(n: int, m: int, hf: Factorization) -> Fraction:
    """``sum_{|q| = h} prod_{p | gcd q} (1 - p^-m)``.

    Vectors with ``|q| = h`` and ``gcd(q) = d`` are ``d`` times primitive
    vectors of norm ``h/d``.
    """
    if n == 2:
        # Multiplicative in h: 8 * sum_{d|h} P_m(d) phi(h/d).
        out = Fraction(8)
        for p, k in hf.factors:
            local = Fraction(euler_phi(Factorization(((p, k),))))
            pm = Fraction(p**m - 1, p**m)
            for j in range(1, k + 1):
                rest = k - j
                local += pm * (p ** (rest - 1) * (p - 1) if rest else 1)
            out *= local
        return out
    total = Fraction(0)
    for d in divisors(hf):
        total += mobius_product(d, m) * primitive_count(n, _quotient(hf, d))
    return total


def _quotient(a: Factorization, b: Factorization) -> Factorization:
    bd = b.as_dict()
    return Factorization(tuple((p, k - bd.get(p, 0)) for p, k in a.factors if k - bd.get(p, 0) > 0))


def sum_B_prime_measures(psi: ApproxFunction, n: int, m: int, N: int) -> Fraction:
    """``S_N = sum_{0 < |q| <= N} |B'(q, psi(|q|))|``, exactly.

    Requires ``n*m > 1`` and ``psi < 1/2`` on ``[1, N]``.
    """
    if n * m <= 1:
        raise DomainError("sum_B_prime_measures needs n*m > 1")
    if N < 1:
        raise DomainError("N must be >= 1")
    if not psi.below_half(N):
        raise DomainError("psi must stay below 1/2 on [1, N]")
    total = Fraction(0)
    for h in psi.support(N):
        w = psi.power(h, m)
        if w:
            total += 2**m * w * shell_bprime_weight(n, m, psi.factorization(h))
    return total


def totient_convolution(h: Factorization | int) -> Fraction:
    """``sum_{d | h} phi(d) phi(h/d) / d`` via the closed form ``h prod (1 - p^-2)``."""
    hf = h if isinstance(h, Factorization) else factorize(h)
    return hf.value * mobius_product(hf, 2)


def divisor_totient_convolution(l: Factorization | int) -> int:
    """``sum_{v | l} d(v) phi(l/v)`` via ``l * theta(l) * prod (1 - p^(-k_p - 1))``."""
    lf = l if isinstance(l, Factorization) else factorize(l)
    tail = Fraction(1)
    for p, k in lf.factors:
        tail *= 1 - Fraction(1, p ** (k + 1))
    out = lf.value * theta(lf) * tail
    if out.denominator != 1:
        raise ArithmeticError(f"divisor_totient_convolution({lf}) not integral: {out}")
    return out.numerator


# --- Schmidt's Phi and chi --------------------------------------------------


def _scale(convention: str, m: int) -> int:
    if convention == "theorem":
        return 2**m
    if convention == "proof":
        return 1
    raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def _shell_divisor_weight(n: int, lf: Factorization) -> int:
    """``sum_{|q| = l} d(gcd q)``."""
    if n == 2:
        return 8 * divisor_totient_convolution(lf)
    total = 0
    for v in divisors(lf):
        total += divisor_count(v) * primitive_count(n, _quotient(lf, v))
    return total


def _lift_parts(Psi: MultiApproxFunction) -> tuple[ApproxFunction, int]:
    if isinstance(Psi, PlaneLift):
        return Psi.psi, 2
    if isinstance(Psi, NormLift):
        return Psi.psi, Psi.n
    raise TypeError(type(Psi))


def phi_schmidt(Psi: MultiApproxFunction, m: int, h: int, convention: str = "theorem") -> Fraction:
    """``sum_{0 < |q| <= h} (2 Psi(q))^m`` (theorem) or ``Psi(q)^m`` (proof)."""
    if h < 1:
        raise DomainError("h must be >= 1")
    scale = _scale(convention, m)
    if isinstance(Psi, MultiTable):
        if Psi.n > 3 or h > DENSE_HORIZON:
            raise CapacityError(f"dense tables are capped at n <= 3, |q| <= {DENSE_HORIZON}")
        return scale * sum((v**m for q, v in Psi.values.items() if sup_norm(q) <= h), Fraction(0))
    psi, n = _lift_parts(Psi)
    total = Fraction(0)
    for l in psi.support(h):
        w = psi.power(l, m)
        if w:
            total += sphere_count(n, l) * w
    return scale * total


def chi_schmidt(Psi: MultiApproxFunction, m: int, h: int, convention: str = "theorem") -> Fraction:
    """``sum_{0 < |q| <= h} (2 Psi(q))^m d(gcd q)`` (or without the 2 under ``proof``)."""
    if h < 1:
        raise DomainError("h must be >= 1")
    scale = _scale(convention, m)
    if isinstance(Psi, MultiTable):
        if Psi.n > 3 or h > DENSE_HORIZON:
            raise CapacityError(f"dense tables are capped at n <= 3, |q| <= {DENSE_HORIZON}")
        return scale * sum(
            (v**m * divisor_count(factorize(math.gcd(*q))) for q, v in Psi.values.items() if sup_norm(q) <= h),
            Fraction(0),
        )
    psi, n = _lift_parts(Psi)
    total = Fraction(0)
    for l in psi.support(h):
        w = psi.power(l, m)
        if w:
            total += _shell_divisor_weight(n, psi.factorization(l)) * w
    return scale * total


def schmidt_pair(Psi: MultiApproxFunction, m: int, h: int, convention: str = "theorem") -> tuple[Fraction, Fraction]:
    """``(Phi(h), chi(h))``; every ``d(gcd q) >= 1`` so ``chi >= Phi`` is asserted."""
    phi = phi_schmidt(Psi, m, h, convention)
    chi = chi_schmidt(Psi, m, h, convention)
    if chi < phi:
        raise AssertionError(f"chi({h}) = {chi} < Phi({h}) = {phi}")
    return phi, chi


def schmidt_table(
    Psi: MultiApproxFunction, m: int, hs: Iterable[int], convention: str = "theorem"
) -> list[dict]:
    """Rows of ``h, Phi, chi, partial_sum`` with the partial sum in the ``n=2`` shell form."""
    rows = []
    psi, _ = _lift_parts(Psi) if not isinstance(Psi, MultiTable) else (None, None)
    for h in hs:
        phi, chi = schmidt_pair(Psi, m, h, convention)
        row = {"h": h, "Phi": phi, "chi": chi}
        if psi is not None:
            row["partial_sum"] = sum((l * psi.power(l, m) for l in psi.support(h)), Fraction(0))
        rows.append(row)
    return rows
