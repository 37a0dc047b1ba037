"""Binomial helpers shared across the package.

Everything here is exact big-integer or rational arithmetic; the only floats
are the square roots inside the moment inequalities, where the comparison
carries an explicit tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, sqrt
from typing import Union

Rational = Union[int, Fraction]

# strict rational lower bound on e, enough digits that the sandwich check is
# conservative (proving c <= (e_lo*n/k)^k implies c <= (e*n/k)^k)
E_LOWER = Fraction("2.718281828459045")


def binom_leq(n: int, k: int) -> int:
    """Sum of C(n, i) for 0 <= i <= k; k past n just counts all subsets."""
    if n < 0 or k < 0:
        raise ValueError("need n, k >= 0")
    return sum(comb(n, i) for i in range(0, min(n, k) + 1))


def binom_sandwich_ok(n: int, k: int) -> bool:
    """(n/k)^k <= binom_leq(n,k) <= (e*n/k)^k, checked in exact rationals."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    c = binom_leq(n, k)
    lower = Fraction(n, k) ** k
    upper = (E_LOWER * n / k) ** k
    return lower <= c <= upper


def binomial_pmf(n: int, p: Fraction) -> list[Fraction]:
    """Exact pmf of Bin(n, p) as a list indexed by outcome."""
    q = 1 - p
    return [Fraction(comb(n, s)) * p**s * q ** (n - s) for s in range(n + 1)]


@lru_cache(maxsize=4096)
def _majority_tail_cached(t: int, p: Fraction) -> Fraction:
    need = (t + 1) // 2
    return sum(Fraction(comb(t, s)) * p**s * (1 - p) ** (t - s) for s in range(need, t + 1))


def majority_tail(t: int, p: Rational) -> Fraction:
    """P[Bin(t, p) >= ceil(t/2)], the chance a majority vote goes bad.

    Exact; this is the per-protocol amplification error for odd t when each
    repetition fails independently with probability p.
    """
    if t < 1:
        raise ValueError("need t >= 1")
    return _majority_tail_cached(t, Fraction(p))


@lru_cache(maxsize=4096)
def _smallest_odd_majority_cached(p: Fraction, target: Fraction) -> int:
    t = 1
    while majority_tail(t, p) > target:
        t += 2
        if t > 100_001:
            raise RuntimeError("amplification did not converge")
    return t


def smallest_odd_majority(p: Rational, target: Rational) -> int:
    """Smallest odd t with majority_tail(t, p) <= target. Requires p < 1/2."""
    p = Fraction(p)
    target = Fraction(target)
    if not 0 <= p < Fraction(1, 2):
        raise ValueError("per-repetition error must be below 1/2")
    if target <= 0:
        raise ValueError("target must be positive")
    return _smallest_odd_majority_cached(p, target)


def fact21_check(n: int, p: float, tol: float = 1e-12) -> dict:
    """Check the three binomial moment inequalities at (n, p).

    1. E_{s~B(n-1,p)} [1/sqrt(n-s)]   <= 1/sqrt((1-p) n)
    2. E_{s~B(n-1,p)} [1/sqrt(s+1)]   <= 1/sqrt(p n)
    3. E_{s~B(n,p)}   [|s - p n|]     <= sqrt(p (1-p) n)

    Expectations are complete sums over the support (exact summation, float
    values). Degenerate right-hand sides at p in {0, 1} are +inf, i.e. the
    inequality holds vacuously.
    """
    if not 1 <= n:
        raise ValueError("need n >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("need 0 <= p <= 1")

    def pmf(m: int, s: int) -> float:
        return comb(m, s) * p**s * (1.0 - p) ** (m - s)

    lhs1 = sum(pmf(n - 1, s) / sqrt(n - s) for s in range(n))
    rhs1 = 1.0 / sqrt((1.0 - p) * n) if p < 1.0 else float("inf")

    lhs2 = sum(pmf(n - 1, s) / sqrt(s + 1) for s in range(n))
    rhs2 = 1.0 / sqrt(p * n) if p > 0.0 else float("inf")

    mean = p * n
    lhs3 = sum(pmf(n, s) * abs(s - mean) for s in range(n + 1))
    rhs3 = sqrt(p * (1.0 - p) * n)

    rows = [
        ("inv_sqrt_remaining", lhs1, rhs1),
        ("inv_sqrt_count", lhs2, rhs2),
        ("mean_abs_dev", lhs3, rhs3),
    ]
    return {
        "n": n,
        "p": p,
        "checks": [
            {"name": name, "lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + tol}
            for name, lhs, rhs in rows
        ],
        "ok": all(lhs <= rhs + tol for _, lhs, rhs in rows),
    }


def unrank_combination(rank: int, n: int, k: int) -> tuple[int, ...]:
    """The ``rank``-th k-subset of {1..n} in lexicographic order (0-based)."""
    if not 0 <= rank < comb(n, k):
        raise ValueError("rank out of range")
    out = []
    prev = 0
    remaining = k
    for _ in range(k):
        c = prev + 1
        while True:
            block = comb(n - c, remaining - 1)
            if rank < block:
                break
            rank -= block
            c += 1
        out.append(c)
        prev = c
        remaining -= 1
    return tuple(out)
