"""Generators for reference inputs: quadratic irrationals, gap series, random digits."""

from __future__ import annotations

import math

import numpy as np
from gmpy2 import isqrt, mpz

from .digits import DigitExpansion, base_pow, int_to_digits


def nth_nonsquare(k: int) -> int:
    """k-th (0-based) integer >= 2 that is not a perfect square."""
    v = 2
    found = -1
    while True:
        r = math.isqrt(v)
        if r * r != v:
            found += 1
            if found == k:
                return v
        v += 1


def sqrt_expansion(d: int, base: int, n: int, fractional: bool = True) -> DigitExpansion:
    """Truncation of sqrt(d) (or its fractional part) to n base-b digits."""
    if d < 2 or math.isqrt(d) ** 2 == d:
        raise ValueError("d must be a non-square integer >= 2")
    s = isqrt(mpz(d) * base_pow(base, 2 * n))
    ip, fr = divmod(s, base_pow(base, n))
    if fractional:
        ip = 0
    return DigitExpansion(base, 1, int(ip), int_to_digits(fr, n, base))


def golden_expansion(base: int, n: int) -> DigitExpansion:
    """Truncation of (sqrt(5) - 1)/2, the golden ratio fractional part."""
    s = (isqrt(mpz(5) * base_pow(base, 2 * n)) - base_pow(base, n)) // 2
    return DigitExpansion(base, 1, 0, int_to_digits(s, n, base))


def factorial_positions(limit: int) -> list[int]:
    """All j! <= limit for j >= 1 (with the duplicate 1! = 1 kept once)."""
    out = []
    j, f = 1, 1
    while f <= limit:
        if f not in out:
            out.append(f)
        j += 1
        f *= j
    return out


def gap_series_expansion(base: int, n: int, positions=None, digit: int = 1) -> DigitExpansion:
    """Truncation of sum base**(-p) over p in positions (default p = j!)."""
    if positions is None:
        positions = factorial_positions(n)
    frac = np.zeros(n, dtype=np.uint8)
    for p in positions:
        if 1 <= p <= n:
            frac[p - 1] = digit
    return DigitExpansion(base, 1, 0, frac)


def cf_value_expansion(quotients, base: int, n: int) -> DigitExpansion:
    """Truncation of the value of a finite continued fraction [a0; a1, ...]."""
    num, den = 1, 0
    for a in reversed(quotients):
        num, den = a * num + den, num
    # value = num/den; truncate toward zero
    v = (mpz(num) * base_pow(base, n)) // den
    ip, fr = divmod(v, base_pow(base, n))
    return DigitExpansion(base, 1, int(ip), int_to_digits(fr, n, base))
