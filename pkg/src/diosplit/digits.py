"""Exact arithmetic and digit-level inspection on finite base-b expansions.

A :class:`DigitExpansion` stores a signed value ``sign * (int_part + 0.d1 d2 ... dN)``
in an integer base ``b >= 2``.  All operations are exact; there is no floating
point representation of values anywhere in this package.  Values are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpz

from . import _kernels

Rational = Fraction

_GMP_CHARS = b"0123456789abcdefghijklmnopqrstuvwxyz"
_FILE_CHARS = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"

# char byte -> digit value, for both alphabets
_CHAR_TO_VAL = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(_GMP_CHARS):
    _CHAR_TO_VAL[_c] = _i
for _i, _c in enumerate(_FILE_CHARS):
    _CHAR_TO_VAL[_c] = _i

_VAL_TO_GMP = np.frombuffer(_GMP_CHARS, dtype=np.uint8)
_VAL_TO_FILE = np.frombuffer(_FILE_CHARS, dtype=np.uint8)

MAX_FILE_BASE = 36
FILE_LINE_WIDTH = 1024


@lru_cache(maxsize=None)
def base_pow(base: int, exp: int):
    """Cached mpz power base**exp (exp >= 0)."""
    return mpz(base) ** exp


def flog2(n) -> float:
    """log2 of a positive integer, accurate to ~1e-15 relative."""
    n = mpz(n)
    nb = n.bit_length()
    if nb <= 63:
        return math.log2(int(n))
    return math.log2(int(n >> (nb - 63))) + (nb - 63)


def digits_to_int(frac: np.ndarray, base: int):
    """Value of a digit array (most significant first) as an mpz integer."""
    if frac.size == 0:
        return mpz(0)
    if base <= 36:
        s = _VAL_TO_GMP[frac].tobytes().decode("ascii")
        return mpz(s, base)
    # generic divide and conquer for exotic bases
    def rec(a):
        if a.size <= 32:
            v = mpz(0)
            for d in a:
                v = v * base + int(d)
            return v
        k = a.size // 2
        return rec(a[:k]) * base_pow(base, a.size - k) + rec(a[k:])

    return rec(frac)


def int_to_digits(value, n: int, base: int) -> np.ndarray:
    """Digit array (length n, most significant first) of 0 <= value < base**n."""
    v = mpz(value)
    if v < 0:
        raise ValueError("value must be nonnegative")
    out = np.zeros(n, dtype=np.uint8)
    if v == 0:
        return out
    if base <= 36:
        s = v.digits(base)
        if len(s) > n:
            raise ValueError("value does not fit in n digits")
        vals = _CHAR_TO_VAL[np.frombuffer(s.encode("ascii"), dtype=np.uint8)]
        out[n - len(vals):] = vals
        return out

    def rec(val, m, arr):
        if m <= 32:
            for i in range(m - 1, -1, -1):
                val, d = divmod(val, base)
                arr[i] = int(d)
            return
        k = m // 2
        hi, lo = divmod(val, base_pow(base, m - k))
        rec(hi, k, arr[:k])
        rec(lo, m - k, arr[k:])

    rec(v, n, out)
    return out


class DigitExpansion:
    """Signed base-b positional number with a finite fractional part.

    Digits are stored one per logical position in a read-only uint8 array;
    ``frac[0]`` is position 1 (the most significant fractional digit).
    """

    __slots__ = ("base", "sign", "int_part", "frac")

    def __init__(self, base: int, sign: int, int_part: int, frac):
        if base < 2:
            raise ValueError("base must be >= 2")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if int_part < 0:
            raise ValueError("int_part must be nonnegative")
        frac = np.ascontiguousarray(frac, dtype=np.uint8)
        if frac.size and int(frac.max()) >= base:
            raise ValueError("digit out of range for base")
        if int_part == 0 and not frac.any():
            sign = 1
        self.base = base
        self.sign = sign
        self.int_part = int(int_part)
        frac.setflags(write=False)
        self.frac = frac

    # -- basic accessors ----------------------------------------------------

    @property
    def N(self) -> int:
        return self.frac.size

    def digit_at(self, u: int) -> int:
        """Digit at fractional position u (1-based)."""
        if not 1 <= u <= self.N:
            raise IndexError(f"position {u} out of range 1..{self.N}")
        return int(self.frac[u - 1])

    def is_zero(self) -> bool:
        return self.int_part == 0 and not self.frac.any()

    def scaled_int(self):
        """sign * (int_part * base**N + fractional digits) as an mpz."""
        v = mpz(self.int_part) * base_pow(self.base, self.N) + digits_to_int(self.frac, self.base)
        return -v if self.sign < 0 else v

    def value_fraction(self) -> Fraction:
        return Fraction(int(self.scaled_int()), int(base_pow(self.base, self.N)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DigitExpansion)
            and self.base == other.base
            and self.sign == other.sign
            and self.int_part == other.int_part
            and self.N == other.N
            and bool(np.array_equal(self.frac, other.frac))
        )

    def __hash__(self):
        return hash((self.base, self.sign, self.int_part, self.frac.tobytes()))

    def __repr__(self):
        head = "".join(str(d) for d in self.frac[:12]) if self.base <= 10 else "..."
        tail = "..." if self.N > 12 else ""
        s = "-" if self.sign < 0 else ""
        return f"DigitExpansion(base={self.base}, {s}{self.int_part}.{head}{tail}, N={self.N})"

    # -- derived expansions --------------------------------------------------

    def with_length(self, n: int) -> "DigitExpansion":
        """Truncate or zero-pad the fractional part to n digits (toward zero)."""
        if n == self.N:
            return self
        if n < self.N:
            return DigitExpansion(self.base, self.sign, self.int_part, self.frac[:n])
        out = np.zeros(n, dtype=np.uint8)
        out[: self.N] = self.frac
        return DigitExpansion(self.base, self.sign, self.int_part, out)

    def fractional_part(self) -> "DigitExpansion":
        """|x| with the integer part dropped (used by exponent estimators)."""
        return DigitExpansion(self.base, 1, 0, self.frac)


def from_scaled_int(value, n: int, base: int) -> DigitExpansion:
    """Expansion with N=n digits from a scaled integer value = x * base**n."""
    v = mpz(value)
    sign = 1
    if v < 0:
        sign = -1
        v = -v
    ip, fr = divmod(v, base_pow(base, n))
    return DigitExpansion(base, sign, int(ip), int_to_digits(fr, n, base))


def expansion(base: int, digit_string: str, int_part: int = 0, sign: int = 1) -> DigitExpansion:
    """Convenience constructor from a digit string like "30041" (base <= 36)."""
    vals = _CHAR_TO_VAL[np.frombuffer(digit_string.encode("ascii"), dtype=np.uint8)]
    return DigitExpansion(base, sign, int_part, vals)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def from_rational(p: Fraction, base: int, n_digits: int) -> DigitExpansion:
    """Truncation of p to n_digits fractional digits, rounding toward zero."""
    if base < 2:
        raise ValueError("base must be >= 2")
    if n_digits < 0:
        raise ValueError("n_digits must be >= 0")
    p = Fraction(p)
    sign = 1 if p >= 0 else -1
    num, den = abs(p.numerator), p.denominator
    ip, r = divmod(mpz(num), mpz(den))
    fr = (r * base_pow(base, n_digits)) // den
    return DigitExpansion(base, sign, int(ip), int_to_digits(fr, n_digits, base))


def to_rational_truncation(x: DigitExpansion, m: int) -> tuple[Fraction, bool]:
    """floor(base**m * x) / base**m toward zero, reduced.

    Also reports whether the pre-reduction numerator's last base-b digit is
    nonzero (i.e. whether x has a nonzero digit at position m).
    """
    if not 0 <= m <= x.N:
        raise ValueError(f"truncation position {m} out of range 0..{x.N}")
    num = mpz(x.int_part) * base_pow(x.base, m) + digits_to_int(x.frac[:m], x.base)
    last_nonzero = bool(num % x.base != 0)
    if x.sign < 0:
        num = -num
    return Fraction(int(num), int(base_pow(x.base, m))), last_nonzero


def _cmp_magnitude(x: DigitExpansion, y: DigitExpansion) -> int:
    if x.int_part != y.int_part:
        return 1 if x.int_part > y.int_part else -1
    n = max(x.N, y.N)
    a = x.frac if x.N == n else np.pad(x.frac, (0, n - x.N))
    b = y.frac if y.N == n else np.pad(y.frac, (0, n - y.N))
    if np.array_equal(a, b):
        return 0
    i = int(np.flatnonzero(a != b)[0])
    return 1 if a[i] > b[i] else -1


def _aligned(x: DigitExpansion, y: DigitExpansion):
    n = max(x.N, y.N)
    a = x.frac if x.N == n else np.pad(x.frac, (0, n - x.N))
    b = y.frac if y.N == n else np.pad(y.frac, (0, n - y.N))
    return a, b, n


def add(x: DigitExpansion, y: DigitExpansion) -> DigitExpansion:
    """Exact sum with full carry/borrow propagation; result length max(Nx, Ny)."""
    if x.base != y.base:
        raise ValueError("base mismatch")
    base = x.base
    n = max(x.N, y.N)
    if _kernels.PURE:
        v = x.with_length(n).scaled_int() + y.with_length(n).scaled_int()
        return from_scaled_int(v, n, base)
    a, b, n = _aligned(x, y)
    if x.sign == y.sign:
        out, carry = _kernels.add_digits(a, b, base)
        return DigitExpansion(base, x.sign, x.int_part + y.int_part + carry, out)
    c = _cmp_magnitude(x, y)
    if c == 0:
        return DigitExpansion(base, 1, 0, np.zeros(n, dtype=np.uint8))
    hi, lo = (x, y) if c > 0 else (y, x)
    a, b, _ = _aligned(hi, lo)
    out, borrow = _kernels.sub_digits(a, b, base)
    return DigitExpansion(base, hi.sign, hi.int_part - lo.int_part - borrow, out)


def negate(x: DigitExpansion) -> DigitExpansion:
    if x.is_zero():
        return x
    return DigitExpansion(x.base, -x.sign, x.int_part, x.frac)


def sub(x: DigitExpansion, y: DigitExpansion) -> DigitExpansion:
    """Exact difference x - y (may be negative; sign carried explicitly)."""
    return add(x, negate(y))


@dataclass(frozen=True)
class Run:
    """Maximal run of a single digit: positions start .. start+length-1."""

    start: int
    length: int
    digit: int


def run_scan(x: DigitExpansion, lo: int = 1, hi: int | None = None) -> list[Run]:
    """Maximal runs of digit 0 and digit base-1 inside positions lo..hi.

    Runs are disjoint, maximal within the scanned range, and ordered by start.
    """
    if hi is None:
        hi = x.N
    if not (1 <= lo and hi <= x.N and lo <= hi + 1):
        raise ValueError(f"scan range {lo}..{hi} out of 1..{x.N}")
    seg = x.frac[lo - 1 : hi]
    starts, lengths, kinds = _kernels.run_scan_digits(seg, x.base)
    return [Run(int(s) + lo, int(l), int(k)) for s, l, k in zip(starts, lengths, kinds)]


def zero_runs(runs: Iterable[Run]) -> list[Run]:
    return [r for r in runs if r.digit == 0]


def top_runs(runs: Iterable[Run], base: int) -> list[Run]:
    return [r for r in runs if r.digit == base - 1]


def random_expansion(
    base: int, n: int, seed: int, allowed_digits: Sequence[int] | None = None
) -> DigitExpansion:
    """Deterministic pseudo-random expansion with digits from allowed_digits."""
    if allowed_digits is None:
        allowed = np.arange(base, dtype=np.uint8)
    else:
        allowed = np.unique(np.asarray(sorted(allowed_digits), dtype=np.int64))
        if allowed.size == 0:
            raise ValueError("allowed_digits must be nonempty")
        if allowed.min() < 0 or allowed.max() >= base:
            raise ValueError("allowed_digits outside [0, base-1]")
        allowed = allowed.astype(np.uint8)
    rng = np.random.default_rng(seed)
    digits = allowed[rng.integers(0, allowed.size, size=n)]
    return DigitExpansion(base, 1, 0, digits)


# ---------------------------------------------------------------------------
# digit file format
# ---------------------------------------------------------------------------


def write_digit_file(x: DigitExpansion, path) -> None:
    """Bit-exact text format: base=, sign=, int=, fraclen= headers, then digit lines."""
    if x.base > MAX_FILE_BASE:
        raise ValueError(f"file format supports bases up to {MAX_FILE_BASE}")
    chars = _VAL_TO_FILE[x.frac].tobytes().decode("ascii")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"base={x.base}\n")
        fh.write(f"sign={'+' if x.sign > 0 else '-'}\n")
        fh.write(f"int={x.int_part}\n")
        fh.write(f"fraclen={x.N}\n")
        for i in range(0, len(chars), FILE_LINE_WIDTH):
            fh.write(chars[i : i + FILE_LINE_WIDTH])
            fh.write("\n")


def read_digit_file(path) -> DigitExpansion:
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    if not text.endswith("\n"):
        raise ValueError("digit file must end with a newline")
    lines = text.split("\n")
    try:
        base = int(lines[0].removeprefix("base="))
        signc = lines[1].removeprefix("sign=")
        int_part = int(lines[2].removeprefix("int="))
        fraclen = int(lines[3].removeprefix("fraclen="))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed digit file header: {exc}") from exc
    if signc not in ("+", "-"):
        raise ValueError("sign line must be '+' or '-'")
    digits = "".join(lines[4:])
    if len(digits) != fraclen:
        raise ValueError(f"expected {fraclen} digits, found {len(digits)}")
    vals = _CHAR_TO_VAL[np.frombuffer(digits.encode("ascii"), dtype=np.uint8)]
    if vals.size and int(vals.max()) >= base:
        raise ValueError("digit character out of range for base")
    return DigitExpansion(base, 1 if signc == "+" else -1, int_part, vals)
