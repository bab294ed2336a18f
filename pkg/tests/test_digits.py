import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, strategies as st

from diosplit.digits import (
    DigitExpansion,
    add,
    digits_to_int,
    expansion,
    from_rational,
    from_scaled_int,
    int_to_digits,
    random_expansion,
    read_digit_file,
    run_scan,
    sub,
    to_rational_truncation,
    write_digit_file,
    zero_runs,
)
from diosplit.gen import gap_series_expansion


def long_division_digits(num, den, base, n):
    """Independent digit oracle: grade-school long division of num/den."""
    ip, r = divmod(num, den)
    digits = []
    for _ in range(n):
        r *= base
        d, r = divmod(r, den)
        digits.append(d)
    return ip, digits


def test_from_rational_terminating():
    x = from_rational(Fraction(1, 4), 10, 3)
    assert x.frac.tolist() == [2, 5, 0]


def test_from_rational_repeating():
    x = from_rational(Fraction(1, 3), 10, 4)
    assert x.frac.tolist() == [3, 3, 3, 3]


def test_from_rational_long_division_oracle():
    ip, digs = long_division_digits(355, 113, 10, 6)
    x = from_rational(Fraction(355, 113), 10, 6)
    assert x.int_part == ip == 3
    assert x.frac.tolist() == digs == [1, 4, 1, 5, 9, 2]


def test_from_rational_negative_truncates_toward_zero():
    x = from_rational(Fraction(-355, 113), 10, 3)
    assert x.sign == -1 and x.int_part == 3
    assert x.frac.tolist() == [1, 4, 1]


def test_to_rational_truncation_examples():
    r, nz = to_rational_truncation(expansion(10, "123"), 2)
    assert r == Fraction(3, 25) and nz is True
    r, nz = to_rational_truncation(expansion(10, "120"), 3)
    assert r == Fraction(3, 25) and nz is False
    # positional evaluation oracle in base 5
    want = Fraction(4 * 125 + 3 * 25 + 0 * 5 + 2, 625)
    r, _ = to_rational_truncation(expansion(5, "4302"), 4)
    assert r == want == Fraction(577, 625)


def test_to_rational_range_errors():
    x = expansion(10, "123")
    with pytest.raises(ValueError):
        to_rational_truncation(x, 4)


def test_add_carry_chain():
    assert add(expansion(10, "499"), expansion(10, "001")).frac.tolist() == [5, 0, 0]


def test_sub_borrow_chain():
    assert sub(expansion(10, "500"), expansion(10, "001")).frac.tolist() == [4, 9, 9]


def test_add_base5_rational_oracle():
    # 0.444 + 0.444 = 124/125 + 124/125 = 248/125 = 1.443 in base 5
    s = add(expansion(5, "444"), expansion(5, "444"))
    assert s.int_part == 1 and s.frac.tolist() == [4, 4, 3]
    assert s.value_fraction() == Fraction(248, 125)


def test_add_sub_bulk_rational_oracle(rng):
    # cross-multiplied integer arithmetic as the independent oracle
    for _ in range(10_000):
        base = int(rng.integers(2, 16))
        n1, n2 = int(rng.integers(0, 30)), int(rng.integers(0, 30))
        x = random_expansion(base, n1, int(rng.integers(0, 2**31)))
        y = random_expansion(base, n2, int(rng.integers(0, 2**31)))
        if rng.integers(0, 2):
            x = DigitExpansion(base, -1, int(rng.integers(0, 5)), x.frac)
        s = add(x, y)
        assert s.value_fraction() == x.value_fraction() + y.value_fraction()
        d = sub(x, y)
        assert d.value_fraction() == x.value_fraction() - y.value_fraction()


@given(st.integers(2, 12), st.integers(0, 40), st.integers(0, 2**30), st.integers(0, 2**30))
def test_sub_add_roundtrip(base, n, s1, s2):
    x = random_expansion(base, n, s1)
    y = random_expansion(base, n, s2)
    assert sub(add(x, y), y) == x.with_length(max(x.N, y.N))


@given(st.integers(2, 16), st.integers(1, 200), st.integers(1, 10**9))
def test_rational_roundtrip(base, n, num):
    # any p/q with terminating expansion of length <= n survives the trip
    den = base ** int(num % n + 1)
    p = Fraction(num, den)
    x = from_rational(p, base, n)
    r, _ = to_rational_truncation(x, n)
    assert r == p


def test_digit_at_bounds():
    x = expansion(5, "30041")
    assert x.digit_at(1) == 3 and x.digit_at(5) == 1
    with pytest.raises(IndexError):
        x.digit_at(0)
    with pytest.raises(IndexError):
        x.digit_at(6)


def test_run_scan_read_off():
    runs = run_scan(expansion(5, "30041"))
    assert [(r.start, r.length, r.digit) for r in runs] == [(2, 2, 0), (4, 1, 4)]


def test_run_scan_all_zero():
    x = DigitExpansion(7, 1, 0, np.zeros(9, dtype=np.uint8))
    runs = run_scan(x)
    assert [(r.start, r.length, r.digit) for r in runs] == [(1, 9, 0)]


def test_run_scan_gap_series_oracle():
    # digits of sum 5^(-j!) are nonzero exactly at positions 1, 2, 6, 24, 120
    x = gap_series_expansion(5, 130)
    nonzero = {1, 2, 6, 24, 120}
    assert set(np.flatnonzero(x.frac) + 1) == nonzero
    zr = {(r.start, r.length) for r in zero_runs(run_scan(x))}
    assert (25, 95) in zr
    assert zr == {(3, 3), (7, 17), (25, 95), (121, 10)}


@given(st.integers(2, 10), st.integers(1, 300), st.integers(0, 2**30))
def test_run_scan_partition_properties(base, n, seed):
    x = random_expansion(base, n, seed)
    runs = run_scan(x)
    prev_end = 0
    for r in runs:
        assert r.start > prev_end                      # disjoint + ordered
        assert r.digit in (0, base - 1)
        seg = x.frac[r.start - 1 : r.start + r.length - 1]
        assert (seg == r.digit).all()
        if r.start > 1:                                # maximal on the left
            assert x.frac[r.start - 2] != r.digit
        if r.start + r.length - 1 < n:                 # maximal on the right
            assert x.frac[r.start + r.length - 1] != r.digit
        prev_end = r.start + r.length - 1


def test_random_expansion_determinism_and_digit_set():
    a = random_expansion(3, 10, 1, [0, 2])
    b = random_expansion(3, 10, 1, [0, 2])
    assert a == b
    assert set(a.frac.tolist()) <= {0, 2}
    c = random_expansion(10, 5, 7)
    assert c == random_expansion(10, 5, 7)
    with pytest.raises(ValueError):
        random_expansion(3, 10, 1, [])
    with pytest.raises(ValueError):
        random_expansion(3, 10, 1, [5])


def test_base_mismatch_rejected():
    with pytest.raises(ValueError):
        add(expansion(10, "1"), expansion(5, "1"))


def test_int_digit_conversions(rng):
    for _ in range(50):
        base = int(rng.integers(2, 37))
        n = int(rng.integers(1, 400))
        v = int(rng.integers(0, 2**40))
        v %= base ** n
        assert int(digits_to_int(int_to_digits(v, n, base), base)) == v


def test_file_roundtrip(tmp_path, rng):
    for base in (2, 5, 10, 36):
        x = random_expansion(base, 3000, 9)
        x = DigitExpansion(base, -1, 123456789, x.frac)
        p = tmp_path / f"x{base}.dig"
        write_digit_file(x, p)
        assert read_digit_file(p) == x
        text = p.read_text()
        assert text.endswith("\n")
        lines = text.split("\n")
        assert lines[0] == f"base={base}" and lines[1] == "sign=-"
        assert all(len(l) <= 1024 for l in lines)


def test_file_format_errors(tmp_path):
    p = tmp_path / "bad.dig"
    p.write_text("base=10\nsign=+\nint=0\nfraclen=3\n12")  # no trailing newline
    with pytest.raises(ValueError):
        read_digit_file(p)
    p.write_text("base=10\nsign=+\nint=0\nfraclen=3\n12\n")  # digit count mismatch
    with pytest.raises(ValueError):
        read_digit_file(p)
    with pytest.raises(ValueError):
        write_digit_file(random_expansion(37, 5, 1), tmp_path / "b37.dig")


def test_zero_normalizes_sign():
    z = DigitExpansion(5, -1, 0, np.zeros(4, dtype=np.uint8))
    assert z.sign == 1 and z.is_zero()


def test_from_scaled_int_negative():
    x = from_scaled_int(-(7 * 125 + 13), 3, 5)
    assert x.sign == -1 and x.int_part == 7
    assert x.frac.tolist() == [0, 2, 3]
