"""Differential tests for the certified divide-and-conquer CF engine."""

import random

import pytest

from diosplit import cfcore


def naive_oracle(a, b):
    out = []
    while b:
        q, r = divmod(a, b)
        out.append(q)
        a, b = b, r
    return out


@pytest.mark.parametrize("bits", [64, 500, 3000, 20000, 80000])
def test_matches_naive_oracle(bits):
    rnd = random.Random(bits)
    for _ in range(4):
        b = rnd.getrandbits(bits) | (1 << (bits - 1))
        a = rnd.getrandbits(bits) % b
        got, exhausted = cfcore.cf_quotients(a, b)
        assert exhausted
        assert got == naive_oracle(a, b)


def test_fibonacci_worst_case():
    a, b = 1, 1
    for _ in range(30000):
        a, b = a + b, a
    got, _ = cfcore.cf_quotients(b, a)
    assert got == naive_oracle(b, a)
    assert set(got[1:-1]) == {1}


def test_embedded_giant_quotients():
    qs = [0, 2, 10**2000, 3, 1, 7, 10**500, 4, 2]
    num, den = 1, 0
    for a in reversed(qs):
        num, den = a * num + den, num
    got, _ = cfcore.cf_quotients(num, den)
    assert got == qs


def test_early_stop_prefix_is_exact():
    rnd = random.Random(7)
    b = rnd.getrandbits(60000) | (1 << 59999)
    a = rnd.getrandbits(60000) % b
    full = naive_oracle(a, b)
    got, exhausted = cfcore.cf_quotients(a, b, stop_consumed_bits=20000)
    assert not exhausted
    assert got == full[: len(got)]
    assert len(got) > 1000


def test_convergent_tables_and_determinant():
    qs = [3, 7, 15, 1, 292, 1, 1, 1, 2, 1]
    p, q = cfcore.convergents(qs)
    assert p[0] == 3 and q[0] == 1
    for k in range(1, len(qs)):
        assert p[k] * q[k - 1] - p[k - 1] * q[k] == (-1) ** (k - 1)
    assert sorted(q) == q


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        cfcore.cf_quotients(-1, 2)
    with pytest.raises(ValueError):
        cfcore.cf_quotients(1, 0)
