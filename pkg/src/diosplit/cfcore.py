"""Big-integer continued fraction expansion.

``cf_quotients`` produces the true partial quotients of num/den.  Small
operands use the plain Euclidean loop; large operands use a certified
divide-and-conquer: quotients are computed on shifted prefixes as an interval
continued fraction (a quotient is emitted only while both interval endpoints
agree, so every emitted quotient is provably the true one), then the
accumulated continuant matrix is applied to the full operands and the loop
continues on the reduced pair.  This keeps the work subquadratic in the bit
size, which is what makes million-digit certificates practical.

Set ``DIOPH_PURE=1`` to force the naive Euclidean loop everywhere (the
fallback path; see benchmarks/bench_kernels.py).
"""

from __future__ import annotations

from gmpy2 import mpz

from ._kernels import PURE

LEAF_BITS = 1536


def cf_naive(num, den, stop_consumed_bits=None):
    """Plain Euclidean quotient loop. Returns (quotients, exhausted)."""
    a, b = mpz(num), mpz(den)
    if a < 0 or b <= 0:
        raise ValueError("need num >= 0, den > 0")
    out = []
    start = b.bit_length()
    while b:
        if stop_consumed_bits is not None and start - b.bit_length() > stop_consumed_bits:
            return out, False
        q, r = divmod(a, b)
        out.append(int(q))
        a, b = b, r
    return out, True


def _cf_interval(a0, b0, a1, b1, depth=0):
    """Certified common CF prefix of every x in [a0/b0, a1/b1].

    Returns (quotients, M) where M = prod [[q,1],[1,0]] over the emitted
    quotients.  Stops as soon as the two endpoints would disagree on the next
    quotient, so the result is exact for the true value known to lie inside the
    interval.  Endpoint pairs are Gauss-stepped jointly; each step flips the
    interval orientation, which the pair swap below accounts for.
    """
    qs = []
    m00, m01, m10, m11 = mpz(1), mpz(0), mpz(0), mpz(1)
    while True:
        if b0 == 0 or b1 == 0:
            break
        nb = max(a0.bit_length(), a1.bit_length())
        if nb <= LEAF_BITS:
            # direct steps until the endpoints disagree
            q0 = a0 // b0
            q1 = a1 // b1
            if q0 != q1:
                break
            qs.append(int(q0))
            a0, b0, a1, b1 = b1, a1 - q0 * b1, b0, a0 - q0 * b0
            m00, m01, m10, m11 = m00 * q0 + m01, m00, m10 * q0 + m11, m10
            continue
        s = nb >> 1
        if min(b0.bit_length(), b1.bit_length()) <= s + 32:
            # prefix too thin to certify anything; do one exact joint step
            q0 = a0 // b0
            q1 = a1 // b1
            if q0 != q1:
                break
            qs.append(int(q0))
            a0, b0, a1, b1 = b1, a1 - q0 * b1, b0, a0 - q0 * b0
            m00, m01, m10, m11 = m00 * q0 + m01, m00, m10 * q0 + m11, m10
            continue
        sub_qs, sub_m = _cf_interval(
            a0 >> s, (b0 >> s) + 1, (a1 >> s) + 1, b1 >> s, depth + 1
        )
        if not sub_qs:
            q0 = a0 // b0
            q1 = a1 // b1
            if q0 != q1:
                break
            qs.append(int(q0))
            a0, b0, a1, b1 = b1, a1 - q0 * b1, b0, a0 - q0 * b0
            m00, m01, m10, m11 = m00 * q0 + m01, m00, m10 * q0 + m11, m10
            continue
        n00, n01, n10, n11 = sub_m
        det = 1 if len(sub_qs) % 2 == 0 else -1
        # apply N^{-1} to both endpoint pairs (exact; endpoints satisfy the
        # certified quotients because the shifted interval contains them)
        na0 = det * (n11 * a0 - n01 * b0)
        nb0 = det * (n00 * b0 - n10 * a0)
        na1 = det * (n11 * a1 - n01 * b1)
        nb1 = det * (n00 * b1 - n10 * a1)
        if det < 0:
            a0, b0, a1, b1 = na1, nb1, na0, nb0
        else:
            a0, b0, a1, b1 = na0, nb0, na1, nb1
        qs.extend(sub_qs)
        m00, m01, m10, m11 = (
            m00 * n00 + m01 * n10,
            m00 * n01 + m01 * n11,
            m10 * n00 + m11 * n10,
            m10 * n01 + m11 * n11,
        )
    return qs, (m00, m01, m10, m11)


def cf_quotients(num, den, stop_consumed_bits=None):
    """True CF quotients of num/den (num >= 0, den > 0).

    If stop_consumed_bits is given the expansion may stop once the working
    denominator has lost that many bits (log2 q_k grows at the same rate);
    the second return value reports whether the expansion ran to completion.
    """
    a, b = mpz(num), mpz(den)
    if a < 0 or b <= 0:
        raise ValueError("need num >= 0, den > 0")
    if PURE or b.bit_length() <= 4 * LEAF_BITS:
        return cf_naive(a, b, stop_consumed_bits)
    out = []
    start = b.bit_length()
    while b:
        if stop_consumed_bits is not None and start - b.bit_length() > stop_consumed_bits:
            return out, False
        if a.bit_length() <= 4 * LEAF_BITS:
            rest, exhausted = cf_naive(a, b, None if stop_consumed_bits is None
                                       else stop_consumed_bits - (start - b.bit_length()))
            out.extend(rest)
            return out, exhausted
        n = a.bit_length()
        s = n >> 1
        if b.bit_length() <= s + 32:
            q, r = divmod(a, b)
            out.append(int(q))
            a, b = b, r
            continue
        qs, (m00, m01, m10, m11) = _cf_interval(a >> s, (b >> s) + 1, (a >> s) + 1, b >> s)
        if not qs:
            q, r = divmod(a, b)
            out.append(int(q))
            a, b = b, r
            continue
        det = 1 if len(qs) % 2 == 0 else -1
        a2 = det * (m11 * a - m01 * b)
        b2 = det * (m00 * b - m10 * a)
        if not (a2 > 0 and 0 <= b2 < a2):  # pragma: no cover - internal guard
            raise AssertionError("certified CF block produced invalid remainders")
        out.extend(qs)
        a, b = a2, b2
    return out, True


def convergents(quotients):
    """Exact convergent tables p_k, q_k from the standard recurrence."""
    p, q = [], []
    pm1, pm2 = 1, 0
    qm1, qm2 = 0, 1
    for a in quotients:
        pk = a * pm1 + pm2
        qk = a * qm1 + qm2
        p.append(pk)
        q.append(qk)
        pm2, pm1 = pm1, pk
        qm2, qm1 = qm1, qk
    return p, q
