"""Hot inner loops: numba-jitted kernels with pure numpy/python fallbacks.

The jitted path is used by default.  Set ``DIOPH_PURE=1`` in the environment
(before import) to force the fallback implementations; ``benchmarks/bench_kernels.py``
compares the two.  Every kernel here is linear in the number of digit positions.
"""

from __future__ import annotations

import math
import os

import numpy as np

LN2 = math.log(2.0)

PURE = os.environ.get("DIOPH_PURE", "").strip() not in ("", "0")

if not PURE:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        PURE = True

# ---------------------------------------------------------------------------
# carry / borrow propagation on digit arrays (most-significant position first)
# ---------------------------------------------------------------------------


def _add_digits_impl(a, b, base):
    out = np.empty_like(a)
    carry = 0
    for i in range(a.size - 1, -1, -1):
        s = a[i] + b[i] + carry
        if s >= base:
            out[i] = s - base
            carry = 1
        else:
            out[i] = s
            carry = 0
    return out, carry


def _sub_digits_impl(a, b, base):
    out = np.empty_like(a)
    borrow = 0
    for i in range(a.size - 1, -1, -1):
        s = a[i] - b[i] - borrow
        if s < 0:
            out[i] = s + base
            borrow = 1
        else:
            out[i] = s
            borrow = 0
    return out, borrow


def _run_scan_impl(d, base):
    n = d.size
    starts = np.empty(n, dtype=np.int64)
    lengths = np.empty(n, dtype=np.int64)
    kinds = np.empty(n, dtype=np.int64)
    cnt = 0
    i = 0
    top = base - 1
    while i < n:
        v = d[i]
        if v == 0 or v == top:
            j = i + 1
            while j < n and d[j] == v:
                j += 1
            starts[cnt] = i
            lengths[cnt] = j - i
            kinds[cnt] = v
            cnt += 1
            i = j
        else:
            i += 1
    return starts[:cnt], lengths[:cnt], kinds[:cnt]


def _cf_ladder_impl(la):
    # la[k] = log2(a_k) for k = 0..K (la[0] unused; q_0 = 1).  Returns
    # lq[k] = log2 q_k, tau[k] with |x - p_k/q_k| = q_k^(-tau_k), and
    # ratio[k] = log2 q_{k+1} / log2 q_k.  All recursions add positive
    # terms only, so there is no cancellation.
    K = la.size - 1
    lq = np.zeros(K + 1)
    lr = np.empty(K + 1)
    lr[0] = -math.inf
    for k in range(1, K + 1):
        t = math.log1p(2.0 ** (lr[k - 1] - la[k])) / LN2
        lq[k] = lq[k - 1] + la[k] + t
        lr[k] = lq[k - 1] - lq[k]
    lal = np.empty(K + 1)
    lal[0] = math.nan
    if K >= 1:
        lal[K] = la[K]
        for k in range(K - 1, 0, -1):
            lal[k] = la[k] + math.log1p(2.0 ** (-(lal[k + 1] + la[k]))) / LN2
    tau = np.full(K + 1, math.nan)
    ratio = np.full(K + 1, math.nan)
    for k in range(1, K):
        if lq[k] > 0.0:
            lA = lal[k + 1] + math.log1p(2.0 ** (lr[k] - lal[k + 1])) / LN2
            tau[k] = 2.0 + lA / lq[k]
            ratio[k] = lq[k + 1] / lq[k]
    return lq, tau, ratio


if not PURE:
    _add_digits_nb = njit(cache=True)(_add_digits_impl)
    _sub_digits_nb = njit(cache=True)(_sub_digits_impl)
    _run_scan_nb = njit(cache=True)(_run_scan_impl)
    _cf_ladder_nb = njit(cache=True)(_cf_ladder_impl)


def _run_scan_numpy(d, base):
    """Vectorized run extraction (fallback path)."""
    top = base - 1
    lab = np.zeros(d.size + 2, dtype=np.int8)
    lab[1:-1] = np.where(d == 0, 1, np.where(d == top, 2, 0))
    chg = np.flatnonzero(lab[1:] != lab[:-1])
    starts, lengths, kinds = [], [], []
    for s, e in zip(chg[:-1], chg[1:]):
        if lab[s + 1] != 0:
            starts.append(s)
            lengths.append(e - s)
            kinds.append(0 if lab[s + 1] == 1 else top)
    return (
        np.asarray(starts, dtype=np.int64),
        np.asarray(lengths, dtype=np.int64),
        np.asarray(kinds, dtype=np.int64),
    )


def add_digits(a, b, base):
    """Digit-wise a+b (uint8 arrays, most significant first) -> (uint8, carry)."""
    a64 = np.ascontiguousarray(a, dtype=np.int64)
    b64 = np.ascontiguousarray(b, dtype=np.int64)
    if PURE:
        out, carry = _add_digits_impl(a64, b64, base)
    else:
        out, carry = _add_digits_nb(a64, b64, base)
    return out.astype(np.uint8), int(carry)


def sub_digits(a, b, base):
    """Digit-wise a-b (caller guarantees meaning of borrow) -> (uint8, borrow)."""
    a64 = np.ascontiguousarray(a, dtype=np.int64)
    b64 = np.ascontiguousarray(b, dtype=np.int64)
    if PURE:
        out, borrow = _sub_digits_impl(a64, b64, base)
    else:
        out, borrow = _sub_digits_nb(a64, b64, base)
    return out.astype(np.uint8), int(borrow)


def run_scan_digits(d, base):
    """Maximal runs of digit 0 / digit base-1 -> (starts, lengths, kinds), 0-based."""
    d64 = np.ascontiguousarray(d, dtype=np.int64)
    if PURE:
        return _run_scan_numpy(d64, base)
    return _run_scan_nb(d64, base)


def cf_ladder(la):
    """See _cf_ladder_impl."""
    la = np.ascontiguousarray(la, dtype=np.float64)
    if PURE:
        return _cf_ladder_impl(la)
    return _cf_ladder_nb(la)
