"""Continued-fraction engine and irrationality-exponent estimators.

The central quantity is the per-convergent exponent tau_k defined by
|x - p_k/q_k| = q_k^(-tau_k).  Finite truncations only support approximation
statements inside a trust zone q_{k+1} <= base**(trust * N): beyond it the
convergents describe the truncation, not the underlying number, and the final
partial quotient of a fully expanded truncation is always an artifact and is
discarded.  Estimates therefore carry their trusted depth explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import gcd as _gcd, mpz

from . import cfcore
from ._kernels import cf_ladder
from .digits import DigitExpansion, base_pow, digits_to_int, flog2, run_scan

DEFAULT_TRUST = 0.5
DEFAULT_TRUST_LOW_BITS = 16.0
EXACT_PATH_MAX_DIGITS = 3000


class ConsistencyError(AssertionError):
    """An internal cross-check (e.g. Legendre certification) failed."""


@dataclass
class ContinuedFraction:
    """Partial quotients with exact convergent tables."""

    a: list
    p: list
    q: list

    @property
    def K(self) -> int:
        return len(self.a) - 1

    def value(self) -> Fraction:
        return Fraction(self.p[-1], self.q[-1])

    def convergent(self, k: int) -> Fraction:
        return Fraction(self.p[k], self.q[k])

    def convergent_set(self) -> set:
        return {Fraction(p, q) for p, q in zip(self.p, self.q)}

    def serialize(self) -> str:
        if self.K == 0:
            return f"[{self.a[0]}]"
        return f"[{self.a[0]}; " + ", ".join(str(x) for x in self.a[1:]) + "]"


def cf_of_rational(r) -> ContinuedFraction:
    """Canonical continued fraction of a rational (last quotient >= 2 unless K=0)."""
    r = Fraction(r)
    num, den = r.numerator, r.denominator
    neg = num < 0
    if neg:
        # a_0 = floor(x) for negatives; expand the shifted nonnegative part
        a0 = num // den
        rest = Fraction(num, den) - a0
        quots, _ = cfcore.cf_quotients(rest.numerator, rest.denominator)
        quots[0] = a0
    else:
        quots, _ = cfcore.cf_quotients(num, den)
    if len(quots) > 1 and quots[-1] == 1:
        quots.pop()
        quots[-1] += 1
    p, q = cfcore.convergents(quots)
    return ContinuedFraction(quots, p, q)


@dataclass
class RunCandidate:
    """Digit run translated into a base-power approximation exponent."""

    start: int
    length: int
    digit: int
    denominator_exponent: int      # q = base**this
    exponent: float                # (N + L) / N


@dataclass
class ExponentEstimate:
    """Per-convergent exponents plus the derived headline numbers."""

    base: int
    n_digits: int
    trust_exponent: float
    tau: np.ndarray = field(default_factory=lambda: np.empty(0))
    logq: np.ndarray = field(default_factory=lambda: np.empty(0))
    ratios: np.ndarray = field(default_factory=lambda: np.empty(0))
    trusted: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))
    mu_hat: float | None = None
    trust_k: int | None = None
    theta_b_hat: float | None = None
    flag: str | None = None
    candidates: list = field(default_factory=list)
    exhausted: bool = False

    def trusted_indices(self) -> np.ndarray:
        return np.flatnonzero(self.trusted)

    def report(self) -> str:
        lines = []
        for k in self.trusted_indices():
            lines.append(f"{k} {self.logq[k]:.3f} {self.tau[k]:.6f}")
        if self.theta_b_hat is not None:
            lines.append(f"theta_b_hat={self.theta_b_hat:.6f}")
        mu = "nan" if self.mu_hat is None else f"{self.mu_hat:.6f}"
        flag = f" flag={self.flag}" if self.flag else ""
        lines.append(f"mu_hat={mu} trust_k={self.trust_k}{flag}")
        return "\n".join(lines) + "\n"


def _quotient_log2_array(quots) -> np.ndarray:
    out = np.empty(len(quots))
    chunk = 65536
    for lo in range(0, len(quots), chunk):
        part = quots[lo : lo + chunk]
        try:
            arr = np.array(part, dtype=np.int64)
            if arr.min() < 1:
                raise OverflowError
            out[lo : lo + len(part)] = np.log2(arr)
        except OverflowError:
            for i, a in enumerate(part):
                out[lo + i] = flog2(a) if a > 0 else -math.inf
    return out


def _estimate_from_ladder(base, N, trust, trust_low_bits, quots, exhausted) -> ExponentEstimate:
    lb = math.log2(base)
    hi = trust * N * lb
    lo = trust_low_bits
    est = ExponentEstimate(base, N, trust)
    est.exhausted = exhausted
    if exhausted and len(quots) > 1:
        # the last quotient encodes the truncation itself
        quots = quots[:-1]
    if len(quots) < 2:
        est.flag = "insufficient depth"
        return est
    la = _quotient_log2_array(quots)
    lq, tau, ratio = cf_ladder(la)
    est.tau, est.logq, est.ratios = tau, lq, ratio
    K = len(quots) - 1
    trusted = np.zeros(K + 1, dtype=bool)
    for k in range(1, K):
        if lq[k] >= lo and lq[k + 1] <= hi and math.isfinite(tau[k]):
            trusted[k] = True
    est.trusted = trusted
    idx = np.flatnonzero(trusted)
    if idx.size < 2:
        est.flag = "insufficient depth"
        return est
    est.trust_k = int(idx[-1])
    est.mu_hat = float(1.0 + np.max(ratio[idx]))
    return est


def tau_sequence(
    x: DigitExpansion,
    trust_exponent: float = DEFAULT_TRUST,
    trust_low_bits: float = DEFAULT_TRUST_LOW_BITS,
) -> ExponentEstimate:
    """Convergent exponents of a truncation, restricted to its trust zone.

    mu_hat = 1 + max over trusted k of log q_{k+1} / log q_k.  Integer shifts
    and sign flips do not change the estimate (the fractional magnitude is
    expanded).  A truncation whose exact value is reachable inside the trust
    zone is flagged "rational-like"; fewer than two trusted convergents yields
    the flag "insufficient depth".
    """
    if x.N < 8:
        raise ValueError("need at least 8 fractional digits")
    base, N = x.base, x.N
    lb = math.log2(base)
    y = x.fractional_part()
    est = ExponentEstimate(base, N, trust_exponent)
    if y.is_zero():
        est.flag = "rational-like"
        return est
    num = digits_to_int(y.frac, base)
    den = base_pow(base, N)
    stop_bits = trust_exponent * N * lb * 1.05 + 256
    if N <= EXACT_PATH_MAX_DIGITS:
        return _tau_exact(base, N, num, den, trust_exponent, trust_low_bits)
    quots, exhausted = cfcore.cf_quotients(num, den, stop_consumed_bits=stop_bits)
    if exhausted:
        g = _gcd(num, den)
        if flog2(den // g) <= trust_exponent * N * lb:
            est = _estimate_from_ladder(base, N, trust_exponent, trust_low_bits,
                                        quots, False)
            est.flag = "rational-like"
            est.mu_hat = None
            return est
    return _estimate_from_ladder(base, N, trust_exponent, trust_low_bits,
                                 quots, exhausted)


def _tau_exact(base, N, num, den, trust, trust_low_bits) -> ExponentEstimate:
    """Exact-remainder path: tau_k from the Euclidean remainders themselves."""
    lb = math.log2(base)
    hi = trust * N * lb
    lo = trust_low_bits
    est = ExponentEstimate(base, N, trust)
    a, b = mpz(num), mpz(den)
    quots, rems = [], []
    while b:
        qq, r = divmod(a, b)
        quots.append(int(qq))
        rems.append(r)
        a, b = b, r
    est.exhausted = True
    lden = flog2(den)
    if flog2(den // _gcd(num, den)) <= hi:
        # reduced denominator inside the trust zone: the value itself is a
        # trusted-scale rational
        est.flag = "rational-like"
    if len(quots) > 1:
        quots_t = quots[:-1]
        rems_t = rems[:-1]
    else:
        quots_t, rems_t = quots, rems
    K = len(quots_t) - 1
    if K < 1:
        if not est.flag:
            est.flag = "insufficient depth"
        return est
    _, qtab = cfcore.convergents(quots_t)
    lq = np.array([flog2(qk) if qk > 0 else -math.inf for qk in qtab])
    tau = np.full(K + 1, math.nan)
    ratio = np.full(K + 1, math.nan)
    trusted = np.zeros(K + 1, dtype=bool)
    for k in range(1, K):
        if rems_t[k] > 0 and lq[k] > 0:
            tau[k] = (lden + lq[k] - flog2(rems_t[k])) / lq[k]
            ratio[k] = lq[k + 1] / lq[k]
            if lq[k] >= lo and lq[k + 1] <= hi:
                trusted[k] = True
    est.tau, est.logq, est.ratios, est.trusted = tau, lq, ratio, trusted
    idx = np.flatnonzero(trusted)
    if idx.size < 2:
        if not est.flag:
            est.flag = "insufficient depth"
        return est
    est.trust_k = int(idx[-1])
    if est.flag != "rational-like":
        est.mu_hat = float(1.0 + np.max(ratio[idx]))
    return est


def theta_run_min_length(base: int, n_digits: int) -> int:
    """Shortest digit run counted as approximation evidence (noise floor).

    Random digits produce runs up to about log_base(N); requiring twice that
    keeps spurious candidates out while keeping every structurally planted run.
    """
    return max(4, math.ceil(2.0 * math.log(max(n_digits, 2)) / math.log(base)))


def estimate_theta_b(
    x: DigitExpansion,
    trust_exponent: float = DEFAULT_TRUST,
) -> ExponentEstimate:
    """Base-restricted exponent estimate from 0/(b-1) digit runs.

    A maximal run of length L starting at position N+1 witnesses a rational
    p/base**N within base**-(N+L), i.e. a candidate exponent (N+L)/N.  Only
    runs lying fully inside the trust zone and at least the noise-floor length
    are counted; with no surviving runs the estimate is the floor value 1.
    """
    if x.N < 8:
        raise ValueError("need at least 8 fractional digits")
    est = ExponentEstimate(x.base, x.N, trust_exponent)
    y = x.fractional_part()
    if y.is_zero():
        est.flag = "rational-like"
        return est
    limit = math.floor(trust_exponent * x.N)
    lmin = theta_run_min_length(x.base, x.N)
    best = 1.0
    for r in run_scan(y):
        if r.start < 2 or r.length < lmin:
            continue
        if r.start + r.length - 1 > limit:
            continue
        nexp = r.start - 1
        cand = RunCandidate(r.start, r.length, r.digit, nexp, (nexp + r.length) / nexp)
        est.candidates.append(cand)
        best = max(best, cand.exponent)
    est.theta_b_hat = best
    return est


def legendre_filter(x_trunc: Fraction, candidates) -> tuple[list, list]:
    """Partition reduced candidates by the 1/(2q^2) Legendre threshold.

    Candidates inside the threshold are certified to occur among the
    convergents of x_trunc (a ConsistencyError means an internal bug, never a
    property of the inputs).  Candidates outside it are passed through
    unasserted, except that literal convergents are still classified as such.
    """
    x = Fraction(x_trunc)
    cf = cf_of_rational(x)
    conv = cf.convergent_set()
    hits, rest = [], []
    for c in candidates:
        c = Fraction(c)
        q = c.denominator
        if abs(x - c) < Fraction(1, 2 * q * q):
            if c not in conv:
                raise ConsistencyError(
                    f"{c} is within 1/(2q^2) of the target but is not a convergent"
                )
            hits.append(c)
        elif c in conv:
            hits.append(c)
        else:
            rest.append(c)
    return hits, rest


@dataclass
class KpCheck:
    k: int
    ok: bool
    margin_low_bits: float
    margin_high_bits: float


@dataclass
class KpReport:
    checks: list
    ok: bool


def kp_bounds_check(cf: ContinuedFraction, x_value: Fraction) -> KpReport:
    """Exact sandwich q_k^(tau_k - 1)/2 < q_{k+1} < q_k^(tau_k - 1) per interior k.

    Equivalent integer form: 1/(2 q_k q_{k+1}) < |x - p_k/q_k| < 1/(q_k q_{k+1}).
    """
    if cf.K < 3:
        raise ValueError("continued fraction too shallow (need K >= 3)")
    x = Fraction(x_value)
    checks = []
    ok = True
    for k in range(1, cf.K - 1):
        pk, qk, qk1 = cf.p[k], cf.q[k], cf.q[k + 1]
        err = abs(x - Fraction(pk, qk))
        lo_ok = 2 * err.numerator * qk * qk1 > err.denominator
        hi_ok = err.numerator * qk * qk1 < err.denominator
        lerr = flog2(err.numerator) - flog2(err.denominator)
        lqq = flog2(qk) + flog2(qk1)
        checks.append(KpCheck(k, lo_ok and hi_ok, lerr + lqq + 1.0, -lerr - lqq))
        ok = ok and lo_ok and hi_ok
    return KpReport(checks, ok)
