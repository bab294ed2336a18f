"""Certificate checking and closed-form bound evaluation.

``verify`` turns each construction's proof obligations into concrete checks on
the stored digits: exact reconstruction, the digit properties behind the
designed convergents, exact designed-quality bounds, exponent windows, and a
stray-convergent scan over the trusted part of each component's continued
fraction.  Mandatory checks decide the exit status; exponent windows and stray
scans become advisory when fewer than four schedule intervals exist, because
the growth ratios are not yet visible at that depth.

Explicit constants (the asymptotic statements hide them): the designed-quality
bound uses (a_j + 1) * base**(-h_j) for corrected modes, base**(1 - h_j) for
the missing-digit mode, and base**(-(b_{j+1} - b_j) + 1) for factorial-block
modes; the stray corridor uses denominator floor q_u**(tau_u - 1) / 2.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .contfrac import ExponentEstimate, estimate_theta_b, tau_sequence
from .decompose import Decomposition, MeasuredCut, measure_all_cuts, _block_index, _is_prime
from .digits import DigitExpansion, add, base_pow, flog2
from .schedule import INF, as_lambda, lambda_str

CF_SCAN_AUTO_MAX_DIGITS = 120_000


@dataclass
class Tolerances:
    exponent_window: float = 0.15
    theta_window: float = 0.1
    stray_tau: float = 0.25
    trust: float = 0.5
    trust_low_bits: float = 16.0
    advisory_min_intervals: int = 4
    window_min_index: int = 3     # designed cuts u >= this enter window checks
    window_min_h: int = 0         # ... and only with cut position >= this


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    location: str
    mandatory: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        mark = "" if self.mandatory else " (advisory)"
        return f"CHECK {self.name} {status} margin={self.margin:.4g} at={self.location}{mark}"


@dataclass
class VerificationReport:
    mode: str
    checks: list = field(default_factory=list)
    mu_windows: dict = field(default_factory=dict)    # comp -> (lo, hi)
    stray: list = field(default_factory=list)         # (comp, k, logq_bits, tau)
    estimates: dict = field(default_factory=dict)     # comp -> ExponentEstimate
    measured: list = field(default_factory=list)      # MeasuredCut rows
    header: dict = field(default_factory=dict)

    def add(self, name, passed, margin, location, mandatory=True):
        self.checks.append(Check(name, bool(passed), float(margin), str(location), mandatory))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.mandatory)

    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_text(self) -> str:
        lines = [f"# verify mode={self.mode} overall={'PASS' if self.passed else 'FAIL'}"]
        for k, v in self.header.items():
            lines.append(f"# {k}={v}")
        for comp, (lo, hi) in sorted(self.mu_windows.items()):
            hi_s = "inf" if hi == INF else f"{hi:.4f}"
            lines.append(f"# window component={comp} [{lo:.4f}, {hi_s}]")
        for comp, k, lq, tau in self.stray:
            lines.append(f"# stray component={comp} k={k} q_bits={lq:.1f} tau={tau:.4f}")
        lines.extend(c.line() for c in self.checks)
        return "\n".join(lines) + "\n"


def _first_digit_mismatch(a: DigitExpansion, b: DigitExpansion) -> str:
    if a.sign != b.sign or a.int_part != b.int_part:
        return "integer part"
    d = np.flatnonzero(a.frac != b.frac)
    return f"position {int(d[0]) + 1}" if d.size else "equal"


def _max_threads() -> int:
    cap = os.environ.get("DIOPH_THREADS", "")
    try:
        return max(1, int(cap))
    except ValueError:
        return max(1, os.cpu_count() or 1)


def verify(dec: Decomposition, tolerances: Tolerances | None = None,
           cf_scan: bool | str = "auto") -> VerificationReport:
    """Run the full check battery for a decomposition.

    cf_scan controls the continued-fraction scan of each component (mu window,
    stray convergents): True, False, or "auto" (scan when the expansion is
    short enough for it to be quick).
    """
    tol = tolerances or Tolerances()
    if cf_scan == "auto":
        cf_scan = dec.N <= CF_SCAN_AUTO_MAX_DIGITS
    rep = VerificationReport(dec.mode)
    rep.header["trust_exponent"] = tol.trust
    rep.header["stern_constant"] = "(a_j + 1), mode-specific (see module docstring)"
    rep.header["corridor_constant"] = 2
    rep.header["cf_scan"] = cf_scan
    if dec.schedule.J < 3:
        rep.add("schedule-depth", False, dec.schedule.J, "need >= 3 intervals")
        return rep
    measured = measure_all_cuts(dec)
    rep.measured = measured
    _check_exact_sum(dec, rep)
    if dec.mode in ("exponent-n", "base-restricted", "sum"):
        _check_p1_corrected(dec, rep)
        _check_p2(dec, rep, measured, tol)
        _check_quality_corrected(dec, rep, measured)
        _check_tau_windows(dec, rep, measured, tol)
    elif dec.mode in ("erdos", "liouville-n"):
        _check_masks_factorial(dec, rep)
        _check_quality_factorial(dec, rep, measured)
        _check_liouville_trend(dec, rep, measured)
    elif dec.mode == "cantor":
        _check_cantor_structure(dec, rep)
        _check_quality_cantor(dec, rep, measured)
        _check_gcd_window(dec, rep, measured)
        _check_tau_windows(dec, rep, measured, tol, reduced=True)
    else:
        raise ValueError(f"unknown mode {dec.mode}")
    if dec.mode == "base-restricted":
        _check_theta_windows(dec, rep, tol)
    if cf_scan and dec.mode in ("exponent-n", "sum", "cantor"):
        _cf_scan_components(dec, rep, measured, tol)
    return rep


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def _check_exact_sum(dec: Decomposition, rep: VerificationReport) -> None:
    x0 = dec.components[0]
    if dec.mode in ("erdos", "sum", "cantor"):
        pairs = [(dec.components[1], dec.targets[0], "x0+x1")]
    else:
        pairs = [
            (dec.components[i], dec.targets[i - 1], f"x0+x{i}")
            for i in range(1, dec.n)
        ]
    for comp, target, label in pairs:
        s = add(x0, comp)
        ok = s == target
        rep.add("exact-sum", ok, 0.0, label if ok else f"{label} {_first_digit_mismatch(s, target)}")


def _check_p1_corrected(dec: Decomposition, rep: VerificationReport) -> None:
    # P1: component i is 0 on I_j \ {h_j} and carries exactly a_j at h_j for
    # every j = i (mod n).  Guaranteed digit-literally for components 0 and
    # n-1; the middle components of an n >= 3 split can see borrows from the
    # neighbouring difference blocks, so they are reported as advisory.
    sch = dec.schedule
    for j in range(1, sch.J + 1):
        i = j % dec.n
        comp = dec.components[i]
        mandatory = i in (0, dec.n - 1)
        if comp.sign < 0:
            rep.add("p1", False, 0.0, f"component {i} negative", mandatory=False)
            continue
        g, h = sch.g(j), sch.h(j)
        interior_ok = not comp.frac[g - 1 : h - 1].any()
        digit = int(comp.frac[h - 1])
        a = dec.corrections[j]
        ok = interior_ok and digit == a
        loc = f"component {i} I_{j}=[{g},{h}]"
        rep.add("p1", ok, digit - a if interior_ok else -1.0, loc, mandatory=mandatory)


def _check_p2(dec, rep, measured, tol) -> None:
    # P2: nonzero digit at each cut position h_{u-1}; makes the designed
    # numerator coprime to a prime base.  The u=1 cut sits at the seed
    # interval's edge where no correction digit protects it.
    prime = _is_prime(dec.base)
    for mc in measured:
        if mc.u < 2:
            continue
        comp = dec.components[mc.comp]
        if comp.sign < 0:
            rep.add("p2", False, 0.0, f"component {mc.comp} negative", mandatory=False)
            continue
        ok = mc.cut_digit is not None and mc.cut_digit != 0
        rep.add("p2", ok, mc.cut_digit or 0, f"component {mc.comp} m={mc.m}")
        if prime:
            rep.add(
                "reduced", mc.gcd_log2 == 0.0, -mc.gcd_log2,
                f"component {mc.comp} m={mc.m}",
            )
        elif mc.gcd_log2 > 0:
            rep.add("gcd-deflation", True, mc.gcd_log2,
                    f"component {mc.comp} m={mc.m}", mandatory=False)


def _quality_margin_bits(dec, mc, bound) -> float:
    if not mc.err_scaled:
        return math.inf
    return flog2(bound) - (mc.err_log2 + dec.N * math.log2(dec.base))


def _check_quality_corrected(dec, rep, measured) -> None:
    # |x_i - p/q| < (a_u + 1) * base**(-h_u), exact integer comparison
    for mc in measured:
        h_u = dec.schedule.h(mc.u)
        a = dec.corrections.get(mc.u, 1)
        bound = (a + 1) * base_pow(dec.base, dec.N - h_u)
        ok = abs(mc.err_scaled) < bound
        rep.add("designed-quality", ok, _quality_margin_bits(dec, mc, bound),
                f"component {mc.comp} m={mc.m}")


def _check_quality_cantor(dec, rep, measured) -> None:
    # |x_i - p/q| < base**(1 - h_u)
    for mc in measured:
        h_u = dec.schedule.h(mc.u)
        bound = base_pow(dec.base, dec.N - h_u + 1)
        ok = abs(mc.err_scaled) < bound
        rep.add("designed-quality", ok, _quality_margin_bits(dec, mc, bound),
                f"component {mc.comp} m={mc.m}")


def _check_quality_factorial(dec, rep, measured) -> None:
    # explicit factorial-block bound |x_i - p_j/q_j| <= base**(-(b_{j+1}-b_j)+1)
    for mc in measured:
        gap = math.factorial(mc.u + 1) - math.factorial(mc.u)
        bound = base_pow(dec.base, dec.N - gap + 1)
        ok = abs(mc.err_scaled) <= bound
        rep.add("designed-quality", ok, _quality_margin_bits(dec, mc, bound),
                f"component {mc.comp} m={mc.m}")


def _check_masks_factorial(dec: Decomposition, rep: VerificationReport) -> None:
    blocks = _block_index(dec.schedule, dec.N)
    if dec.mode == "erdos":
        xi = dec.targets[0]
        even = (blocks % 2) == 0
        x, y = dec.components
        ok_x = np.array_equal(x.frac, np.where(even, xi.frac, 0))
        ok_y = np.array_equal(y.frac, np.where(even, 0, xi.frac))
        rep.add("mask-integrity", ok_x, 0.0, "component 0")
        rep.add("mask-integrity", ok_y, 0.0, "component 1")
    else:
        res = blocks % dec.n
        x0 = dec.components[0]
        want = np.zeros(dec.N, dtype=np.uint8)
        for t in range(1, dec.n):
            sel = res == t
            want[sel] = dec.targets[t - 1].frac[sel]
        rep.add("mask-integrity", np.array_equal(x0.frac, want), 0.0, "component 0")


def _check_liouville_trend(dec, rep, measured) -> None:
    for i in range(dec.n):
        taus = [mc.tau for mc in measured if mc.comp == i and mc.tau is not None]
        if len(taus) < 2:
            rep.add("liouville-trend", True, 0.0, f"component {i} (<2 cuts)",
                    mandatory=False)
            continue
        diffs = [b - a for a, b in zip(taus, taus[1:])]
        ok = all(d > 0 for d in diffs)
        rep.add("liouville-trend", ok, min(diffs), f"component {i} taus={['%.3f' % t for t in taus]}")


def _cantor_owner(dec: Decomposition) -> np.ndarray:
    sch = dec.schedule
    blocks = _block_index(sch, dec.N)
    owner = 1 - (blocks % 2)
    for j in range(1, sch.J + 1):
        owner[sch.h(j) - 1] = j % 2
    for pos in dec.meta.get("swaps", []):
        owner[pos - 1] = 1 - owner[pos - 1]
    return owner


def _check_cantor_structure(dec: Decomposition, rep: VerificationReport) -> None:
    xi = dec.targets[0]
    W = dec.schedule.W
    owner = _cantor_owner(dec)
    for i, comp in enumerate(dec.components):
        present = {int(v) for v in np.unique(comp.frac)}
        rep.add("digits-in-W", present <= W, len(present - W), f"component {i}")
        want = np.where(owner == i, xi.frac, 0).astype(np.uint8)
        rep.add("mask-integrity", np.array_equal(comp.frac, want), 0.0, f"component {i}")
    s = dec.components[0].frac.astype(np.int64) + dec.components[1].frac.astype(np.int64)
    rep.add("carry-free-sum", int(s.max(initial=0)) < dec.base, dec.base - 1 - int(s.max(initial=0)), "x0+x1")
    # P1 analogue: the terminal digit of each interval is xi's nonzero digit,
    # owned by the component of that residue class
    for j in range(1, dec.schedule.J + 1):
        h = dec.schedule.h(j)
        i = j % 2
        d = dec.components[i].digit_at(h)
        ok = d == xi.digit_at(h) and d != 0 and d in W
        rep.add("p1", ok, d, f"component {i} h_{j}={h}")


def _check_gcd_window(dec, rep, measured) -> None:
    # P2': trailing zeros of the designed numerator fit inside the window H
    sch = dec.schedule
    for mc in measured:
        j = mc.u - 1
        win = sch.windows.get(j)
        if not win or win[0] > win[1]:
            continue
        wlen = win[1] - win[0] + 1
        ok = mc.z_trailing is not None and mc.z_trailing <= wlen
        rep.add("gcd-window", ok, wlen - (mc.z_trailing or 0),
                f"component {mc.comp} m={mc.m} |H|={wlen}")


def _window_upper(dec: Decomposition, i: int):
    lam = as_lambda(dec.lambda_of(i))
    if dec.mode == "exponent-n":
        lams = [as_lambda(l) for l in dec.schedule.lambdas]
        if INF in lams or lam == INF:
            return INF
        big = math.prod(lams)
        return float(big / (lam - 1) + 1)
    return INF if lam == INF else float(lam)


def _check_tau_windows(dec, rep, measured, tol, reduced=False) -> None:
    mandatory = dec.schedule.J >= tol.advisory_min_intervals
    for mc in measured:
        if mc.u < tol.window_min_index or mc.m < tol.window_min_h:
            continue
        lam = as_lambda(dec.lambda_of(mc.comp))
        if lam == INF:
            continue
        tau = mc.tau_reduced if reduced else mc.tau
        if tau is None:
            rep.add("tau-window", False, 0.0,
                    f"component {mc.comp} m={mc.m} rational-like cut", mandatory=False)
            continue
        dev = abs(tau - float(lam))
        rep.add("tau-window", dev <= tol.exponent_window, tol.exponent_window - dev,
                f"component {mc.comp} m={mc.m} tau={tau:.4f}", mandatory=mandatory)


def _scan_length(dec: Decomposition) -> int:
    # beyond the last scheduled interval the components are unstructured mask
    # filler; estimators scan only the certified depth
    return min(dec.N, dec.schedule.last_position())


def _check_theta_windows(dec, rep, tol) -> None:
    mandatory = dec.schedule.J >= tol.advisory_min_intervals
    scan_n = _scan_length(dec)
    for i, comp in enumerate(dec.components):
        lam = as_lambda(dec.lambda_of(i))
        if lam == INF or comp.sign < 0:
            continue
        est = estimate_theta_b(comp.with_length(scan_n), trust_exponent=tol.trust)
        rep.estimates[i] = est
        if est.theta_b_hat is None:
            rep.add("theta-window", False, 0.0, f"component {i} flag={est.flag}",
                    mandatory=False)
            continue
        dev = abs(est.theta_b_hat - float(lam))
        rep.add("theta-window", dev <= tol.theta_window, tol.theta_window - dev,
                f"component {i} theta={est.theta_b_hat:.4f}", mandatory=mandatory)


def _cf_scan_components(dec, rep, measured, tol) -> None:
    mandatory = dec.schedule.J >= tol.advisory_min_intervals
    lb = math.log2(dec.base)
    scan_n = _scan_length(dec)

    def scan(i):
        return tau_sequence(dec.components[i].with_length(scan_n),
                            trust_exponent=tol.trust,
                            trust_low_bits=tol.trust_low_bits)

    def designed_visible(i) -> bool:
        # the window is enforceable only if some designed jump of component i
        # lies fully inside the trust zone of the scanned truncation
        hi_bits = tol.trust * scan_n * lb
        for mc in measured:
            if mc.comp != i:
                continue
            if mc.m * lb >= tol.trust_low_bits and dec.schedule.h(mc.u) * lb <= hi_bits:
                return True
        return False

    workers = min(_max_threads(), dec.n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            ests = list(ex.map(scan, range(dec.n)))
    else:
        ests = [scan(i) for i in range(dec.n)]
    for i, est in enumerate(ests):
        rep.estimates[i] = est
        lam = as_lambda(dec.lambda_of(i))
        upper = _window_upper(dec, i)
        lo = float(lam) - tol.exponent_window if lam != INF else 2.0
        hi = upper + tol.exponent_window if upper != INF else INF
        rep.mu_windows[i] = (lo, hi)
        if est.mu_hat is None:
            rep.add("mu-window", False, 0.0, f"component {i} flag={est.flag}",
                    mandatory=False)
            continue
        ok = est.mu_hat >= lo and (hi == INF or est.mu_hat <= hi)
        window_mandatory = mandatory and designed_visible(i)
        rep.add("mu-window", ok, min(est.mu_hat - lo, (hi - est.mu_hat) if hi != INF else math.inf),
                f"component {i} mu_hat={est.mu_hat:.4f}"
                + ("" if window_mandatory else " (no designed jump in trust zone)" if not designed_visible(i) else ""),
                mandatory=window_mandatory)
        # stray scan: trusted convergents not explained by designed cuts
        designed_logq = [
            (mc.m * lb - mc.gcd_log2) for mc in measured if mc.comp == i
        ]
        strays = []
        for k in est.trusted_indices():
            tau_k = float(est.tau[k])
            if tau_k <= 2.0 + tol.stray_tau:
                continue
            lq = float(est.logq[k])
            if any(abs(lq - dq) <= 0.5 for dq in designed_logq):
                continue
            strays.append((k, lq, tau_k))
            rep.stray.append((i, k, lq, tau_k))
        gate = upper + tol.stray_tau if upper != INF else INF
        worst = max((t for _, _, t in strays), default=0.0)
        ok = gate == INF or worst <= gate
        rep.add("stray-window", ok, (gate - worst) if gate != INF else math.inf,
                f"component {i} strays={len(strays)}", mandatory=mandatory)
        if dec.mode == "sum" and strays:
            _check_must_corridor(dec, rep, measured, est, strays, i, mandatory)


def _check_must_corridor(dec, rep, measured, est, strays, i, mandatory) -> None:
    # every stray between consecutive designed denominators q_u < q < q_{u+n}
    # must satisfy q >= q_u**(tau_u - 1) / 2
    lb = math.log2(dec.base)
    cuts = sorted((mc for mc in measured if mc.comp == i and mc.tau is not None),
                  key=lambda mc: mc.m)
    for k, lq, tau_k in strays:
        for lowcut, highcut in zip(cuts, cuts[1:]):
            lo_q = lowcut.m * lb
            hi_q = highcut.m * lb
            if lo_q < lq < hi_q:
                floor_bits = (lowcut.tau - 1.0) * lo_q - 1.0
                ok = lq >= floor_bits
                rep.add("must-corridor", ok, lq - floor_bits,
                        f"component {i} stray k={k} in (q_u, q_u+n)",
                        mandatory=mandatory)
                break


# ---------------------------------------------------------------------------
# closed-form bound evaluators
# ---------------------------------------------------------------------------


def _lam_exact(v):
    lam = as_lambda(v)
    return lam


def jarnik_dim(lam, mu=None):
    """Hausdorff dimension 2/lambda of the two-sided exponent level set."""
    lam = _lam_exact(lam)
    if lam != INF and lam < 2:
        raise ValueError("domain: lambda >= 2")
    if mu is not None and _lam_exact(mu) != INF and _lam_exact(mu) < lam:
        raise ValueError("domain: mu >= lambda")
    return Fraction(0) if lam == INF else 2 / lam


def vsets_dim(lam, mu=None):
    """Hausdorff dimension 1/lambda of the base-restricted level set."""
    lam = _lam_exact(lam)
    if lam != INF and lam < 1:
        raise ValueError("domain: lambda >= 1")
    if mu is not None and _lam_exact(mu) != INF and _lam_exact(mu) < lam:
        raise ValueError("domain: mu >= lambda")
    return Fraction(0) if lam == INF else 1 / lam


def cantor_dim(b: int, W) -> float:
    """log |W| / log b for the missing-digit set."""
    W = set(int(w) for w in W)
    if b < 3:
        raise ValueError("domain: base >= 3")
    if not W or not all(0 <= w < b for w in W):
        raise ValueError("domain: W a nonempty subset of {0..b-1}")
    return math.log(len(W)) / math.log(b)


def product_upper(lambdas, restricted: bool = False):
    lams = [_lam_exact(l) for l in lambdas]
    n = len(lams)
    top = max(lams)
    c = 1 if restricted else 2
    return Fraction(n - 1) if top == INF else n - 1 + Fraction(c) / top


def product_lower(lambdas, restricted: bool = False):
    lams = [_lam_exact(l) for l in lambdas]
    n = len(lams)
    c = 1 if restricted else 2
    s = sum((Fraction(0) if l == INF else Fraction(c) / l) for l in lams)
    return max(Fraction(n - 1), s)


def complement_bound(*lambdas):
    """Upper bound 2(2l-1)/(l^2-l) on the sum-split exception set, l = min target."""
    lams = [_lam_exact(l) for l in lambdas]
    lam = min(lams)
    if lam == INF:
        return Fraction(0)
    if lam <= 1:
        raise ValueError("domain: lambda > 1")
    return 2 * (2 * lam - 1) / (lam * lam - lam)


def happ_bound(lambdas):
    """Component-wise exponent ceilings nu_i = Lambda/(lambda_i - 1) + 1."""
    lams = [_lam_exact(l) for l in lambdas]
    for l in lams:
        if l != INF and l < 2:
            raise ValueError("domain: lambda_i >= 2")
    if INF in lams:
        return [INF] * len(lams)
    big = math.prod(lams)
    return [big / (l - 1) + 1 for l in lams]


def modif_bound(lam0, lam1):
    """lambda_0 (lambda_1 - 1) / (lambda_0 + lambda_1 - 1)."""
    l0, l1 = _lam_exact(lam0), _lam_exact(lam1)
    if INF in (l0, l1):
        return INF
    return l0 * (l1 - 1) / (l0 + l1 - 1)


def modif2_bound(lam1):
    """(lambda_1^2 - lambda_1) / (2 lambda_1 - 1)."""
    l1 = _lam_exact(lam1)
    if l1 == INF:
        return INF
    return (l1 * l1 - l1) / (2 * l1 - 1)


def holdja_bounds(lambdas):
    """Conjectural product-dimension window for the unrestricted level sets."""
    return {
        "lower": product_lower(lambdas),
        "upper": product_upper(lambdas),
        "status": "conjectural",
    }


BOUND_QUERIES = {
    "jarnik": jarnik_dim,
    "vsets": vsets_dim,
    "cantor": cantor_dim,
    "product-upper": product_upper,
    "product-lower": product_lower,
    "complement": complement_bound,
    "happ-bound": happ_bound,
    "modif": modif_bound,
    "modif2": modif2_bound,
    "holdja": holdja_bounds,
}


def bound_evaluator(query: str, *args, **kwargs):
    try:
        fn = BOUND_QUERIES[query]
    except KeyError:
        raise ValueError(f"unknown query {query!r}; known: {sorted(BOUND_QUERIES)}")
    return fn(*args, **kwargs)
