"""The constructive split algorithms, each emitting components plus certificates.

Every mode writes a target value (or vector) as an exact digit-level sum of
components whose approximation quality is witnessed by designed convergents:
rationals obtained by cutting a component right before one of its engineered
zero blocks.  Cutting x_i at position m leaves a tail whose leading term sits
at the far end of the next interval owned by component i, so the designed
denominator base**m certifies an approximation exponent close to the interval
growth ratio of that residue class.

Sign convention for the corrected modes: component i receives +a_j at the
terminal position h_j of every interval with j = i (mod n) and the target's
digits minus a_j elsewhere, which is what makes the digit properties P1
(zero block ending in the nonzero correction digit) and P2 (nonzero digit at
each cut position) literal statements about the stored digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import gcd as _gcd, mpz

from .contfrac import estimate_theta_b, tau_sequence
from .digits import (
    DigitExpansion,
    add,
    base_pow,
    digits_to_int,
    flog2,
    from_scaled_int,
    sub,
)
from .schedule import (
    SUM_THRESHOLD,
    IntervalSchedule,
    ScheduleError,
    as_lambda,
    build_schedule,
    cantor_adjusted_schedule,
    exceeds_sum_threshold,
    factorial_schedule,
    lambda_str,
)

INF = math.inf

MODES = ("erdos", "liouville-n", "exponent-n", "base-restricted", "sum", "cantor")


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class CutSpec:
    """Designed convergent: component `comp`, cut before zero block I_u, m digits kept."""

    comp: int
    u: int
    m: int


@dataclass
class MeasuredCut:
    comp: int
    u: int
    m: int
    p: int                      # nearest numerator at denominator base**m
    err_scaled: int             # (x_comp - p/base**m) * base**N, exact
    err_log2: float             # log2 |x_comp - p/base**m|; -inf when exact
    tau: float | None           # exponent against the unreduced denominator
    tau_reduced: float | None
    z_trailing: int | None      # trailing zero digits of p (base-power deflation)
    gcd_log2: float             # log2 gcd(|p|, base**m)
    cut_digit: int | None       # component digit at position m (P2 witness)


@dataclass
class Decomposition:
    mode: str
    base: int
    n: int
    components: list
    targets: list
    schedule: IntervalSchedule
    corrections: dict = field(default_factory=dict)       # j -> a_j
    cuts: list = field(default_factory=list)              # list[CutSpec]
    attestations: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.components[0].N

    def component(self, i: int) -> DigitExpansion:
        return self.components[i]

    def lambda_of(self, i: int):
        lams = self.schedule.lambdas
        return lams[i % len(lams)]


# ---------------------------------------------------------------------------
# position classification helpers
# ---------------------------------------------------------------------------


def _block_index(sched: IntervalSchedule, N: int) -> np.ndarray:
    """Block number j for positions 1..N (index 0 = position 1).

    Positions past the last scheduled interval belong to the open block J+1.
    """
    hs = np.array([iv.h for iv in sched.intervals], dtype=np.int64)
    js = np.array([iv.j for iv in sched.intervals], dtype=np.int64)
    pos = np.arange(1, N + 1, dtype=np.int64)
    idx = np.searchsorted(hs, pos, side="left")
    out = np.empty(N, dtype=np.int64)
    inside = idx < len(hs)
    out[inside] = js[idx[inside]]
    out[~inside] = sched.J + 1
    return out


def _check_targets(xis, base=None):
    if not xis:
        raise DecompositionError("need at least one target")
    base = base or xis[0].base
    N = xis[0].N
    for t in xis:
        if t.base != base:
            raise DecompositionError("targets must share one base")
        if t.N != N:
            raise DecompositionError("targets must share one fractional length")
        if t.sign < 0 or t.int_part != 0:
            raise DecompositionError("targets must lie in [0, 1)")
    return base, N


# ---------------------------------------------------------------------------
# factorial-block modes
# ---------------------------------------------------------------------------


def erdos_split(xi: DigitExpansion, J: int) -> Decomposition:
    """Two-way complement-mask split along the factorial blocks [j!, (j+1)!-1].

    x keeps xi's digits on the even-index blocks, y on the odd ones; the
    supports are disjoint so x + y = xi without carries, and each component has
    factorially long zero blocks behind its designed cuts.
    """
    base, N = _check_targets([xi])
    needed = math.factorial(J + 1)
    if N < needed:
        raise DecompositionError(f"need at least (J+1)! = {needed} digits, have {N}")
    sched = factorial_schedule(J)
    blocks = _block_index(sched, N)
    even = (blocks % 2) == 0
    x_digits = np.where(even, xi.frac, 0).astype(np.uint8)
    y_digits = np.where(even, 0, xi.frac).astype(np.uint8)
    comps = [DigitExpansion(base, 1, 0, x_digits), DigitExpansion(base, 1, 0, y_digits)]
    cuts = []
    for u in range(1, sched.J + 2):
        b_u = math.factorial(u)
        b_next = math.factorial(u + 1)
        if b_next > N:
            break
        comp = 0 if u % 2 == 1 else 1  # zero block I_u belongs to that component
        cuts.append(CutSpec(comp, u, b_u))
    dec = Decomposition("erdos", base, 2, comps, [xi], sched, cuts=cuts)
    for i, c in enumerate(comps):
        if c.is_zero():
            dec.warnings.append(f"component {i} is identically zero (rational-like)")
    return dec


def liouville_nsplit(xis, J: int) -> Decomposition:
    """n-way factorial-block split: x_0 carries xi_i's digits on blocks j = i (mod n)."""
    base, N = _check_targets(xis)
    n = len(xis) + 1
    needed = math.factorial(J + 1)
    if N < needed:
        raise DecompositionError(f"need at least (J+1)! = {needed} digits, have {N}")
    sched = factorial_schedule(J)
    blocks = _block_index(sched, N)
    res = blocks % n
    x0_digits = np.zeros(N, dtype=np.uint8)
    for t in range(1, n):
        sel = res == t
        x0_digits[sel] = xis[t - 1].frac[sel]
    x0 = DigitExpansion(base, 1, 0, x0_digits)
    comps = [x0] + [sub(xi, x0) for xi in xis]
    cuts = []
    for u in range(1, sched.J + 2):
        if math.factorial(u + 1) > N:
            break
        cuts.append(CutSpec(u % n, u, math.factorial(u)))
    dec = Decomposition("liouville-n", base, n, comps, list(xis), sched, cuts=cuts)
    for i, c in enumerate(comps):
        if c.is_zero():
            dec.warnings.append(f"component {i} is identically zero (rational-like)")
    return dec


# ---------------------------------------------------------------------------
# corrected geometric-schedule modes
# ---------------------------------------------------------------------------


def _collision_free_digit(xis, base, n, j, h) -> int:
    """Correction digit a_j in {1, 2} avoiding a zero digit where it lands.

    The digit it must differ from depends on the residue class of j: the
    correction is subtracted against a target digit (classes 0 and n-1) or
    added to a digit of a pairwise difference (classes 1..n-2).
    """
    t = j % n
    if t == 0 or t == n - 1:
        src = xis[0] if t == 0 else xis[n - 2]
        f = src.digit_at(h)
    else:
        f = (xis[t - 1].digit_at(h) - xis[t].digit_at(h)) % base
    return 1 if f != 1 else 2


def _corrected_split(xis, sched: IntervalSchedule, base: int, mode: str) -> Decomposition:
    n = len(xis) + 1
    N = xis[0].N
    blocks = _block_index(sched, N)
    res = blocks % n
    x0_digits = np.zeros(N, dtype=np.uint8)
    for t in range(1, n):
        sel = res == t
        x0_digits[sel] = xis[t - 1].frac[sel]
    corrections = {}
    v0 = digits_to_int(x0_digits, base)
    for j in range(1, sched.J + 1):
        h = sched.h(j)
        a = _collision_free_digit(xis, base, n, j, h)
        corrections[j] = a
        term = a * base_pow(base, N - h)
        v0 = v0 + term if j % n == 0 else v0 - term
    x0 = from_scaled_int(v0, N, base)
    comps = [x0] + [sub(xi, x0) for xi in xis]
    cuts = [
        CutSpec(u % n, u, sched.h(u - 1))
        for u in range(1, sched.J + 1)
    ]
    return Decomposition(mode, base, n, comps, list(xis), sched,
                         corrections=corrections, cuts=cuts)


def _zero_tail(comp: DigitExpansion, sched: IntervalSchedule) -> bool:
    if sched.J < 2:
        return False
    g = sched.g(sched.J - 1)
    return not comp.frac[g - 1 :].any()


def _build_corrected(xis, lambdas, base, digit_budget, mode) -> Decomposition:
    sched = build_schedule(lambdas, digit_budget)
    if sched.J < 3:
        raise DecompositionError("digit budget below 3 schedule intervals")
    dec = _corrected_split(xis, sched, base, mode)
    if any(_zero_tail(c, sched) for c in dec.components):
        # rational-looking tail: rerun with a jittered seed interval, which
        # shifts every cut position
        sched2 = build_schedule(lambdas, digit_budget, h0=3)
        dec2 = _corrected_split(xis, sched2, base, mode)
        dec2.meta["jitter"] = True
        if any(_zero_tail(c, sched2) for c in dec2.components):
            dec2.warnings.append("zero tail persists after schedule jitter")
        return dec2
    return dec


def exponent_nsplit(xis, lambdas, mus=None, digit_budget=None) -> Decomposition:
    """n-way split with prescribed exponent window [lambda_i, nu_i] per component."""
    base, N = _check_targets(xis)
    n = len(xis) + 1
    lams = tuple(as_lambda(l) for l in lambdas)
    if len(lams) != n:
        raise DecompositionError(f"need {n} exponent targets for {n-1} inputs")
    for l in lams:
        if l != INF and l < 2:
            raise DecompositionError("exponent targets must satisfy lambda_i >= 2")
    digit_budget = N if digit_budget is None else digit_budget
    if digit_budget > N:
        raise DecompositionError("digit budget exceeds available digits")
    dec = _build_corrected(xis, lams, base, digit_budget, "exponent-n")
    if mus is not None:
        mus_p = tuple(as_lambda(m) for m in mus)
        dec.meta["mus"] = mus_p
        big_lambda = math.prod(lams) if INF not in lams else INF
        for i, (lam, mu) in enumerate(zip(lams, mus_p)):
            if mu == INF:
                continue
            nu = INF if big_lambda == INF or lam == 1 else big_lambda / (lam - 1) + 1
            if mu < lam or (nu != INF and mu <= nu):
                dec.warnings.append(
                    f"mu_{i}={lambda_str(mu)} violates mu_i > Lambda/(lambda_i-1)+1 "
                    f"= {nu if nu != INF else 'inf'}; certificate window weakens"
                )
    return dec


def base_restricted_nsplit(xis, lambdas, digit_budget=None) -> Decomposition:
    """Same digit construction, certifying the base-restricted exponent theta_b."""
    base, N = _check_targets(xis)
    if base == 2:
        raise DecompositionError(
            "base 2 refused: the correction digits {1, 2} need base >= 3"
        )
    n = len(xis) + 1
    lams = tuple(as_lambda(l) for l in lambdas)
    if len(lams) != n:
        raise DecompositionError(f"need {n} exponent targets for {n-1} inputs")
    for l in lams:
        if l != INF and l < 1:
            raise DecompositionError("base-restricted targets must satisfy lambda_i >= 1")
    digit_budget = N if digit_budget is None else min(digit_budget, N)
    report = check_T_membership(xis)
    dec = _build_corrected(xis, lams, base, digit_budget, "base-restricted")
    if not report.consistent:
        dec.warnings.append(
            "inputs look inconsistent with the full-measure input class: "
            f"max base-restricted exponent estimate {report.max_estimate:.3f} > 1"
        )
    dec.meta["t_report"] = report
    return dec


def sum_split(xi: DigitExpansion, lambda0, lambda1, digit_budget=None,
              attestation: str | None = None) -> Decomposition:
    """Write xi as x_0 + x_1 with mu(x_i) pinned to lambda_i (two-component mode).

    Requires min(lambda_0, lambda_1) > (5+sqrt(17))/2; the construction cannot
    exclude stray approximations below that threshold.  The hypothesis that xi
    itself is not very well approximable is undecidable from a truncation, so
    the certificate records a bounded-depth estimate plus the caller's word.
    """
    base, N = _check_targets([xi])
    lams = (as_lambda(lambda0), as_lambda(lambda1))
    for l in lams:
        if not exceeds_sum_threshold(l):
            raise DecompositionError(
                f"lambda must exceed {SUM_THRESHOLD}; got {lambda_str(l)}"
            )
    digit_budget = N if digit_budget is None else min(digit_budget, N)
    dec = _build_corrected([xi], lams, base, digit_budget, "sum")
    depth = min(N, 20000)
    est = tau_sequence(xi.with_length(depth))
    dec.attestations["input_mu_hat"] = (
        f"{est.mu_hat:.4f}" if est.mu_hat is not None else f"flag:{est.flag}"
    )
    dec.attestations["input_mu_depth"] = str(depth)
    if attestation:
        dec.attestations["caller"] = attestation
    if (est.mu_hat is not None and est.mu_hat > 2.5) or est.flag == "rational-like":
        what = f"mu_hat estimate {est.mu_hat:.3f} > 2.5" if est.mu_hat is not None \
            else "truncation is rational-like at trusted scales"
        dec.warnings.append(
            f"input {what}: xi may be very well approximable, weakening the "
            "stray-convergent argument"
        )
    return dec


# ---------------------------------------------------------------------------
# missing-digit Cantor mode
# ---------------------------------------------------------------------------


def cantor_sum_split(xi: DigitExpansion, lambda0, lambda1, W, epsilon,
                     digit_budget=None) -> Decomposition:
    """Split inside the missing-digit class: components are complementary masks.

    No correction digits are available (they could leave the digit set), so the
    schedule is snapped to positions where xi itself provides the nonzero
    terminal digit, and the cut positions carry a bounded run of trailing
    zeros instead of property P2 (the gcd window).
    """
    base, N = _check_targets([xi])
    lams = (as_lambda(lambda0), as_lambda(lambda1))
    for l in lams:
        if not exceeds_sum_threshold(l):
            raise DecompositionError(
                f"lambda must exceed {SUM_THRESHOLD}; got {lambda_str(l)}"
            )
    eps = epsilon
    if isinstance(epsilon, float):
        eps = Fraction(str(epsilon))
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(1, 5):
        raise DecompositionError("epsilon must lie in (0, 0.2]")
    digit_budget = N if digit_budget is None else min(digit_budget, N)
    sched = cantor_adjusted_schedule(xi, lams, W, eps, digit_budget)
    if sched.J < 3:
        raise DecompositionError("digit budget below 3 schedule intervals")
    blocks = _block_index(sched, N)
    owner = 1 - (blocks % 2)  # interior positions go to the other component
    for j in range(1, sched.J + 1):
        owner[sched.h(j) - 1] = j % 2  # terminal positions stay with the block owner
    x0_digits = np.where(owner == 0, xi.frac, 0).astype(np.uint8)
    x1_digits = np.where(owner == 1, xi.frac, 0).astype(np.uint8)
    comps = [DigitExpansion(base, 1, 0, x0_digits), DigitExpansion(base, 1, 0, x1_digits)]
    cuts = [CutSpec(u % 2, u, sched.h(u - 1)) for u in range(1, sched.J + 1)]
    dec = Decomposition("cantor", base, 2, comps, [xi], sched, cuts=cuts)
    dec.meta["owner"] = owner
    if not _is_prime(base):
        _gcd_repair(dec, xi)
    return dec


def _is_prime(b: int) -> bool:
    if b < 2:
        return False
    d = 2
    while d * d <= b:
        if b % d == 0:
            return False
        d += 1
    return True


def _gcd_repair(dec: Decomposition, xi: DigitExpansion) -> None:
    """Composite-base fix: swap single digits inside H windows until every cut's
    gcd with base**m fits under base**|H|.  Nonzero digits swapped between the
    two masks keep the sum exact and stay inside the digit set."""
    base, N = dec.base, dec.N
    sched = dec.schedule
    swaps = []
    for cut in sorted(dec.cuts, key=lambda c: c.m):
        j = cut.u - 1
        win = sched.windows.get(j)
        if not win or win[0] > win[1]:
            continue
        bound = base_pow(base, win[1] - win[0] + 1)
        for _ in range(win[1] - win[0] + 2):
            comp = dec.components[cut.comp]
            p = mpz(comp.int_part) * base_pow(base, cut.m) + digits_to_int(
                comp.frac[: cut.m], base
            )
            if p == 0 or _gcd(p, base_pow(base, cut.m)) <= bound:
                break
            pos = None
            for e in range(win[1], win[0] - 1, -1):
                if xi.digit_at(e) != 0 and e not in swaps:
                    pos = e
                    break
            if pos is None:
                dec.warnings.append(
                    f"gcd window violated at cut m={cut.m} and no swap position left"
                )
                break
            _swap_position(dec, pos, xi)
            swaps.append(pos)
    dec.meta["swaps"] = swaps


def _swap_position(dec: Decomposition, pos: int, xi: DigitExpansion) -> None:
    d = xi.digit_at(pos)
    a0 = np.array(dec.components[0].frac)
    a1 = np.array(dec.components[1].frac)
    if a0[pos - 1] == d and a1[pos - 1] == 0:
        a0[pos - 1], a1[pos - 1] = 0, d
        dec.meta["owner"][pos - 1] = 1
    else:
        a0[pos - 1], a1[pos - 1] = d, 0
        dec.meta["owner"][pos - 1] = 0
    dec.components[0] = DigitExpansion(dec.base, 1, 0, a0)
    dec.components[1] = DigitExpansion(dec.base, 1, 0, a1)


# ---------------------------------------------------------------------------
# input-class heuristic
# ---------------------------------------------------------------------------


@dataclass
class TReport:
    estimates: list            # (label, theta_b_hat)
    max_estimate: float
    tolerance: float
    consistent: bool


def check_T_membership(xis, depth: int | None = None, tol: float = 0.05) -> TReport:
    """Base-restricted exponent estimates for each input and pairwise difference.

    The constructions for base-restricted targets assume every such estimate is
    1 (no long 0/(b-1) runs); this is a finite-depth heuristic, not a proof.
    """
    if not xis:
        raise DecompositionError("need at least one input")
    base, N = _check_targets(xis)
    depth = N if depth is None else min(depth, N)
    ests = []
    for i, x in enumerate(xis):
        e = estimate_theta_b(x.with_length(depth))
        ests.append((f"xi_{i+1}", 1.0 if e.theta_b_hat is None else e.theta_b_hat))
    for i in range(len(xis)):
        for t in range(i + 1, len(xis)):
            d = sub(xis[i], xis[t]).fractional_part().with_length(depth)
            if d.is_zero():
                ests.append((f"xi_{i+1}-xi_{t+1}", math.inf))
                continue
            e = estimate_theta_b(d)
            ests.append(
                (f"xi_{i+1}-xi_{t+1}", 1.0 if e.theta_b_hat is None else e.theta_b_hat)
            )
    mx = max(v for _, v in ests)
    return TReport(ests, mx, tol, mx <= 1.0 + tol)


# ---------------------------------------------------------------------------
# designed-cut measurement
# ---------------------------------------------------------------------------


def measure_cut(dec: Decomposition, cut: CutSpec) -> MeasuredCut:
    base, N = dec.base, dec.N
    comp = dec.components[cut.comp]
    v = comp.scaled_int()
    q2 = base_pow(base, N - cut.m)
    p = int((2 * v + q2) // (2 * q2))
    err = v - p * q2
    lb = math.log2(base)
    if err == 0:
        err_log2, tau = -math.inf, None
    else:
        err_log2 = flog2(abs(err)) - N * lb
        tau = -err_log2 / (cut.m * lb)
    if p == 0:
        z, gl2, tau_red = None, 0.0, None
    else:
        ap = mpz(abs(p))
        z = 0
        while ap % base == 0:
            ap //= base
            z += 1
        g = _gcd(mpz(abs(p)), base_pow(base, cut.m))
        gl2 = flog2(g) if g > 1 else 0.0
        denom_bits = cut.m * lb - gl2
        tau_red = (-err_log2 / denom_bits) if (err != 0 and denom_bits > 0) else None
    cut_digit = comp.digit_at(cut.m) if (comp.sign > 0 and cut.m >= 1) else None
    return MeasuredCut(cut.comp, cut.u, cut.m, p, int(err), err_log2, tau, tau_red,
                       z, gl2, cut_digit)


def measure_all_cuts(dec: Decomposition) -> list:
    return [measure_cut(dec, c) for c in dec.cuts]


# ---------------------------------------------------------------------------
# certificate serialization
# ---------------------------------------------------------------------------


def certificate_text(dec: Decomposition, component_files, target_files) -> str:
    lines = ["diosplit-certificate v1"]
    lines.append(f"mode={dec.mode}")
    lines.append(f"base={dec.base}")
    lines.append(f"n={dec.n}")
    if dec.meta.get("jitter"):
        lines.append("jitter=1")
    if dec.schedule.kind == "cantor_adjusted":
        lines.append(f"epsilon={dec.schedule.epsilon}")
        lines.append("W=" + ",".join(str(w) for w in sorted(dec.schedule.W)))
    for i, f in enumerate(component_files):
        lines.append(f"component {i} file={f}")
    for i, f in enumerate(target_files):
        lines.append(f"target {i} file={f}")
    for k, v in dec.attestations.items():
        lines.append(f"attest {k}={v}")
    for w in dec.warnings:
        lines.append(f"warning {w}")
    lines.append(dec.schedule.serialize().rstrip("\n"))
    lines.append("endschedule")
    for j in sorted(dec.corrections):
        lines.append(f"correction {j} {dec.corrections[j]}")
    for c in dec.cuts:
        lines.append(f"cut {c.comp} {c.u} {c.m}")
    if dec.schedule.kind == "cantor_adjusted":
        for j in sorted(dec.schedule.windows):
            lo, hi = dec.schedule.windows[j]
            e = dec.schedule.e_positions.get(j, "-")
            lines.append(f"window {j} {lo} {hi} e={e}")
        for s in dec.meta.get("swaps", []):
            lines.append(f"swap {s}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> dict:
    """Parse the certificate into a dict of fields (files are not loaded here)."""
    fields = {
        "components": {}, "targets": {}, "attest": {}, "warnings": [],
        "corrections": {}, "cuts": [], "schedule_rows": [], "windows": {},
        "swaps": [], "jitter": False,
    }
    lines = text.splitlines()
    if not lines or lines[0] != "diosplit-certificate v1":
        raise DecompositionError("not a diosplit certificate")
    in_schedule = False
    for ln in lines[1:]:
        if not ln or ln == "end":
            continue
        if ln.startswith("schedule "):
            in_schedule = True
            head = dict(kv.split("=", 1) for kv in ln[len("schedule "):].split())
            fields["schedule_head"] = head
            continue
        if ln == "endschedule":
            in_schedule = False
            continue
        if in_schedule:
            j, g, h, r = ln.split()
            fields["schedule_rows"].append((int(j), int(g), int(h), int(r)))
            continue
        if " " not in ln:
            k, _, v = ln.partition("=")
            fields[k] = v
            continue
        key, _, rest = ln.partition(" ")
        if key == "component":
            i, f = rest.split(" file=")
            fields["components"][int(i)] = f
        elif key == "target":
            i, f = rest.split(" file=")
            fields["targets"][int(i)] = f
        elif key == "attest":
            k, _, v = rest.partition("=")
            fields["attest"][k] = v
        elif key == "warning":
            fields["warnings"].append(rest)
        elif key == "correction":
            j, a = rest.split()
            fields["corrections"][int(j)] = int(a)
        elif key == "cut":
            c, u, m = rest.split()
            fields["cuts"].append(CutSpec(int(c), int(u), int(m)))
        elif key == "window":
            j, lo, hi, e = rest.split()
            fields["windows"][int(j)] = (int(lo), int(hi), e.removeprefix("e="))
        elif key == "swap":
            fields["swaps"].append(int(rest))
        else:
            raise DecompositionError(f"unknown certificate line: {ln}")
    fields["jitter"] = fields.get("jitter") in (True, "1")
    return fields


def load_decomposition(cert_path) -> Decomposition:
    """Rebuild a Decomposition from a certificate file plus its digit files."""
    import os

    from .digits import read_digit_file
    from .schedule import Interval

    with open(cert_path, "r", encoding="ascii") as fh:
        fields = parse_certificate(fh.read())
    head = fields["schedule_head"]
    lams = tuple(as_lambda(s) for s in head["lambdas"].split(","))
    intervals = [Interval(j, g, h, r) for j, g, h, r in fields["schedule_rows"]]
    eps = Fraction(fields["epsilon"]) if "epsilon" in fields else None
    W = (
        frozenset(int(w) for w in fields["W"].split(","))
        if "W" in fields and isinstance(fields["W"], str)
        else None
    )
    e_pos, wins = {}, {}
    for j, (lo, hi, e) in fields["windows"].items():
        wins[j] = (lo, hi)
        if e != "-":
            e_pos[j] = int(e)
    sched = IntervalSchedule(
        head["kind"], int(head["n"]), lams, intervals,
        epsilon=eps, W=W, e_positions=e_pos, windows=wins,
    )
    root = os.path.dirname(os.fspath(cert_path))
    comps = [
        read_digit_file(os.path.join(root, fields["components"][i]))
        for i in sorted(fields["components"])
    ]
    targets = [
        read_digit_file(os.path.join(root, fields["targets"][i]))
        for i in sorted(fields["targets"])
    ]
    dec = Decomposition(
        fields["mode"], int(fields["base"]), int(fields["n"]), comps, targets,
        sched, corrections=fields["corrections"], cuts=fields["cuts"],
        attestations=fields["attest"], warnings=list(fields["warnings"]),
    )
    if fields["jitter"]:
        dec.meta["jitter"] = True
    if fields["swaps"]:
        dec.meta["swaps"] = fields["swaps"]
    return dec
