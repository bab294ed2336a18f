"""Digit-position interval partitions that drive the split constructions.

A schedule partitions {1, ..., h_J} into intervals I_j = {g_j, ..., h_j}.
For the geometric kind the right endpoints follow h_j = ceil(lambda_i * h_{j-1})
with i the residue class of j modulo the number of components; the factorial
kind uses the boundaries j!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .digits import DigitExpansion

INF = math.inf

SUM_THRESHOLD = "(5+sqrt(17))/2 = 4.5615528128..."


class ScheduleError(ValueError):
    pass


def as_lambda(v):
    """Parse an exponent target: Fraction, int, float, 'inf', or math.inf."""
    if v in (INF, "inf", "oo"):
        return INF
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        if math.isinf(v):
            return INF
        return Fraction(str(v))
    return Fraction(v)


def lambda_str(lam) -> str:
    if lam == INF:
        return "inf"
    lam = Fraction(lam)
    return str(lam.numerator) if lam.denominator == 1 else f"{lam.numerator}/{lam.denominator}"


def ceil_mul(lam: Fraction, h: int) -> int:
    """ceil(lam * h) exactly."""
    return int(-((-lam.numerator * h) // lam.denominator))


def exceeds_sum_threshold(lam) -> bool:
    """Exact check lam > (5+sqrt(17))/2, the larger root of x^2 - 5x + 2."""
    lam = as_lambda(lam)
    if lam == INF:
        return True
    return lam * lam - 5 * lam + 2 > 0 and 2 * lam > 5


@dataclass(frozen=True)
class Interval:
    j: int
    g: int
    h: int
    residue: int


@dataclass
class IntervalSchedule:
    kind: str                      # "exponent" | "factorial" | "cantor_adjusted"
    n: int
    lambdas: tuple
    intervals: list[Interval]      # ascending j
    epsilon: Fraction | None = None
    W: frozenset | None = None
    e_positions: dict = field(default_factory=dict)   # j -> e_j (cantor kind)
    windows: dict = field(default_factory=dict)       # j -> (lo, hi) of H_j

    @property
    def J(self) -> int:
        return self.intervals[-1].j

    @property
    def first_j(self) -> int:
        return self.intervals[0].j

    def interval(self, j: int) -> Interval:
        iv = self.intervals[j - self.first_j]
        assert iv.j == j
        return iv

    def g(self, j: int) -> int:
        return self.interval(j).g

    def h(self, j: int) -> int:
        return self.interval(j).h

    def residue(self, j: int) -> int:
        return self.interval(j).residue

    def last_position(self) -> int:
        return self.intervals[-1].h

    def block_bounds(self):
        """h endpoints as a list aligned with self.intervals (for searchsorted)."""
        return [iv.h for iv in self.intervals]

    def serialize(self) -> str:
        lams = ",".join(lambda_str(l) for l in self.lambdas)
        lines = [f"schedule kind={self.kind} n={self.n} lambdas={lams}"]
        if self.kind == "cantor_adjusted":
            lines[0] += f" epsilon={self.epsilon}"
        for iv in self.intervals:
            lines.append(f"{iv.j} {iv.g} {iv.h} {iv.residue}")
        return "\n".join(lines) + "\n"


def build_schedule(lambdas, digit_budget: int, h0: int = 2) -> IntervalSchedule:
    """Geometric schedule from I_0 = {1, .., h0} up to the digit budget.

    For a finite target the rule is h_j = ceil(lambda_i * h_{j-1}); the
    divergent marker 'inf' uses h_j = j * h_{j-1} so that h_j / g_j grows
    without bound.  Both are floored at h_{j-1} + 1 so intervals stay nonempty.
    """
    lams = tuple(as_lambda(l) for l in lambdas)
    n = len(lams)
    if n < 1:
        raise ScheduleError("need at least one exponent target")
    for l in lams:
        if l != INF and l < 1:
            raise ScheduleError(f"exponent target {l} < 1")
    if digit_budget < 3:
        raise ScheduleError("digit budget too small (need >= 3)")
    intervals = [Interval(0, 1, h0, 0)]
    h_prev = h0
    j = 1
    while True:
        lam = lams[j % n]
        hj = j * h_prev if lam == INF else ceil_mul(lam, h_prev)
        hj = max(hj, h_prev + 1)
        if hj > digit_budget:
            break
        intervals.append(Interval(j, h_prev + 1, hj, j % n))
        h_prev = hj
        j += 1
    if len(intervals) < 2:
        raise ScheduleError("digit budget admits no interval beyond I_0")
    return IntervalSchedule("exponent", n, lams, intervals)


def factorial_boundary(j: int) -> int:
    return math.factorial(j)


def factorial_schedule(J: int, digit_budget: int | None = None) -> IntervalSchedule:
    """Blocks I_j = {j!, ..., (j+1)! - 1} for j = 1..J."""
    if J < 2:
        raise ScheduleError("factorial schedule needs J >= 2")
    if digit_budget is not None and factorial_boundary(J + 1) - 1 > digit_budget:
        raise ScheduleError(
            f"factorial schedule J={J} reaches position {factorial_boundary(J+1)-1} "
            f"beyond the digit budget {digit_budget}"
        )
    intervals = [
        Interval(j, factorial_boundary(j), factorial_boundary(j + 1) - 1, j)
        for j in range(1, J + 1)
    ]
    return IntervalSchedule("factorial", J + 1, (INF,), intervals)


def cantor_adjusted_schedule(
    xi: DigitExpansion,
    lambdas,
    W,
    epsilon,
    digit_budget: int,
) -> IntervalSchedule:
    """Geometric schedule snapped to positions where xi has a digit in W\\{0}.

    h_j is the largest position <= ceil(lambda_i * h_{j-1}) whose digit lies in
    W\\{0} and whose window H_j = [ceil(h_j(1-eps)), h_j - 1] contains a nonzero
    digit of xi whenever that window is nonempty.  e_j records the nonzero
    position closest below h_j inside H_j.
    """
    lams = tuple(as_lambda(l) for l in lambdas)
    n = len(lams)
    W = frozenset(int(w) for w in W)
    if 0 not in W:
        raise ScheduleError("digit set W must contain 0")
    if any(w < 0 or w >= xi.base for w in W):
        raise ScheduleError("digit set W outside base range")
    present = {int(v) for v in np.unique(xi.frac)}
    if not present <= W:
        raise ScheduleError(f"xi has digits outside W: {sorted(present - W)}")
    eps = Fraction(epsilon) if not isinstance(epsilon, float) else Fraction(str(epsilon))
    if not 0 < eps < 1:
        raise ScheduleError("epsilon must lie in (0,1)")
    for l in lams:
        if not exceeds_sum_threshold(l):
            raise ScheduleError(f"exponent target must exceed {SUM_THRESHOLD}")
    budget = min(digit_budget, xi.N)
    Wplus = W - {0}

    def win_lo(h: int, g: int) -> int:
        # ceil(h * (1 - eps)), clipped into the interval
        lo = ceil_mul(1 - eps, h)
        return max(lo, g)

    def find_h(g: int, cand: int):
        for h in range(cand, g - 1, -1):
            if xi.digit_at(h) not in Wplus:
                continue
            lo = win_lo(h, g)
            if lo > h - 1:
                return h, None, (lo, h - 1)
            e = None
            for pos in range(h - 1, lo - 1, -1):
                if xi.digit_at(pos) != 0:
                    e = pos
                    break
            if e is None:
                continue
            return h, e, (lo, h - 1)
        return None

    intervals = [Interval(0, 1, 2, 0)]
    e_positions: dict[int, int] = {}
    windows: dict[int, tuple[int, int]] = {}
    h_prev = 2
    j = 1
    while True:
        lam = lams[j % n]
        cand = j * h_prev if lam == INF else ceil_mul(lam, h_prev)
        cand = max(cand, h_prev + 1)
        if cand > budget:
            break
        hit = find_h(h_prev + 1, cand)
        if hit is None:
            raise ScheduleError(
                f"no position in [{h_prev+1}, {cand}] has a digit in W\\{{0}} with a "
                f"nonzero digit in its window; xi appears to carry a long zero run "
                f"at this scale (inconsistent with a base-restricted exponent of 1)"
            )
        hj, ej, win = hit
        intervals.append(Interval(j, h_prev + 1, hj, j % n))
        if ej is not None:
            e_positions[j] = ej
        windows[j] = win
        h_prev = hj
        j += 1
    if len(intervals) < 2:
        raise ScheduleError("digit budget admits no interval beyond I_0")
    return IntervalSchedule(
        "cantor_adjusted", n, lams, intervals, epsilon=eps, W=W,
        e_positions=e_positions, windows=windows,
    )
