import math
from fractions import Fraction

import numpy as np
import pytest

from diosplit import decompose as D
from diosplit.digits import (
    DigitExpansion,
    add,
    expansion,
    random_expansion,
    sub,
)
from diosplit.gen import gap_series_expansion, sqrt_expansion
from diosplit.schedule import ScheduleError


def mask_positions(x):
    return set((np.flatnonzero(x.frac) + 1).tolist())


# -- erdos ------------------------------------------------------------------


def test_erdos_120_nines_masks():
    xi = DigitExpansion(10, 1, 0, np.full(120, 9, dtype=np.uint8))
    dec = D.erdos_split(xi, 4)
    x, y = dec.components
    # position 120 = 5! opens the next odd block and lands in y
    assert mask_positions(x) == set(range(2, 6)) | set(range(24, 120))
    assert mask_positions(y) == {1} | set(range(6, 24)) | {120}
    assert add(x, y) == xi


def test_erdos_zero_input_degenerate():
    xi = DigitExpansion(10, 1, 0, np.zeros(120, dtype=np.uint8))
    dec = D.erdos_split(xi, 4)
    assert dec.components[0].is_zero() and dec.components[1].is_zero()
    assert len(dec.warnings) == 2


def test_erdos_needs_digits():
    xi = random_expansion(10, 100, 0)
    with pytest.raises(D.DecompositionError):
        D.erdos_split(xi, 4)  # needs 5! = 120 digits


def test_erdos_explicit_bound_exact_rational_oracle():
    # |x - p_j/q_j| <= 10**(-(b_{j+1} - b_j) + 1), checked by exact Fractions
    xi = random_expansion(10, 5040, 11)
    dec = D.erdos_split(xi, 6)
    for mc in D.measure_all_cuts(dec):
        comp = dec.components[mc.comp]
        q = Fraction(10) ** mc.m
        err = abs(comp.value_fraction() - Fraction(mc.p, int(q)))
        gap = math.factorial(mc.u + 1) - math.factorial(mc.u)
        assert err <= Fraction(10) ** (-(gap) + 1)


# -- liouville n-split -------------------------------------------------------


def test_liouville_n2_is_complement_mask():
    xi = random_expansion(10, 720, 3)
    dec = D.liouville_nsplit([xi], 5)
    x0, x1 = dec.components
    assert add(x0, x1) == xi
    blocks_odd = set()
    for j in (1, 3, 5):
        blocks_odd |= set(range(math.factorial(j), math.factorial(j + 1)))
    assert mask_positions(x0) <= blocks_odd
    assert not (mask_positions(x1) & mask_positions(x0))


def test_liouville_n3_exact_identities_and_trace():
    xis = [random_expansion(10, 720, s) for s in (1, 2)]
    dec = D.liouville_nsplit(xis, 5)
    x0 = dec.components[0]
    for i, xi in enumerate(xis, start=1):
        assert add(x0, dec.components[i]) == xi
    # equal inputs differ exactly on the union of blocks j = 1, 2 (mod 3)
    same = [random_expansion(10, 720, 9), random_expansion(10, 720, 9)]
    dec2 = D.liouville_nsplit(same, 5)
    d = sub(dec2.components[1], dec2.components[2])
    assert d.is_zero()


def test_liouville_designed_taus_deepen():
    xis = [random_expansion(10, 5040, s) for s in (4, 5)]
    dec = D.liouville_nsplit(xis, 6)
    per_comp = {}
    for mc in D.measure_all_cuts(dec):
        per_comp.setdefault(mc.comp, []).append(mc.tau)
    for comp, taus in per_comp.items():
        assert taus == sorted(taus)
        assert taus[-1] > 4.0


# -- exponent n-split --------------------------------------------------------


def test_exponent_66_schedule_and_designed_taus():
    xi = sqrt_expansion(2, 5, 20000)
    dec = D.exponent_nsplit([xi], [6, 6], digit_budget=20000)
    assert [iv.h for iv in dec.schedule.intervals] == [2, 12, 72, 432, 2592, 15552]
    for mc in D.measure_all_cuts(dec):
        if mc.u >= 3:
            assert abs(mc.tau - 6.0) < 0.1


def test_exponent_collision_rule():
    # a_j = 1 unless the digit it lands against is 1, then a_j = 2
    xi = DigitExpansion(5, 1, 0, np.full(500, 1, dtype=np.uint8))
    dec = D.exponent_nsplit([xi], [6, 6], digit_budget=500)
    assert set(dec.corrections.values()) == {2}
    xi2 = DigitExpansion(5, 1, 0, np.full(500, 3, dtype=np.uint8))
    dec2 = D.exponent_nsplit([xi2], [6, 6], digit_budget=500)
    assert set(dec2.corrections.values()) == {1}


def test_exponent_collision_rule_difference_blocks():
    # middle residue classes collide against the digit of the pairwise
    # difference: forbidden = (d_t - d_{t+1}) mod base
    base, n = 5, 3
    xis = [random_expansion(base, 4000, s) for s in (21, 22)]
    dec = D.exponent_nsplit(xis, [6, 7, 8], digit_budget=4000)
    for j, a in dec.corrections.items():
        t = j % n
        h = dec.schedule.h(j)
        if t == 0:
            f = xis[0].digit_at(h)
        elif t == n - 1:
            f = xis[n - 2].digit_at(h)
        else:
            f = (xis[t - 1].digit_at(h) - xis[t].digit_at(h)) % base
        assert a != f and a in (1, 2)


def test_exponent_identities_n3():
    xis = [sqrt_expansion(d, 5, 3000) for d in (2, 3)]
    dec = D.exponent_nsplit(xis, [6, 7, 8], digit_budget=3000)
    for i, xi in enumerate(xis, start=1):
        assert add(dec.components[0], dec.components[i]) == xi


def test_exponent_happ_warning():
    xi = sqrt_expansion(2, 5, 1000)
    dec = D.exponent_nsplit([xi], [6, 6], mus=[7, 7], digit_budget=1000)
    # nu = 36/5 + 1 = 8.2 > 7, so the window cannot hold
    assert any("8.2" in w or "41/5" in w for w in dec.warnings)


def test_exponent_rejects_small_lambda():
    xi = sqrt_expansion(2, 5, 1000)
    with pytest.raises(D.DecompositionError):
        D.exponent_nsplit([xi], [1.5, 6], digit_budget=1000)


# -- sum split ---------------------------------------------------------------


def test_sum_threshold_gate_exact():
    xi = sqrt_expansion(2, 5, 2000)
    with pytest.raises(D.DecompositionError) as ei:
        D.sum_split(xi, 4, 5, 2000)
    assert "(5+sqrt(17))/2" in str(ei.value)
    with pytest.raises(D.DecompositionError):
        D.sum_split(xi, 5, Fraction(45615, 10000), 2000)
    D.sum_split(xi, 5, Fraction(45616, 10000), 2000)  # just above the root


def test_sum_split_structure():
    xi = sqrt_expansion(7, 5, 4000)
    dec = D.sum_split(xi, 5, 5, 4000)
    x0, x1 = dec.components
    assert add(x0, x1) == xi
    sch = dec.schedule
    for j in range(1, sch.J + 1):
        comp = dec.components[j % 2]
        g, h = sch.g(j), sch.h(j)
        assert not comp.frac[g - 1 : h - 1].any()
        assert comp.frac[h - 1] == dec.corrections[j]
    assert "input_mu_hat" in dec.attestations


def test_sum_split_vwa_warning():
    # a gap-series input is very well approximable; the tool warns
    xi = gap_series_expansion(5, 5041)
    dec = D.sum_split(xi, 5, 5, 5041)
    assert any("very well approximable" in w for w in dec.warnings)
    # a trusted-scale rational input warns too
    xi2 = gap_series_expansion(5, 2600)
    dec2 = D.sum_split(xi2, 5, 5, 2520)
    assert any("very well approximable" in w for w in dec2.warnings)


def test_contradiction_bounds_at_5_5():
    from diosplit.verify import modif_bound, modif2_bound

    assert modif_bound(5, 5) == Fraction(20, 9)
    assert modif2_bound(5) == Fraction(20, 9)
    assert Fraction(20, 9) > 2


# -- cantor ------------------------------------------------------------------


def test_cantor_all_twos_alternating_blocks():
    xi = DigitExpansion(3, 1, 0, np.full(2000, 2, dtype=np.uint8))
    dec = D.cantor_sum_split(xi, 5, 5, {0, 2}, Fraction(1, 10), 2000)
    x0, x1 = dec.components
    assert add(x0, x1) == xi
    sch = dec.schedule
    for j in range(1, sch.J + 1):
        g, h = sch.g(j), sch.h(j)
        carrier = dec.components[1 - (j % 2)]
        other = dec.components[j % 2]
        assert (carrier.frac[g - 1 : h - 1] == 2).all()
        assert other.frac[g - 1 : h - 1].max(initial=0) == 0
        # terminal digit goes to the block-residue component
        assert other.frac[h - 1] == 2 and carrier.frac[h - 1] == 0


def test_cantor_components_stay_in_W(rng):
    for seed in range(3):
        xi = random_expansion(3, 5000, seed, [0, 2])
        dec = D.cantor_sum_split(xi, 5, 5, {0, 2}, Fraction(1, 10), 5000)
        for comp in dec.components:
            assert set(np.unique(comp.frac)) <= {0, 2}
        s = dec.components[0].frac.astype(int) + dec.components[1].frac.astype(int)
        assert s.max() < 3
        assert add(*dec.components) == xi


def test_cantor_gcd_window_bound():
    xi = random_expansion(3, 20000, 5, [0, 2])
    dec = D.cantor_sum_split(xi, 5, 5, {0, 2}, Fraction(1, 10), 20000)
    for mc in D.measure_all_cuts(dec):
        win = dec.schedule.windows.get(mc.u - 1)
        if win and win[0] <= win[1]:
            assert mc.z_trailing <= win[1] - win[0] + 1
            assert mc.z_trailing <= math.floor(0.1 * mc.m)


def test_cantor_epsilon_domain():
    xi = random_expansion(3, 1000, 1, [0, 2])
    with pytest.raises(D.DecompositionError):
        D.cantor_sum_split(xi, 5, 5, {0, 2}, Fraction(1, 4), 1000)


def test_gcd_repair_composite_base():
    # base 4 is composite: the repair pass must keep every cut's gcd within the
    # window bound while preserving the exact carry-free sum
    xi = random_expansion(4, 8000, 17, [0, 1, 3])
    dec = D.cantor_sum_split(xi, 5, 5, {0, 1, 3}, Fraction(1, 10), 8000)
    assert add(*dec.components) == xi
    from gmpy2 import gcd as g_, mpz

    for mc in D.measure_all_cuts(dec):
        win = dec.schedule.windows.get(mc.u - 1)
        if win and win[0] <= win[1]:
            bound = mpz(4) ** (win[1] - win[0] + 1)
            assert g_(mpz(abs(mc.p)), mpz(4) ** mc.m) <= bound


# -- T membership ------------------------------------------------------------


def test_t_membership_random_consistent():
    xis = [random_expansion(5, 30000, s) for s in (31, 32)]
    rep = D.check_T_membership(xis)
    assert rep.consistent and rep.max_estimate <= 1.01


def test_t_membership_planted_run_flagged():
    base = 5
    x1 = random_expansion(base, 5000, 41)
    x2 = add(x1, gap_series_expansion(base, 5000))
    if x2.int_part:  # keep both in [0,1)
        x2 = DigitExpansion(base, 1, 0, x2.frac)
    rep = D.check_T_membership([x1, x2])
    assert not rep.consistent
    assert rep.max_estimate > 1.5


def test_t_membership_single_input():
    rep = D.check_T_membership([random_expansion(5, 2000, 1)])
    assert len(rep.estimates) == 1


# -- base-restricted ---------------------------------------------------------


def test_base_restricted_refuses_base2():
    xi = random_expansion(2, 1000, 1)
    with pytest.raises(D.DecompositionError):
        D.base_restricted_nsplit([xi], [4, 7])


def test_base_restricted_lambda_one():
    xi = random_expansion(10, 2000, 3)
    dec = D.base_restricted_nsplit([xi], [1, 1], digit_budget=2000)
    # schedule ratios tend to 1: singleton intervals
    ratios = [iv.h / iv.g for iv in dec.schedule.intervals[1:]]
    assert max(ratios) == 1.0


def test_base_restricted_warns_on_bad_inputs():
    xi = gap_series_expansion(10, 3000)
    dec = D.base_restricted_nsplit([xi], [4, 7], digit_budget=3000)
    assert any("inconsistent" in w for w in dec.warnings)


# -- certificates ------------------------------------------------------------


def test_certificate_roundtrip(tmp_path):
    from diosplit.digits import write_digit_file

    xi = sqrt_expansion(3, 5, 3000)
    dec = D.sum_split(xi, 5, 5, 3000)
    comp_files, target_files = [], []
    for i, comp in enumerate(dec.components):
        write_digit_file(comp, tmp_path / f"x{i}.dig")
        comp_files.append(f"x{i}.dig")
    for i, t in enumerate(dec.targets):
        write_digit_file(t, tmp_path / f"t{i}.dig")
        target_files.append(f"t{i}.dig")
    cert = D.certificate_text(dec, comp_files, target_files)
    (tmp_path / "cert.txt").write_text(cert)
    dec2 = D.load_decomposition(tmp_path / "cert.txt")
    assert dec2.mode == dec.mode and dec2.base == dec.base and dec2.n == dec.n
    assert dec2.corrections == dec.corrections
    assert dec2.cuts == dec.cuts
    assert [iv.h for iv in dec2.schedule.intervals] == [iv.h for iv in dec.schedule.intervals]
    assert all(a == b for a, b in zip(dec2.components, dec.components))
    assert dec2.targets[0] == xi


def test_zero_tail_detector():
    from diosplit.schedule import build_schedule

    sched = build_schedule([5, 5], 1000)
    frac = np.zeros(1000, dtype=np.uint8)
    frac[: sched.g(sched.J - 1) - 1] = 3
    comp = DigitExpansion(5, 1, 0, frac)
    assert D._zero_tail(comp, sched)
    frac2 = frac.copy()
    frac2[-1] = 1
    assert not D._zero_tail(DigitExpansion(5, 1, 0, frac2), sched)
