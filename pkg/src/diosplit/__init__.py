"""diosplit: split exact digit expansions into parts with prescribed
irrationality exponents, and certify the constructions with continued-fraction
evidence."""

from .digits import (
    DigitExpansion,
    Rational,
    add,
    from_rational,
    random_expansion,
    read_digit_file,
    run_scan,
    sub,
    to_rational_truncation,
    write_digit_file,
)
from .schedule import IntervalSchedule, build_schedule, cantor_adjusted_schedule, factorial_schedule
from .contfrac import (
    ContinuedFraction,
    ExponentEstimate,
    cf_of_rational,
    estimate_theta_b,
    kp_bounds_check,
    legendre_filter,
    tau_sequence,
)
from .decompose import (
    Decomposition,
    base_restricted_nsplit,
    cantor_sum_split,
    check_T_membership,
    erdos_split,
    exponent_nsplit,
    liouville_nsplit,
    sum_split,
)
from .verify import Tolerances, VerificationReport, bound_evaluator, verify
from .boxdim import GridCount, cantor_grid, count_cantor, count_sampled, estimate_dim

__version__ = "0.1.0"
