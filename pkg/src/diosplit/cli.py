"""Command-line surface: construct, verify, analyze, and report.

Commands: split, verify, cf, est, formulas, boxdim, gen.  Long-form flags
only; every random choice flows from --seed.  Exit codes: 0 ok, 1 a mandatory
verification check failed, 2 usage or precondition error (the message names
the violated inequality).  DIOPH_THREADS caps internal parallelism and
DIOPH_PURE=1 selects the pure fallback kernels.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import boxdim as B
from . import decompose as D
from . import gen as G
from .contfrac import estimate_theta_b, tau_sequence
from .verify import (
    Tolerances,
    cantor_dim,
    complement_bound,
    happ_bound,
    holdja_bounds,
    jarnik_dim,
    modif2_bound,
    modif_bound,
    product_lower,
    product_upper,
    verify as run_verify,
    vsets_dim,
)
from .digits import random_expansion, read_digit_file, write_digit_file
from .schedule import INF, as_lambda


class UsageError(ValueError):
    pass


def _parse_digit_set(s: str):
    return [int(v) for v in s.split(",") if v != ""]


def _read_inputs(paths):
    return [read_digit_file(p) for p in paths]


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator} {float(v):.12g}"
    if v == INF:
        return "inf inf"
    if isinstance(v, float):
        return f"{v:.12g} {v:.12g}"
    return f"{v} {float(v):.12g}"


def cmd_split(args) -> int:
    xis = _read_inputs(args.input)
    lams = args.lambdas or []
    mode = args.mode
    if mode == "erdos":
        dec = D.erdos_split(xis[0], args.blocks)
    elif mode == "liouville-n":
        dec = D.liouville_nsplit(xis, args.blocks)
    elif mode == "exponent-n":
        dec = D.exponent_nsplit(xis, lams, mus=args.mus or None,
                                digit_budget=args.budget)
    elif mode == "base-restricted":
        dec = D.base_restricted_nsplit(xis, lams, digit_budget=args.budget)
    elif mode == "sum":
        if len(lams) != 2:
            raise UsageError("sum mode needs exactly two --lambda values")
        dec = D.sum_split(xis[0], lams[0], lams[1], digit_budget=args.budget,
                          attestation=args.attest)
    elif mode == "cantor":
        if len(lams) != 2:
            raise UsageError("cantor mode needs exactly two --lambda values")
        if not args.digits:
            raise UsageError("cantor mode needs --digits")
        dec = D.cantor_sum_split(xis[0], lams[0], lams[1],
                                 _parse_digit_set(args.digits), args.epsilon,
                                 digit_budget=args.budget)
    else:
        raise UsageError(f"unknown mode {mode}")
    os.makedirs(args.out, exist_ok=True)
    comp_files, target_files = [], []
    for i, comp in enumerate(dec.components):
        name = f"x{i}.dig"
        write_digit_file(comp, os.path.join(args.out, name))
        comp_files.append(name)
    for i, t in enumerate(dec.targets):
        name = f"t{i}.dig"
        write_digit_file(t, os.path.join(args.out, name))
        target_files.append(name)
    cert = D.certificate_text(dec, comp_files, target_files)
    with open(os.path.join(args.out, "cert.txt"), "w", encoding="ascii") as fh:
        fh.write(cert)
    measured = D.measure_all_cuts(dec)
    print(f"mode={dec.mode} base={dec.base} n={dec.n} N={dec.N} "
          f"intervals={dec.schedule.J}")
    for mc in measured:
        tau = "exact" if mc.tau is None else f"{mc.tau:.4f}"
        print(f"cut component={mc.comp} u={mc.u} m={mc.m} tau={tau}")
    for w in dec.warnings:
        print(f"warning: {w}")
    print(f"wrote {len(comp_files)} components + certificate to {args.out}")
    return 0


def cmd_verify(args) -> int:
    dec = D.load_decomposition(args.cert)
    tol = Tolerances()
    if args.tol_window is not None:
        tol.exponent_window = args.tol_window
    if args.trust is not None:
        tol.trust = args.trust
    scan = {"auto": "auto", "on": True, "off": False}[args.cf_scan]
    rep = run_verify(dec, tolerances=tol, cf_scan=scan)
    sys.stdout.write(rep.to_text())
    return rep.exit_code()


def cmd_cf(args) -> int:
    x = read_digit_file(args.input[0])
    est = tau_sequence(x, trust_exponent=args.trust)
    sys.stdout.write(est.report())
    return 0


def cmd_est(args) -> int:
    xs = _read_inputs(args.input)
    for path, x in zip(args.input, xs):
        est = estimate_theta_b(x, trust_exponent=args.trust)
        theta = "nan" if est.theta_b_hat is None else f"{est.theta_b_hat:.6f}"
        flag = f" flag={est.flag}" if est.flag else ""
        print(f"{path} theta_b_hat={theta} runs={len(est.candidates)}{flag}")
    if args.pairwise:
        rep = D.check_T_membership(xs, depth=args.depth)
        for label, v in rep.estimates:
            print(f"pairwise {label} theta_b_hat={v:.6f}")
        verdict = "consistent" if rep.consistent else "inconsistent"
        print(f"pairwise max={rep.max_estimate:.6f} tolerance={rep.tolerance} "
              f"verdict={verdict}")
    return 0


def cmd_formulas(args) -> int:
    q = args.query
    lams = args.lambdas or []
    if q == "jarnik":
        vals = [("jarnik", jarnik_dim(lams[0], lams[1] if len(lams) > 1 else None))]
    elif q == "vsets":
        vals = [("vsets", vsets_dim(lams[0], lams[1] if len(lams) > 1 else None))]
    elif q == "cantor":
        vals = [("cantor", cantor_dim(args.base, _parse_digit_set(args.digits)))]
    elif q == "product-upper":
        vals = [("product-upper", product_upper(lams, restricted=args.restricted))]
    elif q == "product-lower":
        vals = [("product-lower", product_lower(lams, restricted=args.restricted))]
    elif q == "complement":
        vals = [("complement", complement_bound(*lams))]
    elif q == "happ-bound":
        vals = [(f"happ-bound[{i}]", v) for i, v in enumerate(happ_bound(lams))]
    elif q == "modif":
        vals = [("modif", modif_bound(lams[0], lams[1]))]
    elif q == "modif2":
        vals = [("modif2", modif2_bound(lams[0]))]
    elif q == "holdja":
        d = holdja_bounds(lams)
        vals = [("holdja-lower", d["lower"]), ("holdja-upper", d["upper"])]
        print(f"holdja status={d['status']}")
    else:
        raise UsageError(f"unknown query {q!r}")
    for name, v in vals:
        print(f"{name} {_fmt_value(v)}")
    return 0


def cmd_boxdim(args) -> int:
    if args.what != "cantor":
        raise UsageError("only 'cantor' grids are supported")
    lo, _, hi = args.depths.partition(":")
    depths = range(int(lo), int(hi) + 1)
    gc = B.cantor_grid(args.base, _parse_digit_set(args.digits), depths,
                       product=args.product)
    sys.stdout.write(gc.rows())
    slope = B.estimate_dim(gc)
    ref = B.cantor_dim_reference(args.base, _parse_digit_set(args.digits),
                                 args.product)
    print(f"slope={slope:.9f} reference={ref:.9f}")
    return 0


def cmd_gen(args) -> int:
    if args.kind == "random":
        digits = _parse_digit_set(args.digits) if args.digits else None
        x = random_expansion(args.base, args.length, args.seed, digits)
    elif args.kind == "sqrt":
        x = G.sqrt_expansion(args.d, args.base, args.length)
    elif args.kind == "golden":
        x = G.golden_expansion(args.base, args.length)
    elif args.kind == "factorial-series":
        x = G.gap_series_expansion(args.base, args.length)
    else:
        raise UsageError(f"unknown kind {args.kind}")
    write_digit_file(x, args.out)
    print(f"wrote base-{x.base} expansion of length {x.N} to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diosplit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("split", help="construct a decomposition")
    sp.add_argument("--mode", required=True, choices=D.MODES)
    sp.add_argument("--in", dest="input", action="append", required=True,
                    help="input digit file (repeatable for n-way modes)")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--lambda", dest="lambdas", nargs="*", type=as_lambda,
                    help="exponent targets (use 'inf' for the divergent marker)")
    sp.add_argument("--mus", nargs="*", type=as_lambda)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--blocks", type=int, default=6,
                    help="factorial block count J (erdos / liouville-n)")
    sp.add_argument("--digits", default=None, help="cantor digit set, e.g. 0,2")
    sp.add_argument("--epsilon", default="1/10")
    sp.add_argument("--attest", default=None)
    sp.set_defaults(fn=cmd_split)

    vp = sub.add_parser("verify", help="check a certificate")
    vp.add_argument("--cert", required=True)
    vp.add_argument("--tol-window", type=float, default=None)
    vp.add_argument("--trust", type=float, default=None)
    vp.add_argument("--cf-scan", choices=("auto", "on", "off"), default="auto")
    vp.set_defaults(fn=cmd_verify)

    cp = sub.add_parser("cf", help="continued-fraction exponent table")
    cp.add_argument("--in", dest="input", action="append", required=True)
    cp.add_argument("--trust", type=float, default=0.5)
    cp.set_defaults(fn=cmd_cf)

    ep = sub.add_parser("est", help="base-restricted exponent estimate")
    ep.add_argument("--in", dest="input", action="append", required=True)
    ep.add_argument("--trust", type=float, default=0.5)
    ep.add_argument("--pairwise", action="store_true")
    ep.add_argument("--depth", type=int, default=None)
    ep.set_defaults(fn=cmd_est)

    fp = sub.add_parser("formulas", help="closed-form dimension evaluators")
    fp.add_argument("query")
    fp.add_argument("--lambda", dest="lambdas", nargs="*", type=as_lambda)
    fp.add_argument("--base", type=int, default=None)
    fp.add_argument("--digits", default=None)
    fp.add_argument("--restricted", action="store_true")
    fp.set_defaults(fn=cmd_formulas)

    bp = sub.add_parser("boxdim", help="box-counting grids")
    bp.add_argument("what")
    bp.add_argument("--base", type=int, required=True)
    bp.add_argument("--digits", required=True)
    bp.add_argument("--depths", required=True, help="range lo:hi")
    bp.add_argument("--product", action="store_true")
    bp.set_defaults(fn=cmd_boxdim)

    gp = sub.add_parser("gen", help="generate reference inputs")
    gp.add_argument("--kind", required=True,
                    choices=("random", "sqrt", "golden", "factorial-series"))
    gp.add_argument("--base", type=int, default=5)
    gp.add_argument("--length", type=int, required=True)
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--digits", default=None)
    gp.add_argument("--d", type=int, default=2)
    gp.add_argument("--out", required=True)
    gp.set_defaults(fn=cmd_gen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
