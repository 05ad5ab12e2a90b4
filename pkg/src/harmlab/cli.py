"""Command-line interface: evaluation, Poisson solving, diagnostics, and rate
experiments with reproducible CSV output.

Exit codes: 0 success, 2 validation error, 3 numerical failure; one-line
diagnostics go to stderr. Identical argv (plus seeds) produces byte-identical
CSV files. HARMLAB_THREADS caps internal parallel workers.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .diagnostics import slice_log_fit
from .ensembles import (
    cauchy_tangent_rule,
    homogeneous_extend,
    lift_ensemble,
    load_ensemble,
    sample_subnetwork,
    save_ensemble,
    slice_ensemble,
)
from .errors import NumericalError, ValidationError
from .experiments import (
    ErrorReport,
    make_random_target,
    mc_rate_experiment,
    reg_error_experiment,
    sobolev_lognorm_experiment,
)
from .halfplane import HalfPlanePoint
from .line_barron import log_divergence_diagnostic
from .numerics import GridSpec, RateFit
from .poisson import BoundaryFunction, solve_at
from .solutions import (
    eval_heaviside,
    eval_u_fractional,
    eval_u_half,
    eval_u_integer,
    eval_u_reg,
    eval_u_three_half,
)

CSV_HEADER = "experiment,k,R,p,order,knob,value"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _fmt_p(p: float) -> str:
    return "inf" if math.isinf(p) else _fmt(p)


def _parse_p(tok: str) -> float:
    if tok.strip().lower() == "inf":
        return math.inf
    p = float(tok)
    if p < 1.0:
        raise ValidationError(f"p must be in [1, inf], got {tok}")
    return p


def _write_csv(path: str, reports: list[ErrorReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in reports:
            fh.write(
                ",".join(
                    [
                        r.experiment,
                        str(r.k),
                        _fmt(r.R),
                        _fmt_p(r.p),
                        str(r.derivative_order),
                        _fmt(r.knob),
                        _fmt(r.value),
                    ]
                )
                + "\n"
            )


def _write_gnuplot(csv_path: str) -> None:
    script = csv_path + ".gp"
    with open(script, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "set datafile separator ','\n"
            "set logscale xy\n"
            "set key left top\n"
            f"plot '{csv_path}' every ::1 using 6:7 with linespoints title 'measured'\n"
        )


def _boundary_from_spec(spec: str) -> BoundaryFunction:
    parts = spec.split(":")
    tag = parts[0]
    if tag == "heaviside":
        if len(parts) != 1:
            raise ValidationError(f"heaviside takes no parameters, got {spec!r}")
        return BoundaryFunction.heaviside()
    if tag == "relu":
        if len(parts) not in (2, 4):
            raise ValidationError(f"expected relu:A or relu:A:w:b, got {spec!r}")
        alpha = float(parts[1])
        w = float(parts[2]) if len(parts) == 4 else 1.0
        b = float(parts[3]) if len(parts) == 4 else 0.0
        return BoundaryFunction.relu_power(alpha, w, b)
    if tag == "tanh":
        if len(parts) not in (1, 3):
            raise ValidationError(f"expected tanh or tanh:w:b, got {spec!r}")
        w = float(parts[1]) if len(parts) == 3 else 1.0
        b = float(parts[2]) if len(parts) == 3 else 0.0
        return BoundaryFunction.tanh(w, b)
    raise ValidationError(f"unknown boundary spec {spec!r}")


def _grid_from_args(args, R: float) -> GridSpec:
    return GridSpec(R, args.nr, args.nphi, args.grading)


def _eps_list(args) -> np.ndarray:
    if not (0.0 < args.eps_min < args.eps_max):
        raise ValidationError("need 0 < eps-min < eps-max")
    if args.steps < 3:
        raise ValidationError("need at least 3 steps")
    return np.logspace(math.log10(args.eps_min), math.log10(args.eps_max), args.steps)


def _summary(fit: RateFit) -> str:
    return f"slope={fit.slope:.3f} r2={fit.r_squared:.3f}"


# --- subcommand handlers ------------------------------------------------------


def _cmd_eval(args) -> int:
    kind = args.kind
    if kind == "reg":
        if args.k is None or args.eps is None:
            raise ValidationError("eval --kind reg needs --k and --eps")
        value = eval_u_reg(args.x, args.y, args.eps, args.k)
    else:
        p = HalfPlanePoint(args.x, args.y)
        if kind == "int":
            if args.k is None:
                raise ValidationError("eval --kind int needs --k")
            value = eval_u_integer(p, args.k)
        elif kind == "frac":
            if args.alpha is None:
                raise ValidationError("eval --kind frac needs --alpha")
            value = eval_u_fractional(p, args.alpha)
        elif kind == "half":
            value = eval_u_half(p)
        elif kind == "threehalf":
            value = eval_u_three_half(p)
        elif kind == "heaviside":
            value = eval_heaviside(p)
        else:
            raise ValidationError(f"unknown kind {kind!r}")
    print(f"{value:.15g}")
    return 0


def _cmd_solve(args) -> int:
    g = _boundary_from_spec(args.boundary)
    value = solve_at(g, HalfPlanePoint(args.x, args.y), args.tol)
    print(f"{value:.15g}")
    return 0


def _cmd_rates_reg(args) -> int:
    grid = _grid_from_args(args, args.R)
    reports, fit = reg_error_experiment(
        args.k, args.R, _parse_p(args.p), args.order, _eps_list(args), grid
    )
    _write_csv(args.out, reports)
    if args.gnuplot:
        _write_gnuplot(args.out)
    print(_summary(fit))
    return 0


def _cmd_rates_mc(args) -> int:
    target = make_random_target(args.alpha, args.target_size, args.target_seed, dim=1)
    if args.n_min < 1 or args.n_max <= args.n_min or args.steps < 3:
        raise ValidationError("need 1 <= n-min < n-max and steps >= 3")
    ns = np.unique(
        np.round(np.logspace(math.log10(args.n_min), math.log10(args.n_max), args.steps)).astype(int)
    )
    reports, fit, rate = mc_rate_experiment(target, ns, args.order, args.q, args.seeds)
    _write_csv(args.out, reports)
    if args.gnuplot:
        _write_gnuplot(args.out)
    print(f"{_summary(fit)} bound_rate={rate:.3f}")
    return 0


def _cmd_rates_sobolev(args) -> int:
    grid = _grid_from_args(args, args.R)
    reports, fit = sobolev_lognorm_experiment(
        args.k, args.R, _eps_list(args), grid, order=args.order
    )
    _write_csv(args.out, reports)
    if args.gnuplot:
        _write_gnuplot(args.out)
    print(_summary(fit))
    return 0


def _cmd_diag_xklogx(args) -> int:
    if args.steps < 3:
        raise ValidationError("need at least 3 steps")
    deltas = np.logspace(math.log10(0.1), math.log10(args.delta_min), args.steps)
    fit = log_divergence_diagnostic(args.k, deltas)
    print(f"slope={fit.slope:.6g} intercept={fit.intercept:.6g} r2={fit.r_squared:.6f}")
    return 0


def _cmd_diag_slice(args) -> int:
    res = slice_log_fit(args.k, args.theta)
    expected = (1.0 / math.cos(args.theta)) ** args.k * math.sin(args.k * args.theta) / math.pi
    print(
        f"c_fit={res.c_fit:.12g} expected={expected:.12g} "
        f"d_fit={res.d_fit:.12g} residual={res.residual:.3g}"
    )
    return 0


def _cmd_ensemble(args) -> int:
    e = load_ensemble(args.infile)
    if args.action == "lift":
        if args.samples is not None:
            out = lift_ensemble(e, n_samples=args.samples, seed=args.seed)
        else:
            out = lift_ensemble(e, t_rule=cauchy_tangent_rule(args.nodes))
    elif args.action == "slice":
        x0 = [float(t) for t in args.x0.split(",")]
        v = [float(t) for t in args.v.split(",")]
        out = slice_ensemble(e, x0, v)
    elif args.action == "extend":
        out = homogeneous_extend(e)
    elif args.action == "sample":
        if args.n is None:
            raise ValidationError("ensemble sample needs --n")
        out = sample_subnetwork(e, args.n, seed=args.seed)
    else:
        raise ValidationError(f"unknown ensemble action {args.action!r}")
    save_ensemble(out, args.out)
    return 0


# --- parser --------------------------------------------------------------------


def _add_grid_flags(sp) -> None:
    sp.add_argument("--nr", type=int, default=256, help="radial grid nodes (default 256)")
    sp.add_argument("--nphi", type=int, default=256, help="angular grid nodes (default 256)")
    sp.add_argument("--grading", type=float, default=2.0, help="radial mesh exponent (default 2)")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    ap = argparse.ArgumentParser(
        prog="harmlab",
        description="Harmonic extensions of ReLU^alpha boundary data and their rate experiments",
        formatter_class=fmt,
    )
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", formatter_class=fmt, help="evaluate a closed-form solution at one point")
    ev.add_argument("--kind", required=True, choices=["int", "frac", "half", "threehalf", "heaviside", "reg"])
    ev.add_argument("--alpha", type=float, help="activation power for --kind frac")
    ev.add_argument("--k", type=int, help="integer power for --kind int/reg")
    ev.add_argument("--eps", type=float, help="regularization parameter for --kind reg")
    ev.add_argument("--x", type=float, required=True, help="abscissa")
    ev.add_argument("--y", type=float, required=True, help="ordinate (y > 0; reg allows y = 0)")
    ev.set_defaults(handler=_cmd_eval)

    so = sub.add_parser("solve", formatter_class=fmt, help="Poisson-kernel harmonic extension of boundary data")
    so.add_argument("--boundary", required=True, help="relu:A[:w:b] | heaviside | tanh[:w:b]")
    so.add_argument("--x", type=float, required=True, help="abscissa")
    so.add_argument("--y", type=float, required=True, help="ordinate (y > 0)")
    so.add_argument("--tol", type=float, default=1e-9, help="quadrature tolerance (default 1e-9)")
    so.set_defaults(handler=_cmd_solve)

    rates = sub.add_parser("rates", formatter_class=fmt, help="rate experiments emitting CSV")
    rsub = rates.add_subparsers(dest="experiment", required=True)

    rr = rsub.add_parser("reg", formatter_class=fmt, help="regularization error rates in eps")
    rr.add_argument("--k", type=int, required=True, help="integer activation power (k >= 2)")
    rr.add_argument("--R", type=float, default=1.0, help="half-disk radius")
    rr.add_argument("--p", default="inf", help="integrability in [1, inf]; token 'inf' for sup norm")
    rr.add_argument("--order", type=int, default=0, choices=[0, 1, 2], help="derivative order of the measured error")
    rr.add_argument("--eps-min", type=float, default=1e-4, dest="eps_min", help="smallest regularization parameter")
    rr.add_argument("--eps-max", type=float, default=1e-1, dest="eps_max", help="largest regularization parameter")
    rr.add_argument("--steps", type=int, default=7, help="number of log-spaced eps values")
    rr.add_argument("--out", required=True, help="CSV output path")
    rr.add_argument("--gnuplot", action="store_true", help="emit a companion gnuplot script")
    _add_grid_flags(rr)
    rr.set_defaults(handler=_cmd_rates_reg)

    rm = rsub.add_parser("mc", formatter_class=fmt, help="Monte-Carlo subsampling rates in n")
    rm.add_argument("--alpha", type=float, required=True, help="activation power of the target")
    rm.add_argument("--n-min", type=int, default=32, dest="n_min", help="smallest subnetwork size")
    rm.add_argument("--n-max", type=int, default=4096, dest="n_max", help="largest subnetwork size")
    rm.add_argument("--steps", type=int, default=8, help="number of log-spaced sizes")
    rm.add_argument("--seeds", type=int, default=10, help="number of seeds averaged per size")
    rm.add_argument("--order", type=int, default=0, choices=[0, 1, 2], help="Sobolev derivative order m")
    rm.add_argument("--q", type=float, default=2.0, help="integrability exponent (q >= 2)")
    rm.add_argument("--target-size", type=int, default=2000, dest="target_size")
    rm.add_argument("--target-seed", type=int, default=20240, dest="target_seed")
    rm.add_argument("--out", required=True, help="CSV output path")
    rm.add_argument("--gnuplot", action="store_true", help="emit a companion gnuplot script")
    rm.set_defaults(handler=_cmd_rates_mc)

    rs = rsub.add_parser("sobolev", formatter_class=fmt, help="Sobolev seminorm growth in |log eps|")
    rs.add_argument("--k", type=int, required=True, help="integer activation power (2 or 3)")
    rs.add_argument("--R", type=float, default=1.0, help="half-disk radius")
    rs.add_argument("--eps-min", type=float, default=1e-3, dest="eps_min", help="smallest regularization parameter")
    rs.add_argument("--eps-max", type=float, default=1e-1, dest="eps_max", help="largest regularization parameter")
    rs.add_argument("--steps", type=int, default=5, help="number of log-spaced eps values")
    rs.add_argument("--order", type=int, default=None, help="seminorm order (default k+2)")
    rs.add_argument("--out", required=True, help="CSV output path")
    rs.add_argument("--gnuplot", action="store_true", help="emit a companion gnuplot script")
    _add_grid_flags(rs)
    rs.set_defaults(handler=_cmd_rates_sobolev)

    diag = sub.add_parser("diag", formatter_class=fmt, help="divergence and slice diagnostics")
    dsub = diag.add_subparsers(dest="diagnostic", required=True)

    dx = dsub.add_parser("xklogx", formatter_class=fmt, help="logarithmic divergence of the x^k log x criterion")
    dx.add_argument("--k", type=int, required=True, help="integer power in x^k log x")
    dx.add_argument("--delta-min", type=float, default=1e-6, dest="delta_min", help="smallest lower cutoff")
    dx.add_argument("--steps", type=int, default=5, help="number of log-spaced cutoffs")
    dx.set_defaults(handler=_cmd_diag_xklogx)

    ds = dsub.add_parser("slice", formatter_class=fmt, help="log-coefficient fit along a ray")
    ds.add_argument("--k", type=int, required=True, help="integer activation power")
    ds.add_argument("--theta", type=float, required=True, help="ray angle in (0, pi), k*theta not in pi*Z")
    ds.set_defaults(handler=_cmd_diag_slice)

    en = sub.add_parser("ensemble", formatter_class=fmt, help="operate on ensemble text files")
    en.add_argument("action", choices=["lift", "slice", "extend", "sample"])
    en.add_argument("--in", dest="infile", required=True, help="input ensemble file")
    en.add_argument("--out", required=True, help="output ensemble file")
    en.add_argument("--nodes", type=int, default=201, help="quadrature nodes for lift (default 201)")
    en.add_argument("--samples", type=int, default=None, help="random Cauchy draws for lift")
    en.add_argument("--seed", type=int, default=0, help="random seed for sampling operations")
    en.add_argument("--n", type=int, default=None, help="subnetwork size for sample")
    en.add_argument("--x0", default="0,0", help="slice base point 'a,b'")
    en.add_argument("--v", default="1,0", help="slice direction 'c,d'")
    en.set_defaults(handler=_cmd_ensemble)

    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.handler(args)
    except ValidationError as exc:
        print(f"harmlab: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"harmlab: numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(run())
