"""Command-line front end.

Exit codes: 0 ok, 2 usage, 3 solver failure, 4 unreadable file, 5 validation
threshold exceeded.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

from mpmath import mp

from . import evaluator, initial_data, oracle, solver
from .eigenvalues import InvariantViolation, build_table
from .expsum import ResonantRate, stats as expsum_stats
from .kernel import KernelSpec, NonConvergence

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_FORMAT, EXIT_VALIDATION = 0, 2, 3, 4, 5

log = logging.getLogger("boltzspect")


class UsageError(Exception):
    pass


# -- argument helpers ----------------------------------------------------------

def _digits(text: str) -> int:
    d = int(text)
    if d < 10:
        raise argparse.ArgumentTypeError("digits must be >= 10")
    return d


def _float_list(text: str) -> list:
    vals = [float(x) for x in text.split(",") if x.strip()]
    if not vals:
        raise UsageError("grid override is empty")
    return vals


def make_coeffs(selector: str, N: int, digits: int) -> initial_data.SpectralCoeffs:
    """Initial data from ``bigauss[:shift] | measure | eps:<e> | zeros | coeffs:<path>``."""
    kind, _, arg = selector.partition(":")
    if kind == "bigauss":
        shift = float(arg) if arg else initial_data.BIGAUSS_SHIFT
        return initial_data.bigauss_coeffs(N, digits, shift)
    if kind == "measure":
        return initial_data.measure_coeffs(N, digits)
    if kind == "eps":
        try:
            eps = float(arg)
        except ValueError:
            raise UsageError(f"bad epsilon in {selector!r}") from None
        if not 0 < eps <= 1:
            raise UsageError("eps must lie in (0, 1]")
        return initial_data.eps_coeffs(N, eps, digits)
    if kind == "zeros" or (kind == "coeffs" and arg == "zeros" and not Path(arg).exists()):
        return initial_data.SpectralCoeffs([mp.zero] * (N + 1), initial_data.USER)
    if kind == "coeffs":
        path = Path(arg)
        if not path.exists():
            raise UsageError(f"coefficient file {arg!r} not found")
        with mp.workdps(digits):
            c = initial_data.read_json(path) if path.suffix == ".json" else initial_data.read_csv(path)
        vals = list(c.values[: N + 1]) + [mp.zero] * max(0, N + 1 - len(c.values))
        return initial_data.SpectralCoeffs(vals, c.source)
    raise UsageError(f"unknown initial data selector {selector!r}")


def _fmt(x, digits: int) -> str:
    return mp.nstr(mp.mpf(x), digits, strip_zeros=False, min_fixed=-5, max_fixed=6)


# -- commands ------------------------------------------------------------------

def cmd_eigen(args) -> int:
    """Linear and nonlinear eigenvalue tables as ``lambda.csv`` and ``mu.csv``."""
    if args.n_max < 2:
        raise UsageError("--n-max must be >= 2")
    if args.kernel == "exact":
        kernel = KernelSpec.exact()
    else:
        if args.s is None:
            raise UsageError("--kernel power-law needs --s")
        kernel = KernelSpec.power_law(args.s)
    table = build_table(args.n_max, kernel, digits=args.digits, tol=args.tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = args.digits
    with open(out / "lambda.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "rat_part", "pi_part", "numeric"])
        for n in range(args.n_max + 1):
            ex = table.lambda_exact[n] if table.lambda_exact else None
            w.writerow([n, ex.rat if ex else "", ex.pi_part if ex else "", _fmt(table.lam(n), d)])
    with open(out / "mu.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "q", "radicand", "rat_part", "pi_part", "numeric"])
        for (p, q) in sorted(table.mu_num):
            if p == 0:
                ex = table.mu0_exact[q] if table.mu0_exact else None
                rad = 1 if ex else ""
            else:
                pair = table.mu_exact[(p, q)] if table.mu_exact else None
                ex = pair[1] if pair else None
                rad = pair[0].radicand if pair else ""
            w.writerow([p, q, rad, ex.rat if ex else "", ex.pi_part if ex else "",
                        _fmt(table.mu(p, q), d)])
    print(f"wrote {out / 'lambda.csv'} and {out / 'mu.csv'} (n_max={args.n_max})")
    return EXIT_OK


def cmd_solve(args) -> int:
    """Closed-form recursion; writes the series and per-level term counts."""
    if args.N < 4:
        raise UsageError("--N must be >= 4")
    coeffs = make_coeffs(args.init, args.N, args.digits)
    start = time.perf_counter()
    series = solver.solve(coeffs, N=args.N, digits=args.digits, prune_threshold=args.prune)
    elapsed = time.perf_counter() - start
    solver.save(series, args.out)
    print("n,terms")
    for n, k in enumerate(solver.term_counts(series)):
        print(f"{n},{k}")
    print(f"# solve time {elapsed:.3f} s; series written to {args.out}")
    return EXIT_OK


def _grid_from(args):
    times = _float_list(args.times) if args.times is not None else evaluator.default_times()
    vel = _float_list(args.velocities) if args.velocities is not None else evaluator.signed_velocities()
    if any(t < 0 for t in times):
        raise UsageError("times must be nonnegative")
    return sorted(times), sorted(vel)


def cmd_eval(args) -> int:
    """Figure tables: norms, surface, nonlinear modes (and initial data on request)."""
    series = solver.load(args.series)
    times, vel = _grid_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = args.csv_digits
    evaluator.write_norms_csv(out / "fig4_norms.csv", series, times, d)
    measure_like = series.coeffs.source == initial_data.MEASURE or series.coeffs.source.startswith("Eps")
    surface = "fig8_measure.csv" if measure_like else "fig5_surface.csv"
    evaluator.write_surface_csv(out / surface, series, times, vel, d)
    evaluator.write_hn_csv(out / "fig7_hn.csv", series, times, d)
    written = ["fig4_norms.csv", surface, "fig7_hn.csv"]
    if args.initial is not None:
        kind, _, arg = args.initial.partition(":")
        if kind != "bigauss":
            raise UsageError("--initial supports bigauss[:shift] only")
        shift = float(arg) if arg else initial_data.BIGAUSS_SHIFT
        with mp.workdps(series.digits):
            F, _ = initial_data.normalized_function(lambda w: initial_data.bigauss(w, shift), series.digits)
            coeffs = initial_data.bigauss_coeffs(max(20, series.N), series.digits, shift)
            evaluator.write_initial_csv(out / "fig3_initial.csv", F, coeffs, vel, digits=d)
        written.append("fig3_initial.csv")
    print("wrote " + ", ".join(str(out / w) for w in written))
    return EXIT_OK


def cmd_ratio(args) -> int:
    """Nonlinear-to-linear norm ratio and its leading-order approximation."""
    series = solver.load(args.series)
    times, _ = _grid_from(args)
    print("t,R_N,R_tilde")
    for t in times:
        try:
            r = evaluator.ratio(series, t)
        except evaluator.DivisionByZero:
            r = mp.nan
        print(f"{t:g},{mp.nstr(r, 10)},{mp.nstr(evaluator.ratio_approx(series, t), 10)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    """Closed form against RK4 integration of the truncated ODE system."""
    if not 2 <= args.N <= 24:
        raise UsageError("--N must lie in 2..24")
    coeffs = make_coeffs(args.init, args.N, args.digits)
    series = solver.solve(coeffs, N=args.N, digits=args.digits)
    times = [t for t in evaluator.default_times(args.t_end, args.grid_step)]
    run = oracle.integrate(coeffs, args.N, times, stepper=args.stepper, step=args.step, tol=args.tol)
    if args.csv:
        oracle.write_csv(run, args.csv)
    cmp = oracle.compare(run, series, t_min=args.t_start)
    print("n,max_dev")
    for n, dev in enumerate(cmp.per_n):
        print(f"{n},{dev:.3e}")
    ok = cmp.max_dev < args.threshold
    print(f"# max deviation {cmp.max_dev:.3e} on t >= {args.t_start}: "
          f"{'PASS' if ok else 'FAIL'} (threshold {args.threshold:g})")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_compare_precision(args) -> int:
    """Relative sup-norm difference of ``f_N`` between two precisions."""
    grid = evaluator.default_grid()
    if args.series:
        a, b = (solver.load(p) for p in args.series)
        if a.digits > b.digits:
            a, b = b, a
        low = evaluator.eval_surface(a, grid.times, grid.speeds)
        high = evaluator.eval_surface(b, grid.times, grid.speeds)
        with mp.workdps(b.digits + 10):
            err = (max(abs(x - y) for rl, rh in zip(low, high) for x, y in zip(rl, rh))
                   / max(abs(y) for rh in high for y in rh))
        p1, p2 = a.digits, b.digits
    else:
        if args.init is None:
            raise UsageError("give --init with --p1/--p2, or two --series files")
        p1, p2 = args.p1, args.p2
        if p1 > p2:
            raise UsageError("--p1 must not exceed --p2")
        err = evaluator.precision_compare(p1, p2, lambda P: make_coeffs(args.init, args.N, P), args.N, grid)
    print(f"({p1},{p2}) relative error {mp.nstr(err, 3)}")
    return EXIT_OK


def cmd_stats(args) -> int:
    """Term count and sup of each ``h_n``, with ``sup|h_n| / |G_n|``."""
    series = solver.load(args.series)
    print("n,terms,sup_h,sup_h_over_G")
    for n in range(series.N + 1):
        count, sup = expsum_stats(series.h[n], t_max=args.t_max)
        G = abs(float(series.G(n)))
        rel = f"{sup / G:.6g}" if G else ""
        print(f"{n},{count},{sup:.6g},{rel}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------

EPILOG = """output to command map:
  linear eigenvalue table (exact and numeric)   eigen -> lambda.csv
  nonlinear eigenvalue table                    eigen -> mu.csv
  term counts and solve time per level          solve (stdout), stats
  rounding error between two precisions         compare-precision
  initial profile and its truncations           eval --initial bigauss -> fig3_initial.csv
  linear/nonlinear norms and ratio              eval -> fig4_norms.csv, ratio
  f_N(t, v) surface, smooth data                eval -> fig5_surface.csv
  nonlinear modes h_n(t)                        eval -> fig7_hn.csv; stats for sup|h_n|/|G_n|
  f_N(t, v) surface, measure data               eval -> fig8_measure.csv
  closed form vs ODE integration                oracle
"""

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="boltzspect",
        description="Closed-form spectral solver for the radial Maxwellian Boltzmann equation "
                    "with the non-cutoff sin^-2 angular kernel.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eigen", help="eigenvalue tables: lambda_n (exact + numeric) and mu_pq")
    e.add_argument("--n-max", type=int, default=20)
    e.add_argument("--digits", type=_digits, default=30)
    e.add_argument("--kernel", choices=["exact", "power-law"], default="exact")
    e.add_argument("--s", type=float, default=None, help="power-law singularity order in (0, 1)")
    e.add_argument("--tol", type=float, default=1e-12, help="quadrature tolerance")
    e.add_argument("--out", default=".")
    e.set_defaults(func=cmd_eigen)

    init_help = "initial data: bigauss[:shift] | measure | eps:<e> | zeros | coeffs:<csv or json>"
    s = sub.add_parser("solve", help="closed-form solution; prints term counts and solve time")
    s.add_argument("--init", default="bigauss", help=init_help)
    s.add_argument("--N", type=int, default=20)
    s.add_argument("--digits", type=_digits, default=30)
    s.add_argument("--prune", type=float, default=0.0, help="drop coefficients below this magnitude")
    s.add_argument("--out", default="series.json")
    s.set_defaults(func=cmd_solve)

    def grid_args(q):
        q.add_argument("--times", default=None, help="comma-separated times (default 0..2 step 0.08)")
        q.add_argument("--velocities", default=None,
                       help="comma-separated velocities (default -5..5 step 0.125)")

    v = sub.add_parser("eval", help="figure tables: initial data profiles, norms and ratio, "
                                    "f_N surface, nonlinear modes h_n")
    v.add_argument("series")
    v.add_argument("--out", default=".")
    v.add_argument("--initial", default=None, help="also tabulate the initial profile (bigauss[:shift])")
    v.add_argument("--csv-digits", type=int, default=15)
    grid_args(v)
    v.set_defaults(func=cmd_eval)

    r = sub.add_parser("ratio", help="nonlinear/linear norm ratio R_N(t) with its leading-order curve")
    r.add_argument("series")
    grid_args(r)
    r.set_defaults(func=cmd_ratio)

    o = sub.add_parser("oracle", help="validate the closed form against RK4 integration")
    o.add_argument("--init", default="bigauss", help=init_help)
    o.add_argument("--N", type=int, default=12)
    o.add_argument("--digits", type=_digits, default=30)
    o.add_argument("--t-end", type=float, default=2.0)
    o.add_argument("--t-start", type=float, default=0.0, help="compare only from this time on")
    o.add_argument("--grid-step", type=float, default=0.08)
    o.add_argument("--step", type=float, default=1e-4)
    o.add_argument("--stepper", choices=[oracle.RK4, oracle.RK45], default=oracle.RK4)
    o.add_argument("--tol", type=float, default=1e-12, help="RK45 tolerance")
    o.add_argument("--threshold", type=float, default=1e-7)
    o.add_argument("--csv", default=None, help="dump t, g_0..g_N")
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("compare-precision", help="rounding study: relative sup-norm difference "
                                                 "between two working precisions")
    c.add_argument("--init", default=None, help=init_help)
    c.add_argument("--p1", type=_digits, default=10)
    c.add_argument("--p2", type=_digits, default=20)
    c.add_argument("--N", type=int, default=20)
    c.add_argument("--series", nargs=2, default=None, metavar=("LOW", "HIGH"),
                   help="compare two saved series instead of re-solving")
    c.set_defaults(func=cmd_compare_precision)

    t = sub.add_parser("stats", help="term counts and sup_t|h_n| per level (complexity and h_n growth)")
    t.add_argument("series")
    t.add_argument("--t-max", type=float, default=50.0)
    t.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except solver.FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except FileNotFoundError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (InvariantViolation, ResonantRate, NonConvergence, solver.PrecisionExhausted,
            initial_data.QuadratureFailure, initial_data.DegenerateData) as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
