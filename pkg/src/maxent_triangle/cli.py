"""Command-line interface: ``maxent-triangle {rho,build,verify,gamma,sweep}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import mpmath

from . import analysis as an
from . import fixedpoint as fx
from .construction import NegativeEntryError, construct
from .export import DistributionExport
from .precision import PrecisionContext, PrecisionError, default_bits, solve_rho
from .verify import verify

log = logging.getLogger("maxent_triangle")

EXIT_OK, EXIT_FAIL, EXIT_PRECISION = 0, 1, 2


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def _context(args) -> PrecisionContext:
    tol = mpmath.mpf(args.tol) if args.tol is not None else None
    return PrecisionContext(args.prec, tol)


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        print("\n".join(lines))


def cmd_rho(args) -> int:
    ctx = _context(args)
    sol = solve_rho(args.n, ctx)
    digits = fx.decimal_digits(ctx.bits)
    rho = mpmath.nstr(sol.rho, digits, strip_zeros=True)
    bound_ok = sol.lower_bound <= sol.rho < 1
    payload = {"n": args.n, "rho": rho, "residual": mpmath.nstr(sol.residual, 6),
               "bits": ctx.bits, "lower_bound": mpmath.nstr(sol.lower_bound, 20),
               "lower_bound_ok": bool(bound_ok)}
    _emit(args, payload, [
        f"rho = {rho}",
        f"residual = {payload['residual']}",
        f"n/(n+3) <= rho < 1: {'pass' if bound_ok else 'fail'}",
    ])
    return EXIT_OK if bound_ok else EXIT_FAIL


def cmd_build(args) -> int:
    ctx = _context(args)
    c = construct(args.n, ctx)
    vec, normalization = c.pi.vector, "scaled"
    if args.normalize:
        vec, _ = an.normalize_pi(c.pi, c.table, ctx.tol)
        normalization = "probability"
    export = DistributionExport.from_vector(vec, fx.to_decimal(c.solution.rho_fixed, c.solution.work_bits),
                                            normalization)
    text = export.to_json() if args.format == "json" else export.to_csv()
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %s (%d orbits)", args.out, len(export.entries))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify(args.n, _context(args))
    lines = [f"n = {report.n}  rho = {report.rho[:24]}  bits = {report.bits}  backend = {report.backend}"]
    lines += report.summary_lines()
    lines.append(f"min pi entry {tuple(report.min_entry['orbit'])} = {report.min_entry['value'][:24]}")
    lines.append(f"{'OK' if report.ok else 'FAILED'} in {report.elapsed_ms:.1f} ms")
    _emit(args, report.to_dict(), lines)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_gamma(args) -> int:
    res = an.gamma_for_prime(args.p, _context(args))
    with mpmath.workprec(args.prec):
        gamma = res.gamma if args.base == "e" else res.gamma_bits
        unit = "nats" if args.base == "e" else "bits"
        payload = {"p": args.p, "n": res.n, "gamma": mpmath.nstr(gamma, 25), "unit": unit,
                   "exp_gamma": mpmath.nstr(res.exp_gamma, 25), "rho": mpmath.nstr(res.rho, 25)}
    _emit(args, payload, [
        f"gamma_{args.p} = {payload['gamma']} {unit}",
        f"exp(gamma_{args.p}) = {payload['exp_gamma']}",
    ])
    return EXIT_OK


def _sweep_row(job) -> dict:
    n, bits, tol = job
    r = verify(n, PrecisionContext(bits, tol))
    return {
        "n": n,
        "ok": r.ok,
        "min_pi": r.min_entry["value"][:30],
        "min_orbit": " ".join(map(str, r.min_entry["orbit"])),
        "pi_marginal_residual": r.check("pi_marginal").residual,
        "gamma": r.gamma,
        "beta_nonnegative": r.check("beta_nonnegative").status,
        "pi_nonnegative": r.check("pi_nonnegative").status,
        "failed": ";".join(c.name for c in r.checks if c.failed),
        "elapsed_ms": r.elapsed_ms,
    }


def cmd_sweep(args) -> int:
    if args.n_max < args.n_min:
        args.parser.error(f"empty range {args.n_min}..{args.n_max}")
    ctx = _context(args)
    jobs = [(n, ctx.bits, ctx.tol) for n in range(args.n_min, args.n_max + 1, args.step)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_row, jobs, chunksize=4))
    else:
        rows = [_sweep_row(j) for j in jobs]
    rows.sort(key=lambda r: r["n"])
    if args.report:
        path = Path(args.report)
        if path.suffix == ".json":
            path.write_text(json.dumps(rows, indent=1))
        else:
            with path.open("w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=list(rows[0]))
                w.writeheader()
                w.writerows(rows)
    ok = all(r["ok"] for r in rows)
    if args.json:
        print(json.dumps({"ok": ok, "rows": rows}, indent=1))
    else:
        for r in rows:
            print(f"n={r['n']:5d} {'ok  ' if r['ok'] else 'FAIL'} beta_nonnegative={r['beta_nonnegative']:<14} "
                  f"pi_nonnegative={r['pi_nonnegative']:<6} min_pi={r['min_pi'][:12]} {r['failed']}")
        print(f"{sum(r['ok'] for r in rows)}/{len(rows)} passed")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=default_bits(),
                        help="working precision in bits (default 128, env MAXENT_PREC_BITS)")
    common.add_argument("--tol", default=None, help="acceptance tolerance (default 2^(-prec/2))")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="maxent-triangle",
        description="Symmetric distributions on the triangle a+b+c=n with max-entropy marginal.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rho", parents=[common], help="solve for rho")
    p.add_argument("--n", type=_positive, required=True)
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("build", parents=[common], help="construct pi and export it")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--normalize", action="store_true", help="rescale to a probability distribution")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", parents=[common], help="run every check for one n")
    p.add_argument("--n", type=_positive, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gamma", parents=[common], help="entropy exponent for a prime p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--base", choices=("e", "2"), default="e")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("sweep", parents=[common], help="verify a range of n")
    p.add_argument("n_min", type=_positive)
    p.add_argument("n_max", type=_positive)
    p.add_argument("--step", type=_positive, default=1)
    p.add_argument("--report", help="summary file (.csv or .json)")
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_sweep, parser=p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (NegativeEntryError, PrecisionError) as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except ValueError as exc:
        if args.command == "gamma":
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        raise


if __name__ == "__main__":
    sys.exit(main())
