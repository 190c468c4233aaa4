"""``diffmat`` command line: one JSON record per line on stdout.

Exit codes: 0 success, 1 domain error or bad usage, 2 resource budget
exceeded, 3 a verification or integrity check failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction

from . import bounds, exact, lattice, quad, verify
from .errors import BudgetError, DomainError, IntegrityError
from .params import make_params
from .walk import default_workers, mc_return_probability

SCHEMA_VERSION = 1

EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    return obj


def record(command: str, p, method: str, rigor, started: float, seed=None, **payload) -> dict:
    rec = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": p.as_dict() if p is not None else None,
        "method": method,
        "rigor": rigor,
        "wall_time": round(time.perf_counter() - started, 6),
        "seed": seed,
    }
    rec.update(payload)
    return _clean(rec)


def emit(rec: dict, out=None):
    out = out or sys.stdout
    out.write(json.dumps(rec, allow_nan=False) + "\n")


def _params(args):
    return make_params(args.g, args.k, args.lam)


def _existence_fields(p) -> dict:
    return {"drake": p.parity_obstructed, "advisories": list(p.advisories)}


def cmd_count(args) -> int:
    start = time.perf_counter()
    p = _params(args)
    if args.method == "dft":
        n, used = exact.count_dft(p, budget=args.dft_budget).count, "dft"
    elif args.method == "brute":
        n, used = exact.count_brute(p, budget=args.brute_budget), "brute"
    else:
        try:
            n, used = exact.count_brute(p, budget=args.brute_budget), "brute"
        except BudgetError:
            n, used = exact.count_dft(p, budget=args.dft_budget).count, "dft"
    prob = Fraction(n, p.g ** (p.k * p.t))
    emit(record("count", p, used, "exact", start, count=str(n), probability=str(prob), **_existence_fields(p)))
    return EXIT_OK


def cmd_estimate(args) -> int:
    start = time.perf_counter()
    p = _params(args)
    est = mc_return_probability(p, args.samples, seed=args.seed, workers=args.workers)
    emit(record(
        "estimate", p, "monte_carlo", "statistical", start, seed=args.seed,
        p_hat=est.p_hat, stderr=est.stderr, hits=est.hits, samples=est.samples,
        workers=args.workers or default_workers(), **_existence_fields(p),
    ))
    return EXIT_OK


def cmd_asymptotic(args) -> int:
    start = time.perf_counter()
    p = _params(args)
    lg = bounds.asymptotic_count_log(p)
    emit(record(
        "asymptotic", p, "main_term", "asymptotic", start,
        log10_count=lg, count=bounds.asymptotic_count(p) if lg < 300 else None,
        in_hypothesis=p.in_hypothesis, advisories=list(p.advisories),
    ))
    return EXIT_OK


def _delta(args, p) -> float:
    return bounds.auto_delta(p) if args.delta == "auto" else float(args.delta)


def cmd_bounds(args) -> int:
    start = time.perf_counter()
    p = _params(args)
    rep = bounds.probability_bounds(p, _delta(args, p))
    emit(record(
        "bounds", p, "local_limit", "rigorous" if rep.rigorous else "diagnostic", start,
        report=rep.as_dict(), **_existence_fields(p),
    ))
    return EXIT_OK


def cmd_lattice(args) -> int:
    start = time.perf_counter()
    p = make_params(args.g, args.k, 1)
    pts = lattice.enumerate_lambda0(p)
    payload = {"size": len(pts), "expected_size": lattice.lambda0_size(p),
               "generators": [f"{i},{j}" for i, j in lattice.block_pairs(p)]}
    if args.list:
        payload["elements"] = [
            {"coeffs": list(c), "theta": th.tolist()}
            for c, th in zip(lattice.lambda0_coefficients(p), pts)
        ]
    code = EXIT_OK
    if args.verify:
        member = bool(lattice.lambda_membership(p, pts).all())
        defects = [lattice.structure_defects(p, th) for th in pts]
        hom = max(d.hom_defect for d in defects)
        row = max(d.row_defect for d in defects)
        ok = member and hom <= 1e-9 and row <= 1e-9 and len(pts) == payload["expected_size"]
        payload["verify"] = {"ok": ok, "membership": member, "max_hom_defect": hom, "max_row_defect": row}
        code = EXIT_OK if ok else EXIT_VERIFY
    rec = record("lattice", p, "enumeration", "exact", start, **payload)
    rec["params"].pop("lambda", None)
    rec["params"].pop("t", None)
    emit(rec)
    return code


def cmd_integrate(args) -> int:
    start = time.perf_counter()
    p = _params(args)
    delta = _delta(args, p)
    spec = quad.QuadratureSpec(args.grid, delta, p.t)
    rep = quad.sandwich_report(p, spec, samples=args.samples, seed=args.seed)
    box = quad.integrate_box_phi(p, spec)
    gauss = quad.integrate_box_gaussian(p, spec)
    g_lo, g_hi = quad.gaussian_box_bounds(p, delta, p.t)
    emit(record(
        "integrate", p, "midpoint_tensor", "numerical", start, seed=args.seed,
        delta=delta, grid=args.grid,
        box_phi={"re": box.real, "im": box.imag},
        box_gaussian=gauss, gaussian_bounds=[g_lo, g_hi],
        gaussian_ok=bool(g_lo <= gauss <= g_hi),
        sandwich={
            "ok": rep.ok, "integral": rep.integral, "margin": rep.integral_margin,
            "lower_target": rep.lower_target, "upper_target": rep.upper_target,
            "points_checked": rep.points_checked,
            "violations": {"real": rep.real_violations, "imag": rep.imag_violations,
                           "lower": rep.lower_violations, "integral": int(not rep.integral_ok)},
            "offenders": rep.offenders,
        },
    ))
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        start = time.perf_counter()
        res = verify.SUITES[name](args.seed)
        ok &= res.passed
        emit(record("verify", None, f"suite:{name}", "check", start, seed=args.seed,
                    suite=name, passed=res.passed, failures=res.failures(), checks=res.checks))
    return EXIT_OK if ok else EXIT_VERIFY


SWEEP_FIELDS = ["lambda", "t", "count", "method", "asymptotic_log10", "ratio",
                "delta", "lower", "upper", "rigorous"]


def sweep_rows(g: int, k: int, lam_min: int, lam_max: int, step: int = 1, brute_budget=None):
    """Exact count, main term and bounds for each lambda in the range."""
    rows = []
    for lam in range(lam_min, lam_max + 1, step):
        p = make_params(g, k, lam)
        try:
            n, used = exact.count_brute(p, budget=brute_budget or exact.BRUTE_BUDGET), "brute"
        except BudgetError:
            try:
                n, used = exact.count_dft(p).count, "dft"
            except (BudgetError, IntegrityError):
                n, used = None, "none"
        lg = bounds.asymptotic_count_log(p)
        ratio = None if n is None else (0.0 if n == 0 else 10 ** (math.log10(n) - lg))
        rep = bounds.probability_bounds(p, bounds.auto_delta(p))
        rows.append({
            "lambda": lam, "t": p.t, "count": "" if n is None else str(n), "method": used,
            "asymptotic_log10": lg, "ratio": ratio, "delta": rep.delta,
            "lower": rep.lower, "upper": rep.upper, "rigorous": rep.rigorous,
        })
    return sorted(rows, key=lambda r: r["lambda"])


def cmd_sweep(args) -> int:
    start = time.perf_counter()
    if args.lambda_min < 1 or args.lambda_max < args.lambda_min or args.step < 1:
        raise DomainError("need 1 <= lambda-min <= lambda-max and step >= 1")
    rows = sweep_rows(args.g, args.k, args.lambda_min, args.lambda_max, args.step, args.brute_budget)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS)
            w.writeheader()
            w.writerows(rows)
    p = make_params(args.g, args.k, args.lambda_min)
    rec = record("sweep", p, "exact+main_term", "mixed", start, rows=rows, out=args.out)
    rec["params"] = {"g": args.g, "k": args.k, "lambda_min": args.lambda_min, "lambda_max": args.lambda_max}
    emit(rec)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="diffmat", description="Count difference matrices over Z_g.")
    sub = ap.add_subparsers(dest="command", required=True)

    def gkl(sp, with_lambda=True):
        sp.add_argument("--g", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        if with_lambda:
            sp.add_argument("--lambda", dest="lam", type=int, required=True)

    sp = sub.add_parser("count", help="exact count")
    gkl(sp)
    sp.add_argument("--method", choices=["auto", "brute", "dft"], default="auto")
    sp.add_argument("--brute-budget", type=int, default=exact.BRUTE_BUDGET)
    sp.add_argument("--dft-budget", type=int, default=exact.DFT_BUDGET)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("estimate", help="Monte Carlo return probability")
    gkl(sp)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("asymptotic", help="asymptotic main term")
    gkl(sp)
    sp.set_defaults(func=cmd_asymptotic)

    sp = sub.add_parser("bounds", help="two-sided return probability bounds")
    gkl(sp)
    sp.add_argument("--delta", default="auto")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("lattice", help="the group of full-modulus frequencies")
    gkl(sp, with_lambda=False)
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--verify", action="store_true")
    sp.set_defaults(func=cmd_lattice)

    sp = sub.add_parser("integrate", help="box quadrature and sandwich checks")
    gkl(sp)
    sp.add_argument("--delta", default="auto")
    sp.add_argument("--grid", type=int, default=9)
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("verify", help="run self-check suites")
    sp.add_argument("--suite", choices=[*verify.SUITES, "all"], default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="exact vs asymptotic table over lambda")
    gkl(sp, with_lambda=False)
    sp.add_argument("--lambda-min", type=int, required=True)
    sp.add_argument("--lambda-max", type=int, required=True)
    sp.add_argument("--step", type=int, default=1)
    sp.add_argument("--out", default=None, help="CSV output path")
    sp.add_argument("--brute-budget", type=int, default=exact.BRUTE_BUDGET)
    sp.set_defaults(func=cmd_sweep)
    return ap


def _error(kind: str, exc: Exception):
    sys.stderr.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": kind, "message": str(exc)}) + "\n")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _error("usage", exc)
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_DOMAIN
    try:
        return args.func(args)
    except DomainError as exc:
        _error("domain", exc)
        return EXIT_DOMAIN
    except BudgetError as exc:
        _error("budget", exc)
        return EXIT_BUDGET
    except IntegrityError as exc:
        _error("integrity", exc)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
