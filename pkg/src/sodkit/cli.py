"""Command-line front end: ``sodkit <subcommand> ...``.

Every subcommand prints one JSON document.  Exit status: 0 when the check
passes, 1 when it runs but fails, 2 on usage errors or violated hypotheses.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import shlex
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .algebra import ModPrimePower
from .complexcurve import AnalyticHandle, ContourSpec, check_complex_hypotheses, sample_pairs, sod_zero_census
from .curves import REGISTRY_NAMES, resolve_handle, resolve_poly
from .diophantine import count_solutions, discrete_ratio_report, parse_set_spec
from .errors import SodkitError
from .extension_numeric import dump_grid_csv, verify_convex_theorem, verify_real_theorem
from .extension_padic import PadicMomentInstance, verify_padic_theorem
from .padic import find_sod_split_primes, hensel_lift, verify_prop_jb
from .partitions import (
    PartitionSpec,
    admissible_bases,
    estimate_c_phi,
    kdv_count_sweep,
    partition_cells,
)
from .report import dumps
from .rolle import check_prop_rolle_fails, check_rolle_failure
from .sod import COMPLEX_FIELD, REAL, CurveSpec, Padic, sod_axis_restriction

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# subcommands: each returns (payload, passed)


def _curve_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--phi", help='polynomial in one variable, e.g. "2x^4 - 4x^2"')
    g.add_argument("--handle", help=f"registry curve: {', '.join(REGISTRY_NAMES)}")


def _poly(args):
    return resolve_poly(args.phi, args.handle)


def cmd_sod(args):
    phi = _poly(args)
    curve = CurveSpec(phi)
    out = {"phi": repr(phi), "chi": repr(curve.chi), "psi": repr(curve.psi),
           "psi_axis": repr(sod_axis_restriction(phi)), "psi_json": curve.psi.to_dict()}
    if args.fiber:
        t1, t1p = (Fraction(s) for s in args.fiber.split(","))
        out["fiber"] = {"t1": str(t1), "t1p": str(t1p), "psi": repr(curve.fiber(t1, t1p, distinct=True))}
    return out, True


def cmd_hensel(args):
    f = _poly(args)
    lifted = hensel_lift(f, args.root, args.p, args.N)
    q = args.p**args.N
    value = f.with_domain(ModPrimePower(args.p, args.N)).eval(lifted.rep) % q
    return {"phi": repr(f), "p": args.p, "N": args.N, "root_mod_p": args.root % args.p,
            "lifted": lifted.rep, "modulus": q, "residual_mod_pN": value}, value == 0


def cmd_jb_verify(args):
    rep = verify_prop_jb(args.k, args.p, args.N, args.samples)
    return rep.to_dict(), rep.passed


def cmd_prime_search(args):
    primes = find_sod_split_primes(args.k, args.bound)
    return {"k": args.k, "bound": args.bound, "primes": primes, "count": len(primes)}, True


def _field(args):
    if args.field == "real":
        return REAL
    if args.field == "complex":
        return COMPLEX_FIELD
    if args.p is None:
        raise UsageError("--field padic needs --p")
    return Padic(args.p)


def cmd_kdv_count(args):
    phi = _poly(args)
    fld = _field(args)
    curve = CurveSpec(phi, fld)
    spec = PartitionSpec(fld, args.R)
    Cs, auto = [], None
    for tok in args.C.split(","):
        if tok.strip() == "auto":
            auto = estimate_c_phi(curve, spec)
            Cs.append(auto.value)
        else:
            Cs.append(Fraction(tok))
    bound = 625 * (curve.k - 1)
    cells = partition_cells(spec)
    if args.base and not args.all_bases:
        a, b = (int(t) for t in args.base.split(","))
        bases = [(cells[a], cells[b])]
    else:
        bases = admissible_bases(spec)
    worst = {str(C): 0 for C in Cs}
    per_base = []
    for I1, I1p in bases:
        counts = kdv_count_sweep(curve, spec, I1, I1p, Cs)
        per_base.append({"I1": str(I1), "I1p": str(I1p), "counts": {str(C): n for C, n in counts.items()}})
        for C, n in counts.items():
            worst[str(C)] = max(worst[str(C)], n)
    passed = all(v <= bound for v in worst.values())
    out = {"phi": repr(phi), "field": str(fld), "R": args.R, "bases": len(bases),
           "max_count_by_C": worst, "bound": bound, "bound_label": "625 (deg phi - 1)", "passed": passed}
    if args.per_base:
        out["per_base"] = per_base
    if auto is not None:
        out["C_estimate"] = auto.to_dict()
        if auto.heuristic:
            out["warning"] = "estimated C is heuristic; pass explicit --C values to override"
    return out, passed


def cmd_dio_count(args):
    phi = _poly(args)
    A = parse_set_spec(args.set_spec)
    tally = count_solutions(phi, A, args.p, args.i)
    out = {"tally": tally.to_dict()}
    passed = True
    if args.p is not None and args.i is not None:
        rep = discrete_ratio_report(phi, A, args.p, args.i)
        out["report"] = rep.to_dict()
        passed = rep.passed
    return out, passed


def _cells(text, R):
    if text is None:
        return None
    vals = [complex(v) for v in text.split(",")]
    if len(vals) != R:
        raise UsageError(f"--f needs {R} comma-separated cell values")
    return vals


def cmd_verify_real(args):
    handle = resolve_handle(args.phi, args.handle)
    if args.C == "auto":
        if handle.poly is None:
            raise UsageError("--C auto needs a polynomial curve")
        C = float(estimate_c_phi(CurveSpec(handle.poly)).value)
    else:
        C = float(Fraction(args.C))
    f = _cells(args.f, args.R)
    run = verify_convex_theorem if args.convex else verify_real_theorem
    rep = run(handle, f, R=args.R, C=C, weight=args.weight, refine=not args.no_refine, density=args.grid_density)
    if args.csv:
        dump_grid_csv(handle, args.R, C, 2 if args.convex else handle.k, args.csv, f, args.weight)
    return rep.to_dict(), rep.passed


def cmd_verify_padic(args):
    phi = _poly(args)
    rep = verify_padic_theorem(PadicMomentInstance(args.p, args.i, args.m, phi), c=args.c)
    return rep.to_dict(), rep.passed


def cmd_voorhoeve(args):
    phi = _poly(args)
    handle = AnalyticHandle.from_poly(phi)
    hyp = check_complex_hypotheses(handle, args.k, args.beta)
    contour = ContourSpec(nodes=args.nodes)
    results = [sod_zero_census(handle, a, b, args.k, contour) for a, b in sample_pairs(args.pairs, args.seed)]
    vmax = max(r.voorhoeve for r in results)
    err = max(r.quadrature_error for r in results)
    bound = math.sqrt(2) / math.pi
    passed = vmax <= bound + args.tol and all(r.below_one for r in results)
    return {"phi": repr(phi), "k": args.k, "beta": args.beta, "seed": args.seed, "hypotheses": hyp.to_dict(),
            "max_voorhoeve": vmax, "max_quadrature_error": err, "bound": bound, "bound_label": "sqrt(2)/pi",
            "tolerance": args.tol, "pairs": [r.to_dict() for r in results], "passed": passed}, passed


def cmd_rolle(args):
    primes = [int(t) for t in args.p_list.split(",") if t.strip()]
    out = []
    for p in primes:
        entry = {"p": p, "rolle_failure": check_rolle_failure(p).to_dict()}
        if p > 2:
            entry["interpolation_failure"] = check_prop_rolle_fails(p).to_dict()
        entry["passed"] = entry["rolle_failure"]["passed"] and entry.get("interpolation_failure", {}).get("passed", True)
        out.append(entry)
    passed = all(e["passed"] for e in out)
    return {"primes": out, "passed": passed}, passed


def cmd_batch(args):
    return batch_run(args.config, jobs=args.jobs, seed=args.seed)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sodkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-reproducibility)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sod", help="first- and second-order differencing polynomials")
    _curve_args(p)
    p.add_argument("--fiber", help="t1,t1' (rationals) for the fiber psi(t1, Y, t1')")
    p.set_defaults(func=cmd_sod)

    p = sub.add_parser("hensel", help="lift a simple root mod p to Z/p^N")
    _curve_args(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--N", type=int, default=8)
    p.set_defaults(func=cmd_hensel)

    p = sub.add_parser("jb-verify", help="check that psi of 2X^k - kX^2 splits over Z_p")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--samples", type=int, default=25)
    p.set_defaults(func=cmd_jb_verify)

    p = sub.add_parser("prime-search", help="primes satisfying the splitting hypotheses for 2X^k - kX^2")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_prime_search)

    p = sub.add_parser("kdv-count", help="pair counting over all admissible base pairs")
    _curve_args(p)
    p.add_argument("--field", choices=["real", "complex", "padic"], default="real")
    p.add_argument("--p", type=int)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--C", default="1,1/2,1/4,auto", help="comma list of constants; 'auto' = estimate_c_phi")
    p.add_argument("--base", help="one base pair as cell indices 'a,b' (default: every admissible pair)")
    p.add_argument("--all-bases", action="store_true", help="sweep every admissible base pair")
    p.add_argument("--per-base", action="store_true", help="include the count of every base pair")
    p.set_defaults(func=cmd_kdv_count)

    p = sub.add_parser("dio-count", help="solution counts of the paired system over a finite set")
    _curve_args(p)
    p.add_argument("--set-spec", required=True, help="range:a..b | list:1,2,5 | file:PATH")
    p.add_argument("--p", type=int)
    p.add_argument("--i", type=int)
    p.set_defaults(func=cmd_dio_count)

    p = sub.add_parser("verify-real", help="L^4(W_B) norms of E f and S f over R")
    _curve_args(p)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--C", default="auto", help="ball constant in (0, 1] or 'auto'")
    p.add_argument("--grid-density", type=float, default=1.0, help="grid points per band-limited minimum (>= 1)")
    p.add_argument("--weight", choices=["fejer", "indicator"], default="fejer")
    p.add_argument("--f", help="comma-separated complex cell values (default all 1)")
    p.add_argument("--convex", action="store_true", help="use the convex-curve hypotheses (k = 2 geometry)")
    p.add_argument("--no-refine", action="store_true", help="skip the grid-halving check")
    p.add_argument("--csv", help="dump a subsampled |E|^4, S^4 grid to this CSV file")
    p.set_defaults(func=cmd_verify_real)

    p = sub.add_parser("verify-padic", help="exact fourth moments over Q_p")
    _curve_args(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=int, default=0, help="valuation offset with p^-c <= C_phi")
    p.set_defaults(func=cmd_verify_padic)

    p = sub.add_parser("voorhoeve", help="Voorhoeve index of the differenced curve on sampled pairs")
    _curve_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_voorhoeve)

    p = sub.add_parser("rolle", help="Rolle and interpolation counterexamples over Z_p")
    p.add_argument("--p-list", required=True)
    p.set_defaults(func=cmd_rolle)

    p = sub.add_parser("batch", help="run jobs from an INI file")
    p.add_argument("config")
    p.add_argument("--jobs", type=int, default=None, help="parallel jobs (env SODKIT_JOBS overrides)")
    p.add_argument("--seed", type=int, default=None, help="seed passed to jobs that take one")
    p.set_defaults(func=cmd_batch)
    return parser


def _run(argv: list[str], timing: bool | None = None) -> tuple[dict, int]:
    """Parse and run one command; never raises for domain errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return {"error": "usage", "argv": argv}, code
    t0 = time.perf_counter()
    try:
        payload, passed = args.func(args)
        code = EXIT_PASS if passed else EXIT_FAIL
    except (SodkitError, UsageError, ValueError, KeyError, ArithmeticError) as exc:
        payload = {"error": type(exc).__name__, "message": exc.args[0] if exc.args else str(exc)}
        hyp = getattr(exc, "hypothesis", "")
        if hyp:
            payload["hypothesis"] = hyp
        code = EXIT_USAGE
    if timing if timing is not None else args.timing:
        payload = dict(payload, timing_seconds=time.perf_counter() - t0)
    return dict(payload, command=args.command, exit_code=code), code


def _write(payload: dict, out: str | None) -> None:
    text = dumps(payload) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    payload, code = _run(argv)
    if "message" in payload:
        print(f"sodkit: {payload['error']}: {payload.get('message', '')}", file=sys.stderr)
    out = None
    if "--out" in argv:
        out = argv[argv.index("--out") + 1]
    _write(payload, out)
    return code


# ---------------------------------------------------------------------------
# batch


SEEDED = {"voorhoeve"}


def read_batch_config(path: str) -> tuple[list[tuple[str, list[str]]], dict]:
    """INI file: optional [batch] section (seed, jobs); one [job:NAME] section per job with ``args``."""
    cp = configparser.ConfigParser(interpolation=None)
    if not cp.read(path):
        raise UsageError(f"cannot read batch config {path}")
    settings = dict(cp["batch"]) if cp.has_section("batch") else {}
    jobs = []
    for section in cp.sections():
        if section.startswith("job:"):
            if "args" not in cp[section]:
                raise UsageError(f"[{section}] needs an 'args' line")
            jobs.append((section[4:], shlex.split(cp[section]["args"])))
    return jobs, settings


def batch_run(config: str, jobs: int | None = None, seed: int | None = None) -> tuple[dict, bool]:
    entries, settings = read_batch_config(config)
    if seed is None:
        seed = int(settings.get("seed", 0))
    workers = int(os.environ.get("SODKIT_JOBS") or jobs or settings.get("jobs", 1))
    workers = max(1, workers)

    def prepare(argv):
        if argv and argv[0] in SEEDED and "--seed" not in argv:
            argv = argv + ["--seed", str(seed)]
        if argv and argv[0] == "batch":
            raise UsageError("nested batch jobs are not allowed")
        return argv

    def one(item):
        name, argv = item
        try:
            payload, code = _run(prepare(argv), timing=False)
        except UsageError as exc:
            payload, code = {"error": "UsageError", "message": str(exc)}, EXIT_USAGE
        return {"name": name, "argv": argv, "exit_code": code, "passed": code == EXIT_PASS, "report": payload}

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, entries))  # map keeps job order
    passed = all(r["passed"] for r in results)
    return {"config": Path(config).name, "seed": seed, "jobs": results, "job_count": len(results),
            "passed": passed, "version": __version__}, passed


if __name__ == "__main__":
    sys.exit(main())
