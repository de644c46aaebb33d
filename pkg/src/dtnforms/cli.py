"""Command line front end: ``dtnforms <command> [options]``.

Exit status is 0 on success, 1 when a verification fails and 2 for usage
errors. Exact rationals are printed as ``"p/q"`` strings; floating results
carry a ``tolerance`` field.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction

THREAD_ENV = "DTNFORMS_THREADS"

GALERKIN_TOL = 1e-10
RADIAL_TOL = 1e-8


class UsageError(ValueError):
    pass


def _limit_threads() -> None:
    n = os.environ.get(THREAD_ENV)
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _q(x) -> str:
    return str(Fraction(x))


def _float(value: float, tol: float) -> dict:
    return {"value": value, "tolerance": tol}


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction_arg(t) for t in text.split(",") if t.strip()]


def _emit(args, records: list[dict], columns: list[str] | None = None) -> None:
    if args.format == "csv":
        cols = columns or list(records[0]) if records else []
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in records:
            w.writerow({k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in r.items()})
        sys.stdout.write(buf.getvalue())
    elif args.format == "pretty":
        for r in records:
            print("  ".join(f"{k}={v}" for k, v in r.items()))
    else:
        print(json.dumps(records if len(records) != 1 or args.list else records[0], indent=2, sort_keys=False))


def _check_np(n: int, p: int, p_min: int = 0) -> None:
    if n < 1:
        raise UsageError(f"n must be at least 1, got {n}")
    if not p_min <= p <= n:
        raise UsageError(f"p must be in {p_min}..{n}, got {p}")


# -- commands ---------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    from .ball import enumerate_spectrum

    _check_np(args.n, args.p)
    if args.kmax < 1:
        raise UsageError("kmax must be at least 1")
    levels = enumerate_spectrum(args.n, args.p, args.kmax)
    records = [
        {
            "eigenvalue": _q(lv.eigenvalue),
            "multiplicity": lv.multiplicity,
            "sources": [{"family": e.family, "k": e.k, "multiplicity": e.multiplicity} for e in lv.entries],
        }
        for lv in levels
    ]
    args.list = True
    _emit(args, records, ["eigenvalue", "multiplicity", "sources"])
    return 0


def cmd_verify_ball(args) -> int:
    from .ball import VerificationError, spectrum_entries, verify_degree

    if args.n < 1:
        raise UsageError(f"n must be at least 1, got {args.n}")
    if args.p is not None:
        _check_np(args.n, args.p)
    if args.kmax < 1:
        raise UsageError("kmax must be at least 1")
    degrees = range(args.n + 1) if args.p is None else [args.p]
    status = 0
    records = []
    for p in degrees:
        try:
            pairs = verify_degree(args.n, p, args.kmax)
            failure = None
        except VerificationError as exc:
            pairs, failure, status = [], str(exc), 1
            print(failure, file=sys.stderr)
        counts: dict = {}
        for pair in pairs:
            key = (pair.entry.family, pair.entry.k)
            counts[key] = counts.get(key, 0) + int(pair.verified)
        for e in spectrum_entries(args.n, p, args.kmax):
            ok = failure is None and counts.get((e.family, e.k), 0) == e.multiplicity
            if not ok:
                status = 1
            records.append({
                "family": e.family, "n": e.n, "k": e.k, "p": e.p,
                "eigenvalue": _q(e.eigenvalue), "multiplicity": e.multiplicity, "verified": ok,
            })
    args.list = True
    _emit(args, records, ["family", "n", "k", "p", "eigenvalue", "multiplicity", "verified"])
    return status


def cmd_eigenform(args) -> int:
    from .ball import build_coexact_pair, build_exact_pair
    from .exterior import format_form
    from .harmonic import build_Hdoubleprime

    _check_np(args.n, args.p)
    if args.family == "exact":
        if args.p < 1:
            raise UsageError("the exact family needs p >= 1")
        basis = build_Hdoubleprime(args.n, args.k, args.p - 1).basis
    else:
        basis = build_Hdoubleprime(args.n, args.k, args.p).basis
    if not basis:
        raise UsageError(f"no {args.family} eigenforms for (n, k, p) = ({args.n}, {args.k}, {args.p})")
    if not 0 <= args.index < len(basis):
        raise UsageError(f"index must be in 0..{len(basis) - 1}")
    if args.family == "exact":
        pair = build_exact_pair(args.n, args.k, args.p, basis[args.index])
    else:
        pair = build_coexact_pair(args.n, args.k, args.p, basis[args.index])
        if pair.entry.family != args.family:
            raise UsageError(f"(k, p) = ({args.k}, {args.p}) belongs to the {pair.entry.family} family")
    rec = {
        "family": pair.entry.family, "n": args.n, "k": args.k, "p": args.p,
        "eigenvalue": _q(pair.entry.eigenvalue), "multiplicity": pair.entry.multiplicity,
        "boundary_eigenform": format_form(pair.boundary_eigenform),
        "extension": format_form(pair.extension),
        "restriction_factor": _q(pair.proportionality),
        "checks": pair.checks, "verified": pair.verified,
    }
    args.list = False
    _emit(args, [rec])
    return 0 if pair.verified else 1


def cmd_radial(args) -> int:
    from .radial import RadialProblem, profile_by_name, solve_radial_profile, volume_ratio

    _check_np(args.n, args.p)
    prof = profile_by_name(args.profile)
    records = []
    for R in args.R:
        sol = solve_radial_profile(RadialProblem.coexact(prof, args.n, args.p, args.k, R))
        rec = {"profile": args.profile, "n": args.n, "p": args.p, "k": args.k, "R": R,
               "nu": _float(sol.nu, RADIAL_TOL)}
        if args.p == args.n:
            rec["volume_ratio"] = _float(volume_ratio(prof, args.n, R), RADIAL_TOL)
        records.append(rec)
    if args.format == "csv":
        for r in records:
            r["nu"] = r["nu"]["value"]
            if "volume_ratio" in r:
                r["volume_ratio"] = r["volume_ratio"]["value"]
    args.list = len(records) > 1
    _emit(args, records)
    return 0


def _problem(args):
    from .galerkin import GalerkinProblem

    _check_np(args.n, args.p)
    axes = None
    if args.domain == "ellipsoid":
        if not args.axes:
            raise UsageError("--axes is required for an ellipsoid")
        axes = tuple(args.axes)
        if len(axes) != args.n + 1:
            raise UsageError(f"need {args.n + 1} semi-axes, got {len(axes)}")
        if any(a <= 0 for a in axes):
            raise UsageError("semi-axes must be positive")
    if args.D < 1:
        raise UsageError("D must be at least 1")
    return GalerkinProblem(args.n, args.p, args.D, args.domain, axes)


def _galerkin_record(gp, res, iso=None) -> dict:
    from .ball import first_eigenvalue

    closed = first_eigenvalue(gp.n, gp.p) if gp.domain == "ball" else None
    value = _q(res.exact_value) if res.exact_value is not None else _float(res.value, GALERKIN_TOL)
    rec = {
        "domain": gp.domain, "n": gp.n, "p": gp.p, "D": gp.D,
        "galerkin_value": value,
        "closed_form": _q(closed) if closed is not None else None,
        "iso_rhs": None, "verdict": None,
    }
    if iso is not None:
        rec["iso_rhs"] = _q(iso.rhs_exact) if iso.rhs_exact is not None else _float(iso.rhs, GALERKIN_TOL)
        rec["verdict"] = iso.verdict
    rec["certificate"] = res.certificate
    rec["trial_dimension"] = res.trial_dimension
    if gp.semi_axes:
        rec["semi_axes"] = [_q(a) for a in gp.semi_axes]
    return rec


def cmd_galerkin(args) -> int:
    from .galerkin import iso_bound_check, smallest_rayleigh

    gp = _problem(args)
    if 1 <= gp.p <= gp.n:
        iso = iso_bound_check(gp)
        res = iso.galerkin
    else:
        iso, res = None, smallest_rayleigh(gp)
    args.list = False
    _emit(args, [_galerkin_record(gp, res, iso)])
    return 0


def cmd_iso_check(args) -> int:
    from .galerkin import iso_bound_check

    gp = _problem(args)
    if gp.p < 1:
        raise UsageError("the isoperimetric check needs p >= 1")
    iso = iso_bound_check(gp)
    rec = _galerkin_record(gp, iso.galerkin, iso)
    rec["margin"] = _float(iso.margin, GALERKIN_TOL)
    if iso.equality_margin is not None:
        rec["equality_margin"] = _q(iso.equality_margin)
        rec["equality_expected"] = iso.equality_expected
    args.list = False
    _emit(args, [rec])
    return 0


def cmd_vf3(args) -> int:
    from .galerkin import vector_field_rayleigh_3d
    from .polycore import parse_poly

    parts = args.field.split(";")
    if len(parts) != 3:
        raise UsageError("--field needs three components separated by ';'")
    X = [parse_poly(s, 3) for s in parts]
    value = vector_field_rayleigh_3d(X, args.boundary)
    args.list = False
    _emit(args, [{"field": args.field, "boundary": args.boundary, "quotient": _q(value)}])
    return 0


def cmd_moments(args) -> int:
    from .galerkin import parallel_average, parallel_moment_identities
    from .polycore import rational_sphere_point

    _check_np(args.n, args.p, 1)
    rng = random.Random(args.seed)

    def rand_q():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 9))

    normal = rational_sphere_point([rand_q() for _ in range(args.n)])
    ident = parallel_moment_identities(args.n, args.p, normal)
    X = [rand_q() for _ in range(args.n + 1)]
    Y = [rand_q() for _ in range(args.n + 1)]
    avg = parallel_average(X, Y)
    inner = sum((a * b for a, b in zip(X, Y)), Fraction(0))
    ok = ident["ok"] and avg == inner
    rec = {
        "n": args.n, "p": args.p, "seed": args.seed,
        "normal": [_q(v) for v in normal],
        "full": _q(ident["full"]), "full_expected": _q(ident["full_expected"]),
        "normal_component": _q(ident["normal"]), "normal_expected": _q(ident["normal_expected"]),
        "pair_average": _q(avg), "pair_inner": _q(inner),
        "ok": ok,
    }
    args.list = False
    _emit(args, [rec])
    return 0 if ok else 1


def cmd_dims(args) -> int:
    from .harmonic import dimension_table

    if args.n < 1 or args.kmax < 0:
        raise UsageError("need n >= 1 and kmax >= 0")
    args.list = True
    _emit(args, [r.as_dict() for r in dimension_table(args.n, args.kmax)])
    return 0


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtnforms", description="Dirichlet-to-Neumann spectra on forms.")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomly drawn test data")
    fmt = argparse.ArgumentParser(add_help=False)
    g = fmt.add_mutually_exclusive_group()
    g.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    g.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output")
    g.add_argument("--pretty", dest="format", action="store_const", const="pretty", help="one line per record")
    fmt.set_defaults(format="json", list=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def np_args(sp, kmax=False):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--p", type=int, required=True)
        if kmax:
            sp.add_argument("--max-k", "--kmax", dest="kmax", type=int, default=3)

    sp = sub.add_parser("spectrum", parents=[fmt], help="closed-form spectrum of the unit ball")
    np_args(sp, kmax=True)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("verify-ball", parents=[fmt], help="certify every eigenform up to max-k exactly")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, help="single form degree (default: all)")
    sp.add_argument("--max-k", "--kmax", dest="kmax", type=int, default=3)
    sp.set_defaults(func=cmd_verify_ball)

    sp = sub.add_parser("eigenform", parents=[fmt], help="print one certified eigenform and its extension")
    np_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--family", choices=["coexact", "exact", "volume", "function"], default="coexact")
    sp.add_argument("--index", type=int, default=0, help="basis element to use")
    sp.set_defaults(func=cmd_eigenform)

    sp = sub.add_parser("radial", parents=[fmt], help="co-exact eigenvalue of a rotationally symmetric ball")
    np_args(sp)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--profile", default="euclidean", help="euclidean, spherical or hyperbolic")
    sp.add_argument("--R", type=float, nargs="+", default=[1.0])
    sp.set_defaults(func=cmd_radial)

    for name, func, text in (("galerkin", cmd_galerkin, "Galerkin upper bound for the first eigenvalue"),
                             ("iso-check", cmd_iso_check, "check the isoperimetric upper bound")):
        sp = sub.add_parser(name, parents=[fmt], help=text)
        np_args(sp)
        sp.add_argument("--D", type=int, default=3, help="maximal polynomial degree")
        sp.add_argument("--domain", choices=["ball", "ellipsoid"], default="ball")
        sp.add_argument("--axes", type=_fraction_list, help="comma separated semi-axes")
        sp.set_defaults(func=func)

    sp = sub.add_parser("vf3", parents=[fmt], help="div/curl quotient of a vector field on the ball in R^3")
    sp.add_argument("--field", required=True, help="three polynomials in x1,x2,x3 separated by ';'")
    sp.add_argument("--boundary", choices=["tangent", "normal"], default="tangent")
    sp.set_defaults(func=cmd_vf3)

    sp = sub.add_parser("moments", parents=[fmt], help="averaging identities for parallel forms")
    np_args(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("dims", parents=[fmt], help="dimensions of the harmonic form spaces")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--max-k", "--kmax", dest="kmax", type=int, default=3)
    sp.set_defaults(func=cmd_dims)
    return parser


def main(argv=None) -> int:
    _limit_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dtnforms {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"dtnforms {args.command}: verification failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"dtnforms {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
