"""Command line interface.

All output is assembled in memory and written only on success; failures
print a one-line JSON object on stderr and exit with status 1 or 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import closed_forms as cf
from .coupon import CouponInstance
from .coupon import result_dict as coupon_result
from .engine import GenerationProfile, partial_bounds, result_dict
from .groups import build_group
from .lattice import MAX_SUBGROUPS, generation_profile
from .numfmt import format_fixed, format_sig, fraction_json
from .simulation import SimConfig, empirical_chebotarev, empirical_distribution_csv, poisson_model_estimate
from .symalt import partial_invariants


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_cap() -> int:
    try:
        return int(os.environ.get("CHEBOTAREV_MAX_ORDER", "5000"))
    except ValueError:
        raise UsageError("CHEBOTAREV_MAX_ORDER must be an integer") from None


def _load_json_arg(text: str):
    """Inline JSON, or a path to a JSON file."""
    text = text.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {text}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _profile_from_args(args):
    if args.profile:
        return None, GenerationProfile.from_json(_read_file(args.profile))
    if not args.group:
        raise UsageError("one of --group or --profile is required")
    G = build_group(_load_json_arg(args.group), cap=args.max_order)
    return G, generation_profile(G, max_subgroups=args.max_subgroups)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ------------------------------------------------------------------ commands

def cmd_compute(args) -> str:
    G, profile = _profile_from_args(args)
    out = {"order": profile.order, "maximal_classes": profile.rows}
    out.update(result_dict(profile))
    if args.partial is not None:
        try:
            M = [int(x) for x in args.partial.split(",") if x.strip()]
        except ValueError:
            raise UsageError("--partial takes comma-separated row indices") from None
        p_M = Fraction(args.p_m) if args.p_m is not None else None
        pb = partial_bounds(profile, M, p_M)
        out["partial"] = {
            "rows": M,
            "e1": fraction_json(pb.e1), "e2": fraction_json(pb.e2),
            "c_bounds": [fraction_json(x) for x in pb.c_bounds],
            "c2_bounds": [fraction_json(x) for x in pb.c2_bounds],
            "c_bounds_decimal": [format_fixed(x, 6) for x in pb.c_bounds],
            "c2_bounds_decimal": [format_fixed(x, 6) for x in pb.c2_bounds],
        }
    if args.export_profile:
        out["profile"] = profile.to_dict()
    return json.dumps(out) + "\n"


TABLE_4_ROWS = [("Z/17", 16), ("C8 in H17", 8), ("C4 in H17", 4), ("C2 in H17", 2), ("H17", 1)]


def _table_specs(args):
    t = args.table
    if t == 1:
        hi = args.max_n or 7
        return ["n", "order"], [((n,), {"family": "alternating", "n": n}) for n in range(2, hi + 1)]
    if t == 3:
        hi = args.max_n or 6
        return ["n", "order"], [((n,), {"family": "symmetric", "n": n}) for n in range(2, hi + 1)]
    if t == 4:
        if args.rows != "solvable":
            raise UsageError("table 4 is only available with --rows solvable")
        return ["group", "order"], [((name,), {"family": "affine", "p": 17, "index": idx})
                                    for name, idx in TABLE_4_ROWS]
    from sympy import primerange
    if t == 11:
        hi = args.max_p or 5
        return ["p", "order"], [((p,), {"family": "borel3", "p": p}) for p in primerange(2, hi + 1)]
    if t == 12:
        hi = args.max_p or 13
        return ["p", "order"], [((p,), {"family": "psl2", "p": p}) for p in primerange(2, hi + 1)]
    raise UsageError(f"unknown table {t}")


def cmd_tables(args, errors: list) -> str:
    if args.table == 2:
        hi = args.max_n or 20
        rows = []
        for n in range(3, hi + 1):
            try:
                e1, e2 = partial_invariants(n, "alt")
            except ValueError as exc:
                errors.append({"row": n, "error": str(exc)})
                continue
            rows.append([n, format_sig(e1), format_sig(e2)])
        return _csv(rows, ["n", "E", "E2"]) if rows else ""
    header, specs = _table_specs(args)
    rows = []
    for key, spec in specs:
        try:
            G = build_group(spec, cap=args.max_order)
            profile = generation_profile(G, max_subgroups=args.max_subgroups)
        except ValueError as exc:
            errors.append({"row": key[0], "error": str(exc)})
            continue
        from .engine import chebotarev, secondary
        rows.append([*key, G.order, format_sig(chebotarev(profile)), format_sig(secondary(profile))])
    return _csv(rows, header + ["c", "c2"]) if rows else ""


def cmd_simulate(args) -> str:
    if args.poisson:
        cfg = SimConfig(args.trials, args.seed, L=args.L, B=args.B)
        hist = poisson_model_estimate(cfg)
    else:
        G, profile = _profile_from_args(args)
        hist = empirical_chebotarev(G, profile, SimConfig(args.trials, args.seed))
    if args.format == "json":
        return json.dumps(hist.summary()) + "\n"
    return empirical_distribution_csv(hist)


def cmd_coupon(args) -> str:
    inst = CouponInstance.from_json(_read_file(args.spec))
    return json.dumps(coupon_result(inst)) + "\n"


def _interval(v: cf.CertifiedValue) -> dict:
    return {"lower": fraction_json(v.lower), "upper": fraction_json(v.upper),
            "lower_decimal": format_fixed(v.lower, 18), "upper_decimal": format_fixed(v.upper, 18)}


def _exact(c, c2) -> dict:
    return {"chebotarev": fraction_json(c), "decimal": format_fixed(c, 6),
            "secondary": fraction_json(c2), "secondary_decimal": format_fixed(c2, 6)}


def cmd_closed_form(args) -> str:
    tol = Fraction(args.tol)
    if tol <= 0:
        raise UsageError("--tol must be positive")
    out = {}
    if args.niven:
        out["niven"] = _interval(cf.niven_limit(tol))
    if args.cyclic is not None:
        out["cyclic"] = _exact(cf.cheb_cyclic(args.cyclic), cf.sec_cyclic(args.cyclic))
    if args.elementary is not None:
        p, k = args.elementary
        out["elementary"] = _exact(cf.cheb_elementary(p, k), cf.sec_elementary(p, k))
    if args.affine is not None:
        out["affine"] = _exact(cf.cheb_affine(args.affine), cf.sec_affine(args.affine))
    if args.abelian is not None:
        try:
            factors = [int(x) for x in args.abelian.split(",")]
        except ValueError:
            raise UsageError("--abelian takes comma-separated factors") from None
        shape = cf.AbelianShape.from_factors(factors)
        out["abelian"] = {"chebotarev": _interval(cf.cheb_abelian(shape, tol)),
                          "secondary": _interval(cf.sec_abelian(shape, tol))}
    if not out:
        raise UsageError("choose at least one of --niven, --cyclic, --elementary, --affine, --abelian")
    return json.dumps(out) + "\n"


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chebotarev", description="Exact Chebotarev invariants of finite groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def caps(p):
        p.add_argument("--max-order", type=int, default=None,
                       help="largest group order to enumerate (default 5000 or $CHEBOTAREV_MAX_ORDER)")
        p.add_argument("--max-subgroups", type=int, default=MAX_SUBGROUPS)

    p = sub.add_parser("compute", help="c and c2 of a group or an imported profile")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--group", help="group spec as JSON text or a JSON file")
    g.add_argument("--profile", help="generation profile JSON file")
    p.add_argument("--partial", help="comma-separated maximal-class rows for partial bounds")
    p.add_argument("--p-m", help="exact p_M for --partial (default: computed from the profile)")
    p.add_argument("--export-profile", action="store_true", help="include the profile in the output")
    caps(p)

    p = sub.add_parser("tables", help="reproduce a table as CSV")
    p.add_argument("--table", type=int, required=True, choices=[1, 2, 3, 4, 11, 12])
    p.add_argument("--max-n", type=int)
    p.add_argument("--max-p", type=int)
    p.add_argument("--rows", choices=["solvable"], default="solvable")
    caps(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the waiting time")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--group")
    g.add_argument("--profile")
    g.add_argument("--poisson", action="store_true", help="simulate the Poisson limit model")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--L", type=int, default=100)
    p.add_argument("--B", type=int, default=1024)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    caps(p)

    p = sub.add_parser("coupon", help="moments of a coupon subset collection instance")
    p.add_argument("--spec", required=True)

    p = sub.add_parser("closed-form", help="closed formulas and certified series")
    p.add_argument("--niven", action="store_true")
    p.add_argument("--tol", default="1e-12")
    p.add_argument("--cyclic", type=int)
    p.add_argument("--elementary", type=int, nargs=2, metavar=("P", "K"))
    p.add_argument("--affine", type=int)
    p.add_argument("--abelian", help="comma-separated cyclic factors")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    errors: list = []
    try:
        args = build_parser().parse_args(argv)
        if hasattr(args, "max_order") and args.max_order is None:
            args.max_order = _default_cap()
        if args.command == "compute":
            text = cmd_compute(args)
        elif args.command == "tables":
            text = cmd_tables(args, errors)
        elif args.command == "simulate":
            text = cmd_simulate(args)
        elif args.command == "coupon":
            text = cmd_coupon(args)
        else:
            text = cmd_closed_form(args)
    except UsageError as exc:
        stderr.write(json.dumps({"error": str(exc), "type": "usage"}) + "\n")
        return 2
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        stderr.write(json.dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return 1
    if errors and not text:
        stderr.write(json.dumps({"error": "no table rows could be computed", "rows": errors}) + "\n")
        return 1
    for e in errors:
        stderr.write(json.dumps(e) + "\n")
    stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
