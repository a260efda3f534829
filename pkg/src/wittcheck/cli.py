"""Command-line driver: catalog browsing, verification suites, expression tools.

Exit codes: 0 all checks pass; 1 at least one oracle-confirmed discrepancy;
2 usage or configuration error; 3 symbolic/numeric disagreement (an internal
inconsistency).  The human summary goes to stdout; the JSON report is written
only when ``--json PATH`` is given and is byte-deterministic for fixed flags
and seed (timings are zeroed unless ``--timings`` is set).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from gmpy2 import mpq

from . import catalog, oracle, verify
from .expr import DomainError, ExprError
from .parser import ParseError, parse

USAGE_ERROR = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--range", type=int, default=4, metavar="N",
                   help="generator index range (default 4)")
    p.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED,
                   help="oracle sampling seed (default %d)" % oracle.DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=None, metavar="K",
                   help="worker processes (default: available CPUs)")
    p.add_argument("--json", metavar="PATH", help="write the JSON report to PATH")
    p.add_argument("--timings", action="store_true",
                   help="keep real per-check timings in the JSON report")
    p.add_argument("--params", metavar="K=V,...",
                   help="restrict to one parameter cell, e.g. gamma=1,phi=u,signs=++")
    p.add_argument("--all-pairings", action="store_true",
                   help="run full tables for rejected sign pairings too")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="wittcheck", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="inspect or export the realization catalog")
    cat_sub = cat.add_subparsers(dest="action", required=True)
    cat_list = cat_sub.add_parser("list", help="list realization ids and grid sizes")
    cat_exp = cat_sub.add_parser("export", help="print the catalog as JSON")
    cat_exp.add_argument("--range", type=int, default=3, metavar="N")
    cat_exp.add_argument("--json", metavar="PATH", help="write to PATH instead of stdout")

    ver = sub.add_parser("verify", help="run verification suites")
    ver.add_argument("suite", choices=verify.SUITES + ("all",),
                     help="which suite to run")
    ver.add_argument("--id", dest="rid", metavar="ID",
                     help="restrict to one realization id (e.g. W4, D3, C1)")
    ver.add_argument("--eq", metavar="EQ",
                     help="restrict invariance to one equation id (e.g. T1_W8)")
    ver.add_argument("--only", metavar="LIST",
                     help="comma-separated ids/suites to keep (verify all)")
    _add_common(ver)

    ex = sub.add_parser("expr", help="expression utilities")
    ex_sub = ex.add_subparsers(dest="action", required=True)
    ex_parse = ex_sub.add_parser("parse", help="parse and reprint canonically")
    ex_parse.add_argument("text")
    ex_diff = ex_sub.add_parser("diff", help="differentiate")
    ex_diff.add_argument("--var", required=True, choices=list("txu") + ["u_t", "u_x", "u_tt", "u_tx", "u_xx"])
    ex_diff.add_argument("text")
    ex_eq = ex_sub.add_parser("equal", help="decide exact equality of two expressions")
    ex_eq.add_argument("lhs")
    ex_eq.add_argument("rhs")

    orc = sub.add_parser("oracle", help="numeric adjudication utilities")
    orc_sub = orc.add_subparsers(dest="action", required=True)
    orc_cc = orc_sub.add_parser("cross-check", help="numerically test an expression for zero")
    orc_cc.add_argument("text")
    orc_cc.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED)
    orc_cc.add_argument("--points", type=int, default=20)
    orc_fd = orc_sub.add_parser("fd", help="finite-difference check of the derivative")
    orc_fd.add_argument("--var", required=True, choices=list("txu"))
    orc_fd.add_argument("text")
    orc_fd.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED)
    return top


def _parse_params(spec: Optional[str]) -> Optional[catalog.Params]:
    if not spec:
        return None
    fields: dict = {}
    for item in spec.split(","):
        if "=" not in item:
            raise ValueError("bad --params item %r" % item)
        key, value = item.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key in ("alpha", "beta", "gamma"):
            fields[key] = int(value)
        elif key == "sign":
            fields[key] = 1 if value in ("+", "1", "+1") else -1
        elif key == "signs":
            fields[key] = value
        elif key in ("lam", "lambda"):
            fields["lam"] = mpq(value)
        elif key == "phi":
            if value == "u":
                fields["phi"] = catalog.PHI_U
            elif value == "sym":
                fields["phi"] = catalog.PHI_SYM
            else:
                fields["phi"] = catalog.phi_c(value.removeprefix("c="))
        else:
            raise ValueError("unknown parameter %r" % key)
    return catalog.Params(**fields)


def _grid_for(rid: str, params: Optional[catalog.Params]) -> list:
    grid = catalog.param_grid(rid)
    if params is None:
        return grid
    chosen = [p for p in grid if p == params]
    return chosen or [params]


def _run_verify(args) -> int:
    plan_seed = args.seed
    n_range = args.range
    only = set(args.only.split(",")) if getattr(args, "only", None) else None
    report = verify.Report(seed=plan_seed, rng=n_range)
    plan = oracle.SamplePlan(seed=plan_seed)
    params = _parse_params(args.params)
    suite = args.suite
    try:
        if suite == "all":
            if args.rid:
                only = (only or set()) | {args.rid}
            report = verify.run_all(n_range, plan_seed, only=only, jobs=args.jobs,
                                    all_pairings=args.all_pairings)
        elif suite == "witt":
            rids = [args.rid] if args.rid else list(catalog.WITT_IDS)
            for rid in rids:
                if rid == "W4" and params is None:
                    for i in range(len(verify._w4_cells("W4"))):
                        report.extend(verify.check_witt_w4_cell(
                            "W4", i, n_range, plan, all_pairings=args.all_pairings))
                else:
                    for p in _grid_for(rid, params):
                        report.extend(verify.check_witt(rid, p, n_range, plan))
        elif suite == "sl2":
            rids = [args.rid] if args.rid else ["REP1", "REP2"]
            for rid in rids:
                for p in _grid_for(rid, params):
                    report.extend(verify.check_sl2(rid, p, plan))
        elif suite == "direct-sum":
            rids = [args.rid] if args.rid else list(catalog.DSUM_IDS)
            for rid in rids:
                if rid == "D9" and params is None:
                    for i in range(len(verify._w4_cells("D9"))):
                        report.extend(verify.check_witt_w4_cell(
                            "D9", i, n_range, plan, all_pairings=args.all_pairings))
                else:
                    for p in _grid_for(rid, params):
                        report.extend(verify.check_direct_sum(rid, p, n_range, plan))
        elif suite == "central":
            rids = [args.rid] if args.rid else list(catalog.CENTRAL_IDS)
            for rid in rids:
                for p in _grid_for(rid, params):
                    report.extend(verify.check_central(rid, p, plan))
        elif suite == "virasoro":
            report.extend(verify.check_virasoro_case1(plan))
            report.extend(verify.check_virasoro_case2(plan))
        elif suite == "invariance":
            eqs = [args.eq] if args.eq else [e for e in catalog.EQUATION_IDS if e != "LIO_EQ"]
            for eq in eqs:
                _, grid = catalog.equation_realization(eq)
                if params is not None:
                    grid = [params]
                for p in grid:
                    report.extend(verify.check_invariance(eq, p, n_range, plan))
        elif suite == "solution":
            lams = [params.lam] if params is not None and params.lam is not None else catalog.LAMBDA_REPS
            for lam in lams:
                report.extend(verify.check_solution_d2(lam, plan))
        elif suite == "liouville":
            report.extend(verify.check_liouville(plan))
        elif suite == "hodograph":
            lams = [params.lam] if params is not None and params.lam is not None else (mpq(1), mpq(2))
            for lam in lams:
                report.extend(verify.check_hodograph(lam, plan))
    except catalog.CatalogError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return USAGE_ERROR
    report.sort()
    sys.stdout.write(report.summary_table())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report.to_json(timings=args.timings))
    return report.exit_code()


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            if args.action == "list":
                for rid in catalog.REALIZATION_IDS:
                    print("%-12s grid size %d" % (rid, len(catalog.param_grid(rid))))
                return 0
            doc = catalog.catalog_export(args.range)
            text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
            if args.json:
                with open(args.json, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "expr":
            if args.action == "parse":
                print(parse(args.text))
                return 0
            if args.action == "diff":
                print(parse(args.text).diff(args.var))
                return 0
            if args.action == "equal":
                print("equal" if parse(args.lhs) == parse(args.rhs) else "different")
                return 0
        if args.command == "oracle":
            if args.action == "cross-check":
                plan = oracle.SamplePlan(seed=args.seed, points=args.points)
                print(oracle.cross_check(parse(args.text), plan, args.text))
                return 0
            if args.action == "fd":
                ok = oracle.fd_derivative_check(parse(args.text), args.var,
                                                oracle.SamplePlan(seed=args.seed, points=10))
                print("agree" if ok else "disagree")
                return 0 if ok else 1
    except (ParseError, DomainError, ExprError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
