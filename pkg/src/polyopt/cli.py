"""Command line entry point: ``polyopt solve`` and ``polyopt radical``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .driver import STRATEGIES, RunConfig, minimize, real_radical
from .problems import EXAMPLES, ProblemFormatError, example, load_problem
from .sdp import SolverOptions


def _problem(spec: str):
    if spec.startswith("example:"):
        return example(spec.split(":", 1)[1])
    return load_problem(spec)


def _config(args) -> RunConfig:
    sdp = SolverOptions(gap_tol=args.sdp_gap_tol, feas_tol=args.sdp_feas_tol, max_iter=args.sdp_max_iter)
    known = None if args.known_minimum is None else Fraction(args.known_minimum)
    return RunConfig(strategy=args.strategy, max_order=args.max_order, rank_tol=args.rank_tol, sdp=sdp,
                     known_minimum=known, rank_bound=args.rank_bound, full_fj=args.full_fj,
                     finite_variety=args.finite_variety, refine=not args.no_refine, depth=args.depth,
                     seed=args.seed, export_dir=args.export_sdpa,
                     cross_check=args.cross_check)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("problem", help=f"problem file, or example:NAME with NAME in {', '.join(EXAMPLES)}")
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--rank-tol", type=float, default=1e-6, help="relative eigenvalue threshold for ranks")
    p.add_argument("--sdp-gap-tol", type=float, default=1e-9)
    p.add_argument("--sdp-feas-tol", type=float, default=1e-9)
    p.add_argument("--sdp-max-iter", type=int, default=200)
    p.add_argument("--export-sdpa", metavar="DIR", help="write every relaxation as SDPA sparse files")
    p.add_argument("--report", metavar="FILE", help="write the JSON report here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="minimize a polynomial over a basic semialgebraic set")
    _add_common(s)
    s.add_argument("--strategy", choices=STRATEGIES, default="auto")
    s.add_argument("--full-fj", action="store_true", help="always explore the singular branch")
    s.add_argument("--known-minimum", metavar="V", help="known optimal value (adds f - V to the equalities)")
    s.add_argument("--rank-bound", type=int, help="rank bound m for the Fritz-John minors")
    s.add_argument("--finite-variety", action="store_true",
                   help="the equalities have finitely many real zeros (auto uses the constraints directly)")
    s.add_argument("--no-refine", action="store_true", help="disable kernel refinement")
    s.add_argument("--cross-check", action="store_true",
                   help="re-solve each order with a perturbed objective and compare ranks")
    s.add_argument("--depth", type=int, default=3, help="recursion depth of the singular branches")
    r = sub.add_parser("radical", help="real radical generators of the equality constraints")
    _add_common(r)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        problem = _problem(args.problem)
    except (OSError, KeyError, ProblemFormatError, ValueError) as exc:
        print(f"polyopt: {exc}", file=sys.stderr)
        return 2
    if args.command == "solve":
        report = minimize(problem, _config(args))
        names = problem.names
        print(f"status: {report.status}")
        if report.fstar is not None:
            print(f"f* = {report.fstar:.10g}")
        for pt in report.points:
            print("point: " + ", ".join(f"{n}={v:.8g}" for n, v in zip(names, pt)))
        for g in report.generators:
            print(f"generator: {g.to_str(names)}")
        text = report.to_json()
        ok = report.status in ("solved", "stabilized", "infeasible")
    else:
        args.strategy, args.known_minimum, args.rank_bound = "auto", None, None
        args.full_fj, args.finite_variety, args.no_refine, args.depth = False, False, True, 3
        args.cross_check = False
        branch = real_radical(problem, _config(args))
        print(f"status: {branch.status}")
        for g in branch.generators:
            print(f"generator: {g.to_str(problem.names)}")
        text = json.dumps(branch.to_dict(), indent=2, default=float)
        ok = branch.status in ("solved", "stabilized")
    if args.report:
        Path(args.report).write_text(text + "\n")
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
