"""The relaxation loop: constraint strategy, order iteration, certification.

``minimize`` picks a constraint set for the KKT branch, runs the moment
hierarchy on it and, when the KKT branch is empty (or ``full_fj`` is set),
recurses into the singular locus of the constraints.  ``real_radical``
runs the hierarchy with a zero objective and reports kernel generators.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import certify as cert
from . import constraints as cs
from .constraints import ConstraintSet, ProblemInstance
from .groebner import GroebnerBudgetExceeded
from .moment import assemble, export_sdpa, moment_matrix, starting_order
from .polycore import Polynomial
from .sdp import DUAL_UNBOUNDED, PRIMAL_INFEASIBLE, SolverOptions, solve, solve_sdp, verify_infeasibility

log = logging.getLogger(__name__)

STRATEGIES = ("auto", "gradient", "kkt-elim", "fj-minors", "fj-gram", "direct", "known-minimum")

# branch verdicts
SOLVED = "solved"
STABILIZED = "stabilized"
INFEASIBLE = "infeasible"
UNDECIDED = "undecided"


@dataclass
class RunConfig:
    strategy: str = "auto"
    max_order: int = 6
    rank_tol: float = cert.DEFAULT_RANK_TOL
    sdp: SolverOptions = field(default_factory=SolverOptions)
    accept_tol: float = 1e-6
    depth: int = 3
    known_minimum: object = None
    rank_bound: int | None = None
    full_fj: bool = False
    finite_variety: bool = False
    refine: bool = True
    refine_rounds: int = 3
    stabilize_tol: float = 1e-7
    seed: int = 0
    export_dir: str | None = None
    cross_check: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose from {', '.join(STRATEGIES)}")
        if self.max_order < 1:
            raise ValueError("max_order must be at least 1")


@dataclass
class OrderLog:
    order: int
    block_sizes: list[int]
    status: str
    primal: float
    dual: float
    accuracy: float
    rank_profile: list[int] = field(default_factory=list)
    flat: bool = False
    flat_order: int | None = None
    refinement: list[str] = field(default_factory=list)
    seconds: float = 0.0
    note: str = ""


@dataclass
class BranchResult:
    name: str
    provenance: str
    status: str
    problem: ProblemInstance
    constraints: ConstraintSet | None = None
    fstar: float | None = None
    lower_bound: float | None = None
    order: int | None = None
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    generators: list[Polynomial] = field(default_factory=list)
    refinement: list[Polynomial] = field(default_factory=list)
    certificate: cert.Certificate | None = None
    verification: cert.VerificationReport | None = None
    moments: object = None
    log: list[OrderLog] = field(default_factory=list)
    children: list["BranchResult"] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        names = self.problem.names
        pts = []
        if self.verification is not None:
            for pc in self.verification.points:
                pts.append(dict(point=[float(v) for v in pc.point], objective_error=pc.objective_error,
                                equality_residual=pc.equality_residual, inequality_min=pc.inequality_min))
        return dict(
            name=self.name,
            provenance=self.provenance,
            status=self.status,
            fstar=self.fstar,
            lower_bound=self.lower_bound,
            order=self.order,
            constraints=None if self.constraints is None else dict(
                equalities=[g.to_str(names) for g in self.constraints.equalities],
                inequalities=[g.to_str(names) for g in self.constraints.inequalities]),
            generators=[g.to_str(names) for g in self.generators],
            refinement=[g.to_str(names) for g in self.refinement],
            points=pts,
            weights=[float(w) for w in self.weights],
            log=[dataclasses.asdict(e) for e in self.log],
            notes=list(self.notes),
            seconds=self.seconds,
            children=[c.to_dict() for c in self.children],
        )


@dataclass
class Report:
    problem: ProblemInstance
    status: str
    fstar: float | None
    points: np.ndarray
    generators: list[Polynomial]
    root: BranchResult
    seconds: float

    def to_dict(self) -> dict:
        names = self.problem.names
        return dict(problem=self.problem.name, variables=list(names), status=self.status,
                    fstar=self.fstar, points=[[float(v) for v in p] for p in self.points],
                    generators=[g.to_str(names) for g in self.generators],
                    seconds=self.seconds, branches=self.root.to_dict())

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


# ---------------------------------------------------------------------------
# one branch


@dataclass
class _Attempt:
    constraints: ConstraintSet
    sol: object
    certificate: cert.Certificate | None
    verification: cert.VerificationReport | None


def _solve_order(p: ProblemInstance, C: ConstraintSet, t: int, cfg: RunConfig,
                 tag: str) -> tuple[object, object, OrderLog]:
    start = time.perf_counter()
    rel = assemble(p.objective, C, t, names=p.names)
    if cfg.export_dir:
        Path(cfg.export_dir).mkdir(parents=True, exist_ok=True)
        export_sdpa(rel, Path(cfg.export_dir) / f"{p.name or 'problem'}-{tag}-t{t}.dat-s")
    sol = solve(rel, cfg.sdp)
    entry = OrderLog(t, rel.block_sizes, sol.status, float(sol.primal_objective),
                     float(sol.dual_objective), float(sol.accuracy))
    entry.seconds = time.perf_counter() - start
    return rel, sol, entry


def rank_cross_check(rel, sol, cfg: RunConfig, scale: float = 1e-4) -> str:
    """Re-solve with a small random objective perturbation and compare moment-matrix ranks.

    The perturbation has its component along the objective removed, so it
    mainly selects a point of the optimal face.  An interior-point optimum of
    maximal rank is never exceeded in rank by the perturbed solution.
    """
    data = rel.to_sdp()
    rng = np.random.default_rng(cfg.seed)
    r = rng.standard_normal(data.n)
    cc = float(data.c @ data.c)
    if cc > 0:
        r -= (r @ data.c) / cc * data.c
    r *= scale * max(1.0, float(np.sqrt(cc))) / max(float(np.linalg.norm(r)), 1e-300)
    other = solve_sdp(dataclasses.replace(data, c=data.c + r), cfg.sdp)
    if not np.all(np.isfinite(other.x)) or other.status in (PRIMAL_INFEASIBLE, DUAL_UNBOUNDED):
        return f"cross-check: perturbed solve {other.status}"
    base_rank = cert.numerical_rank(moment_matrix(sol.moments), cfg.rank_tol)[0]
    pert_rank = cert.numerical_rank(moment_matrix(rel.form_from_solution(other.x)), cfg.rank_tol)[0]
    verdict = "not maximal" if pert_rank > base_rank else "consistent"
    return f"cross-check: rank {base_rank} at the interior point, {pert_rank} perturbed ({verdict})"


def _certify(p, C, sol, cfg) -> tuple[cert.Certificate, cert.VerificationReport | None]:
    c = cert.certify(sol.moments, C, p, sol.primal_objective, cfg.rank_tol, cfg.seed)
    return c, c.residuals


def _is_verified(c: cert.Certificate) -> bool:
    return c.flat and len(c.points) > 0 and c.residuals is not None and c.residuals.passed


def _refine(p: ProblemInstance, C: ConstraintSet, sol, t: int, cfg: RunConfig, entry: OrderLog):
    """Add exact kernel suggestions to ``C`` and re-solve at the same order.

    Returns ``(constraints, solution, certificate, added)`` for the last
    accepted round, or ``None`` when nothing was accepted.  A round is
    accepted when the refined relaxation stays feasible and its optimum does
    not exceed the unrefined one by more than ``accept_tol``; the original
    optimum is a valid lower bound, so an unchanged optimum cannot hide a
    better minimizer.
    """
    base = sol.primal_objective
    accepted = None
    added: list[Polynomial] = []
    current, form = C, sol.moments
    for _ in range(cfg.refine_rounds):
        cands = [q for q in cert.refinement_candidates(form, reference=sol.moments)
                 if not cert.in_truncated_ideal(q, [*current.equalities], q.degree + 2, 1e-9)]
        if not cands:
            break
        trial = dataclasses.replace(current, equalities=tuple(current.equalities) + tuple(cands),
                                    notes=tuple(current.notes) + ("kernel refinement",))
        _, rsol, _ = _solve_order(p, trial, t, cfg, "refined")
        entry.refinement.extend(q.to_str(p.names) for q in cands)
        if rsol.moments is None or not rsol.near_optimal(cfg.accept_tol):
            entry.note = f"refinement rejected: refined relaxation {rsol.status}"
            break
        if rsol.primal_objective > base + cfg.accept_tol * max(1.0, abs(base)):
            entry.note = (f"refinement rejected: optimum rose from {base:.3g} "
                          f"to {rsol.primal_objective:.3g}")
            break
        added += cands
        c, _ = _certify(p, trial, rsol, cfg)
        accepted = (trial, rsol, c, list(added))
        current, form = trial, rsol.moments
        if _is_verified(c):
            break
    return accepted


def run_branch(p: ProblemInstance, C: ConstraintSet, cfg: RunConfig, name: str = "") -> BranchResult:
    """Iterate the hierarchy on ``C`` until a certificate, infeasibility or ``max_order``."""
    start = time.perf_counter()
    res = BranchResult(name or C.provenance, C.provenance, UNDECIDED, p, C)
    if C.infeasible:
        res.status = INFEASIBLE
        res.notes.append("constraint ideal is the unit ideal (symbolic)")
        res.seconds = time.perf_counter() - start
        return res
    polys = [p.objective, *C.all()]
    t = max(starting_order(polys), cert.flatness_gap(C))
    work = C
    previous: tuple[int, float, list[Polynomial]] | None = None
    while t <= cfg.max_order:
        rel, sol, entry = _solve_order(p, work, t, cfg, "base")
        res.log.append(entry)
        if sol.status == PRIMAL_INFEASIBLE:
            if verify_infeasibility(rel.to_sdp(), sol.certificate):
                res.status = INFEASIBLE
                res.order = t
                res.notes.append(f"infeasible up to order {t}: verified dual ray at order {t}")
                break
            entry.note = "infeasibility ray failed verification"
        if sol.status == DUAL_UNBOUNDED:
            entry.note = "relaxation unbounded at this order"
            previous = None
            t += 1
            continue
        if sol.moments is None or not sol.near_optimal(cfg.accept_tol):
            entry.note = entry.note or "no usable optimal linear form"
            previous = None
            t += 1
            continue
        res.lower_bound = float(sol.dual_objective) if res.lower_bound is None else res.lower_bound
        c, rep = _certify(p, work, sol, cfg)
        entry.rank_profile, entry.flat, entry.flat_order = c.rank_profile, c.flat, c.flat_order
        attempt = _Attempt(work, sol, c, rep)
        if cfg.refine and work.provenance != "real-radical":
            # also polishes verified certificates: exact kernel members pin the
            # pseudo-moments that a degenerate SDP only resolves to sqrt(gap)
            verified = _is_verified(c)
            refined = _refine(p, work, sol, t, cfg, entry)
            if refined is not None and (_is_verified(refined[2]) or not verified):
                rC, rsol, rc, added = refined
                attempt = _Attempt(rC, rsol, rc, rc.residuals)
                res.refinement.extend(added)
                res.notes.append(f"order {t}: kernel refinement added "
                                 + ", ".join(q.to_str(p.names) for q in added))
                work = rC
                entry.rank_profile, entry.flat, entry.flat_order = rc.rank_profile, rc.flat, rc.flat_order
        if cfg.cross_check:
            entry.note = "; ".join(filter(None, [entry.note, rank_cross_check(rel, sol, cfg)]))
        c, value = attempt.certificate, float(attempt.sol.primal_objective)
        if _is_verified(c):
            _finish_branch(res, SOLVED, attempt, t)
            break
        if c.flat and c.notes:
            entry.note = "; ".join(c.notes)
        gens = c.generators
        if previous is not None:
            t_prev, v_prev, g_prev = previous
            if abs(value - v_prev) <= cfg.stabilize_tol and cert.ideals_equivalent(gens, g_prev):
                _finish_branch(res, STABILIZED, attempt, t_prev)
                res.notes.append(f"kernel ideal and optimum unchanged from order {t_prev} to {t}")
                break
        previous = (t, value, gens)
        t += 1
    else:
        res.notes.append(f"no certificate up to order {cfg.max_order}")
    if res.status == UNDECIDED and res.log:
        last = res.log[-1]
        res.order = last.order
    res.constraints = work
    res.seconds = time.perf_counter() - start
    return res


def _finish_branch(res: BranchResult, status: str, attempt: _Attempt, order: int) -> None:
    c = attempt.certificate
    res.status = status
    res.order = order
    res.fstar = float(attempt.sol.primal_objective)
    res.generators = c.generators
    res.certificate = c
    res.verification = attempt.verification
    res.moments = attempt.sol.moments
    if status == SOLVED:
        res.points, res.weights = c.points, c.weights


# ---------------------------------------------------------------------------
# strategies and the recursive driver


def constraint_set(p: ProblemInstance, cfg: RunConfig) -> ConstraintSet:
    """The constraint set for the KKT branch under ``cfg.strategy``."""
    strategy = cfg.strategy
    unconstrained = not p.equalities and not p.inequalities
    if strategy == "known-minimum" or (strategy == "auto" and cfg.known_minimum is not None):
        if cfg.known_minimum is None:
            raise ValueError("the known-minimum strategy needs a value for f*")
        return cs.known_minimum_set(p, cfg.known_minimum)
    if strategy == "auto":
        if unconstrained:
            return cs.gradient_system(p)
        if cfg.finite_variety:
            return cs.direct(p)
        try:
            return cs.build_kkt_eliminated(p)
        except GroebnerBudgetExceeded:
            log.info("Groebner budget exceeded; falling back to Fritz-John minors")
            return cs.build_fj_minors(p, cfg.rank_bound)
    if strategy == "gradient":
        return cs.gradient_system(p)
    if strategy == "kkt-elim":
        return cs.build_kkt_eliminated(p)
    if strategy == "fj-minors":
        return cs.build_fj_minors(p, cfg.rank_bound)
    if strategy == "fj-gram":
        return cs.build_fj_gram(p, cfg.rank_bound)
    return cs.direct(p)


def _explore(p: ProblemInstance, cfg: RunConfig, depth: int) -> BranchResult:
    try:
        C = constraint_set(p, cfg)
    except GroebnerBudgetExceeded as exc:
        res = BranchResult(p.name or "problem", cfg.strategy, UNDECIDED, p)
        res.notes.append(f"elimination budget exceeded: {exc}")
        return res
    res = run_branch(p, C, cfg, name=f"{C.provenance}@{depth}")
    uses_singular = cfg.strategy in ("auto", "kkt-elim", "fj-minors", "fj-gram") and (
        p.equalities or p.inequalities)
    if not uses_singular or (res.status != INFEASIBLE and not cfg.full_fj):
        return res
    sing = cs.build_singular(p, cfg.rank_bound)
    if any(g.is_constant() for g in sing.equalities):
        res.notes.append("singular locus is empty")
        return res
    if set(sing.equalities) == set(p.equalities) or depth >= cfg.depth:
        # no new equations (or depth exhausted): the singular locus is given directly
        child = run_branch(sing, cs.direct(sing), cfg, name=f"singular-direct@{depth + 1}")
    else:
        child = _explore(sing, dataclasses.replace(cfg, known_minimum=None), depth + 1)
    res.children.append(child)
    return res


def _collect(res: BranchResult) -> list[BranchResult]:
    out = [res]
    for ch in res.children:
        out += _collect(ch)
    return out


def minimize(p: ProblemInstance, cfg: RunConfig | None = None) -> Report:
    """Run the KKT branch and, when needed, the singular branches; combine verdicts."""
    cfg = cfg or RunConfig()
    start = time.perf_counter()
    root = _explore(p, cfg, 1)
    branches = _collect(root)
    done = [b for b in branches if b.status in (SOLVED, STABILIZED) and b.fstar is not None]
    if done:
        best = min(b.fstar for b in done)
        winners = [b for b in done if b.fstar <= best + cfg.accept_tol * max(1.0, abs(best))]
        status = SOLVED if any(b.status == SOLVED for b in winners) else STABILIZED
        pts = [b.points for b in winners if b.points.size]
        points = np.unique(np.round(np.vstack(pts), 12) + 0.0, axis=0) if pts else np.zeros((0, p.nvars))
        gens = winners[0].generators
        fstar = best
    elif branches and all(b.status == INFEASIBLE for b in branches):
        status, fstar, points, gens = INFEASIBLE, None, np.zeros((0, p.nvars)), []
    else:
        status, fstar, points, gens = UNDECIDED, None, np.zeros((0, p.nvars)), []
    return Report(p, status, fstar, points, gens, root, time.perf_counter() - start)


def real_radical(p: ProblemInstance, cfg: RunConfig | None = None) -> BranchResult:
    """Generators of the real radical of the constraints: zero objective, hierarchy until stable."""
    cfg = dataclasses.replace(cfg or RunConfig(), refine=False)
    q = dataclasses.replace(p, objective=Polynomial.zero(p.nvars))
    return run_branch(q, cs.real_radical_set(q), cfg, name="real-radical")


def order_values(p: ProblemInstance, C: ConstraintSet, orders, opts: SolverOptions | None = None) -> dict:
    """Optimal values of the relaxations at the given orders (no certification)."""
    out = {}
    for t in orders:
        rel = assemble(p.objective, C, t, names=p.names)
        sol = solve(rel, opts)
        out[t] = sol
    return out


__all__ = ["RunConfig", "OrderLog", "BranchResult", "Report", "run_branch", "minimize", "real_radical",
           "constraint_set", "order_values", "rank_cross_check", "STRATEGIES", "SOLVED", "STABILIZED", "INFEASIBLE",
           "UNDECIDED"]
