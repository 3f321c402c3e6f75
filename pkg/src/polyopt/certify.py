"""Post-processing of an optimal linear form.

Numerical rank, the flat-extension test, kernel polynomials and their
reduction to ideal generators, point extraction through multiplication
matrices, and verification of the extracted points.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .constraints import ConstraintSet, ProblemInstance
from .moment import LinearForm, MomentMatrix, moment_matrix
from .polycore import GREVLEX, Exponent, Polynomial, add_exponents, monomial_basis

log = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-6
VERIFY_TOL = 1e-6
COEFF_ZERO = 1e-9


class ExtractionError(RuntimeError):
    """Point extraction is impossible (no flatness, clustered eigenvalues, ...)."""


# ---------------------------------------------------------------------------
# rank and flatness


def numerical_rank(M: MomentMatrix | np.ndarray, tau: float = DEFAULT_RANK_TOL) -> tuple[int, np.ndarray]:
    """Count of eigenvalues above ``tau * lambda_max``; spectrum in decreasing order."""
    A = M.matrix if isinstance(M, MomentMatrix) else np.asarray(M, dtype=float)
    if A.size == 0:
        return 0, np.zeros(0)
    w = np.linalg.eigvalsh(0.5 * (A + A.T))[::-1]
    top = w[0]
    if top <= 0:
        return 0, w
    return int(np.sum(w > tau * top)), w


def rank_profile(form: LinearForm, tau: float = DEFAULT_RANK_TOL) -> list[int]:
    """``rank M^s`` for s = 0..t."""
    return [numerical_rank(moment_matrix(form, s), tau)[0] for s in range(form.order + 1)]


def flatness_gap(C: ConstraintSet) -> int:
    """``max(1, ceil(deg g/2))`` over the inequalities.

    Equalities enter the relaxation as exact linear rows, so only the
    localizing degrees shift the sub-order that has to be compared.
    """
    return max([1] + [math.ceil(g.degree / 2) for g in C.inequalities])


@dataclass
class FlatVerdict:
    holds: bool
    order: int | None
    gap: int
    ranks: list[int]

    @property
    def rank(self) -> int | None:
        return self.ranks[self.order] if self.holds else None


def flat_extension_check(form: LinearForm, C: ConstraintSet, tau: float = DEFAULT_RANK_TOL,
                         min_order: int = 1) -> FlatVerdict:
    """Look for a sub-order s <= t with ``rank M^s = rank M^{s-d}``.

    ``min_order`` is normally ``ceil(deg f / 2)`` so that the atomic measure
    behind a flat block also reproduces the objective value.  The smallest
    flat s is reported.
    """
    d = flatness_gap(C)
    if form.order < d:
        raise ValueError(f"order {form.order} is too small for the flatness gap {d}")
    ranks = rank_profile(form, tau)
    for s in range(max(d, min_order), form.order + 1):
        if ranks[s] == ranks[s - d] and ranks[s] > 0:
            return FlatVerdict(True, s, d, ranks)
    return FlatVerdict(False, None, d, ranks)


# ---------------------------------------------------------------------------
# kernels and generators


def kernel_vectors(form: LinearForm, s: int | None = None,
                   tau: float = DEFAULT_RANK_TOL) -> tuple[list[Exponent], np.ndarray]:
    """Orthonormal kernel basis of ``M^s`` as columns, with the row monomials."""
    MM = moment_matrix(form, s)
    w, V = np.linalg.eigh(0.5 * (MM.matrix + MM.matrix.T))
    top = max(w[-1], 0.0)
    return MM.basis, V[:, w <= tau * top]


def _clean(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    v[np.abs(v) < COEFF_ZERO * max(np.max(np.abs(v)), 1e-300)] = 0.0
    return v


def echelon_form(basis: Sequence[Exponent], vectors: np.ndarray, pivot_tol: float = 1e-6) -> np.ndarray:
    """Reduced row echelon form with pivots on the largest (grevlex) monomials.

    ``vectors`` holds one polynomial per column; rows of the result are the
    echelon polynomials, pivot coefficient 1, in increasing pivot order.
    Columns whose best pivot is below ``pivot_tol`` (relative) are treated
    as numerically zero, which keeps noise out of the leading terms.
    """
    if vectors.size == 0:
        return np.zeros((0, len(basis)))
    perm = sorted(range(len(basis)), key=lambda k: GREVLEX.key(basis[k]), reverse=True)
    A = vectors.T[:, perm].copy()
    r, m = A.shape
    row = 0
    for col in range(m):
        if row == r:
            break
        k = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[k, col]) <= pivot_tol * max(1.0, np.max(np.abs(A))):
            continue
        A[[row, k]] = A[[k, row]]
        A[row] /= A[row, col]
        for other in range(r):
            if other != row and A[other, col] != 0.0:
                A[other] -= A[other, col] * A[row]
        row += 1
    out = np.zeros((row, m))
    inv = np.argsort(perm)
    for i in range(row):
        out[i] = A[i][inv]
    # largest pivot first in ``perm`` order; report smallest leading monomial first
    return out[::-1]


def kernel_polynomials(form: LinearForm, s: int | None = None,
                       tau: float = DEFAULT_RANK_TOL) -> list[Polynomial]:
    """Echelon basis of ``ker M^s`` as float polynomials (increasing leading monomial)."""
    basis, K = kernel_vectors(form, s, tau)
    return [Polynomial.from_vector(basis, _clean(row), form.nvars) for row in echelon_form(basis, K)]


def _multiples_matrix(gens: Sequence[Polynomial], degree: int, basis_index: dict) -> np.ndarray:
    cols = []
    n = gens[0].nvars if gens else 0
    for g in gens:
        if g.degree < 0 or g.degree > degree:
            continue
        for m in monomial_basis(n, degree - g.degree):
            v = np.zeros(len(basis_index))
            for e, c in g.items():
                v[basis_index[add_exponents(e, m)]] += float(c)
            cols.append(v)
    if not cols:
        return np.zeros((len(basis_index), 0))
    return np.array(cols).T


def in_truncated_ideal(q: Polynomial, gens: Sequence[Polynomial], degree: int | None = None,
                       tol: float = 1e-6) -> bool:
    """Is ``q`` (numerically) a combination of ``x^m g`` with ``deg <= degree``?

    This is a floating normal-form test: the residual of the least-squares
    projection onto the degree-truncated span must be at most
    ``tol * |q|``.
    """
    if q.is_zero():
        return True
    gens = [g.to_float() for g in gens if not g.is_zero()]
    degree = max([q.degree] + [g.degree for g in gens]) if degree is None else degree
    if degree < q.degree:
        return False
    if any(g.is_constant() for g in gens):
        return True
    basis = monomial_basis(q.nvars, degree)
    index = {e: k for k, e in enumerate(basis)}
    B = _multiples_matrix(gens, degree, index)
    v = q.to_float().coefficient_vector(basis)
    if B.shape[1] == 0:
        return np.linalg.norm(v) <= tol
    coef, *_ = np.linalg.lstsq(B, v, rcond=None)
    return float(np.linalg.norm(B @ coef - v)) <= tol * float(np.linalg.norm(v))


def ideals_equivalent(G1: Sequence[Polynomial], G2: Sequence[Polynomial], extra_degree: int = 2,
                      tol: float = 1e-5) -> bool:
    """Mutual truncated-membership test between two generator lists."""
    G1 = [g for g in G1 if not g.is_zero()]
    G2 = [g for g in G2 if not g.is_zero()]
    if not G1 or not G2:
        return not G1 and not G2
    D = max(g.degree for g in (*G1, *G2)) + extra_degree
    return (all(in_truncated_ideal(g, G2, D, tol) for g in G1)
            and all(in_truncated_ideal(g, G1, D, tol) for g in G2))


def snap(p: Polynomial, max_denominator: int = 10_000, tol: float = 1e-6) -> Polynomial:
    """Monic form with coefficients rounded to nearby small-denominator rationals when possible."""
    if p.is_zero():
        return p
    q = p.to_float()
    top = max(abs(c) for _, c in q.items())
    q = Polynomial(q.nvars, {e: c for e, c in q.items() if abs(c) > tol * top}, exact=False)
    q = q.monic()
    q = Polynomial(q.nvars, {e: c for e, c in q.items() if abs(c) > tol}, exact=False)
    return q.rationalize(max_denominator, tol)


def reduce_generators(polys: Sequence[Polynomial], degree: int | None = None,
                      tol: float = 1e-6) -> list[Polynomial]:
    """Drop members lying in the truncated ideal of the members kept before them.

    Input order matters: callers pass polynomials sorted by leading monomial.
    """
    kept: list[Polynomial] = []
    for p in polys:
        if p.is_zero():
            continue
        D = p.degree if degree is None else degree
        if kept and in_truncated_ideal(p, kept, max(D, p.degree), tol):
            continue
        kept.append(p)
    return kept


def kernel_ideal(form: LinearForm, tau: float = DEFAULT_RANK_TOL, s: int | None = None,
                 round_tol: float = 1e-5, max_denominator: int = 10_000) -> list[Polynomial]:
    """Reduced generators of the ideal spanned by ``ker M^s`` (default s = t)."""
    s = form.order if s is None else s
    polys = sorted(kernel_polynomials(form, s, tau), key=lambda p: GREVLEX.key(p.leading_exponent()))
    kept = reduce_generators(polys, s)
    return [snap(p, max_denominator, round_tol) for p in kept]


def spectral_cut(eigenvalues: np.ndarray, ceiling: float = 1e-2, min_gap: float = 10.0) -> int:
    """Size of the loosest numerical kernel separated by a clear spectral gap.

    ``eigenvalues`` are in decreasing order.  A cut after position k is
    acceptable when ``lambda_{k+1} <= ceiling * lambda_max`` and
    ``lambda_k >= min_gap * lambda_{k+1}``; the acceptable cut with the most
    eigenvalues below it wins.  Returns 0 when no cut qualifies.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if w.size < 2 or w[0] <= 0:
        return 0
    floor = 1e-14 * w[0]
    best = 0
    for k in range(w.size - 1):
        lo = max(w[k + 1], floor)
        if lo <= ceiling * w[0] and w[k] >= min_gap * lo:
            best = max(best, w.size - 1 - k)
    return best


def rayleigh(form: LinearForm, q: Polynomial) -> float:
    """``Lambda(q^2) / (|q|^2 lambda_max(M^s))`` with s = deg q; nan when deg q exceeds the order."""
    s = max(q.degree, 1)
    if s > form.order:
        return float("nan")
    MM = moment_matrix(form, s)
    v = q.to_float().coefficient_vector(MM.basis)
    top = float(np.linalg.eigvalsh(0.5 * (MM.matrix + MM.matrix.T))[-1])
    return float(v @ MM.matrix @ v) / (float(v @ v) * top) if top > 0 else float("nan")


def refinement_candidates(form: LinearForm, orders: Sequence[int] | None = None,
                          ceiling: float = 1e-2, min_gap: float = 10.0, pivot_tol: float = 1e-2,
                          snap_tol: float = 5e-3, snap_denominator: int = 10, max_height: int = 100,
                          reference: LinearForm | None = None) -> list[Polynomial]:
    """Exact polynomials suggested by the approximate kernel of ``M^s``.

    For each sub-order the loosest kernel behind a clear spectral gap is put
    in echelon form (pivots below ``pivot_tol`` count as noise).  A member
    is kept only when every coefficient snaps to a rational with denominator
    at most ``snap_denominator`` within ``snap_tol`` and no coefficient of the
    monic form exceeds ``max_height`` in size.  Floating members are dropped
    because a slightly wrong polynomial would cut minimizers away.  With a
    ``reference`` form (the unrefined optimum) a member must also have a
    Rayleigh quotient below ``ceiling`` there.  Members implied by, or
    inconsistent with, earlier (lower degree) members are skipped.
    """
    orders = range(1, form.order + 1) if orders is None else orders
    found: list[Polynomial] = []
    for s in orders:
        MM = moment_matrix(form, s)
        w, V = np.linalg.eigh(0.5 * (MM.matrix + MM.matrix.T))
        k = spectral_cut(w[::-1], ceiling, min_gap)
        if k == 0:
            continue
        for row in echelon_form(MM.basis, V[:, :k], pivot_tol):
            p = snap(Polynomial.from_vector(MM.basis, _clean(row), form.nvars), snap_denominator, snap_tol)
            if not p.exact or p.is_constant() or max(abs(c) for _, c in p.items()) > max_height:
                continue
            if reference is not None and not rayleigh(reference, p) <= ceiling:
                continue
            found.append(p)
    found.sort(key=lambda p: (p.degree, GREVLEX.key(p.leading_exponent())))
    kept: list[Polynomial] = []
    for p in found:
        if kept and in_truncated_ideal(p, kept, p.degree, 1e-9):
            continue
        trial = kept + [p]
        one = Polynomial.constant(form.nvars, 1, exact=False)
        if in_truncated_ideal(one, trial, max(q.degree for q in trial) + 1, 1e-9):
            continue  # contradicts what lower orders already showed
        kept.append(p)
    return kept


# ---------------------------------------------------------------------------
# points


@dataclass
class Extraction:
    points: np.ndarray
    weights: np.ndarray
    order: int
    moment_residual: float


def _column_factor(M: np.ndarray, r: int) -> np.ndarray:
    w, U = np.linalg.eigh(0.5 * (M + M.T))
    idx = np.argsort(w)[::-1][:r]
    return U[:, idx] * np.sqrt(np.maximum(w[idx], 0.0))


def extract_points(form: LinearForm, C: ConstraintSet, tau: float = DEFAULT_RANK_TOL,
                   verdict: FlatVerdict | None = None, seed: int = 0,
                   min_order: int = 1) -> Extraction:
    """Atoms of the measure behind a flat moment matrix.

    With ``M^s = V V'`` (rank r), the multiplication matrices are
    ``N_i = pinv(V_0) V_i`` where ``V_0`` holds the rows of the monomials of
    degree <= s-1 and ``V_i`` the rows of ``x_i`` times those monomials.  A
    random combination of the ``N_i`` is brought to real Schur form; its
    Schur vectors diagonalize every ``N_i`` and give the coordinates.
    """
    verdict = verdict or flat_extension_check(form, C, tau, min_order)
    if not verdict.holds:
        raise ExtractionError("flat extension condition does not hold")
    s, r = verdict.order, verdict.rank
    n = form.nvars
    MM = moment_matrix(form, s)
    index = {e: k for k, e in enumerate(MM.basis)}
    V = _column_factor(MM.matrix, r)
    low = [e for e in MM.basis if sum(e) <= s - 1]
    V0 = V[[index[e] for e in low]]
    if np.linalg.matrix_rank(V0, tol=1e-8 * max(np.abs(V0).max(), 1.0)) < r:
        raise ExtractionError("the lower-degree block does not span the column space")
    P = np.linalg.pinv(V0)
    N = []
    for i in range(n):
        shift = tuple(1 if k == i else 0 for k in range(n))
        Vi = V[[index[add_exponents(e, shift)] for e in low]]
        N.append(P @ Vi)
    rng = np.random.default_rng(seed)
    lam = rng.random(n)
    lam /= lam.sum()
    Nc = sum(l * Ni for l, Ni in zip(lam, N))
    T, Q = sla.schur(Nc, output="real")
    sub = np.abs(np.diag(T, -1)) if r > 1 else np.zeros(0)
    if np.any(sub > 1e-6 * max(1.0, np.abs(T).max())):
        raise ExtractionError("complex eigenvalues in the multiplication matrix")
    ev = np.sort(np.diag(T))
    if r > 1 and np.min(np.diff(ev)) < 1e-9 * max(1.0, np.abs(ev).max()):
        raise ExtractionError("clustered eigenvalues; try another seed or a higher order")
    pts = np.array([[Q[:, j] @ Ni @ Q[:, j] for Ni in N] for j in range(r)])
    # weights from the first column of M^s: Lambda(x^a) = sum_j w_j p_j^a
    vander = np.array([[np.prod(p ** np.array(e)) for p in pts] for e in MM.basis])
    w, *_ = np.linalg.lstsq(vander, MM.matrix[:, 0], rcond=None)
    synth = sum(wj * np.outer(v, v) for wj, v in zip(w, vander.T))
    resid = float(np.max(np.abs(synth - MM.matrix)))
    order = np.lexsort(pts.T[::-1])
    return Extraction(pts[order] + 0.0, w[order], s, resid)


# ---------------------------------------------------------------------------
# verification


@dataclass
class PointCheck:
    point: np.ndarray
    objective_error: float
    equality_residual: float
    inequality_min: float

    def passed(self, tol: float = VERIFY_TOL) -> bool:
        return (self.objective_error <= tol and self.equality_residual <= tol
                and self.inequality_min >= -tol)


@dataclass
class VerificationReport:
    points: list[PointCheck]
    generator_residuals: list[float]
    tol: float = VERIFY_TOL
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (all(pc.passed(self.tol) for pc in self.points)
                and all(r <= self.tol for r in self.generator_residuals))


def verify(points: Sequence[Sequence[float]], generators: Sequence[Polynomial], p: ProblemInstance,
           fstar: float, tol: float = VERIFY_TOL, C: ConstraintSet | None = None) -> VerificationReport:
    """Check each point against the problem (and ``C`` if given) and every generator at every point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float)) if len(points) else np.zeros((0, p.nvars))
    warnings = [] if len(pts) else ["no points to verify"]
    eqs = [g.to_float() for g in (*p.equalities, *(C.equalities if C else ()))]
    ineqs = [g.to_float() for g in (*p.inequalities, *(C.inequalities if C else ()))]
    f = p.objective.to_float()
    checks = []
    for x in pts:
        fe = abs(float(f(x)) - fstar)
        eq = max((abs(float(g(x))) for g in eqs), default=0.0)
        iq = min((float(g(x)) for g in ineqs), default=0.0)
        checks.append(PointCheck(x, fe, eq, iq))
    gres = [float(np.max(np.abs(g.to_float().evaluate_many(pts)))) if len(pts) else 0.0
            for g in generators]
    return VerificationReport(checks, gres, tol, warnings)


def kernel_soundness(form: LinearForm, gens: Sequence[Polynomial], s: int | None = None) -> list[float]:
    """``|M^s q| / (|M^s| |q|)`` for each generator of degree <= s."""
    MM = moment_matrix(form, s)
    nrm = np.linalg.norm(MM.matrix, 2)
    out = []
    for g in gens:
        if g.degree > MM.order:
            out.append(float("nan"))
            continue
        v = g.to_float().coefficient_vector(MM.basis)
        out.append(float(np.linalg.norm(MM.matrix @ v) / (nrm * np.linalg.norm(v))))
    return out


# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    order: int
    rank_profile: list[int]
    flat: bool
    flat_order: int | None
    gap: int
    kernel_basis: list[Polynomial]
    generators: list[Polynomial]
    points: np.ndarray
    weights: np.ndarray
    optimum: float
    residuals: VerificationReport | None = None
    moment_residual: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def rank(self) -> int | None:
        return self.rank_profile[self.flat_order] if self.flat else None


def certify(form: LinearForm, C: ConstraintSet, problem: ProblemInstance, optimum: float,
            tau: float = DEFAULT_RANK_TOL, seed: int = 0) -> Certificate:
    """Rank profile, flatness, generators and (when flat) verified points."""
    min_order = max(1, math.ceil(problem.objective.degree / 2))
    verdict = flat_extension_check(form, C, tau, min_order)
    kernel = kernel_polynomials(form, form.order, tau)
    gens = kernel_ideal(form, tau, form.order)
    notes = []
    pts = np.zeros((0, form.nvars))
    weights = np.zeros(0)
    mres = None
    report = None
    if verdict.holds:
        try:
            ex = extract_points(form, C, tau, verdict, seed, min_order)
            pts, weights, mres = ex.points, ex.weights, ex.moment_residual
        except ExtractionError as exc:
            notes.append(f"extraction failed: {exc}")
        report = verify(pts, gens, problem, optimum, C=C)
    return Certificate(form.order, verdict.ranks, verdict.holds, verdict.order, verdict.gap,
                       kernel, gens, pts, weights, optimum, report, mres, notes)
