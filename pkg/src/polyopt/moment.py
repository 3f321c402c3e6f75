"""Order-t moment relaxation: moment matrix, localizing blocks, equality rows.

Moments ``y_alpha`` are indexed by the degree <= 2t monomials in
``monomial_basis`` order; ``y_0`` is pinned to 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constraints import ConstraintSet, preordering_products
from .polycore import Exponent, Polynomial, add_exponents, monomial_basis
from .sdp import SDPData

log = logging.getLogger(__name__)


class OrderTooSmall(ValueError):
    def __init__(self, poly: Polynomial, order: int, names=None):
        self.poly = poly
        self.order = order
        super().__init__(f"order {order} is too small for {poly.to_str(names)} (degree {poly.degree})")


class LinearForm:
    """A truncated linear functional: values on the monomials of degree <= 2t."""

    def __init__(self, nvars: int, order: int, values: Sequence[float],
                 monomials: Sequence[Exponent] | None = None):
        self.nvars = nvars
        self.order = order
        self.monomials = list(monomials) if monomials is not None else monomial_basis(nvars, 2 * order)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(self.monomials),):
            raise ValueError("one value per monomial of degree <= 2t is required")
        self.index = {e: k for k, e in enumerate(self.monomials)}

    def moment(self, e: Exponent) -> float:
        return float(self.values[self.index[tuple(e)]])

    def __call__(self, p: Polynomial) -> float:
        if p.degree > 2 * self.order:
            raise ValueError(f"degree {p.degree} exceeds the form's range 2t = {2 * self.order}")
        return float(sum(float(c) * self.values[self.index[e]] for e, c in p.items()))

    def truncate(self, order: int) -> "LinearForm":
        if order > self.order:
            raise ValueError("cannot extend a linear form")
        mons = monomial_basis(self.nvars, 2 * order)
        return LinearForm(self.nvars, order, [self.moment(e) for e in mons], mons)

    def __repr__(self) -> str:
        return f"LinearForm(nvars={self.nvars}, order={self.order}, y0={self.values[0]:.6g})"


@dataclass
class MomentMatrix:
    order: int
    basis: list[Exponent]
    matrix: np.ndarray


def evaluation_form(point: Sequence[float], t: int) -> LinearForm:
    """The point evaluation p -> p(point) restricted to degree <= 2t."""
    pt = np.asarray(point, dtype=float)
    mons = monomial_basis(len(pt), 2 * t)
    vals = [float(np.prod(pt ** np.array(e))) for e in mons]
    return LinearForm(len(pt), t, vals, mons)


def combine_forms(forms: Sequence[LinearForm], weights: Sequence[float]) -> LinearForm:
    first = forms[0]
    vals = sum(w * f.values for f, w in zip(forms, weights))
    return LinearForm(first.nvars, first.order, vals, first.monomials)


def moment_matrix(form: LinearForm, t: int | None = None) -> MomentMatrix:
    """Hankel matrix with entries ``y_{a+b}`` for |a|, |b| <= t."""
    t = form.order if t is None else t
    if t > form.order:
        raise ValueError(f"sub-order {t} exceeds the form's order {form.order}")
    basis = monomial_basis(form.nvars, t)
    idx = np.array([[form.index[add_exponents(a, b)] for b in basis] for a in basis], dtype=int)
    return MomentMatrix(t, basis, form.values[idx])


@dataclass
class LocalizingBlock:
    """PSD block for the product ``generator``; ``tensor[k]`` is the coefficient of moment k."""

    generator: Polynomial
    basis: list[Exponent]
    tensor: np.ndarray

    @property
    def size(self) -> int:
        return len(self.basis)

    def evaluate(self, form: LinearForm) -> np.ndarray:
        return np.tensordot(form.values, self.tensor, axes=1)


@dataclass
class MomentRelaxation:
    order: int
    nvars: int
    objective: Polynomial
    constraints: ConstraintSet
    monomials: list[Exponent]
    blocks: list[LocalizingBlock]
    eq_rows: np.ndarray
    eq_labels: list[tuple[int, Exponent]]
    objective_vector: np.ndarray
    preordering: bool = True
    warnings: list[str] = field(default_factory=list)

    @property
    def basis(self) -> list[Exponent]:
        return self.blocks[0].basis

    @property
    def n_moments(self) -> int:
        return len(self.monomials)

    @property
    def block_sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def to_sdp(self) -> SDPData:
        """Moment problem over the free moments y_alpha, alpha != 0."""
        c = self.objective_vector[1:]
        G = [-b.tensor[1:] for b in self.blocks]
        h = [b.tensor[0] for b in self.blocks]
        A = self.eq_rows[:, 1:]
        bvec = -self.eq_rows[:, 0]
        return SDPData(c, G, h, A, bvec, offset=float(self.objective_vector[0]))

    def form_from_solution(self, x: np.ndarray) -> LinearForm:
        return LinearForm(self.nvars, self.order, np.concatenate([[1.0], x]), self.monomials)

    def residuals(self, form: LinearForm) -> tuple[float, float]:
        """(max |equality row|, min eigenvalue over the PSD blocks) at ``form``."""
        vals = self._values_for(form)
        eq = float(np.max(np.abs(self.eq_rows @ vals))) if len(self.eq_rows) else 0.0
        eig = min(float(np.linalg.eigvalsh(np.tensordot(vals, b.tensor, axes=1))[0])
                  for b in self.blocks)
        return eq, eig

    def _values_for(self, form: LinearForm) -> np.ndarray:
        if form.monomials == self.monomials:
            return form.values
        return np.array([form.moment(e) for e in self.monomials])


def _coefficients(p: Polynomial, index: dict[Exponent, int], size: int) -> np.ndarray:
    v = np.zeros(size)
    for e, c in p.items():
        v[index[e]] += float(c)
    return v


def assemble(f: Polynomial, C: ConstraintSet, t: int, preordering: bool = True,
             names: Sequence[str] | None = None) -> MomentRelaxation:
    """Build the order-t relaxation of ``min f`` over ``C``.

    PSD blocks are the moment matrix plus one localizing matrix per product
    of inequalities (or per inequality when ``preordering`` is False).
    Equality rows encode ``Lambda(x^a c) = 0`` for |a| <= 2t - deg c.
    """
    n = f.nvars
    names = names or C.space.names
    if f.degree > 2 * t:
        raise OrderTooSmall(f, t, names)
    for q in C.all():
        if q.degree > 2 * t:
            raise OrderTooSmall(q, t, names)
    monomials = monomial_basis(n, 2 * t)
    index = {e: k for k, e in enumerate(monomials)}
    N = len(monomials)

    if preordering:
        products = preordering_products(list(C.inequalities), nvars=n)
    else:
        products = [Polynomial.constant(n, 1), *C.inequalities]
    blocks = []
    for q in products:
        shift = math.ceil(max(q.degree, 0) / 2)
        basis = monomial_basis(n, t - shift)
        m = len(basis)
        T = np.zeros((N, m, m))
        for a in range(m):
            for b in range(a, m):
                ab = add_exponents(basis[a], basis[b])
                for e, coef in q.items():
                    k = index[add_exponents(ab, e)]
                    T[k, a, b] += float(coef)
                    if a != b:
                        T[k, b, a] += float(coef)
        blocks.append(LocalizingBlock(q, basis, T))

    rows = []
    labels = []
    seen = set()
    for ci, c in enumerate(C.equalities):
        if c.degree < 0:
            continue
        for a in monomial_basis(n, 2 * t - c.degree):
            row = _coefficients(c.mul_monomial(a), index, N)
            key = tuple(np.round(row, 14))
            if key in seen:
                continue
            seen.add(key)
            rows.append(row)
            labels.append((ci, a))
    eq_rows = np.array(rows).reshape(-1, N)

    rel = MomentRelaxation(t, n, f, C, monomials, blocks, eq_rows, labels,
                           _coefficients(f, index, N), preordering)
    mags = [abs(float(c)) for p in (f, *C.all()) for _, c in p.items()]
    if mags and max(mags) / min(mags) > 1e10:
        msg = "coefficient magnitudes span more than 10 orders; expect poor conditioning"
        log.warning(msg)
        rel.warnings.append(msg)
    return rel


def starting_order(polys: Sequence[Polynomial]) -> int:
    """ceil(max degree / 2), at least 1."""
    return max(1, math.ceil(max(max(p.degree, 0) for p in polys) / 2))


def export_sdpa(rel: MomentRelaxation, path) -> None:
    from .sdpa import write_sdpa
    write_sdpa(rel.to_sdp(), path)


@dataclass
class SOSCertificate:
    """``f - gamma = sum_q sigma_q * q + sum_c h_c * c`` read off the dual solution."""

    gamma: float
    sigmas: list[tuple[Polynomial, Polynomial]]
    multipliers: list[tuple[Polynomial, Polynomial]]
    residual: float


def _gram_polynomial(basis: list[Exponent], Z: np.ndarray, nvars: int) -> Polynomial:
    terms: dict = {}
    for a, ea in enumerate(basis):
        for b, eb in enumerate(basis):
            e = add_exponents(ea, eb)
            terms[e] = terms.get(e, 0.0) + float(Z[a, b])
    return Polynomial(nvars, terms, exact=False)


def sos_certificate(rel: MomentRelaxation, sol) -> SOSCertificate:
    """Replay the dual solution of ``rel`` as a polynomial identity.

    ``residual`` is the coefficient 2-norm of
    ``f - gamma - sum sigma_q q - sum h_c c``.
    """
    n = rel.nvars
    ys = np.asarray(sol.y, dtype=float)
    gamma = float(rel.objective_vector[0] - sum(np.vdot(b.tensor[0], z) for b, z in zip(rel.blocks, sol.Z))
                  + (rel.eq_rows[:, 0] @ ys if ys.size else 0.0))
    resid = rel.objective_vector.copy()
    resid[0] -= gamma
    for b, z in zip(rel.blocks, sol.Z):
        resid -= np.tensordot(b.tensor, z, axes=([1, 2], [0, 1]))
    if ys.size:
        resid += rel.eq_rows.T @ ys
    sigmas = [(b.generator, _gram_polynomial(b.basis, z, n)) for b, z in zip(rel.blocks, sol.Z)]
    mult: dict[int, dict] = {}
    for (ci, a), yr in zip(rel.eq_labels, ys):
        mult.setdefault(ci, {})
        mult[ci][a] = mult[ci].get(a, 0.0) - float(yr)
    multipliers = [(rel.constraints.equalities[ci], Polynomial(n, terms, exact=False))
                   for ci, terms in sorted(mult.items())]
    return SOSCertificate(gamma, sigmas, multipliers, float(np.linalg.norm(resid)))
