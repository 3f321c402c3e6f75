"""Constraint systems derived from a problem ``min f s.t. g0 = 0, g+ >= 0``.

Every builder is a pure function from a :class:`ProblemInstance` to a
:class:`ConstraintSet` (or to a new instance, for the singular branch).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from . import groebner
from .polycore import Polynomial, VariableSpace, gram_determinant, jacobian_minors

PROVENANCES = ("kkt-lifted", "kkt-eliminated", "fj-minors", "fj-gram", "singular", "direct",
               "gradient", "known-minimum", "real-radical")

DEFAULT_MAX_PRODUCTS = 6


@dataclass(frozen=True)
class ProblemInstance:
    """``min objective`` subject to ``equalities == 0`` and ``inequalities >= 0``."""

    space: VariableSpace
    objective: Polynomial
    equalities: tuple[Polynomial, ...] = ()
    inequalities: tuple[Polynomial, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "equalities", tuple(self.equalities))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        nb = self.space.nbase
        for p in (self.objective, *self.equalities, *self.inequalities):
            if p.nvars != nb:
                raise ValueError(f"polynomial in {p.nvars} variables, problem has {nb}")

    @property
    def nvars(self) -> int:
        return self.space.nbase

    @property
    def names(self) -> tuple[str, ...]:
        return self.space.base

    def polynomials(self) -> list[Polynomial]:
        return [self.objective, *self.equalities, *self.inequalities]

    def max_degree(self) -> int:
        return max(max(p.degree, 0) for p in self.polynomials())


@dataclass(frozen=True)
class ConstraintSet:
    """Equalities ``C0`` and inequalities ``C+`` over ``space``.

    ``infeasible`` marks a set whose equalities were shown symbolically to
    generate the unit ideal.
    """

    equalities: tuple[Polynomial, ...]
    inequalities: tuple[Polynomial, ...]
    provenance: str
    space: VariableSpace
    infeasible: bool = False
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "equalities", tuple(_dedup(self.equalities)))
        object.__setattr__(self, "inequalities", tuple(_dedup(self.inequalities)))

    @property
    def nvars(self) -> int:
        return self.space.nvars

    def all(self) -> list[Polynomial]:
        return [*self.equalities, *self.inequalities]

    def max_degree(self) -> int:
        return max((p.degree for p in self.all()), default=0)


def _dedup(polys: Iterable[Polynomial]) -> list[Polynomial]:
    seen: set[Polynomial] = set()
    out = []
    for p in polys:
        if p.is_zero() or p in seen:
            continue
        seen.add(p)
        out.append(p)
    return out


def _product(polys: Sequence[Polynomial], nvars: int) -> Polynomial:
    acc = Polynomial.constant(nvars, 1)
    for p in polys:
        acc = acc * p
    return acc


def _subsets(n: int) -> Iterable[tuple[int, ...]]:
    for k in range(n + 1):
        yield from itertools.combinations(range(n), k)


# ---------------------------------------------------------------------------


def direct(p: ProblemInstance) -> ConstraintSet:
    """The constraints as given."""
    return ConstraintSet(p.equalities, p.inequalities, "direct", p.space)


def gradient_system(p: ProblemInstance) -> ConstraintSet:
    """Unconstrained case: the gradient of the objective."""
    if p.equalities or p.inequalities:
        raise ValueError("the gradient system is only defined for unconstrained problems")
    return ConstraintSet(tuple(p.objective.gradient()), (), "gradient", p.space)


def build_kkt_lifted(p: ProblemInstance) -> ConstraintSet:
    """KKT equations in the lifted variables (x, u, v).

    ``F_i = df/dx_i - sum u_j dg0_j/dx_i - sum v_j dg+_j/dx_i`` together with
    the equalities and the complementarity products ``v_j g+_j``.
    """
    n, n1, n2 = p.nvars, len(p.equalities), len(p.inequalities)
    space, u_idx = p.space.lift("u", n1)
    space, v_idx = space.lift("v", n2)
    N = space.nvars
    up = lambda q: space.embed(q)  # noqa: E731
    u = [Polynomial.variable(N, i) for i in u_idx]
    v = [Polynomial.variable(N, i) for i in v_idx]
    F = []
    for i in range(n):
        Fi = up(p.objective.diff(i))
        for uj, g in zip(u, p.equalities):
            Fi = Fi - uj * up(g.diff(i))
        for vj, g in zip(v, p.inequalities):
            Fi = Fi - vj * up(g.diff(i))
        F.append(Fi)
    eqs = F + [up(g) for g in p.equalities] + [vj * up(g) for vj, g in zip(v, p.inequalities)]
    return ConstraintSet(tuple(eqs), tuple(up(g) for g in p.inequalities), "kkt-lifted", space)


def build_kkt_eliminated(p: ProblemInstance, max_pairs: int = groebner.DEFAULT_MAX_PAIRS,
                         max_degree: int = groebner.DEFAULT_MAX_DEGREE) -> ConstraintSet:
    """Equalities generating the KKT ideal intersected with R[x]; inequalities unchanged.

    Raises :class:`groebner.GroebnerBudgetExceeded` when elimination is beyond
    desk scale.
    """
    if not p.equalities and not p.inequalities:
        return ConstraintSet(tuple(p.objective.gradient()), (), "kkt-eliminated", p.space)
    if p.objective.is_constant():
        # the lifted equations are homogeneous of degree 1 in (u, v)
        return ConstraintSet(p.equalities, p.inequalities, "kkt-eliminated", p.space)
    lifted = build_kkt_lifted(p)
    n = p.nvars
    lifted_vars = list(range(n, lifted.nvars))
    order = groebner.elimination_order(lifted.nvars, lifted_vars)
    basis = groebner.buchberger(lifted.equalities, order, max_pairs=max_pairs, max_degree=max_degree)
    if groebner.contains_one(basis):
        one = Polynomial.constant(n, 1)
        return ConstraintSet((one,), p.inequalities, "kkt-eliminated", p.space, infeasible=True,
                             notes=("KKT ideal is the unit ideal",))
    eqs = [g.primitive() for g in groebner.elimination_ideal(basis, range(n))]
    return ConstraintSet(tuple(eqs), p.inequalities, "kkt-eliminated", p.space)


def _fj_columns(p: ProblemInstance, nu: Sequence[int], with_objective: bool) -> list[list[Polynomial]]:
    cols = [p.objective.gradient()] if with_objective else []
    cols += [g.gradient() for g in p.equalities]
    cols += [p.inequalities[j].gradient() for j in nu]
    return cols


def _outside_product(p: ProblemInstance, nu: Sequence[int]) -> Polynomial:
    return _product([g for j, g in enumerate(p.inequalities) if j not in nu], p.nvars)


def build_fj_minors(p: ProblemInstance, rank_bound: int | None = None,
                    anchored: bool = False) -> ConstraintSet:
    """Projection of the Fritz-John variety through Jacobian minors.

    For every subset ``nu`` of the inequalities, the ``(m+|nu|+1)``-minors of
    ``[grad f, grad g0..., grad g+_j (j in nu)]`` are multiplied by the product
    of the inequalities outside ``nu``.  ``m`` defaults to the number of
    equalities.  Subsets with ``n <= m + |nu|`` contribute nothing.
    """
    n, n1 = p.nvars, len(p.equalities)
    m = n1 if rank_bound is None else rank_bound
    if not 0 <= m <= n1:
        raise ValueError(f"rank bound must lie in [0, {n1}]")
    eqs = list(p.equalities)
    for nu in _subsets(len(p.inequalities)):
        k = m + len(nu) + 1
        if n < k:
            continue
        cols = _fj_columns(p, nu, True)
        if k > len(cols):
            continue
        prod = _outside_product(p, nu)
        eqs.extend(d * prod for d in jacobian_minors(cols, k, anchored=anchored))
    return ConstraintSet(tuple(eqs), p.inequalities, "fj-minors", p.space)


def build_fj_gram(p: ProblemInstance, rank_bound: int | None = None) -> ConstraintSet:
    """Real Fritz-John projection through Gram determinants of the same columns."""
    n, n1 = p.nvars, len(p.equalities)
    m = n1 if rank_bound is None else rank_bound
    eqs = list(p.equalities)
    for nu in _subsets(len(p.inequalities)):
        if n <= m + len(nu):
            continue
        cols = _fj_columns(p, nu, True)
        eqs.append(gram_determinant(cols) * _outside_product(p, nu))
    return ConstraintSet(tuple(eqs), p.inequalities, "fj-gram", p.space)


def singular_equations(p: ProblemInstance, rank_bound: int | None = None) -> list[Polynomial]:
    """The products ``Theta * prod_{j not in nu} g+_j`` describing the singular locus.

    ``Theta`` runs over the ``(m+|nu|)``-minors of the constraint Jacobian
    ``[grad g0..., grad g+_j (j in nu)]``; a 0 x 0 minor is 1 and subsets whose
    minors would exceed the matrix impose nothing.
    """
    n, n1 = p.nvars, len(p.equalities)
    m = n1 if rank_bound is None else rank_bound
    out: list[Polynomial] = []
    for nu in _subsets(len(p.inequalities)):
        k = m + len(nu)
        prod = _outside_product(p, nu)
        if k == 0:
            out.append(prod)
            continue
        cols = _fj_columns(p, nu, False)
        if k > n or k > len(cols):
            continue
        out.extend(d * prod for d in jacobian_minors(cols, k))
    return _dedup(out)


def build_singular(p: ProblemInstance, rank_bound: int | None = None) -> ProblemInstance:
    """Same objective and inequalities; equalities extended by the singular-locus equations."""
    eqs = _dedup([*p.equalities, *singular_equations(p, rank_bound)])
    name = f"{p.name}/singular" if p.name else "singular"
    return replace(p, equalities=tuple(eqs), name=name)


def preordering_products(ineqs: Sequence[Polynomial], nvars: int | None = None,
                         max_count: int = DEFAULT_MAX_PRODUCTS) -> list[Polynomial]:
    """All square-free products of the inequalities, starting with the constant 1.

    ``nvars`` is only needed when ``ineqs`` is empty.
    """
    if len(ineqs) > max_count:
        raise ValueError(f"{len(ineqs)} inequalities exceed the preordering bound {max_count}")
    if not ineqs:
        if nvars is None:
            raise ValueError("nvars is required for an empty inequality list")
        return [Polynomial.constant(nvars, 1)]
    nv = ineqs[0].nvars
    return [_product([ineqs[i] for i in s], nv) for s in _subsets(len(ineqs))]


def apply_known_minimum(p: ProblemInstance, fstar) -> ProblemInstance:
    """Add ``f - f*`` to the equalities."""
    value = fstar if isinstance(fstar, (int, Fraction)) else Fraction(str(fstar))
    extra = p.objective - value
    eqs = list(p.equalities) + ([] if extra.is_zero() else [extra])
    return replace(p, equalities=tuple(eqs))


def real_radical_set(p: ProblemInstance) -> ConstraintSet:
    return ConstraintSet(p.equalities, p.inequalities, "real-radical", p.space)


def known_minimum_set(p: ProblemInstance, fstar) -> ConstraintSet:
    q = apply_known_minimum(p, fstar)
    return ConstraintSet(q.equalities, q.inequalities, "known-minimum", q.space)
