"""Buchberger's algorithm over exact rationals, with block elimination orders.

Desk-scale only: a pair-reduction and degree budget turns runaway
computations into :class:`GroebnerBudgetExceeded` instead of a hang.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polycore import GREVLEX, Exponent, MonomialOrder, Polynomial

log = logging.getLogger(__name__)

DEFAULT_MAX_PAIRS = 5000
DEFAULT_MAX_DEGREE = 40


class GroebnerBudgetExceeded(RuntimeError):
    """The computation went past its pair or degree budget."""


class EliminationOrderError(ValueError):
    pass


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple[Polynomial, ...]
    order: MonomialOrder
    reduced: bool = True

    @property
    def nvars(self) -> int:
        return self.generators[0].nvars

    def __iter__(self):
        return iter(self.generators)

    def __len__(self) -> int:
        return len(self.generators)


# internal representation: dict exponent -> Fraction


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


class _Poly:
    __slots__ = ("terms", "lm", "lc")

    def __init__(self, terms: dict, key):
        self.terms = terms
        self.lm = max(terms, key=key)
        self.lc = terms[self.lm]


def _primitive(terms: dict) -> dict:
    # integer coefficients, gcd 1; keeps numerators bounded between reductions
    from math import gcd, lcm
    den = 1
    for c in terms.values():
        den = lcm(den, c.denominator)
    g = 0
    for c in terms.values():
        g = gcd(g, int(c * den))
    scale = Fraction(den, g)
    return {e: c * scale for e, c in terms.items()}


def _axpy(target: dict, factor: Fraction, shift: Exponent, src: dict) -> None:
    for e, c in src.items():
        m = tuple(a + b for a, b in zip(e, shift))
        v = target.get(m, 0) - factor * c
        if v:
            target[m] = v
        else:
            target.pop(m, None)


def _normal_form(terms: dict, basis: Sequence[_Poly], key) -> dict:
    p = dict(terms)
    rem: dict = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for g in basis:
            if _divides(g.lm, m):
                _axpy(p, c / g.lc, _sub(m, g.lm), g.terms)
                break
        else:
            rem[m] = c
            del p[m]
    return rem


def _spoly(f: _Poly, g: _Poly) -> dict:
    lcm = _lcm(f.lm, g.lm)
    out: dict = {}
    _axpy(out, -1 / f.lc, _sub(lcm, f.lm), f.terms)
    _axpy(out, 1 / g.lc, _sub(lcm, g.lm), g.terms)
    return out


def buchberger(gens: Sequence[Polynomial], order: MonomialOrder = GREVLEX,
               max_pairs: int = DEFAULT_MAX_PAIRS,
               max_degree: int = DEFAULT_MAX_DEGREE) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Pairs are processed by the normal strategy (smallest lcm degree first)
    and filtered with Buchberger's coprime and chain criteria.
    """
    if not gens:
        raise ValueError("need at least one generator")
    nv = gens[0].nvars
    if any(not g.exact for g in gens):
        raise TypeError("Groebner bases need exact polynomials")
    key = order.key
    one = Polynomial.constant(nv, 1)

    basis: list[_Poly] = []
    for g in gens:
        if g.is_zero():
            continue
        if g.degree > max_degree:
            raise GroebnerBudgetExceeded(f"input degree {g.degree} exceeds cap {max_degree}")
        basis.append(_Poly(_primitive(g.terms), key))
    if not basis:
        return GroebnerBasis((Polynomial.zero(nv),), order)
    if any(sum(b.lm) == 0 for b in basis):
        return GroebnerBasis((one,), order)

    pairs: set[tuple[int, int]] = {(i, j) for j in range(len(basis)) for i in range(j)}
    done: set[tuple[int, int]] = set()
    reductions = 0
    while pairs:
        i, j = min(pairs, key=lambda ij: (sum(_lcm(basis[ij[0]].lm, basis[ij[1]].lm)), ij[1], ij[0]))
        pairs.discard((i, j))
        done.add((i, j))
        fi, fj = basis[i], basis[j]
        lcm = _lcm(fi.lm, fj.lm)
        if all(a == 0 or b == 0 for a, b in zip(fi.lm, fj.lm)):
            continue
        if _chain_criterion(i, j, lcm, basis, pairs):
            continue
        reductions += 1
        if reductions > max_pairs:
            raise GroebnerBudgetExceeded(f"more than {max_pairs} pair reductions")
        r = _normal_form(_spoly(fi, fj), basis, key)
        if not r:
            continue
        r = _primitive(r)
        deg = max(sum(e) for e in r)
        if deg > max_degree:
            raise GroebnerBudgetExceeded(f"generator degree {deg} exceeds cap {max_degree}")
        new = _Poly(r, key)
        if sum(new.lm) == 0:
            log.debug("unit ideal after %d reductions", reductions)
            return GroebnerBasis((one,), order)
        k = len(basis)
        basis.append(new)
        pairs.update((a, k) for a in range(k))
    log.debug("buchberger: %d reductions, %d generators before reduction", reductions, len(basis))
    return GroebnerBasis(tuple(_reduce_basis(basis, key, nv)), order)


def _chain_criterion(i: int, j: int, lcm: Exponent, basis: Sequence[_Poly],
                     pending: set[tuple[int, int]]) -> bool:
    for k in range(len(basis)):
        if k in (i, j) or not _divides(basis[k].lm, lcm):
            continue
        if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
            return True
    return False


def _reduce_basis(basis: list[_Poly], key, nv: int) -> list[Polynomial]:
    # minimal basis: drop members whose leading monomial is divisible by another's
    keep: list[_Poly] = []
    for idx, g in enumerate(basis):
        dominated = False
        for jdx, h in enumerate(basis):
            if jdx == idx:
                continue
            if _divides(h.lm, g.lm) and (h.lm != g.lm or jdx < idx):
                dominated = True
                break
        if not dominated:
            keep.append(g)
    out: list[_Poly] = []
    for idx, g in enumerate(keep):
        others = [h for jdx, h in enumerate(keep) if jdx != idx]
        r = _normal_form(g.terms, others, key)
        lc = r[max(r, key=key)]
        out.append(_Poly({e: c / lc for e, c in r.items()}, key))
    out.sort(key=lambda p: key(p.lm))
    return [Polynomial(nv, p.terms) for p in out]


def reduce(p: Polynomial, basis: GroebnerBasis | Sequence[Polynomial],
           order: MonomialOrder | None = None) -> Polynomial:
    """Normal form of ``p`` modulo the given generators (exact)."""
    if isinstance(basis, GroebnerBasis):
        order = basis.order if order is None else order
        gens = basis.generators
    else:
        gens = tuple(basis)
        order = GREVLEX if order is None else order
    key = order.key
    polys = [_Poly(g.terms, key) for g in gens if not g.is_zero()]
    if p.is_zero():
        return p
    return Polynomial(p.nvars, _normal_form(p.terms, polys, key))


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
    key = order.key
    return Polynomial(f.nvars, _spoly(_Poly(f.terms, key), _Poly(g.terms, key)))


def is_groebner(basis: GroebnerBasis) -> bool:
    """Every S-polynomial of basis pairs reduces to zero."""
    gens = [g for g in basis.generators if not g.is_zero()]
    for j in range(len(gens)):
        for i in range(j):
            if not reduce(s_polynomial(gens[i], gens[j], basis.order), basis).is_zero():
                return False
    return True


def contains_one(basis: GroebnerBasis) -> bool:
    gens = basis.generators
    return len(gens) == 1 and gens[0].is_constant() and not gens[0].is_zero()


def elimination_ideal(basis: GroebnerBasis, keep: Sequence[int]) -> list[Polynomial]:
    """Generators of (basis) intersected with the subring in ``keep``.

    The basis must be computed under an order whose leading blocks are
    exactly the eliminated variables.  Results are expressed in the kept
    variables only, in the order given by ``keep``.
    """
    keep = list(keep)
    eliminated = set(range(basis.nvars)) - set(keep)
    if not basis.order.eliminates(eliminated):
        raise EliminationOrderError(f"{basis.order!r} does not eliminate variables {sorted(eliminated)}")
    out = []
    for g in basis.generators:
        if g.is_zero():
            continue
        if not g.variables_used() & eliminated:
            out.append(g.restrict(keep))
    return out


def elimination_order(nvars: int, eliminate: Sequence[int]) -> MonomialOrder:
    """Block order with the ``eliminate`` variables greater than all others."""
    rest = [i for i in range(nvars) if i not in set(eliminate)]
    if not eliminate:
        return MonomialOrder.grevlex()
    return MonomialOrder.block(list(eliminate), rest)
