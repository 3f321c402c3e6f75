import pytest
import sympy as sp
from hypothesis import given, settings

from polyopt import groebner as gb
from polyopt.polycore import GREVLEX, MonomialOrder, Polynomial, parse_polynomial
from strategies import polynomials

NAMES = ["x", "y", "z"]


def P(s, names=NAMES):
    return parse_polynomial(s, names)


def sympy_basis(polys, names, order="grevlex"):
    syms = sp.symbols(" ".join(names))
    exprs = [sp.sympify(p.to_str(names).replace("^", "**"), locals=dict(zip(names, syms)))
             for p in polys]
    G = sp.groebner(exprs, *syms, order=order)
    return {sp.Poly(g, *syms).monic().as_expr() for g in G.exprs}


def as_set(basis, names):
    syms = sp.symbols(" ".join(names))
    out = set()
    for g in basis:
        e = sp.sympify(g.to_str(names).replace("^", "**"), locals=dict(zip(names, syms)))
        out.add(sp.Poly(e, *syms).monic().as_expr())
    return out


@pytest.mark.parametrize("gens", [
    ["x^2 + y^2 - 1", "x - y"],
    ["x*y - z", "y*z - x", "z*x - y"],
    ["(x+z+1)*(y+z) - (x+y)^2", "(x+z+1)^2 - (y+z)*(x+y)", "(x+z+1)*(x+y) - (y+z)^2"],
])
def test_reduced_basis_matches_sympy(gens):
    B = gb.buchberger([P(s) for s in gens])
    assert as_set(B, NAMES) == sympy_basis([P(s) for s in gens], NAMES)
    assert gb.is_groebner(B)


@settings(max_examples=15)
@given(polynomials(2, 2, 3), polynomials(2, 2, 3))
def test_s_polynomials_reduce_to_zero(p, q):
    gens = [g for g in (p, q) if not g.is_zero()]
    if not gens:
        return
    B = gb.buchberger(gens, max_pairs=500, max_degree=12)
    assert gb.is_groebner(B)
    for g in gens:
        assert gb.reduce(g, B).is_zero()


def test_unit_ideal_detected():
    B = gb.buchberger([P("x"), P("x - 1")])
    assert gb.contains_one(B)


def test_elimination_of_circle_line():
    # eliminate y from x^2 + y^2 - 1, y - x  ->  2x^2 - 1
    order = gb.elimination_order(2, [1])
    B = gb.buchberger([P("x^2 + y^2 - 1", ["x", "y"]), P("y - x", ["x", "y"])], order)
    elim = gb.elimination_ideal(B, [0])
    assert len(elim) == 1
    assert elim[0].monic() == parse_polynomial("x^2 - 1/2", ["x"])


def test_elimination_needs_block_order():
    B = gb.buchberger([P("x - y", ["x", "y"])], GREVLEX)
    with pytest.raises(gb.EliminationOrderError):
        gb.elimination_ideal(B, [0])


def test_budget_exceeded():
    gens = [P("x^3 - y*z^2 + 1"), P("y^3 - x*z + 2"), P("z^3 - x^2*y + 3")]
    with pytest.raises(gb.GroebnerBudgetExceeded):
        gb.buchberger(gens, max_pairs=3)


def test_float_input_rejected():
    with pytest.raises(TypeError):
        gb.buchberger([P("x").to_float()])


def test_lex_basis_matches_sympy():
    gens = [P("x^2 + y + z - 1"), P("x + y^2 + z - 1"), P("x + y + z^2 - 1")]
    B = gb.buchberger(gens, MonomialOrder.lex())
    assert gb.is_groebner(B)
    assert as_set(B, NAMES) == sympy_basis(gens, NAMES, "lex")
