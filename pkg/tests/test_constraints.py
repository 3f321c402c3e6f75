import pytest

from polyopt import constraints as cs
from polyopt.polycore import Polynomial, parse_polynomial
from polyopt.problems import example, parse_problem


def same_up_to_scale(p, q):
    if p.is_zero() or q.is_zero():
        return p.is_zero() and q.is_zero()
    return p.monic() == q.monic()


def test_direct_keeps_constraints():
    p = example("motzkin-ball")
    C = cs.direct(p)
    assert C.inequalities == p.inequalities and C.equalities == ()
    assert C.provenance == "direct"


def test_gradient_system_only_unconstrained():
    C = cs.gradient_system(example("motzkin"))
    assert len(C.equalities) == 2
    with pytest.raises(ValueError):
        cs.gradient_system(example("torus"))


def test_kkt_lifted_shape():
    p = example("motzkin-ball")
    C = cs.build_kkt_lifted(p)
    assert C.nvars == 4  # x, y, z and one multiplier
    assert len(C.equalities) == 4  # three stationarity rows and one complementarity product


def test_kkt_elimination_of_ill_posed_is_unit():
    C = cs.build_kkt_eliminated(example("ill-posed"))
    assert C.infeasible


def test_kkt_elimination_torus_vanishes_on_minimizers():
    p = example("torus")
    C = cs.build_kkt_eliminated(p)
    assert not C.infeasible
    for pt in [(2, 0, -1), (0, -2, -1), (2 ** 0.5, 2 ** 0.5, -1)]:
        assert all(abs(float(g.to_float()(pt))) < 1e-9 for g in C.equalities)


def test_fj_minors_perturbed_motzkin_listed_equations():
    p = example("perturbed-motzkin-ball")
    C = cs.build_fj_minors(p)
    names = ["x", "y", "z"]
    listed = [
        "-4*z*x^4*y - 20*z*x^2*y^3 + 12*x^2*y*z^3 - 0.06*z*y^5 + 12.06*y*z^5",
        "-20*z*x^3*y^2 - 4*z*x*y^4 + 12*x*y^2*z^3 - 0.06*z*x^5 + 12.06*x*z^5",
        "(4*x^3*y^2 + 2*x*y^4 - 6*x*y^2*z^2 + 0.03*x^5)*(1 - x^2 - y^2 - z^2)",
        "(2*x^4*y + 4*x^2*y^3 - 6*x^2*y*z^2 + 0.03*y^5)*(1 - x^2 - y^2 - z^2)",
        "(-6*x^2*y^2*z + 6.03*z^5)*(1 - x^2 - y^2 - z^2)",
    ]
    for s in listed:
        q = parse_polynomial(s, names)
        assert any(same_up_to_scale(q, g) for g in C.equalities), s


def test_fj_gram_has_one_equation_per_subset():
    p = example("motzkin-ball")
    C = cs.build_fj_gram(p)
    # subsets {} and {0}; both have n > m + |nu|
    assert len(C.equalities) == 2


def test_fj_rank_bound_range():
    with pytest.raises(ValueError):
        cs.build_fj_minors(example("twisted-cubic"), rank_bound=4)


def test_singular_equations_of_ill_posed():
    p = example("ill-posed")
    eqs = cs.singular_equations(p)
    x = Polynomial.variable(1, 0)
    assert any(same_up_to_scale(e, x ** 3) for e in eqs)
    assert any(same_up_to_scale(e, x ** 2) for e in eqs)
    sing = cs.build_singular(p)
    assert sing.name.endswith("singular")


def test_singular_of_unconstrained_is_empty_locus():
    eqs = cs.singular_equations(example("motzkin"))
    assert eqs == [Polynomial.constant(2, 1)]


def test_preordering_products():
    g = [parse_polynomial(s, ["x"]) for s in ("x", "1 - x")]
    prods = cs.preordering_products(g)
    assert len(prods) == 4 and prods[0] == Polynomial.constant(1, 1)
    with pytest.raises(ValueError):
        cs.preordering_products(g * 4, max_count=6)


def test_known_minimum_set():
    p = example("motzkin")
    C = cs.known_minimum_set(p, 0)
    assert C.equalities == (p.objective,)
    assert C.provenance == "known-minimum"


def test_unknown_provenance_rejected():
    p = parse_problem("vars x\nminimize x")
    with pytest.raises(ValueError):
        cs.ConstraintSet((), (), "bogus", p.space)


def test_dedup_drops_zero_and_repeats():
    p = parse_problem("vars x\nminimize x\neq x\neq x")
    C = cs.direct(p)
    assert len(C.equalities) == 1
