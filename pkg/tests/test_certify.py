import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyopt import certify as ce
from polyopt import constraints as cs
from polyopt.moment import combine_forms, evaluation_form, moment_matrix
from polyopt.polycore import Polynomial, parse_polynomial
from polyopt.problems import parse_problem

UNCONSTRAINED2 = parse_problem("vars x y\nminimize x^2 + y^2")
C2 = cs.direct(UNCONSTRAINED2)


def atomic_form(points, weights, t):
    return combine_forms([evaluation_form(p, t) for p in points], weights)


distinct_points = st.lists(
    st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=4, unique=True
).map(lambda pts: [(a / 2, b / 2) for a, b in pts])


@settings(max_examples=25)
@given(distinct_points, st.integers(0, 5))
def test_extraction_recovers_atoms(points, seed):
    r = len(points)
    weights = np.full(r, 1.0 / r)
    form = atomic_form(points, weights, 4)
    verdict = ce.flat_extension_check(form, C2)
    assert verdict.holds and verdict.rank == r
    ex = ce.extract_points(form, C2, verdict=verdict, seed=seed)
    got = sorted(map(tuple, np.round(ex.points, 8)))
    assert got == sorted(points)
    assert np.allclose(np.sort(ex.weights), weights)
    assert ex.moment_residual < 1e-8


@settings(max_examples=20)
@given(distinct_points)
def test_kernel_generators_vanish_on_atoms(points):
    form = atomic_form(points, np.full(len(points), 1 / len(points)), 3)
    gens = ce.kernel_ideal(form)
    pts = np.array(points)
    for g in gens:
        assert np.max(np.abs(g.to_float().evaluate_many(pts))) < 1e-6


def test_rank_profile_of_two_points():
    form = atomic_form([(1.0, 0.0), (-1.0, 0.0)], [0.5, 0.5], 3)
    assert ce.rank_profile(form) == [1, 2, 2, 2]


def test_flatness_gap_uses_inequalities():
    p = parse_problem("vars x\nminimize x\neq x^6\ngeq 1 - x^4")
    assert ce.flatness_gap(cs.direct(p)) == 2
    q = parse_problem("vars x\nminimize x\neq x^6")
    assert ce.flatness_gap(cs.direct(q)) == 1


def test_non_flat_form():
    # uniform-ish form with full rank: no flatness
    form = atomic_form([(a, b) for a in (-1, 0, 1, 2) for b in (-1, 0, 1, 2)], np.full(16, 1 / 16), 2)
    v = ce.flat_extension_check(form, C2)
    assert not v.holds
    with pytest.raises(ce.ExtractionError):
        ce.extract_points(form, C2, verdict=v)


def test_clustered_eigenvalues_are_refused():
    # two atoms sharing every coordinate combination used by a degenerate weight vector
    form = atomic_form([(0.0, 1.0), (1.0, 0.0)], [0.5, 0.5], 3)
    verdict = ce.flat_extension_check(form, C2)
    N = ce.extract_points(form, C2, verdict=verdict, seed=0)
    assert len(N.points) == 2


def test_echelon_pivots_on_largest_monomials():
    form = atomic_form([(1.0, 1.0), (-1.0, 1.0)], [0.5, 0.5], 2)
    polys = ce.kernel_polynomials(form, 2)
    leads = {p.leading_exponent() for p in polys}
    assert (2, 0) in leads and (0, 2) in leads


def test_ideal_membership_and_equivalence():
    names = ["x", "y"]
    g = [parse_polynomial(s, names) for s in ("x^2 - 1", "y^2 - 1")]
    h = [parse_polynomial(s, names) for s in ("x^2 + y^2 - 2", "x^2 - y^2")]
    assert ce.ideals_equivalent(g, h)
    assert ce.in_truncated_ideal(parse_polynomial("x^3*y - x*y", names), g, 4)
    assert not ce.in_truncated_ideal(parse_polynomial("x - 1", names), g, 4)
    assert not ce.ideals_equivalent(g, [parse_polynomial("x - 1", names)])
    assert ce.ideals_equivalent([], [])


def test_snap():
    p = Polynomial(1, {(1,): 3.0, (0,): -1.0000000001}, exact=False)
    q = ce.snap(p)
    assert q.exact and q == parse_polynomial("x - 1/3", ["x"])


def test_spectral_cut():
    assert ce.spectral_cut(np.array([1.0, 0.3, 1e-5, 1e-6])) == 2
    assert ce.spectral_cut(np.array([1.0, 0.5, 0.2])) == 0
    # the loosest gapped cut wins
    assert ce.spectral_cut(np.array([1.0, 0.3, 1e-3, 1e-8])) == 2


def test_refinement_candidates_from_noisy_form():
    clean = atomic_form([(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)], np.full(4, 0.25), 3)
    noise = atomic_form([(3.0, 0.0)], [1.0], 3)
    form = combine_forms([clean, noise], [1.0, 1e-7])
    cands = ce.refinement_candidates(form)
    names = ["x", "y"]
    expect = [parse_polynomial(s, names) for s in ("x^2 - 1", "y^2 - 1")]
    assert ce.ideals_equivalent(cands, expect)
    assert all(c.exact for c in cands)


def test_verify_reports_residuals():
    p = parse_problem("vars x y\nminimize x + y\neq x^2 + y^2 - 2\ngeq x")
    rep = ce.verify([(1.0, -1.0)], [parse_polynomial("x - 1", ["x", "y"])], p, 0.0)
    assert rep.passed
    bad = ce.verify([(-1.0, 1.0)], [], p, 0.0)
    assert not bad.passed and bad.points[0].inequality_min == pytest.approx(-1.0)


def test_kernel_soundness_small_for_true_generators():
    form = atomic_form([(1.0, 2.0)], [1.0], 2)
    gens = ce.kernel_ideal(form)
    assert max(ce.kernel_soundness(form, gens)) < 1e-10
    assert ce.numerical_rank(moment_matrix(form))[0] == 1
