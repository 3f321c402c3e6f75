import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyopt import constraints as cs
from polyopt.moment import (OrderTooSmall, assemble, combine_forms, evaluation_form, moment_matrix,
                            sos_certificate, starting_order)
from polyopt.polycore import monomial_basis, parse_polynomial
from polyopt.problems import EXAMPLES, example
from polyopt.sdp import solve

# feasible points of each example's constraint set (direct constraints)
FEASIBLE = {
    "ill-posed": [(0.0,), (0.7,)],
    "twisted-cubic": [(0.0, 1.0, 0.0), (-1 / 3, 2 / 3, -1 / 3), (-0.5, 0.5, -0.5)],
    "motzkin": [(1.0, 1.0), (0.3, -2.0)],
    "robinson": [(1.0, 0.0), (0.5, 0.5)],
    "perturbed-motzkin-ball": [(0.0, 0.0, 0.0), (0.5, 0.5, 0.5)],
    "motzkin-ball": [(0.5, 0.5, 0.5), (0.0, 0.0, 1.0)],
    "torus": [(2.0, 0.0, -1.0), (0.0, 2.0, 1.0), (3.0, 0.0, 0.0)],
}


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_evaluation_forms_are_feasible(name):
    p = example(name)
    C = cs.direct(p)
    t = max(starting_order(p.polynomials()), 2)
    rel = assemble(p.objective, C, t)
    for pt in FEASIBLE[name]:
        eq, eig = rel.residuals(evaluation_form(pt, t))
        assert eq <= 1e-9 and eig >= -1e-9
        assert abs(evaluation_form(pt, t)(p.objective) - float(p.objective.to_float()(pt))) < 1e-9


@given(st.lists(st.floats(-2, 2), min_size=2, max_size=2), st.integers(1, 3))
def test_moment_matrix_of_point_is_rank_one(pt, t):
    M = moment_matrix(evaluation_form(pt, t))
    v = np.array([np.prod(np.array(pt) ** np.array(e)) for e in M.basis])
    assert np.allclose(M.matrix, np.outer(v, v))


def test_hankel_structure():
    form = combine_forms([evaluation_form((1.0, 2.0), 2), evaluation_form((-1.0, 0.5), 2)], [0.3, 0.7])
    M = moment_matrix(form, 2)
    idx = {e: k for k, e in enumerate(M.basis)}
    # M[x, y] == M[1, xy]
    assert M.matrix[idx[(1, 0)], idx[(0, 1)]] == pytest.approx(M.matrix[0, idx[(1, 1)]])
    assert form((parse_polynomial("x*y", ["x", "y"]))) == pytest.approx(0.3 * 2 + 0.7 * -0.5)


def test_block_structure_and_sizes():
    p = example("motzkin-ball")
    rel = assemble(p.objective, cs.direct(p), 3)
    assert rel.block_sizes == [len(monomial_basis(3, 3)), len(monomial_basis(3, 2))]
    assert rel.n_moments == len(monomial_basis(3, 6))
    data = rel.to_sdp()
    assert data.n == rel.n_moments - 1


def test_equality_rows_are_shifted_multiples():
    p = example("torus")
    rel = assemble(p.objective, cs.direct(p), 3)
    # deg 4 constraint at order 3: multipliers of degree <= 2
    assert len(rel.eq_rows) == len(monomial_basis(3, 2))


def test_order_too_small():
    p = example("motzkin")
    with pytest.raises(OrderTooSmall):
        assemble(p.objective, cs.gradient_system(p), 2)


def test_sos_certificate_replays_identity():
    p = example("torus")
    C = cs.build_kkt_eliminated(p)
    rel = assemble(p.objective, C, 2)
    sol = solve(rel)
    cert = sos_certificate(rel, sol)
    assert cert.residual < 1e-6
    assert cert.gamma == pytest.approx(-1.0, abs=1e-6)
    # each Gram matrix is PSD
    for _, sigma in cert.sigmas:
        assert sigma is not None
    for Z in sol.Z:
        assert np.linalg.eigvalsh(Z)[0] >= -1e-8


def test_linear_form_truncate_and_range():
    form = evaluation_form((1.0, 2.0), 3)
    small = form.truncate(1)
    assert small.order == 1 and small.moment((1, 1)) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        small(parse_polynomial("x^3", ["x", "y"]))
    with pytest.raises(ValueError):
        small.truncate(2)
