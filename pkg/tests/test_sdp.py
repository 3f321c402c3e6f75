import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyopt.sdp import (OPTIMAL, PRIMAL_INFEASIBLE, SDPData, SolverOptions, solve_sdp,
                         verify_infeasibility)


def random_feasible_sdp(seed, n=3, k=3, p=1):
    rng = np.random.default_rng(seed)
    G = [rng.normal(size=(n, k, k))]
    G[0] = (G[0] + G[0].transpose(0, 2, 1)) / 2
    x0 = rng.normal(size=n)
    S0 = np.eye(k)
    h = [S0 + np.tensordot(x0, G[0], axes=1)]
    A = rng.normal(size=(p, n))
    b = A @ x0
    # dual feasible too: c = -G'(Z0) - A'y0 with Z0 > 0
    Z0 = np.eye(k)
    y0 = rng.normal(size=p)
    c = -(G[0].reshape(n, -1) @ Z0.ravel()) - A.T @ y0
    return SDPData(c, G, h, A, b)


def cvxpy_value(data: SDPData) -> float:
    x = cp.Variable(data.n)
    cons = [hk - sum(x[i] * gk[i] for i in range(data.n)) >> 0 for gk, hk in zip(data.G, data.h)]
    if data.b.size:
        cons.append(data.A @ x == data.b)
    prob = cp.Problem(cp.Minimize(data.c @ x), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value + data.offset


@settings(max_examples=8)
@given(st.integers(0, 10_000))
def test_matches_cvxpy_on_random_instances(seed):
    data = random_feasible_sdp(seed)
    sol = solve_sdp(data)
    assert sol.status == OPTIMAL
    assert sol.primal_objective == pytest.approx(cvxpy_value(data), abs=1e-6)
    # weak duality and complementarity
    assert sol.dual_objective <= sol.primal_objective + 1e-7
    assert abs(sum(np.vdot(s, z) for s, z in zip(sol.S, sol.Z))) < 1e-6


def test_scalar_lp():
    # min x  s.t. x >= 1  (as 1x1 block: x - 1 >= 0  ->  h = -1, G = -1)
    data = SDPData(np.array([1.0]), [np.array([[[-1.0]]])], [np.array([[-1.0]])], np.zeros((0, 1)),
                   np.zeros(0))
    sol = solve_sdp(data)
    assert sol.status == OPTIMAL and sol.primal_objective == pytest.approx(1.0, abs=1e-7)


def test_two_by_two_block():
    # min x  s.t. [[1, x], [x, 1]] >= 0   ->  x = -1
    G = np.array([[[0.0, -1.0], [-1.0, 0.0]]])
    data = SDPData(np.array([1.0]), [G], [np.eye(2)], np.zeros((0, 1)), np.zeros(0))
    sol = solve_sdp(data)
    assert sol.primal_objective == pytest.approx(-1.0, abs=1e-7)


def test_infeasible_detected_and_verified():
    # x <= -1 and x >= 1
    G = [np.array([[[1.0]]]), np.array([[[-1.0]]])]
    h = [np.array([[-1.0]]), np.array([[-1.0]])]
    data = SDPData(np.array([0.0]), G, h, np.zeros((0, 1)), np.zeros(0))
    sol = solve_sdp(data)
    assert sol.status == PRIMAL_INFEASIBLE
    assert verify_infeasibility(data, sol.certificate)


def test_inconsistent_equalities():
    data = SDPData(np.array([1.0, 0.0]), [np.eye(2)[None].repeat(2, 0) * 0], [np.eye(2)],
                   np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 2.0]))
    sol = solve_sdp(data)
    assert sol.status == PRIMAL_INFEASIBLE
    assert verify_infeasibility(data, sol.certificate)


def test_offset_is_added():
    data = random_feasible_sdp(3)
    data.offset = 5.0
    assert solve_sdp(data).primal_objective == pytest.approx(cvxpy_value(data), abs=1e-6)


def test_shape_validation():
    with pytest.raises(ValueError):
        SDPData(np.zeros(2), [np.zeros((2, 2, 2))], [np.eye(2)], np.zeros((1, 2)), np.zeros(2))


def test_iteration_limit_reported():
    data = random_feasible_sdp(5, n=4, k=4)
    sol = solve_sdp(data, SolverOptions(max_iter=2))
    assert sol.status != OPTIMAL
    assert not sol.near_optimal(1e-12)


def test_motzkin_order3_gradient_relaxation_is_unbounded():
    # boxing the moments at R gives an optimum that keeps falling as R grows
    from polyopt import constraints as cs
    from polyopt.moment import assemble
    from polyopt.problems import example
    p = example("motzkin")
    d = assemble(p.objective, cs.gradient_system(p), 3).to_sdp()
    x = cp.Variable(d.n)
    cons = [hk - sum(x[i] * gk[i] for i in range(d.n)) >> 0 for gk, hk in zip(d.G, d.h)]
    cons.append(d.A @ x == d.b)
    values = []
    for R in (1e2, 1e4):
        prob = cp.Problem(cp.Minimize(d.c @ x), cons + [cp.norm(x, "inf") <= R])
        prob.solve(solver=cp.CLARABEL)
        values.append(prob.value + d.offset)
    assert values[1] < values[0] - 3.0


def _grid_oracle(data: SDPData, radius: float) -> float:
    """Minimum of a linear objective over a compact convex 2-D feasible set by brute force.

    A dense grid locates feasible points; since the set is convex, the lowest
    feasible value along the objective direction is a convex function of the
    orthogonal coordinate, refined by ternary search and bisection.
    """
    c = data.c / np.linalg.norm(data.c)
    w = np.array([-c[1], c[0]])

    def feasible(u, v):
        x = u * c + v * w
        return min(np.linalg.eigvalsh(hk - np.tensordot(x, gk, axes=1))[0]
                   for gk, hk in zip(data.G, data.h)) >= 0.0

    def lowest(v, u_feasible):
        lo, hi = -radius, u_feasible
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (lo, mid) if feasible(mid, v) else (mid, hi)
        return hi

    grid = np.linspace(-radius, radius, 121)
    starts = np.linspace(-radius, radius, 400)

    def phi(v):
        for u in starts:
            if feasible(u, v):
                return lowest(v, u)
        return np.inf

    values = [phi(v) for v in grid]
    k = int(np.argmin(values))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    for _ in range(60):
        m1, m2 = a + (b - a) / 3, b - (b - a) / 3
        if phi(m1) <= phi(m2):
            b = m2
        else:
            a = m1
    return float(phi(0.5 * (a + b)) * np.linalg.norm(data.c) + data.offset)


@pytest.mark.parametrize("seed", range(3))
def test_matches_brute_force_grid_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    B = rng.standard_normal((2, 3, 3))
    B = 0.5 * (B + B.transpose(0, 2, 1))
    r = 1.5
    # block 2 is the Schur form of |x| <= r, which keeps the feasible set compact
    E = np.zeros((2, 3, 3))
    for i in range(2):
        E[i, 0, i + 1] = E[i, i + 1, 0] = -1.0
    data = SDPData(rng.standard_normal(2), [B, E], [np.eye(3), r * np.eye(3)],
                   np.zeros((0, 2)), np.zeros(0))
    sol = solve_sdp(data)
    assert sol.status == OPTIMAL
    assert abs(sol.primal_objective - _grid_oracle(data, 2.0)) <= 1e-3
