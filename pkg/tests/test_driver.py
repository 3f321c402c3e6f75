import json

import numpy as np
import pytest

from polyopt import certify as ce
from polyopt import constraints as cs
from polyopt.driver import (INFEASIBLE, SOLVED, STABILIZED, RunConfig, minimize, order_values,
                            real_radical, run_branch)
from polyopt.polycore import parse_polynomial
from polyopt.problems import example, parse_problem


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(strategy="magic")
    with pytest.raises(ValueError):
        RunConfig(max_order=0)


def test_simple_quadratic():
    p = parse_problem("vars x y\nminimize (x - 1)^2 + (y + 2)^2 + 3")
    r = minimize(p)
    assert r.status == SOLVED and r.fstar == pytest.approx(3.0, abs=1e-7)
    assert np.allclose(r.points, [[1.0, -2.0]], atol=1e-6)


def test_infeasible_problem():
    p = parse_problem("vars x\nminimize x\neq x^2 + 1")
    r = minimize(p, RunConfig(strategy="direct"))
    assert r.status == INFEASIBLE
    assert r.root.log[-1].status == "primal-infeasible"


def test_radical_trivial_ideal_is_empty():
    b = real_radical(parse_problem("vars x y\nminimize 0"))
    assert b.status in (SOLVED, STABILIZED) and b.generators == []


@pytest.mark.parametrize("text,expect", [
    ("vars x y\nminimize 0\neq x^2 + y^2", ["x", "y"]),
    ("vars x\nminimize 0\neq x^2", ["x"]),
    ("vars x y\nminimize 0\neq (x^2 + y^2)*(x - 1)^2 + 0", None),
])
def test_radical_generators(text, expect):
    p = parse_problem(text)
    b = real_radical(p)
    if expect is None:
        assert b.status in (SOLVED, STABILIZED)
        # the real zeros are the origin and the line x = 1: the product x*(x-1) ... vanishes there
        for pt in [(0.0, 0.0), (1.0, 3.0), (1.0, -2.0)]:
            assert all(abs(float(g.to_float()(pt))) < 1e-6 for g in b.generators)
        return
    gens = [parse_polynomial(s, p.names) for s in expect]
    assert ce.ideals_equivalent(b.generators, gens, tol=1e-5)


def test_determinism():
    p = example("robinson")
    a = minimize(p, RunConfig(seed=3)).to_dict()
    b = minimize(p, RunConfig(seed=3)).to_dict()
    for d in (a, b):
        d.pop("seconds")
    strip = lambda d: json.dumps(d, sort_keys=True, default=str)  # noqa: E731
    import re
    clean = lambda s: re.sub(r'"seconds": [0-9.e-]+', "", s)  # noqa: E731
    assert clean(strip(a)) == clean(strip(b))


@pytest.mark.parametrize("name,strategies", [
    ("torus", ("kkt-elim", "fj-minors", "fj-gram")),
    ("twisted-cubic", ("kkt-elim", "fj-minors", "fj-gram")),
    ("perturbed-motzkin-ball", ("fj-minors", "fj-gram")),
    ("motzkin-ball", ("kkt-elim", "fj-minors")),
])
def test_strategy_cross_agreement(name, strategies):
    p = example(name)
    results = [minimize(p, RunConfig(strategy=s, max_order=6)) for s in strategies]
    assert all(r.status in (SOLVED, STABILIZED) for r in results)
    vals = [r.fstar for r in results]
    assert max(vals) - min(vals) <= 1e-5
    for r in results[1:]:
        assert ce.ideals_equivalent(results[0].generators, r.generators, tol=1e-5)


def test_known_minimum_mode():
    p = example("motzkin")
    r = minimize(p, RunConfig(strategy="known-minimum", known_minimum=0))
    assert r.status == SOLVED and abs(r.fstar) < 1e-6
    assert len(r.points) == 4


def test_sandwich_and_monotonicity():
    p = example("perturbed-motzkin-ball")
    C = cs.build_fj_minors(p)
    sols = order_values(p, C, [4, 5])
    assert sols[4].primal_objective <= sols[5].primal_objective + 1e-6
    for s in sols.values():
        assert s.dual_objective <= s.primal_objective + 1e-6
    assert sols[5].primal_objective <= float(p.objective.to_float()((0.0, 0.0, 0.0))) + 1e-6


def test_report_json_and_export(tmp_path):
    p = example("torus")
    r = minimize(p, RunConfig(export_dir=str(tmp_path)))
    d = json.loads(r.to_json())
    assert d["status"] == STABILIZED and d["branches"]["log"]
    assert list(tmp_path.glob("*.dat-s"))


def test_run_branch_on_unit_ideal():
    p = example("ill-posed")
    b = run_branch(p, cs.build_kkt_eliminated(p), RunConfig())
    assert b.status == INFEASIBLE and "symbolic" in b.notes[0]


def test_full_fj_explores_singular_branch():
    p = parse_problem("vars x y\nminimize x + y\ngeq 1 - x^2 - y^2")
    r = minimize(p, RunConfig(full_fj=True))
    assert r.root.children
    assert r.fstar == pytest.approx(-np.sqrt(2), abs=1e-6)


def test_max_order_without_certificate():
    p = example("motzkin")
    r = minimize(p, RunConfig(max_order=3, refine=False))
    assert r.status not in (SOLVED,)
    assert "no certificate" in " ".join(r.root.notes)


def test_rank_cross_check_never_exceeds_interior_rank():
    r = minimize(example("torus"), RunConfig(cross_check=True))
    notes = [e.note for e in r.root.log if "cross-check" in e.note]
    assert notes and all("(consistent)" in n for n in notes)
