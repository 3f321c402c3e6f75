import numpy as np
import pytest
from hypothesis import settings

from polyopt.polycore import Polynomial

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_poly(rng, nvars, degree, terms=4, exact=True):
    from polyopt.polycore import monomial_basis
    basis = monomial_basis(nvars, degree)
    pick = rng.choice(len(basis), size=min(terms, len(basis)), replace=False)
    coeffs = {basis[k]: int(rng.integers(-5, 6)) for k in pick}
    return Polynomial(nvars, coeffs, exact=exact)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
