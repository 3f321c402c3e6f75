"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from polyopt.polycore import Polynomial


def exponents(nvars, max_deg=3):
    return st.lists(st.integers(0, max_deg), min_size=nvars, max_size=nvars).map(tuple).filter(
        lambda e: sum(e) <= max_deg)


def polynomials(nvars=2, max_deg=3, max_terms=4):
    return st.dictionaries(exponents(nvars, max_deg), st.integers(-6, 6), max_size=max_terms).map(
        lambda d: Polynomial(nvars, d))
