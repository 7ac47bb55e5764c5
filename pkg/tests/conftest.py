import sys
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from semiinv.poly import Polynomial
from semiinv.ring import GF, QQ, ZZ, x_var

settings.register_profile("default", deadline=None)
settings.load_profile("default")

RINGS = [ZZ, QQ, GF(2), GF(5), GF(101)]

VARS = [x_var(i, j, k) for k in (1, 2, 3) for i in (1, 2) for j in (1, 2)]


def coefficients(ring):
    if ring is QQ:
        return st.fractions(min_value=-20, max_value=20, max_denominator=7).map(ring.reduce)
    return st.integers(-30, 30).map(ring.reduce)


@st.composite
def polynomials(draw, ring, max_terms=5, max_degree=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        mono = tuple(sorted(draw(st.lists(st.sampled_from(VARS), max_size=max_degree))))
        terms[mono] = terms.get(mono, 0) + draw(coefficients(ring))
    return Polynomial(ring, terms)


@pytest.fixture(params=RINGS, ids=str)
def ring(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


__all__ = ["Fraction", "RINGS", "VARS", "polynomials", "coefficients"]
