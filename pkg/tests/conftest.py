import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from starknf.exact.polynomial import Polynomial
from starknf.exact.space import CANONICAL

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "goldens")

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def canonical_polys(draw, max_terms=4, max_exp=2, params=False):
    """Small random polynomials in q, p (and optionally the parameters)."""
    n = CANONICAL.nvars
    k = len(CANONICAL.parameters)
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = [0] * n
        for i in range(k if not params else 0, n):
            exps[i] = draw(st.integers(0, max_exp)) if draw(st.booleans()) else 0
        terms[tuple(exps)] = draw(fractions)
    return Polynomial(CANONICAL, terms)


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN_DIR
