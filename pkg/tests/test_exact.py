"""Exact arithmetic: coefficients, polynomials, brackets, ideal reduction."""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from starknf.exact import (
    CANONICAL,
    INVARIANT,
    PI,
    ExactCoefficient,
    NotCanonicalError,
    NotInSpanError,
    ParseError,
    Polynomial,
    SpaceMismatchError,
    UnsupportedIdealError,
    IdealSpec,
    groebner_basis,
    level_ideal,
    linear_combination,
    parse,
    poisson_bracket,
    sample_variety_point,
    solve_exact,
    variety_points,
    xi_ideal,
)
from starknf.exact.space import XIETA
from starknf.invariants import canonical_generators

from conftest import canonical_polys, fractions

C = lambda t: parse(t, CANONICAL)  # noqa: E731


# -- coefficients -----------------------------------------------------------


def test_coefficient_ring_basics():
    a = ExactCoefficient([Fraction(1, 2), Fraction(1, 4)])  # 1/2 + pi/4
    assert (a - a).is_zero()
    assert a.pi_degree == 1
    assert not a.is_rational()
    assert ExactCoefficient(3).rational() == 3
    assert a.to_float(3.0) == pytest.approx(1.25)


def test_coefficient_rejects_float():
    with pytest.raises(TypeError):
        ExactCoefficient(0.5)


@given(fractions, fractions, fractions)
def test_coefficient_distributive(x, y, z):
    a, b, c = ExactCoefficient([x, y]), ExactCoefficient([y, z]), ExactCoefficient([z])
    assert a * (b + c) == a * b + a * c


def test_pi_is_formal():
    p = parse("pi*q1 - pi*q1", CANONICAL)
    assert p.is_zero()
    assert PI.pi_degree == 1


# -- polynomials ------------------------------------------------------------


def test_parse_print_example():
    p = C("q1^2 + 1/2*p1 - 3")
    assert str(p) == "-3 + 1/2*p1 + q1^2"
    assert parse(str(p), CANONICAL) == p


def test_parse_errors():
    with pytest.raises(ParseError):
        C("q1 +")
    with pytest.raises(ParseError):
        C("")
    with pytest.raises((ParseError, KeyError)):
        C("z9")


@given(canonical_polys(params=True))
def test_text_round_trip(p):
    assert parse(p.to_text(), CANONICAL) == p
    assert parse(p.to_text(), CANONICAL).to_text() == p.to_text()


@given(canonical_polys(), canonical_polys(), canonical_polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(canonical_polys(), canonical_polys())
def test_derivative_leibniz(a, b):
    assert (a * b).diff("q2") == a.diff("q2") * b + a * b.diff("q2")


def test_space_mismatch():
    with pytest.raises(SpaceMismatchError):
        C("q1") + parse("H2", INVARIANT)


def test_embed_and_compose():
    p = parse("xi1*eta2 + h", XIETA)
    with pytest.raises(SpaceMismatchError):
        p.embed(INVARIANT)
    q = parse("h*eps", XIETA).embed(INVARIANT)
    assert str(q) == "h*eps"


def test_print_order():
    # ascending total degree; within a degree, earlier variables first
    assert str(C("q2^2 + q1 + 1 + q2 + q1*q2")) == "1 + q1 + q2 + q1*q2 + q2^2"


@given(canonical_polys(), st.dictionaries(st.sampled_from(["q1", "p2", "q3"]), fractions, min_size=1))
def test_subs_is_a_homomorphism(a, vals):
    b = C("q1*p2 - q3")
    assert (a * b).subs(vals) == a.subs(vals) * b.subs(vals)


# -- linear algebra ---------------------------------------------------------


def test_solve_exact_and_span():
    assert solve_exact([[1, 1], [1, -1]], [3, 1]) == [2, 1]
    assert solve_exact([[1, 1], [1, 1]], [1, 2]) is None
    assert linear_combination(C("2*q1 - p1"), [C("q1"), C("p1")]) == [2, -1]
    with pytest.raises(NotInSpanError):
        linear_combination(C("q2"), [C("q1")])


# -- canonical bracket -------------------------------------------------------


def test_canonical_bracket_basics():
    assert poisson_bracket(C("q1"), C("p1")) == C("1")
    assert poisson_bracket(C("p3"), C("q3")) == C("-1")
    assert poisson_bracket(C("q1"), C("q2")).is_zero()
    with pytest.raises(NotCanonicalError):
        poisson_bracket(parse("H2", INVARIANT), parse("K3", INVARIANT))


@given(canonical_polys(max_terms=3), canonical_polys(max_terms=3), canonical_polys(max_terms=3))
def test_poisson_axioms(f, g, h):
    b = poisson_bracket
    assert b(f, g) == -b(g, f)
    assert b(f, g * h) == b(f, g) * h + g * b(f, h)
    assert (b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))).is_zero()


def test_parameters_are_central():
    assert poisson_bracket(C("eps*q1"), C("p1")) == C("eps")
    assert poisson_bracket(C("h"), C("q1*p1")).is_zero()


# -- Groebner bases: sympy as an independent oracle ----------------------------

_SYMS = sympy.symbols(" ".join(CANONICAL.names))


def _sym(p: Polynomial):
    return sympy.sympify(p.to_text().replace("^", "**"), locals=dict(zip(CANONICAL.names, _SYMS)))


def _sympy_basis(gens):
    G = sympy.groebner([_sym(g) for g in gens], *_SYMS, order="grlex")
    return G


@pytest.mark.parametrize("ideal", [xi_ideal, level_ideal])
def test_groebner_matches_sympy(ideal):
    I = ideal()
    G = _sympy_basis(I.generators)
    mine = {sympy.expand(_sym(b)) for b in I.basis}
    theirs = {sympy.expand(g / sympy.LC(g, *_SYMS, order="grlex")) for g in G.exprs}
    assert mine == theirs


@given(canonical_polys(max_terms=4, max_exp=2, params=True))
def test_reduction_matches_sympy(f):
    I = level_ideal()
    G = _sympy_basis(I.generators)
    _, r = G.reduce(_sym(f))
    assert sympy.expand(_sym(I.reduce(f)) - r) == 0


def test_ideal_membership_examples():
    g = canonical_generators()
    assert xi_ideal().contains(g["Xi"] * C("q1 + p4"))
    assert not xi_ideal().contains(g["H2"])
    assert level_ideal().contains(g["H2"] - C("h"))
    assert xi_ideal().reduce(C("q1")) == C("q1")


def test_groebner_of_principal_ideal_is_monic_generator():
    (b,) = groebner_basis([C("2*q1*p2 - 2*q2*p1")])
    assert b == C("q1*p2 - q2*p1") or b == C("q2*p1 - q1*p2")


def test_unsupported_ideal():
    with pytest.raises(UnsupportedIdealError):
        IdealSpec("anything")


# -- sampling ---------------------------------------------------------------


def test_variety_points_are_exact():
    for pt in variety_points(10, seed=1):
        assert pt.xi == 0
    for pt in variety_points(10, level=Fraction(3, 2), seed=2):
        assert pt.xi == 0 and pt.h2 == Fraction(3, 2)


def test_sampling_is_deterministic():
    assert sample_variety_point(5, 1) == sample_variety_point(5, 1)
    with pytest.raises(ValueError):
        sample_variety_point(0, -1)
