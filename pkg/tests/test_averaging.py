"""Flow pullbacks, averaging, the homological equation and both normalization stages."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from starknf.averaging.homological import fourier_mode_solve, homological_solve, lie_along
from starknf.averaging.normalform import (
    NF2_BASIS,
    brute_force_second_order,
    lie,
    normalize_first_order,
    normalize_second_order,
    on_shell_equal,
    perturbation,
    restrict_to_ThS3,
    second_normalization,
    second_order_term,
    solve_F,
    time_weighted_means,
)
from starknf.averaging.trig import FlowSpec, average, flow_pullback
from starknf.exact import CANONICAL, INVARIANT, INVARIANT_NAMES, PI, SpaceMismatchError, parse, xi_ideal
from starknf.exact.coefficient import ExactCoefficient
from starknf.invariants import build_bracket_structure, expand, inv
from starknf.reference import reference

P = lambda t: parse(t, INVARIANT)  # noqa: E731
YH2 = FlowSpec.invariant("H2")
YK3 = FlowSpec.invariant("K3")

_quadratics = st.sampled_from(INVARIANT_NAMES).map(inv)
_corpus = st.lists(_quadratics, min_size=1, max_size=3).map(lambda fs: fs[0] * fs[-1] + fs[len(fs) // 2])


# -- pullback and averaging --------------------------------------------------------


def test_pullback_examples():
    tp = flow_pullback(P("U4"), YH2)
    assert tp.at_zero() == P("U4")
    # t = pi/4: cos 2t = 0, sin 2t = 1
    assert tp.at(0, 1) == P("V4")
    assert flow_pullback(P("K3"), YH2).mean() == P("K3")
    assert flow_pullback(P("1"), YH2).mean() == P("1")


def test_pullback_rejects_other_space():
    with pytest.raises(SpaceMismatchError):
        flow_pullback(parse("q1", CANONICAL), YH2)


@given(_corpus)
def test_pullback_periodic_and_identity_at_zero(f):
    tp = flow_pullback(f, YH2)
    assert tp.at_zero() == f
    assert tp.at(1, 0) == f


def test_average_examples():
    assert average(P("U4*V1"), YH2) == P("1/2*U4*V1 - 1/2*U1*V4")
    assert average(P("H2*U4 - K3*V1"), YH2).is_zero()
    assert average(P("U2*V2"), YH2).is_zero()
    assert average(P("U1^2"), YK3) == P("1/2*U1^2 + 1/2*U4^2")
    assert average(P("U4^2"), YK3) == P("1/2*U1^2 + 1/2*U4^2")


@given(_corpus)
def test_average_is_a_projection(f):
    a = average(f, YH2)
    assert average(a, YH2) == a


@given(_corpus, st.integers(-3, 3))
def test_average_commutes_with_time_shift(f, u):
    # exact rational point on the unit circle
    c, s = Fraction(1 - u * u, 1 + u * u), Fraction(2 * u, 1 + u * u)
    imgs = YH2.point_images(c, s)
    shifted = f.subs(imgs)
    assert average(shifted, YH2) == average(f, YH2)


@given(_corpus)
def test_average_kills_derivatives(f):
    assert average(lie_along(YH2, f), YH2).is_zero()
    assert average(lie_along(YK3, f), YK3).is_zero()


def test_equivariance_with_bracket_structure():
    bs = build_bracket_structure()
    for n in INVARIANT_NAMES:
        d = flow_pullback(inv(n), YH2).derivative().at_zero()
        assert d == bs.lie("H2", inv(n)), n


# -- homological equation ------------------------------------------------------------


def test_time_weighted_constants():
    tw = time_weighted_means()
    assert tw["tw.t_sin4t"] == P("-1/4")
    quarter_pi = P("1").scale(PI * Fraction(1, 4))
    assert tw["tw.t_cos2_2t"] == quarter_pi
    assert tw["tw.t_sin2_2t"] == quarter_pi


def test_homological_F1_example():
    g = inv("beta") * P("U4*V1 + 1/2*H2*K3")
    F = homological_solve(g, YH2).F
    expected = P("1/8*beta*U1*U4 - 1/8*beta*V1*V4") + P("beta*U4*V1 - beta*U1*V4 + beta*H2*K3").scale(PI * Fraction(1, 4))
    assert F == expected
    assert xi_ideal().reduce(expand(F)) == xi_ideal().reduce(expand(P("1/8*beta*U1*U4 - 1/8*beta*V1*V4")))


def test_homological_invariant_input():
    g = P("H2*K3")
    sol = homological_solve(g, YH2)
    assert sol.F == g.scale(PI * Fraction(1, 2))
    assert lie_along(YH2, sol.F).is_zero()


@given(_corpus)
def test_homological_identity(g):
    sol = homological_solve(g, YH2)
    assert (lie_along(YH2, sol.F) - (g - average(g, YH2))).is_zero()
    F2 = fourier_mode_solve(g, YH2)
    assert average(F2, YH2).is_zero()


def test_solve_F():
    s = solve_F()
    assert all(s.checks.values()), s.checks
    assert on_shell_equal(s.F, P("1/8*beta*U1*U4 - 1/8*beta*V1*V4 - 1/2*beta*H2*V4 - 1/2*beta*K3*U1"))
    assert lie(inv("H2"), s.F2) == P("beta*H2*U4 - beta*K3*V1")
    # L_{Y_F} H2 + beta*(...) vanishes on Xi = 0
    res = lie(s.F, inv("H2")) + inv("beta") * P("U4*V1 + 1/2*H2*K3 + H2*U4 - K3*V1")
    assert xi_ideal().contains(expand(res))
    assert s.F.subs({"beta": 0}).is_zero()


# -- first order ---------------------------------------------------------------------


def test_first_order_normal_form():
    r = normalize_first_order()
    assert r.normal_form == P("H2 - 3/2*eps*beta*H2*K3")
    assert str(r.normal_form) == "H2 - 3/2*eps*beta*H2*K3"
    assert all(a.matches for a in r.audit)
    assert not r.discrepancies
    assert on_shell_equal(average(perturbation(), YH2), P("-3/2*H2*K3"))
    assert r.normal_form.subs({"beta": 0}) == P("H2")


# -- second order --------------------------------------------------------------------


def test_second_order_audit_adds_up():
    t = second_order_term()
    assert len(t.audit) == 8
    assert t.audit_sum_ok
    total = sum((a.value for a in t.audit), P("0"))
    assert on_shell_equal(total, t.double_bracket_average)


def test_second_order_printed_terms_that_agree():
    t = {a.key: a for a in second_order_term().audit}
    assert on_shell_equal(t["audit.1"].value, P("1/8*beta^2*H2*K3^2 + 1/8*beta^2*H2*U1^2 + 1/8*beta^2*H2*V1^2"))
    assert t["audit.3"].value.is_zero() and t["audit.4"].value.is_zero()


def test_second_order_term_ii_differs_from_print():
    # the print gives 0; the exact average is nonzero on Xi = 0
    t = {a.key: a for a in second_order_term().audit}
    assert reference("audit.2").is_zero()
    assert not xi_ideal().contains(expand(t["audit.2"].value))


def test_first_piece_averages_to_zero():
    assert xi_ideal().contains(expand(second_order_term().first_piece_average))


def test_second_order_normal_form():
    r = normalize_second_order()
    eb2 = "eps^2*beta^2"
    want = P(f"H2 - 3/2*eps*beta*H2*K3 - 1/2*{eb2}*H2^3 - 21/8*{eb2}*H2*K3^2 - 9/16*{eb2}*H2*U1^2"
             f" - 9/16*{eb2}*H2*V1^2 - 9/16*{eb2}*H2*U4^2 - 9/16*{eb2}*H2*V4^2")
    assert r.normal_form == want
    assert r.details["coefficients"] == [Fraction(-21, 8), Fraction(-1, 2), Fraction(-9, 16), Fraction(-9, 16)]
    assert r.checks["brute-force series agrees"]
    assert r.normal_form.subs({"beta": 0}) == P("H2")


def test_brute_force_oracle_independent_path():
    e2 = sum((b.scale(c) for b, c in zip(NF2_BASIS, normalize_second_order().details["coefficients"])), P("0"))
    assert xi_ideal().reduce(expand(e2 * inv("beta") ** 2)) == brute_force_second_order()


def test_printed_coordinates_are_reported():
    d = normalize_second_order().details["bracket_total_printed_coordinates"]
    assert d["reference"] == [Fraction(9, 8), 1, Fraction(5, 8), 1, Fraction(5, 4)]
    assert d["artifact"] == [Fraction(13, 2), 1, Fraction(9, 8), Fraction(9, 8), Fraction(5, 4)]


# -- second stage --------------------------------------------------------------------


def test_restriction_examples():
    r = restrict_to_ThS3(normalize_second_order().normal_form)
    assert r.dropped_constant == P("h - 1/2*eps^2*beta^2*h^3")
    assert r.rescale == P("-3/2*eps*beta")
    assert restrict_to_ThS3(P("H2")).rescaled.is_zero()
    assert P("H2").subs({"H2": 0}).is_zero()


def test_second_normalization():
    r = second_normalization()
    assert r.checks["K3 invariant along its flow"]
    assert r.checks["U4V1 - U1V4 invariant along K3 flow"]
    assert lie(inv("K3"), P("U4*V1 - U1*V4")).is_zero()
    assert r.normal_form == P("h*K3 + 7/4*h*eps*beta*K3^2 + 3/8*h*eps*beta*U1^2 + 3/8*h*eps*beta*V1^2"
                              " + 3/8*h*eps*beta*U4^2 + 3/8*h*eps*beta*V4^2")
    keys = {d.key for d in r.discrepancies}
    assert {"stage2.T_bar", "stage2.normal_form", "stage2.T_bar.internal"} <= keys


def test_exact_coefficients_stay_rational_after_reduction():
    nf = normalize_second_order().normal_form
    assert all(isinstance(c, ExactCoefficient) and c.is_rational() for c in nf.terms.values())
