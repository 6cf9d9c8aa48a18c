"""Invariant generators, orbit relations, bracket table and the KS map."""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from starknf.averaging.normalform import perturbation
from starknf.exact import CANONICAL, INVARIANT, INVARIANT_NAMES, parse, poisson_bracket, variety_points, xi_ideal
from starknf.invariants import (
    ORBIT_RELATIONS,
    build_bracket_structure,
    build_generators,
    canonical_generators,
    compare_derivation,
    expand,
    inv,
    ks_map,
    ks_pullback_hamiltonian,
    preregularized_times_norm,
    regularized_hamiltonian,
    verify_orbit_inequalities,
    verify_orbit_relations,
)

I = lambda t: parse(t, INVARIANT)  # noqa: E731
C = lambda t: parse(t, CANONICAL)  # noqa: E731
E1 = {"q1": 1, "q2": 0, "q3": 0, "q4": 0, "p1": 0, "p2": 0, "p3": 0, "p4": 0}


def _val(p, pt):
    return p.evaluate(pt).rational()


def test_generator_examples():
    g = canonical_generators()
    assert _val(g["K3"], E1) == Fraction(-1, 2)
    assert _val(g["H2"], E1) == Fraction(1, 2)
    assert _val(g["Xi"], E1) == 0
    assert g["H2"] + g["V1"] == C("q1^2 + q2^2 + q3^2 + q4^2")
    assert g["H2"].diff("q1") == C("q1")


def test_generators_commute_with_xi():
    table = build_generators()
    xi = table["Xi"]
    assert len(list(table)) == 16
    for n in table:
        assert poisson_bracket(table[n], xi).is_zero(), n


def test_bracket_closure_and_examples():
    bs = build_bracket_structure()
    n = len(INVARIANT_NAMES)
    assert len(bs.coefficients) == n * n
    assert bs.lie("H2", inv("U1")) == I("2*V1")
    assert bs.lie("H2", inv("V4")) == I("-2*U4")
    assert bs.lie("K3", inv("U1")) == I("-2*U4")
    assert bs.bracket(inv("H2"), inv("H2")).is_zero()


def test_bracket_table_matches_upstairs():
    # the table bracket of two invariants equals the canonical bracket of their expansions
    bs = build_bracket_structure()
    for a, b in [("U4", "V1"), ("K1", "L2"), ("U2", "V3"), ("K3", "U1")]:
        assert expand(bs.bracket(inv(a), inv(b))) == poisson_bracket(expand(inv(a)), expand(inv(b)))


@given(st.sampled_from(INVARIANT_NAMES), st.sampled_from(INVARIANT_NAMES), st.sampled_from(INVARIANT_NAMES))
def test_table_bracket_jacobi(a, b, c):
    bs = build_bracket_structure()
    x, y, z = inv(a), inv(b), inv(c)
    br = bs.bracket
    assert (br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y))).is_zero()


@given(st.sampled_from(INVARIANT_NAMES), st.sampled_from(INVARIANT_NAMES))
def test_expand_is_a_homomorphism(a, b):
    assert expand(inv(a) * inv(b) + inv(a)) == expand(inv(a)) * expand(inv(b)) + expand(inv(a))


def test_expand_unit():
    assert expand(I("1")) == C("1")


def test_orbit_relations_hold_identically():
    checks = verify_orbit_relations()
    assert len(checks) == len(ORBIT_RELATIONS) == 9
    assert all(c.status == "identity" for c in checks)
    sup = verify_orbit_relations(supplementary=True)[len(checks):]
    assert [c.status for c in sup] == ["identity", "identity"]


def test_orbit_sign_conditions_have_sos_certificates():
    checks = verify_orbit_inequalities()
    assert [c.name for c in checks] == ["norm U >= 0", "H2 >= 0", "norm V >= 0"]
    assert all(c.passed for c in checks)


def test_relation_examples():
    assert expand(I("U1^2 + U2^2 + U3^2 + U4^2 - H2^2 + Xi^2")).is_zero()
    assert expand(I("U3*V2 - U2*V3 - K3*Xi + L3*H2")).is_zero()
    assert xi_ideal().contains(expand(I("U4*V1 - U1*V4 + H2*K3")))


def test_reduction_agrees_with_points():
    # reduction to zero mod <Xi> implies vanishing at exact points on Xi = 0
    f = expand(I("U4*V1 - U1*V4 + H2*K3"))
    g = expand(I("U1*V1 + U2*V2"))
    assert xi_ideal().contains(f) and not xi_ideal().contains(g)
    pts = variety_points(100, seed=4)
    assert all(_val(f, p.as_dict()) == 0 for p in pts)
    assert any(_val(g, p.as_dict()) != 0 for p in pts)


def test_derivation_displays_h2_and_k3_match():
    for name in ("H2", "K3"):
        checks = compare_derivation(name)
        assert checks and all(c.matches for c in checks), name


def test_derivation_displays_u4_v1_mismatches_are_recorded():
    u4 = {c.variable for c in compare_derivation("U4") if not c.matches}
    assert u4 == {"K1", "K3", "L2", "U3"}
    v1 = compare_derivation("V1")
    assert sum(c.matches for c in v1) == 2 and len(v1) == 11


def test_ks_map_identities():
    assert all(ks_map().check().values())


def test_regularized_hamiltonian_examples():
    H = expand(regularized_hamiltonian())
    assert H.subs(E1) == C("1/2 + eps*beta")
    assert H.subs({"eps": 0}) == expand(inv("H2"))
    # the perturbation factors as x3 * |x|
    assert (I("U4 - K3") * I("H2 + V1") - perturbation()).is_zero()
    assert expand(I("U4 - K3")) == ks_map().x[2]


def test_ks_pullback_on_xi_zero():
    ks_pullback_hamiltonian()
    # the literal reading of the preregularized form does not pull back
    H = expand(regularized_hamiltonian())
    lit = preregularized_times_norm(literal=True)
    assert not xi_ideal().contains(ks_map().qq * H - lit)


def test_ks_consistency_exact_points():
    """Kpre(KS(q, p)) = H(q, p) in exact rationals at 100 points with Xi = 0."""
    ks = ks_map()
    H = expand(regularized_hamiltonian()).subs({"eps": Fraction(1, 7), "beta": 3})
    for pt in variety_points(100, seed=9):
        d = pt.as_dict()
        r = _val(ks.qq, d)
        if r == 0:
            continue
        x = [_val(c, d) for c in ks.x]
        y = [_val(c, d) / r for c in ks.y_num]
        assert sum(c * c for c in x) == r * r
        kpre = Fraction(1, 2) * r * (sum(c * c for c in y) + 1) + Fraction(3, 7) * x[2] * r
        assert kpre == _val(H, d)
