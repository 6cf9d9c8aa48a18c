"""Floating-point evaluation, integrators, conservation and quadrature oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starknf.averaging.trig import FlowSpec
from starknf.dynamics import constants
from starknf.dynamics.evaluate import UnboundVariableError, compile_polynomial, eval_expression
from starknf.dynamics.experiments import compare_normalform, normal_form_prediction
from starknf.dynamics.flows import (
    Params,
    integrate_full,
    integrate_reduced,
    sample_initial_state,
    sample_sphere_point,
)
from starknf.dynamics.integrators import IntegratorConfig, gauss_tableau, integrate
from starknf.dynamics.oracles import (
    compare_average,
    invariant_point,
    ks_identity_residual,
    ks_image,
    ks_preimage,
    numeric_average_oracle,
    verify_preregularization,
)
from starknf.exact import CANONICAL, INVARIANT, parse, variety_points
from starknf.invariants import canonical_generators, expand, regularized_hamiltonian

E1 = {"q1": 1.0, "q2": 0.0, "q3": 0.0, "q4": 0.0, "p1": 0.0, "p2": 0.0, "p3": 0.0, "p4": 0.0}
TOL = constants.CONSTANTS


# -- evaluation ------------------------------------------------------------------------


def test_eval_examples():
    H = expand(regularized_hamiltonian())
    assert eval_expression(H, {**E1, "eps": 1e-3, "beta": 1.0}) == pytest.approx(0.501, abs=1e-15)
    assert eval_expression(canonical_generators()["H2"], E1) == 0.5
    for pt in variety_points(10, seed=2):
        d = dict(zip(CANONICAL.variables, pt.as_floats()))
        assert abs(eval_expression(canonical_generators()["Xi"], d)) <= 1e-15


def test_eval_rejects_unbound():
    with pytest.raises(UnboundVariableError):
        eval_expression(parse("q1*eps", CANONICAL), {"q1": 1.0})


def test_eval_uses_constant_pi():
    p = parse("pi*q1", CANONICAL)
    assert eval_expression(p, {"q1": 1.0}) == TOL["pi"]


def test_eval_is_deterministic():
    p = expand(regularized_hamiltonian())
    f = compile_polynomial(p, CANONICAL.variables, {"eps": 0.3, "beta": 1.7})
    g = compile_polynomial(p, CANONICAL.variables, {"eps": 0.3, "beta": 1.7})
    x = np.linspace(-1, 1, 8)
    assert f.source == g.source
    assert f(*x) == g(*x)


# -- configuration ---------------------------------------------------------------------


def test_params_validation():
    with pytest.raises(ValueError):
        Params(-1e-3)
    with pytest.raises(ValueError):
        Params(1e-3, h=0)
    with pytest.raises(ValueError):
        Params(float("nan"))
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(rtol=0)


def test_gauss_tableau_order_conditions():
    A, b, c = gauss_tableau(4)
    assert b.sum() == pytest.approx(1)
    # order 8: b . c^(k-1) = 1/k for k <= 8
    for k in range(1, 9):
        assert b @ c ** (k - 1) == pytest.approx(1 / k, abs=1e-14)


# -- full flow -------------------------------------------------------------------------


def test_integrators_agree():
    p = Params(1e-3)
    x0 = sample_initial_state(1)
    a = integrate_full(p, x0, 10.0, IntegratorConfig("dop853"), 10)
    b = integrate_full(p, x0, 10.0, IntegratorConfig("gauss"), 10)
    assert np.max(np.abs(a.states - b.states)) <= TOL["integrator_agreement"]


def test_time_reversal_of_symmetric_method():
    p = Params(1e-3)
    cfg = IntegratorConfig("gauss")
    x0 = sample_initial_state(4)
    fwd = integrate_full(p, x0, 10.0, cfg, 1)
    back = integrate_full(p, fwd.states[-1], -10.0, cfg, 1)
    assert np.max(np.abs(back.states[-1] - x0)) <= TOL["time_reversal"]


def test_unperturbed_flow_is_periodic():
    x0 = sample_initial_state(2)
    tr = integrate_full(Params(0.0), x0, 2 * math.pi, IntegratorConfig(), 4)
    assert np.max(np.abs(tr.states[-1] - x0)) <= 1e-10


def test_conservation_short_run():
    tr = integrate_full(Params(1e-3), sample_initial_state(0), 20.0, IntegratorConfig(), 200)
    assert tr.drift("H", relative=True) <= TOL["full_energy_drift"]
    assert tr.max_abs("Xi") <= TOL["full_xi_drift"]
    # K3 is slow: its variation over one fast period is O(eps)
    k3 = tr.logs["K3"][: 32]
    assert np.ptp(k3) <= 10 * 1e-3


def test_logs_recomputed_from_state():
    tr = integrate_full(Params(1e-3), sample_initial_state(0), 1.0, IntegratorConfig(), 5)
    H2 = canonical_generators()["H2"]
    for y, v in zip(tr.states, tr.logs["H2"]):
        assert eval_expression(H2, dict(zip(CANONICAL.variables, y))) == pytest.approx(v, abs=1e-15)


def test_full_run_is_bit_identical():
    a = integrate_full(Params(2e-3), sample_initial_state(7), 5.0, IntegratorConfig(), 20)
    b = integrate_full(Params(2e-3), sample_initial_state(7), 5.0, IntegratorConfig(), 20)
    assert np.array_equal(a.states, b.states)
    assert all(np.array_equal(a.logs[n], b.logs[n]) for n in a.logs)


def test_integrate_rejects_nonfinite_start():
    with pytest.raises(ValueError):
        integrate(lambda y: y, [np.nan], 1.0, 2)


def test_initial_states_lie_on_level():
    for seed in range(5):
        x0 = sample_initial_state(seed, 1.5)
        d = dict(zip(CANONICAL.variables, x0))
        assert eval_expression(canonical_generators()["H2"], d) == pytest.approx(1.5, abs=1e-14)


# -- reduced flow ----------------------------------------------------------------------


def test_reduced_conservation():
    z0 = sample_sphere_point(3, 1.0, 0.25)
    tr = integrate_reduced(Params(1e-3), z0, 50.0, IntegratorConfig(), 100)
    for n in ("Hhat", "xi2", "eta2", "K3", "relation"):
        assert tr.drift(n) <= TOL["reduced_drift"], n
    assert tr.logs["K3"][0] == pytest.approx(0.25, abs=1e-14)


def test_reduced_unperturbed_sigmas_constant():
    tr = integrate_reduced(Params(0.0), sample_sphere_point(5), 20.0, IntegratorConfig(), 50)
    for n in ("sigma1", "sigma2", "sigma3", "sigma4", "sigma5", "sigma6"):
        assert tr.drift(n) <= 1e-10, n


def test_reduced_projection_is_logged():
    tr = integrate_reduced(Params(1e-3), sample_sphere_point(1), 5.0, IntegratorConfig(), 10, project=True)
    assert 0 <= tr.notes["projection"] <= 1e-12


def test_reduced_rejects_off_sphere_start():
    with pytest.raises(ValueError):
        integrate_reduced(Params(1e-3), np.array([1.0, 0, 0, 0.5, 0, 0]), 1.0)


def test_sphere_point_with_level():
    z = sample_sphere_point(9, 2.0, -0.5)
    assert np.linalg.norm(z[:3]) == pytest.approx(2.0)
    assert np.linalg.norm(z[3:]) == pytest.approx(2.0)
    assert (z[2] + z[5]) / 2 == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        sample_sphere_point(0, 1.0, 1.5)


# -- quadrature oracles ----------------------------------------------------------------


@pytest.mark.parametrize("text", ["U4*V1", "U2*V2", "H2*U4 - K3*V1", "U1^2 + V4^2", "7/3"])
def test_quadrature_matches_symbolic_average(text):
    spec = FlowSpec.invariant("H2")
    f = parse(text, INVARIANT)
    for pt in variety_points(25, level=1, seed=11):
        c = compare_average(f, spec, invariant_point(pt))
        assert c.error <= TOL["oracle_agreement"]


def test_quadrature_u4v1_on_shell():
    spec = FlowSpec.invariant("H2")
    for pt in variety_points(10, level=1, seed=12):
        d = invariant_point(pt)
        q = numeric_average_oracle(parse("U4*V1", INVARIANT), spec, d)
        assert q == pytest.approx(-0.5 * d["H2"] * d["K3"], abs=1e-12)


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_ks_identity_pointwise(seed):
    z = sample_initial_state(seed)
    assert abs(ks_identity_residual(z, 1e-3, 1.0)) <= TOL["ks_identity"]


def test_ks_preimage_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y = rng.normal(size=3), rng.normal(size=3)
        z = ks_preimage(x, y)
        xb, yb = ks_image(z)
        assert np.allclose(xb, x, atol=1e-13) and np.allclose(yb, y, atol=1e-13)
    with pytest.raises(ValueError):
        ks_preimage([0, 0, 0], [1, 0, 0])


def test_preregularization_examples():
    rep = verify_preregularization([0, 0, 1], [1, 0, 0])
    assert rep.passed
    assert rep.values["K"] == pytest.approx(-0.5)
    assert rep.values["Kpre"] == pytest.approx(1.0, abs=1e-12)
    # circular orbit of radius 2: |y| = 1/sqrt(2)
    rep = verify_preregularization([2, 0, 0], [0, math.sqrt(0.5), 0])
    assert rep.passed and rep.values["k"] == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ValueError):
        verify_preregularization([0, 0, 0], [1, 0, 0])


def test_preimage_hamiltonian_example():
    H = expand(regularized_hamiltonian())
    assert eval_expression(H, {**E1, "eps": 0.01, "beta": 2.0}) == pytest.approx(0.5 + 0.02)


# -- normal-form comparison -------------------------------------------------------------


def test_ladder_needs_two_values():
    with pytest.raises(ValueError):
        compare_normalform((1e-3,))


def test_unperturbed_prediction_is_exact():
    p = Params(0.0)
    x0 = sample_initial_state(0)
    full = integrate_full(p, x0, 5.0, IntegratorConfig(), 10)
    _, pred = normal_form_prediction(p, x0, 5.0, 10, IntegratorConfig())
    assert np.max(np.abs(full.states - pred)) <= 1e-10
