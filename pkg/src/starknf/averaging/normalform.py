"""First- and second-order normalization along the H2 flow, and the second
normalization along the K3 flow on the level set ``H2 = h``.

All equalities on ``Xi = 0`` (or on ``Xi = 0, H2 = h``) are decided upstairs
by expanding to (q, p) and reducing modulo the corresponding ideal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..exact.ideal import IdealSpec, level_ideal, xi_ideal
from ..exact.linalg import NotInSpanError, linear_combination
from ..exact.poisson import poisson_bracket
from ..exact.polynomial import Polynomial, parse
from ..exact.space import CANONICAL, INVARIANT
from ..invariants import build_bracket_structure, expand, inv, regularized_hamiltonian
from ..reference import REFERENCE, reference
from .homological import homological_solve
from .trig import FlowSpec, average, flow_pullback

__all__ = [
    "Discrepancy",
    "AuditEntry",
    "NormalFormResult",
    "GeneratorSolution",
    "perturbation",
    "lie",
    "on_shell_equal",
    "fit",
    "solve_F",
    "normalize_first_order",
    "SecondOrderTerm",
    "second_order_term",
    "brute_force_second_order",
    "normalize_second_order",
    "Restriction",
    "restrict_to_ThS3",
    "second_normalization",
    "PipelineError",
    "parameter_coefficient",
    "W1",
    "W4",
    "time_weighted_means",
]


class PipelineError(AssertionError):
    """A check that must hold exactly failed."""


@dataclass
class Discrepancy:
    key: str
    anchor: str
    artifact: str
    reference: str
    note: str = ""


@dataclass
class AuditEntry:
    key: str
    description: str
    value: Polynomial
    reference: Polynomial
    matches: bool


@dataclass
class NormalFormResult:
    order: int
    normal_form: Polynomial
    generator: Polynomial | None
    audit: list[AuditEntry] = field(default_factory=list)
    discrepancies: list[Discrepancy] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)


P = lambda text: parse(text, INVARIANT)  # noqa: E731
W1 = P("U1^2 + V1^2")
W4 = P("U4^2 + V4^2")


def perturbation() -> Polynomial:
    """``U4 V1 + H2 U4 - K3 V1 - H2 K3``: the eps*beta part of the Hamiltonian."""
    return P("U4*V1 + H2*U4 - K3*V1 - H2*K3")


def lie(generator: Polynomial, f: Polynomial) -> Polynomial:
    """``L_{Y_G} f = {f, G}`` on the invariant space."""
    return build_bracket_structure().bracket(f, generator)


def _red(e: Polynomial, ideal: IdealSpec) -> Polynomial:
    return ideal.reduce(expand(e))


def on_shell_equal(a: Polynomial, b: Polynomial, ideal: IdealSpec | None = None) -> bool:
    ideal = ideal or xi_ideal()
    return ideal.contains(expand(a - b))


def fit(e: Polynomial, basis: list[Polynomial], ideal: IdealSpec | None = None) -> list[Fraction]:
    """Rational coefficients with ``e = sum c_i basis_i`` modulo ``ideal``.

    Coefficients of ``e`` may involve pi; every pi-part must fit too, and a
    nonzero pi-coefficient is reported as a pipeline error.
    """
    ideal = ideal or xi_ideal()
    target = _red(e, ideal)
    if target.pi_degree > 0:
        raise PipelineError(f"pi-terms survive reduction: {target.pi_part(1)}")
    rb = [_red(b, ideal) for b in basis]
    try:
        return linear_combination(target, rb)
    except NotInSpanError:
        raise PipelineError(f"expression does not fit the basis modulo {ideal.label}") from None


def _combo(coeffs, basis) -> Polynomial:
    out = Polynomial.zero(INVARIANT)
    for c, b in zip(coeffs, basis):
        if c:
            out = out + b.scale(c)
    return out


def parameter_coefficient(p: Polynomial, name: str, k: int) -> Polynomial:
    """Coefficient of ``name**k`` in ``p`` (``name`` a parameter)."""
    i = p.space.index[name]
    out = {}
    for exps, c in p.terms.items():
        if exps[i] == k:
            e = list(exps)
            e[i] = 0
            out[tuple(e)] = out.get(tuple(e), 0) + c
    return Polynomial(p.space, out)


# -- generating function ---------------------------------------------------------


@dataclass
class GeneratorSolution:
    F1: Polynomial
    F2: Polynomial
    F: Polynomial
    F_onshell: Polynomial
    checks: dict[str, bool]


@lru_cache(maxsize=None)
def solve_F() -> GeneratorSolution:
    """Generating function of the first Lie transform.

    ``F1`` solves the homological equation for ``beta*(U4 V1 + 1/2 H2 K3)``
    and ``F2`` for ``beta*(H2 U4 - K3 V1)``, both by the time-weighted
    formula.  The pi-terms are kept and shown to lie in ``<Xi>``.
    """
    spec = FlowSpec.invariant("H2")
    beta = inv("beta")
    F1 = homological_solve(beta * P("U4*V1 + 1/2*H2*K3"), spec).F
    F2 = homological_solve(beta * P("H2*U4 - K3*V1"), spec).F
    F = F1 + F2
    ideal = xi_ideal()
    for k in range(1, F.pi_degree + 1):
        if not ideal.contains(expand(F.pi_part(k))):
            raise PipelineError("pi-terms of F are not in <Xi>")
    F_on = F.drop_pi()
    rhs = reference("gen.rhs")
    residual = lie(F, inv("H2")) - rhs
    if not ideal.contains(expand(residual)):
        raise PipelineError("homological residual is not in <Xi>")
    checks = {
        "homological equation on Xi = 0": True,
        "pi-terms lie in <Xi>": True,
        "F1 matches reference (exact)": F1 == reference("gen.F1"),
        "F2 matches reference (exact)": F2 == reference("gen.F2"),
        "F matches reference on Xi = 0": on_shell_equal(F, reference("gen.F")),
        "L_H2 F2 matches reference": lie(inv("H2"), F2) == reference("gen.LH2_F2"),
    }
    return GeneratorSolution(F1, F2, F, F_on, checks)


def time_weighted_means() -> dict[str, Polynomial]:
    """``(1/T) int_0^T t g(t) dt`` over one period ``T = pi`` for the
    trigonometric factors met when solving along the H2 flow."""
    from .trig import TrigPolynomial

    one = Polynomial.constant(INVARIANT, 1)
    c = TrigPolynomial(INVARIANT, 2, {(1, "c"): one})
    s = TrigPolynomial(INVARIANT, 2, {(1, "s"): one})
    s4 = TrigPolynomial(INVARIANT, 2, {(2, "s"): one})
    return {"tw.t_sin4t": s4.time_weighted(), "tw.t_cos2_2t": (c * c).time_weighted(),
            "tw.t_sin2_2t": (s * s).time_weighted()}


# -- first order ------------------------------------------------------------------


@lru_cache(maxsize=None)
def normalize_first_order() -> NormalFormResult:
    spec = FlowSpec.invariant("H2")
    a1 = average(P("H2*U4 - K3*V1"), spec)
    a2 = average(P("U4*V1"), spec)
    aP = average(perturbation(), spec)
    (c,) = fit(aP, [P("H2*K3")])
    eb = inv("eps") * inv("beta")
    nf = inv("H2") + eb * P("H2*K3").scale(c)
    audit = [
        AuditEntry("nf1.avg_H2U4_K3V1", REFERENCE["nf1.avg_H2U4_K3V1"].anchor, a1,
                   reference("nf1.avg_H2U4_K3V1"), a1 == reference("nf1.avg_H2U4_K3V1")),
        AuditEntry("nf1.avg_U4V1", REFERENCE["nf1.avg_U4V1"].anchor, a2,
                   reference("nf1.avg_U4V1"), a2 == reference("nf1.avg_U4V1")),
        AuditEntry("nf1.avg_U4V1_onshell", REFERENCE["nf1.avg_U4V1_onshell"].anchor, a2,
                   reference("nf1.avg_U4V1_onshell"), on_shell_equal(a2, reference("nf1.avg_U4V1_onshell"))),
        AuditEntry("nf1.avg_P", REFERENCE["nf1.avg_P"].anchor, aP,
                   reference("nf1.avg_P"), on_shell_equal(aP, reference("nf1.avg_P"))),
    ]
    res = NormalFormResult(1, nf, solve_F().F, audit)
    res.checks["normal form matches reference"] = nf == reference("nf1.normal_form")
    for a in audit:
        if not a.matches:
            res.discrepancies.append(Discrepancy(a.key, a.description, str(a.value), str(a.reference)))
    return res


# -- second order -----------------------------------------------------------------

NF2_BASIS_NAMES = ("H2*K3^2", "H2^3", "H2*(U1^2 + V1^2)", "H2*(U4^2 + V4^2)")
NF2_BASIS = [P("H2*K3^2"), P("H2^3"), P("H2")*W1, P("H2")*W4]
PRINTED_BASIS_NAMES = NF2_BASIS_NAMES + ("K3*(U4*V1 - U1*V4)",)
PRINTED_BASIS = NF2_BASIS + [P("K3*U4*V1 - K3*U1*V4")]


@dataclass
class SecondOrderTerm:
    raw: Polynomial                 # beta L_F P + 1/2 L_F^2 H2
    printed_form: Polynomial        # -3/2 beta L_F(H2 K3) - 1/2 L_F^2 H2
    average: Polynomial
    first_piece_average: Polynomial
    double_bracket_average: Polynomial
    audit: list[AuditEntry]
    derivatives: dict[str, Polynomial]
    audit_sum_ok: bool


_AUDIT = (
    # key, prefactor, left factor, right factor (symbolic names resolved below)
    ("audit.1", Fraction(1), "LU4F", "V1"),
    ("audit.2", Fraction(1), "U4", "LV1F"),
    ("audit.3", Fraction(-1, 2), "LFH2", "K3"),
    ("audit.4", Fraction(1, 2), "H2", "LK3F"),
    ("audit.5", Fraction(-1), "LFH2", "U4"),
    ("audit.6", Fraction(1), "H2", "LU4F"),
    ("audit.7", Fraction(-1), "LK3F", "V1"),
    ("audit.8", Fraction(-1), "K3", "LV1F"),
)


@lru_cache(maxsize=None)
def second_order_term() -> SecondOrderTerm:
    F = solve_F().F
    spec = FlowSpec.invariant("H2")
    beta = inv("beta")
    H2 = inv("H2")
    LFH2 = lie(F, H2)
    LF2H2 = lie(F, LFH2)
    raw = beta * lie(F, perturbation()) + LF2H2.scale(Fraction(1, 2))
    first_piece = (beta * lie(F, P("H2*K3"))).scale(Fraction(-3, 2))
    printed = first_piece - LF2H2.scale(Fraction(1, 2))
    avg = average(raw, spec)
    if not on_shell_equal(avg, average(printed, spec)):
        raise PipelineError("the two forms of the eps^2 term have different averages")
    derivs = {
        "LFH2": LFH2,
        "LH2F": lie(H2, F),
        "LK3F": lie(inv("K3"), F),
        "LU4F": lie(inv("U4"), F),
        "LV1F": lie(inv("V1"), F),
    }
    factors = dict(derivs)
    for n in ("V1", "U4", "K3", "H2"):
        factors[n] = inv(n)
    audit = []
    total = Polynomial.zero(INVARIANT)
    for key, pre, a, b in _AUDIT:
        v = average((beta * factors[a] * factors[b]).scale(pre), spec)
        total = total + v
        ref = reference(key)
        audit.append(AuditEntry(key, REFERENCE[key].anchor, v, ref, on_shell_equal(v, ref)))
    dbl = average(LF2H2, spec)
    audit_ok = on_shell_equal(total, dbl)
    if not audit_ok:
        raise PipelineError("the eight audited terms do not add up to the double bracket average")
    return SecondOrderTerm(raw, printed, avg, average(first_piece, spec), dbl, audit, derivs, audit_ok)


def _spectral_average(f: Polynomial, H: Polynomial, modes) -> Polynomial:
    """Mean along the canonical H2 flow via ``prod_k (1 + D^2/k^2)``, ``D = {., H}``."""
    out = f
    for k in modes:
        d2 = poisson_bracket(poisson_bracket(out, H), H)
        out = out + d2.scale(Fraction(1, k * k))
    return out


@lru_cache(maxsize=None)
def brute_force_second_order() -> Polynomial:
    """eps^2 coefficient of ``exp(eps L_F) H`` computed in Q[q, p], then averaged.

    Independent of the bracket table and of the trigonometric averaging:
    brackets are canonical and the average is a spectral projection.
    Returns the reduced normal form of the average modulo ``<Xi>``.
    """
    Hc = expand(regularized_hamiltonian())
    Fc = expand(solve_F().F)
    eps = Polynomial.variable(CANONICAL, "eps")
    b1 = poisson_bracket(Hc, Fc)
    b2 = poisson_bracket(b1, Fc)
    series = Hc + eps * b1 + (eps * eps * b2).scale(Fraction(1, 2))
    e2 = parameter_coefficient(series, "eps", 2)
    H2c = expand(inv("H2"))
    deg = max(sum(exps[3:]) for exps in e2.terms) if not e2.is_zero() else 0
    modes = [2 * j for j in range(1, deg // 2 + 1)]
    avg = _spectral_average(e2, H2c, modes)
    # the projection must be exact: one more D must annihilate it
    if not poisson_bracket(avg, H2c).is_zero():
        raise PipelineError("spectral projection left oscillating modes")
    return xi_ideal().reduce(avg)


@lru_cache(maxsize=None)
def normalize_second_order() -> NormalFormResult:
    first = normalize_first_order()
    term = second_order_term()
    coeffs = fit(term.average, [b * inv("beta") ** 2 for b in NF2_BASIS])
    eps = inv("eps")
    e2 = _combo(coeffs, NF2_BASIS) * inv("beta") ** 2
    nf = first.normal_form + eps * eps * e2
    oracle = brute_force_second_order()
    if xi_ideal().reduce(expand(e2)) != oracle:
        raise PipelineError("pipeline eps^2 term disagrees with the brute-force series")
    res = NormalFormResult(2, nf, solve_F().F, list(term.audit))
    res.checks["brute-force series agrees"] = True
    res.checks["audit adds up"] = term.audit_sum_ok
    res.checks["first piece averages to zero"] = on_shell_equal(term.first_piece_average, reference("nf2.avg_first_piece"))
    res.checks["normal form matches reference"] = on_shell_equal(nf, reference("nf2.normal_form"))
    res.details["basis"] = NF2_BASIS_NAMES
    res.details["coefficients"] = coeffs
    # printed-form coordinates: fix the K3*(U4V1 - U1V4) coefficient at the printed value
    printed = reference("nf2.bracket_total")
    pc = fit(printed, [b * inv("beta") ** 2 for b in PRINTED_BASIS[:4]])
    mine = [c * -2 for c in coeffs]
    printed_k = Fraction(5, 4)
    # K3*(U4V1 - U1V4) = -H2*K3^2 on Xi = 0
    mine_in_printed = [mine[0] + printed_k] + mine[1:] + [printed_k]
    res.details["bracket_total_printed_coordinates"] = {
        "artifact": mine_in_printed,
        "reference": [Fraction(9, 8), Fraction(1), Fraction(5, 8), Fraction(1), printed_k],
        "names": PRINTED_BASIS_NAMES,
    }
    res.details["bracket_total_basis_coordinates"] = {"artifact": mine, "reference": pc}
    for a in term.audit:
        if not a.matches:
            res.discrepancies.append(Discrepancy(a.key, a.description, str(_canon(a.value)), str(_canon(a.reference))))
    if not res.checks["first piece averages to zero"]:
        res.discrepancies.append(Discrepancy("nf2.avg_first_piece", REFERENCE["nf2.avg_first_piece"].anchor,
                                             str(_canon(term.first_piece_average)), "0"))
    if not on_shell_equal(term.double_bracket_average, printed):
        res.discrepancies.append(Discrepancy("nf2.bracket_total", REFERENCE["nf2.bracket_total"].anchor,
                                             str(_canon(term.double_bracket_average)), str(printed)))
    if not res.checks["normal form matches reference"]:
        res.discrepancies.append(Discrepancy("nf2.normal_form", REFERENCE["nf2.normal_form"].anchor,
                                             str(nf), str(reference("nf2.normal_form"))))
    for name, key in (("LH2F", "gen.LH2_F"), ("LK3F", "gen.LK3_F"), ("LU4F", "gen.LU4_F"), ("LV1F", "gen.LV1_F")):
        v = term.derivatives[name]
        if not on_shell_equal(v, reference(key)):
            res.discrepancies.append(Discrepancy(key, REFERENCE[key].anchor, str(_canon(v)), str(reference(key))))
    return res


_CANON_BASIS = None


def _canon(e: Polynomial) -> Polynomial:
    """Readable representative modulo <Xi> for report output.

    Tries a small basis of invariant monomials; falls back to ``e`` itself.
    """
    global _CANON_BASIS
    if _CANON_BASIS is None:
        names = ["H2*K3^2", "H2^3", "H2*U1^2", "H2*V1^2", "H2*U4^2", "H2*V4^2",
                 "K3^2", "U1^2", "V1^2", "U4^2", "V4^2", "H2*K3", "H2^2"]
        _CANON_BASIS = [P(n) for n in names]
    e0 = e.drop_pi()
    params = ("eps", "beta")
    # strip a common parameter monomial
    bpow = min((exps[e.space.index["beta"]] for exps in e0.terms), default=0)
    core = e0
    scale = Polynomial.constant(INVARIANT, 1)
    if bpow:
        core = Polynomial(INVARIANT, {tuple(x - (bpow if i == INVARIANT.index["beta"] else 0)
                                            for i, x in enumerate(k)): c for k, c in e0.terms.items()})
        scale = inv("beta") ** bpow
    if any(exps[INVARIANT.index[p]] for exps in core.terms for p in params):
        return e
    try:
        c = fit(core, _CANON_BASIS)
    except PipelineError:
        return e
    return _combo(c, _CANON_BASIS) * scale


# -- second stage -----------------------------------------------------------------


@dataclass
class Restriction:
    expression: Polynomial
    dropped_constant: Polynomial
    rescale: Polynomial
    rescaled: Polynomial


def _is_invariant_free(p: Polynomial) -> bool:
    return not (p.free_symbols() - set(INVARIANT.parameters))


def restrict_to_ThS3(e: Polynomial) -> Restriction:
    """Set ``H2 = h``, ``Xi = 0``, drop the constant, rescale time by ``-3/2 eps beta``.

    The rescaled Hamiltonian is ``(e|_{H2=h} - const) / (-3/2 eps beta)``;
    the division is exact whenever every nonconstant term carries
    ``eps*beta``.
    """
    r = e.subs({"H2": inv("h"), "Xi": 0})
    const = Polynomial.zero(INVARIANT)
    rest = Polynomial.zero(INVARIANT)
    for exps, c in r.terms.items():
        t = Polynomial(INVARIANT, {exps: c})
        if _is_invariant_free(t):
            const = const + t
        else:
            rest = rest + t
    ie, ib = INVARIANT.index["eps"], INVARIANT.index["beta"]
    out = {}
    for exps, c in rest.terms.items():
        if exps[ie] < 1 or exps[ib] < 1:
            raise PipelineError("restricted Hamiltonian has a term without eps*beta")
        k = list(exps)
        k[ie] -= 1
        k[ib] -= 1
        out[tuple(k)] = c * Fraction(-2, 3)
    rescale = (inv("eps") * inv("beta")).scale(Fraction(-3, 2))
    return Restriction(rest, const, rescale, Polynomial(INVARIANT, out))


T_BASIS_NAMES = ("h*K3^2", "K3^2", "h*(U1^2 + V1^2 + U4^2 + V4^2)", "U1^2 + V1^2 + U4^2 + V4^2")
T_BASIS = [P("h*K3^2"), P("K3^2"), P("h") * (W1 + W4), W1 + W4]


@lru_cache(maxsize=None)
def second_normalization() -> NormalFormResult:
    """Average the rescaled level-set Hamiltonian along the K3 flow."""
    nf2 = normalize_second_order()
    restr = restrict_to_ThS3(nf2.normal_form)
    Ht = restr.rescaled
    hK3 = P("h*K3")
    # Ht = h*K3 + 1/3 eps beta T
    rest = Ht - hK3
    T = parameter_coefficient(parameter_coefficient(rest, "eps", 1), "beta", 1).scale(3)
    if not (hK3 + (inv("eps") * inv("beta") * T).scale(Fraction(1, 3)) - Ht).is_zero():
        raise PipelineError("rescaled Hamiltonian is not h*K3 + eps*beta*T/3")
    spec = FlowSpec.invariant("K3")
    lvl = level_ideal()
    Tbar = average(T, spec)
    nf = hK3 + (inv("eps") * inv("beta") * Tbar).scale(Fraction(1, 3))
    checks = {
        "K3 invariant along its flow": lie(inv("K3"), inv("K3")).is_zero(),
        "U4V1 - U1V4 invariant along K3 flow": lie(inv("K3"), P("U4*V1 - U1*V4")).is_zero(),
    }
    from ..reference import K3_AVERAGES

    for src, ref in K3_AVERAGES.items():
        checks[f"K3-average of {src}"] = average(P(src), spec) == P(ref)
    tb = fit(Tbar, T_BASIS, lvl)
    res = NormalFormResult(1, nf, None)
    res.checks.update(checks)
    res.details.update({
        "dropped_constant": restr.dropped_constant,
        "rescale": restr.rescale,
        "restricted": restr.expression,
        "rescaled": Ht,
        "T": T,
        "T_bar": Tbar,
        "T_bar_basis": T_BASIS_NAMES,
        "T_bar_coefficients": tb,
        "T_is_K3_invariant": on_shell_equal(T, Tbar, lvl),
    })
    comparisons = [
        ("stage2.restricted", restr.expression),
        ("stage2.dropped_constant", restr.dropped_constant),
        ("stage2.rescaled", Ht),
        ("stage2.T", T),
        ("stage2.T_bar", Tbar),
        ("stage2.normal_form", nf),
    ]
    for key, mine in comparisons:
        ref = reference(key)
        same = on_shell_equal(mine, ref, lvl)
        res.checks[f"{key} matches reference"] = same
        if not same:
            res.discrepancies.append(Discrepancy(key, REFERENCE[key].anchor, str(mine), str(ref)))
    # internal consistency of the printed second-stage displays
    printed_T = reference("stage2.T")
    printed_Tbar = reference("stage2.T_bar")
    avg_printed = average(printed_T, spec)
    consistent = on_shell_equal(avg_printed, printed_Tbar, lvl)
    res.checks["printed T averages to printed T_bar"] = consistent
    if not consistent:
        res.discrepancies.append(Discrepancy(
            "stage2.T_bar.internal", "K3-average of the printed term",
            str(avg_printed), str(printed_Tbar), "the printed term does not average to the printed result"))
    return res
