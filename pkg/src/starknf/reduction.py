"""Reduction to a product of two-spheres and then to one degree of freedom.

On the level set ``Xi = 0, H2 = h`` the K and L generators satisfy
``|K|^2 + |L|^2 = h^2`` and ``K . L = 0``.  The combinations
``xi = (K + L)/(2s)``, ``eta = (K - L)/(2s)`` therefore lie on spheres of
radius ``h/(2s)``.  Two scalings are supported:

* ``flow`` (default, ``s = 1/2``): spheres of radius ``h``, ``K3 = (xi3 + eta3)/2``;
* ``coordinate`` (``s = 1``): ``K = xi + eta``, spheres of radius ``h/2``.

The abstract bracket ``{xi_i, xi_j} = eps_ijk xi_k``, ``{eta_i, eta_j} =
-eps_ijk eta_k`` is used on (xi, eta).  The bracket actually induced from
the invariant algebra is a constant multiple of it (see
:func:`induced_bracket_scale`), which amounts to a rescaling of time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact.coefficient import PI, as_fraction
from .exact.linalg import NotInSpanError, linear_combination
from .exact.poisson import PoissonStructure
from .exact.polynomial import Polynomial, parse
from .exact.space import INVARIANT, SIGMA, XIETA
from .exact.ideal import level_ideal
from .invariants import build_bracket_structure, expand, inv

__all__ = [
    "ReductionError",
    "Convention",
    "FLOW",
    "COORDINATE",
    "convention",
    "XiEtaAlgebra",
    "build_xi_eta_algebra",
    "induced_bracket_scale",
    "SphereIdentityCheck",
    "verify_sphere_identities",
    "to_xi_eta",
    "from_xi_eta",
    "SigmaChart",
    "sigma_chart",
    "printed_sigma_invariance",
    "ReducedSpaceDescriptor",
    "build_reduced_space",
    "ReducedHamiltonian",
    "reduced_hamiltonian",
    "SigmaPoisson",
    "derive_sigma_poisson",
    "ZK3FlowReport",
    "verify_zk3_flow",
]

XI = ("xi1", "xi2", "xi3")
ETA = ("eta1", "eta2", "eta3")
K_NAMES = ("K1", "K2", "K3")
L_NAMES = ("L1", "L2", "L3")
SIGMAS = SIGMA.variables


class ReductionError(AssertionError):
    """An exact check in the reduction failed."""


def _x(name: str) -> Polynomial:
    return Polynomial.variable(XIETA, name)


def _s(name: str) -> Polynomial:
    return Polynomial.variable(SIGMA, name)


# -- conventions --------------------------------------------------------------


@dataclass(frozen=True)
class Convention:
    """``K = s (xi + eta)``, ``L = s (xi - eta)``."""

    name: str
    s: Fraction

    @property
    def radius_factor(self) -> Fraction:
        """Sphere radius divided by h."""
        return 1 / (2 * self.s)

    @property
    def sigma_scale(self) -> Fraction:
        """``K3 = c * sigma5`` and ``L3 = c * sigma6`` with this ``c``."""
        return 2 * self.s


FLOW = Convention("flow", Fraction(1, 2))
COORDINATE = Convention("coordinate", Fraction(1))


def convention(c: Convention | str = FLOW) -> Convention:
    if isinstance(c, Convention):
        return c
    try:
        return {"flow": FLOW, "coordinate": COORDINATE}[c]
    except KeyError:
        raise ValueError(f"unknown convention {c!r}; expected 'flow' or 'coordinate'") from None


# -- the (xi, eta) Poisson algebra ---------------------------------------------


def _levi(i: int, j: int, k: int) -> int:
    return (i - j) * (j - k) * (k - i) // 2


def xi_eta_table(scale=1) -> dict[tuple[str, str], Polynomial]:
    scale = as_fraction(scale)
    table = {}
    for i, j in itertools.permutations(range(3), 2):
        k = 3 - i - j
        e = _levi(i, j, k)
        table[(XI[i], XI[j])] = _x(XI[k]).scale(scale * e)
        table[(ETA[i], ETA[j])] = _x(ETA[k]).scale(-scale * e)
    return table


def _monomials(names, max_degree: int, space) -> list[Polynomial]:
    out = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(names, d):
            p = Polynomial.constant(space, 1)
            for n in combo:
                p = p * Polynomial.variable(space, n)
            out.append(p)
    return out


@dataclass
class XiEtaAlgebra:
    """Polynomials in (xi, eta) with the abstract two-sphere bracket."""

    poisson: PoissonStructure
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def space(self):
        return XIETA

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return self.poisson.bracket(f, g)

    @staticmethod
    def casimirs() -> tuple[Polynomial, Polynomial]:
        xi2 = sum((_x(n) ** 2 for n in XI), Polynomial.zero(XIETA))
        eta2 = sum((_x(n) ** 2 for n in ETA), Polynomial.zero(XIETA))
        return xi2, eta2

    def jacobiator(self, f: Polynomial, g: Polynomial, h: Polynomial) -> Polynomial:
        b = self.bracket
        return b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))


@lru_cache(maxsize=None)
def build_xi_eta_algebra() -> XiEtaAlgebra:
    """Build the algebra and verify its axioms exactly.

    Jacobi is checked on all generator triples (which together with the
    Leibniz rule built into the bracket implies it everywhere); the two
    squared norms are checked to be Casimirs against every monomial of
    degree at most three.
    """
    alg = XiEtaAlgebra(PoissonStructure(XIETA, xi_eta_table()))
    gens = [_x(n) for n in XI + ETA]
    jac = all(alg.jacobiator(a, b, c).is_zero() for a, b, c in itertools.product(gens, repeat=3))
    anti = all((alg.bracket(a, b) + alg.bracket(b, a)).is_zero() for a, b in itertools.product(gens, repeat=2))
    xi2, eta2 = alg.casimirs()
    mons = _monomials(XI + ETA, 3, XIETA)
    cas = all(alg.bracket(c, m).is_zero() for c in (xi2, eta2) for m in mons)
    alg.checks.update({"antisymmetry": anti, "jacobi": jac, "casimirs": cas})
    failed = [k for k, v in alg.checks.items() if not v]
    if failed:
        raise ReductionError(f"(xi, eta) bracket fails: {failed}")
    return alg


@lru_cache(maxsize=None)
def induced_bracket_scale(conv: Convention | str = FLOW) -> Fraction:
    """Constant ``c`` with ``{xi_i, xi_j}_induced = c eps_ijk xi_k`` (and likewise for eta).

    The induced bracket comes from the invariant algebra via ``xi = (K + L)/(2s)``.
    A constant multiple of the abstract bracket is a time rescaling.
    """
    conv = convention(conv)
    bs = build_bracket_structure()
    f = 1 / (2 * conv.s)
    xi_inv = [(inv(k) + inv(l)).scale(f) for k, l in zip(K_NAMES, L_NAMES)]
    eta_inv = [(inv(k) - inv(l)).scale(f) for k, l in zip(K_NAMES, L_NAMES)]
    scale = None
    for vecs, sign in ((xi_inv, 1), (eta_inv, -1)):
        for i, j in itertools.permutations(range(3), 2):
            k = 3 - i - j
            br = bs.bracket(vecs[i], vecs[j])
            target = vecs[k].scale(sign * _levi(i, j, k))
            c = _proportionality(br, target)
            if c is None or (scale is not None and c != scale):
                raise ReductionError("induced bracket is not a multiple of the abstract one")
            scale = c
        for a, b in itertools.product(xi_inv, eta_inv):
            if not bs.bracket(a, b).is_zero():
                raise ReductionError("xi and eta do not commute under the induced bracket")
    return scale


def _proportionality(a: Polynomial, b: Polynomial) -> Fraction | None:
    if b.is_zero():
        return None
    m, cb = next(iter(b.raw_terms().items()))
    ca = a.raw_terms().get(m)
    if ca is None:
        return None
    c = Fraction(ca) / Fraction(cb)
    return c if (a - b.scale(c)).is_zero() else None


# -- sphere identities upstairs -------------------------------------------------

# identities that hold on the level set Xi = 0, H2 = h
SPHERE_IDENTITIES: list[tuple[str, str]] = [
    ("U2*V1 - U1*V2", "-h*K1"),
    ("U3*V1 - U1*V3", "-h*K2"),
    ("U4*V1 - U1*V4", "-h*K3"),
    ("U4*V3 - U3*V4", "-h*L1"),
    ("U4*V2 - U2*V4", "h*L2"),
    ("U1^2 + V1^2", "K1^2 + K2^2 + K3^2"),
    ("U4^2 + V4^2", "L1^2 + L2^2 + K3^2"),
    ("U1^2 + V1^2 + U4^2 + V4^2", "K1^2 + K2^2 + 2*K3^2 + L1^2 + L2^2"),
    ("K1^2 + K2^2 + K3^2 + L1^2 + L2^2 + L3^2", "h^2"),
    ("K1*L1 + K2*L2 + K3*L3", "0"),
]


@dataclass(frozen=True)
class SphereIdentityCheck:
    lhs: str
    rhs: str
    holds: bool
    residual: str
    source: str  # "artifact" or "reference"


def _identity_residual(lhs: str, rhs: str) -> Polynomial:
    d = parse(lhs, INVARIANT) - parse(rhs, INVARIANT)
    return level_ideal().reduce(expand(d))


def verify_sphere_identities(include_reference: bool = True) -> list[SphereIdentityCheck]:
    """Check each identity by reduction modulo ``<Xi, H2 - h>`` upstairs.

    Failures among the artifact's own identities are hard errors.  The
    printed list is checked too and failures there are reported, not raised.
    """
    out = []
    for lhs, rhs in SPHERE_IDENTITIES:
        r = _identity_residual(lhs, rhs)
        if not r.is_zero():
            raise ReductionError(f"{lhs} = {rhs} fails on the level set (residual {r})")
        out.append(SphereIdentityCheck(lhs, rhs, True, "0", "artifact"))
    if include_reference:
        from .reference import SPHERE_RELATIONS

        for lhs, rhs in SPHERE_RELATIONS:
            r = _identity_residual(lhs, rhs)
            out.append(SphereIdentityCheck(lhs, rhs, r.is_zero(), str(r), "reference"))
    return out


# -- (K, L) <-> (xi, eta) -----------------------------------------------------


def to_xi_eta(e: Polynomial, conv: Convention | str = FLOW) -> Polynomial:
    """Substitute ``K = s(xi + eta)``, ``L = s(xi - eta)``.

    Only K, L and parameters may occur; U, V, H2 and Xi must be eliminated
    first with the sphere identities.
    """
    conv = convention(conv)
    if e.space != INVARIANT:
        raise ValueError("expected an expression over the invariant space")
    bad = e.free_symbols() - set(K_NAMES + L_NAMES) - set(INVARIANT.parameters)
    if bad:
        raise ValueError(f"cannot map {sorted(bad)} to (xi, eta); eliminate them first")
    zero = Polynomial.zero(XIETA)
    images = {n: zero for n in INVARIANT.variables}
    for i in range(3):
        images[K_NAMES[i]] = (_x(XI[i]) + _x(ETA[i])).scale(conv.s)
        images[L_NAMES[i]] = (_x(XI[i]) - _x(ETA[i])).scale(conv.s)
    return e.compose(images, XIETA)


def from_xi_eta(e: Polynomial, conv: Convention | str = FLOW) -> Polynomial:
    """Inverse of :func:`to_xi_eta`: ``xi = (K + L)/(2s)``, ``eta = (K - L)/(2s)``."""
    conv = convention(conv)
    if e.space != XIETA:
        raise ValueError("expected an expression over (xi, eta)")
    if "k" in e.free_symbols():
        raise ValueError("the level parameter k has no counterpart on the invariant space")
    f = 1 / (2 * conv.s)
    images = {"k": Polynomial.zero(INVARIANT)}
    for i in range(3):
        images[XI[i]] = (inv(K_NAMES[i]) + inv(L_NAMES[i])).scale(f)
        images[ETA[i]] = (inv(K_NAMES[i]) - inv(L_NAMES[i])).scale(f)
    return e.compose(images, INVARIANT)


# -- sigma invariants ---------------------------------------------------------


@dataclass(frozen=True)
class SigmaChart:
    """The six K3-invariants on (xi, eta) and their relations."""

    sigma: dict[str, Polynomial]
    relation: Polynomial  # sigma3^2 + sigma4^2 - sigma1*sigma2 over the sigma space
    eliminated: Polynomial  # relation after eliminating sigma1 and sigma2 on spheres of radius h

    def pullback(self, p: Polynomial) -> Polynomial:
        """Compose a sigma-space polynomial with the chart."""
        images = dict(self.sigma)
        return p.compose(images, XIETA)


@lru_cache(maxsize=None)
def sigma_chart() -> SigmaChart:
    x1, x2, x3, y1, y2, y3 = (_x(n) for n in XI + ETA)
    half = Fraction(1, 2)
    sig = {
        "sigma1": x1 ** 2 + x2 ** 2,
        "sigma2": y1 ** 2 + y2 ** 2,
        # xi and eta turn in opposite senses, so the invariant pairing is z*w, not z*conj(w)
        "sigma3": x1 * y2 + x2 * y1,
        "sigma4": x1 * y1 - x2 * y2,
        "sigma5": (x3 + y3).scale(half),
        "sigma6": (x3 - y3).scale(half),
    }
    s = {n: _s(n) for n in SIGMAS}
    h = _s("h")
    relation = s["sigma3"] ** 2 + s["sigma4"] ** 2 - s["sigma1"] * s["sigma2"]
    sub = {
        "sigma1": h ** 2 - (s["sigma5"] + s["sigma6"]) ** 2,
        "sigma2": h ** 2 - (s["sigma5"] - s["sigma6"]) ** 2,
    }
    eliminated = relation.subs(sub)
    chart = SigmaChart(sig, relation, eliminated)
    alg = build_xi_eta_algebra()
    k3 = sig["sigma5"]
    for n, p in sig.items():
        if not alg.bracket(p, k3).is_zero():
            raise ReductionError(f"{n} is not invariant under the K3 flow")
    if not chart.pullback(relation).is_zero():
        raise ReductionError("sigma3^2 + sigma4^2 - sigma1*sigma2 does not vanish identically")
    xi2, eta2 = alg.casimirs()
    hx = _x("h")
    # sigma1 + (sigma5 + sigma6)^2 = |xi|^2 and sigma2 + (sigma5 - sigma6)^2 = |eta|^2
    if not (chart.pullback(sub["sigma1"]) - (hx ** 2 - xi2 + sig["sigma1"])).is_zero():
        raise ReductionError("sigma1 elimination does not follow from |xi| = h")
    if not (chart.pullback(sub["sigma2"]) - (hx ** 2 - eta2 + sig["sigma2"])).is_zero():
        raise ReductionError("sigma2 elimination does not follow from |eta| = h")
    return chart


def printed_sigma_invariance() -> dict[str, bool]:
    """Whether each printed sigma definition is invariant under the K3 flow."""
    from .reference import PRINTED_SIGMA

    alg = build_xi_eta_algebra()
    k3 = sigma_chart().sigma["sigma5"]
    return {n: alg.bracket(parse(t, XIETA), k3).is_zero() for n, t in PRINTED_SIGMA.items()}


# -- reduced spaces -----------------------------------------------------------


@dataclass(frozen=True)
class ReducedSpaceDescriptor:
    h: Fraction
    k: Fraction
    kind: str  # "smooth-sphere", "point" or "singular-sphere"
    polynomial: Polynomial  # sigma3^2 + sigma4^2 - ((h-k)^2 - s6^2)((h+k)^2 - s6^2)
    sigma6_bound: Fraction  # |sigma6| <= h - |k|
    singular_points: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def contains(self, s3, s4, s6) -> bool:
        vals = {"sigma3": as_fraction(s3), "sigma4": as_fraction(s4), "sigma6": as_fraction(s6)}
        return abs(vals["sigma6"]) <= self.sigma6_bound and self.polynomial.evaluate(vals).is_zero()


def _factored(h, k) -> Polynomial:
    s6 = _s("sigma6")
    one = Polynomial.constant(SIGMA, 1)
    return (one.scale((h - k) ** 2) - s6 ** 2) * (one.scale((h + k) ** 2) - s6 ** 2)


def build_reduced_space(h, k) -> ReducedSpaceDescriptor:
    """The reduced space ``sigma5 = k`` inside ``S^2_h x S^2_h`` modulo the K3 flow."""
    h, k = as_fraction(h), as_fraction(k)
    if h <= 0:
        raise ValueError("h must be positive")
    if abs(k) > h:
        raise ValueError(f"|k| = {abs(k)} exceeds h = {h}: the level set is empty")
    chart = sigma_chart()
    poly = chart.eliminated.subs({"sigma5": k, "h": h})
    s3, s4 = _s("sigma3"), _s("sigma4")
    if not (poly - (s3 ** 2 + s4 ** 2 - _factored(h, k))).is_zero():
        raise ReductionError("eliminated relation does not factor as expected")
    bound = h - abs(k)
    if k == 0:
        kind = "singular-sphere"
        singular = ((Fraction(0), Fraction(0), h), (Fraction(0), Fraction(0), -h))
        # the right-hand side is (h^2 - s6^2)^2: a double root at each pole
        r = _factored(h, k)
        if not (r - (Polynomial.constant(SIGMA, h * h) - _s("sigma6") ** 2) ** 2).is_zero():
            raise ReductionError("k = 0 reduced space is not the expected cone pair")
    elif abs(k) == h:
        kind = "point"
        singular = ()
        # rhs = -s6^2 (4h^2 - s6^2) <= 0 on |s6| <= 2h, so s3 = s4 = s6 = 0
        r = _factored(h, k)
        s6 = _s("sigma6")
        if not (r + s6 ** 2 * (Polynomial.constant(SIGMA, 4 * h * h) - s6 ** 2)).is_zero() or bound != 0:
            raise ReductionError("|k| = h reduced space is not a point")
    else:
        kind = "smooth-sphere"
        singular = ()
    return ReducedSpaceDescriptor(h, k, kind, poly, bound, singular)


# -- reduced Hamiltonian --------------------------------------------------------

# basis for rewriting a K3-averaged quadratic on the level set in K3, L3 and h
_KL_BASIS_NAMES = ("h*K3^2", "h*L3^2", "h^3", "K3^2", "L3^2", "h^2")


@dataclass
class ReducedHamiltonian:
    """Reduced Hamiltonian in sigma6 (sigma5 = k substituted) plus the dropped constant."""

    convention: str
    sphere_form: Polynomial  # over the invariant space, K3 and L3 only
    sigma_form: Polynomial  # over the sigma space, sigma5 kept
    reduced: Polynomial  # sigma6 part with sigma5 = k
    dropped_constant: Polynomial
    reference_reduced: Polynomial
    reference_constant: Polynomial
    diff: dict[str, object] = field(default_factory=dict)


def _sphere_form(nf: Polynomial) -> Polynomial:
    """Rewrite ``h*K3 + (eps*beta/3) * T_bar`` in K3, L3 and h on the level set."""
    from .averaging.normalform import fit, parameter_coefficient

    hK3 = inv("h") * inv("K3")
    rest = nf - hK3
    T = parameter_coefficient(parameter_coefficient(rest, "eps", 1), "beta", 1)
    if not (hK3 + inv("eps") * inv("beta") * T - nf).is_zero():
        raise ReductionError("second normal form is not h*K3 + eps*beta*(...)")
    basis = [parse(b, INVARIANT) for b in _KL_BASIS_NAMES]
    try:
        c = fit(T, basis, level_ideal())
    except Exception as exc:
        raise ReductionError(f"averaged term is not a function of K3 and L3 on the level set: {exc}") from None
    T_kl = sum((ci * b for ci, b in zip(c, basis) if ci), Polynomial.zero(INVARIANT))
    return hK3 + inv("eps") * inv("beta") * T_kl


def _to_sigma(e: Polynomial, conv: Convention) -> Polynomial:
    """K3 -> c sigma5, L3 -> c sigma6 for an expression in K3, L3 and parameters."""
    bad = e.free_symbols() - {"K3", "L3"} - set(INVARIANT.parameters)
    if bad:
        raise ReductionError(f"expression still contains {sorted(bad)}")
    zero = Polynomial.zero(SIGMA)
    images = {n: zero for n in INVARIANT.variables}
    images["K3"] = _s("sigma5").scale(conv.sigma_scale)
    images["L3"] = _s("sigma6").scale(conv.sigma_scale)
    out = e.compose(images, SIGMA)
    # cross-check against the (xi, eta) route
    if not (to_xi_eta(e, conv) - sigma_chart().pullback(out)).is_zero():
        raise ReductionError("sigma substitution disagrees with the (xi, eta) route")
    return out


def _split_constant(p: Polynomial) -> tuple[Polynomial, Polynomial]:
    i6 = SIGMA.index["sigma6"]
    var_part = {e: c for e, c in p.terms.items() if e[i6]}
    const_part = {e: c for e, c in p.terms.items() if not e[i6]}
    return Polynomial(SIGMA, var_part), Polynomial(SIGMA, const_part)


def _coefficient_table(p: Polynomial) -> dict[str, str]:
    out = {}
    for e, c in p.terms.items():
        mono = Polynomial(SIGMA, {e: 1}).to_text()
        out[mono] = str(c)
    return out


def _diff(mine: Polynomial, ref: Polynomial) -> dict[str, tuple[str, str]]:
    a, b = _coefficient_table(mine), _coefficient_table(ref)
    return {m: (a.get(m, "0"), b.get(m, "0")) for m in sorted(set(a) | set(b)) if a.get(m) != b.get(m)}


def reduce_sphere_hamiltonian(sphere: Polynomial, conv: Convention | str = FLOW, k=None):
    """Map ``H(K3, L3)`` to sigma variables and split off the sigma6-free constant."""
    conv = convention(conv)
    sig = _to_sigma(sphere, conv)
    level = _s("k") if k is None else Polynomial.constant(SIGMA, as_fraction(k))
    reduced = sig.subs({"sigma5": level})
    var_part, const = _split_constant(reduced)
    return sig, var_part, const


@lru_cache(maxsize=None)
def reduced_hamiltonian(conv: Convention | str = FLOW) -> ReducedHamiltonian:
    """Reduced Hamiltonian from the computed second normal form, with a diff against the printed one.

    ``h``, ``k``, ``eps``, ``beta`` stay symbolic; substitute afterwards.
    """
    from .averaging.normalform import second_normalization
    from .reference import reference

    conv = convention(conv)
    sphere = _sphere_form(second_normalization().normal_form)
    sig, var_part, const = reduce_sphere_hamiltonian(sphere, conv)
    ref_red = reference("reduced.hamiltonian")
    ref_const = reference("reduced.dropped_constant")
    rh = ReducedHamiltonian(conv.name, sphere, sig, var_part, const, ref_red, ref_const)
    # the printed sphere-level Hamiltonian, pushed through both conventions
    printed_sphere = reference("sphere.hamiltonian")
    via = {}
    for c in (FLOW, COORDINATE):
        _, pv, pc = reduce_sphere_hamiltonian(printed_sphere, c)
        via[c.name] = {"reduced": str(pv), "constant": str(pc),
                       "reduced_matches_print": pv == ref_red, "constant_matches_print": pc == ref_const}
    rh.diff = {
        "reduced_matches": var_part == ref_red,
        "constant_matches": const == ref_const,
        "reduced_coefficients": _diff(var_part, ref_red),
        "constant_coefficients": _diff(const, ref_const),
        "printed_sphere_form_via": via,
    }
    return rh


# -- sigma-level bracket and equations of motion -----------------------------------


def _sigma_weight(p: Polynomial) -> set[int]:
    """(xi, eta)-degrees of the sigma monomials in ``p``."""
    w = [2, 2, 2, 2, 1, 1]
    idx = [SIGMA.index[n] for n in SIGMAS]
    return {sum(w[j] * e[i] for j, i in enumerate(idx)) for e in p.terms}


@lru_cache(maxsize=None)
def _sigma_monomials_of_weight(d: int) -> tuple[Polynomial, ...]:
    out = []
    for a in itertools.product(range(d // 2 + 1), repeat=4):
        w = 2 * sum(a)
        if w > d:
            continue
        rest = d - w
        for b5 in range(rest + 1):
            exps = {"sigma1": a[0], "sigma2": a[1], "sigma3": a[2], "sigma4": a[3],
                    "sigma5": b5, "sigma6": rest - b5}
            p = Polynomial.constant(SIGMA, 1)
            for n, e in exps.items():
                if e:
                    p = p * _s(n) ** e
            out.append(p)
    return tuple(out)


@dataclass
class SigmaPoisson:
    """Bracket ``{sigma_i, sigma_j}`` expressed in the sigma variables."""

    structure: PoissonStructure
    table_text: dict[tuple[str, str], str]
    checks: dict[str, bool]

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return self.structure.bracket(f, g)

    def equations_of_motion(self, H: Polynomial) -> dict[str, Polynomial]:
        return {n: self.bracket(_s(n), H) for n in SIGMAS}


@lru_cache(maxsize=None)
def derive_sigma_poisson() -> SigmaPoisson:
    """Express each ``{sigma_i, sigma_j}`` as a sigma polynomial by exact matching."""
    alg = build_xi_eta_algebra()
    chart = sigma_chart()
    table: dict[tuple[str, str], Polynomial] = {}
    text = {}
    for a, b in itertools.combinations(SIGMAS, 2):
        br = alg.bracket(chart.sigma[a], chart.sigma[b])
        if br.is_zero():
            continue
        degs = {sum(e) for e in br.terms}
        if len(degs) != 1:
            raise ReductionError(f"{{{a}, {b}}} is not homogeneous")
        basis = _sigma_monomials_of_weight(degs.pop())
        pulled = [chart.pullback(m) for m in basis]
        try:
            c = linear_combination(br, pulled)
        except NotInSpanError:
            raise ReductionError(f"{{{a}, {b}}} is not expressible in the sigma variables") from None
        expr = sum((ci * m for ci, m in zip(c, basis) if ci), Polynomial.zero(SIGMA))
        if not (chart.pullback(expr) - br).is_zero():
            raise ReductionError(f"{{{a}, {b}}} matching left a residual")
        table[(a, b)] = expr
        text[(a, b)] = str(expr)
    ps = PoissonStructure(SIGMA, table)
    checks = {
        "sigma5 is central": all(ps.of("sigma5", n).is_zero() for n in SIGMAS),
        "relation is a Casimir": all(
            chart.pullback(ps.bracket(chart.relation, _s(n))).is_zero() for n in SIGMAS),
    }
    # Jacobi on the sigma level holds after pullback
    gens = [_s(n) for n in SIGMAS]
    checks["jacobi (pulled back)"] = all(
        chart.pullback(ps.bracket(x, ps.bracket(y, z)) + ps.bracket(y, ps.bracket(z, x))
                       + ps.bracket(z, ps.bracket(x, y))).is_zero()
        for x, y, z in itertools.combinations(gens, 3))
    if not checks["sigma5 is central"]:
        raise ReductionError("sigma5 does not commute with every sigma")
    return SigmaPoisson(ps, text, checks)


def reduced_equations_of_motion(conv: Convention | str = FLOW) -> dict[str, Polynomial]:
    """``sigma_i' = {sigma_i, H}`` for the computed reduced Hamiltonian (sigma5 kept)."""
    sp = derive_sigma_poisson()
    rh = reduced_hamiltonian(conv)
    eom = sp.equations_of_motion(rh.sigma_form)
    chart = sigma_chart()
    # the relation is conserved on the reduced space
    drel = sp.bracket(chart.relation, rh.sigma_form)
    if not chart.pullback(drel).is_zero():
        raise ReductionError("reduced flow does not preserve the relation")
    return eom


# -- the K3 flow on (xi, eta) ---------------------------------------------------


@dataclass
class ZK3FlowReport:
    checks: dict[str, bool]
    flow: dict[str, str]
    discrepancies: list[dict[str, str]]


def verify_zk3_flow() -> ZK3FlowReport:
    """Exact checks of the K3 = (xi3 + eta3)/2 flow with the abstract bracket."""
    from .averaging.trig import FlowSpec, TrigPolynomial, flow_pullback
    from .reference import ZK3_EQUATIONS, ZK3_FLOW_DISPLAY

    alg = build_xi_eta_algebra()
    chart = sigma_chart()
    K3 = chart.sigma["sigma5"]
    checks: dict[str, bool] = {}
    rows = {}
    for n in XI + ETA:
        v = alg.bracket(_x(n), K3)
        checks[f"d{n}/dt as printed"] = v == parse(ZK3_EQUATIONS[n], XIETA)
        row = {}
        for e, c in v.terms.items():
            j = next(XIETA.names[i] for i, x in enumerate(e) if x)
            row[j] = c.rational()
        rows[n] = row
    spec = FlowSpec.from_matrix("K3", XIETA, rows)
    checks["frequency 1/2"] = spec.omega == Fraction(1, 2)
    checks["period 4 pi"] = spec.period == PI * 4
    images = spec.images()
    xi2, eta2 = alg.casimirs()
    checks["|xi|^2 preserved"] = flow_pullback(xi2, spec).max_mode() == 0
    checks["|eta|^2 preserved"] = flow_pullback(eta2, spec).max_mode() == 0
    for n, p in chart.sigma.items():
        tp = flow_pullback(p, spec)
        checks[f"{n} constant along the flow"] = tp.max_mode() == 0 and tp.mean() == p
    hard = [k for k, v in checks.items() if not v]
    if hard:
        raise ReductionError(f"K3 flow checks failed: {hard}")
    # the printed closed form
    printed = {}
    for n, (c, s) in ZK3_FLOW_DISPLAY.items():
        modes = {}
        cp, sp = parse(c, XIETA), parse(s, XIETA)
        if n in ("xi3", "eta3"):
            modes[(0, "c")] = cp
        else:
            modes[(1, "c")] = cp
            if not sp.is_zero():
                modes[(1, "s")] = sp
        printed[n] = TrigPolynomial(XIETA, Fraction(1, 2), modes)
    discrepancies = []
    sq = lambda names: sum((printed[m] * printed[m] for m in names), TrigPolynomial(XIETA, Fraction(1, 2)))  # noqa: E731
    report_checks = {
        "printed flow preserves |xi|^2": sq(XI).max_mode() == 0,
        "printed flow preserves |eta|^2": sq(ETA).max_mode() == 0,
    }
    for n in XI + ETA:
        mine = images.get(n, TrigPolynomial.constant(_x(n), Fraction(1, 2)))
        same = mine == printed[n]
        report_checks[f"printed {n}(t) equals the flow"] = same
        if not same:
            discrepancies.append({
                "variable": n,
                "artifact": f"{mine.at(1, 0)} at t=0; {mine!r}",
                "reference": f"{printed[n].at(1, 0)} at t=0; {printed[n]!r}",
            })
    checks.update(report_checks)
    return ZK3FlowReport(checks, {n: repr(images[n]) for n in images}, discrepancies)
