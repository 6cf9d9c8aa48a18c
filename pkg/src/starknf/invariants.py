"""The sixteen quadratic invariants of the Xi-action, the KS map, the orbit
relations and the generator bracket table."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact.ideal import xi_ideal
from .exact.linalg import NotInSpanError, linear_combination
from .exact.poisson import PoissonStructure, poisson_bracket
from .exact.polynomial import Polynomial, gens
from .exact.space import CANONICAL, INVARIANT, INVARIANT_NAMES

__all__ = [
    "canonical_generators",
    "build_generators",
    "GeneratorTable",
    "expand",
    "inv",
    "BracketStructure",
    "build_bracket_structure",
    "RelationCheck",
    "ORBIT_RELATIONS",
    "SUPPLEMENTARY_RELATIONS",
    "ComponentCheck",
    "compare_derivation",
    "verify_orbit_relations",
    "ORBIT_INEQUALITIES",
    "InequalityCheck",
    "verify_orbit_inequalities",
    "KSMap",
    "ks_map",
    "regularized_hamiltonian",
    "preregularized_times_norm",
    "ks_pullback_hamiltonian",
    "BracketClosureError",
    "GeneratorInvarianceError",
    "KSConsistencyError",
]


class BracketClosureError(AssertionError):
    pass


class GeneratorInvarianceError(AssertionError):
    pass


class KSConsistencyError(AssertionError):
    pass


@lru_cache(maxsize=None)
def canonical_generators() -> dict[str, Polynomial]:
    g = gens(CANONICAL)
    q1, q2, q3, q4 = (g[f"q{i}"] for i in range(1, 5))
    p1, p2, p3, p4 = (g[f"p{i}"] for i in range(1, 5))
    half = Fraction(1, 2)
    return {
        "H2": half * (p1**2 + p2**2 + p3**2 + p4**2 + q1**2 + q2**2 + q3**2 + q4**2),
        "Xi": q1 * p2 - q2 * p1 + q3 * p4 - q4 * p3,
        "K1": -(q1 * q3 + q2 * q4 + p1 * p3 + p2 * p4),
        "K2": -(q1 * q4 - q2 * q3 + p1 * p4 - p2 * p3),
        "K3": half * (q3**2 + q4**2 + p3**2 + p4**2 - q1**2 - q2**2 - p1**2 - p2**2),
        "L1": q4 * p1 - q3 * p2 + q2 * p3 - q1 * p4,
        "L2": q1 * p3 + q2 * p4 - q3 * p1 - q4 * p2,
        "L3": q3 * p4 - q4 * p3 + q2 * p1 - q1 * p2,
        "U1": -(q1 * p1 + q2 * p2 + q3 * p3 + q4 * p4),
        "U2": q1 * q3 + q2 * q4 - p1 * p3 - p2 * p4,
        "U3": q1 * q4 - q2 * q3 + p2 * p3 - p1 * p4,
        "U4": half * (q1**2 + q2**2 - q3**2 - q4**2 + p3**2 + p4**2 - p1**2 - p2**2),
        "V1": half * (q1**2 + q2**2 + q3**2 + q4**2 - p1**2 - p2**2 - p3**2 - p4**2),
        "V2": q1 * p3 + q2 * p4 + q3 * p1 + q4 * p2,
        "V3": q1 * p4 - q2 * p3 + q4 * p1 - q3 * p2,
        "V4": q1 * p1 + q2 * p2 - q3 * p3 - q4 * p4,
    }


@dataclass(frozen=True)
class GeneratorTable:
    polys: dict[str, Polynomial]

    def __getitem__(self, name: str) -> Polynomial:
        return self.polys[name]

    def __iter__(self):
        return iter(INVARIANT_NAMES)


def build_generators() -> GeneratorTable:
    """All sixteen invariants, each checked to Poisson-commute with Xi."""
    g = canonical_generators()
    xi = g["Xi"]
    for name in INVARIANT_NAMES:
        if not poisson_bracket(g[name], xi).is_zero():
            raise GeneratorInvarianceError(f"{{{name}, Xi}} != 0")
    return GeneratorTable(dict(g))


def inv(name: str) -> Polynomial:
    """Invariant-space variable (or parameter) by name."""
    return Polynomial.variable(INVARIANT, name)


def expand(e: Polynomial) -> Polynomial:
    """Substitute the generator quadratics: invariant space -> (q, p)."""
    if e.space == CANONICAL:
        return e
    g = canonical_generators()
    return e.compose({n: g[n] for n in INVARIANT_NAMES}, CANONICAL)


# -- bracket table ----------------------------------------------------------


@dataclass
class BracketStructure:
    """``{G_i, G_j}`` as exact linear combinations of the generators."""

    coefficients: dict[tuple[str, str], dict[str, Fraction]]
    poisson: PoissonStructure

    def of(self, a: str, b: str) -> Polynomial:
        return self.poisson.of(a, b)

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return self.poisson.bracket(f, g)

    def lie(self, generator: Polynomial | str, f: Polynomial) -> Polynomial:
        """Lie derivative of ``f`` along the vector field induced by ``generator``:
        ``L_{Y_G} f = {f, G}``."""
        if isinstance(generator, str):
            generator = inv(generator)
        return self.poisson.bracket(f, generator)

    def derivation_components(self, name: str) -> dict[str, Polynomial]:
        """Nonzero components ``x -> {x, G}`` of the vector field ``Y_G``."""
        return self.poisson.vector_field(inv(name))

    def matrix(self, name: str) -> dict[str, dict[str, Fraction]]:
        """Linear action of ``Y_G`` on the generators: ``x_i -> sum_j M_ij x_j``."""
        out = {}
        for a in INVARIANT_NAMES:
            out[a] = dict(self.coefficients.get((a, name), {}))
        return out


@lru_cache(maxsize=None)
def build_bracket_structure() -> BracketStructure:
    g = canonical_generators()
    basis = [g[n] for n in INVARIANT_NAMES]
    coeffs: dict[tuple[str, str], dict[str, Fraction]] = {}
    table: dict[tuple[str, str], Polynomial] = {}
    for a in INVARIANT_NAMES:
        for b in INVARIANT_NAMES:
            br = poisson_bracket(g[a], g[b])
            try:
                c = linear_combination(br, basis)
            except NotInSpanError:
                raise BracketClosureError(f"{{{a}, {b}}} is not a combination of the generators") from None
            residual = br - sum((ci * bi for ci, bi in zip(c, basis)), Polynomial.zero(CANONICAL))
            if not residual.is_zero():
                raise BracketClosureError(f"nonzero residual for {{{a}, {b}}}")
            d = {n: ci for n, ci in zip(INVARIANT_NAMES, c) if ci != 0}
            coeffs[(a, b)] = d
            if d:
                table[(a, b)] = sum((ci * inv(n) for n, ci in d.items()), Polynomial.zero(INVARIANT))
    return BracketStructure(coeffs, PoissonStructure(INVARIANT, table))


# -- orbit relations ----------------------------------------------------------


def _rel(lhs: str, rhs: str):
    from .exact.polynomial import parse

    return parse(lhs, INVARIANT), parse(rhs, INVARIANT)


ORBIT_RELATIONS: tuple[tuple[str, str, str], ...] = (
    ("norm U", "U1^2 + U2^2 + U3^2 + U4^2", "H2^2 - Xi^2"),
    ("norm V", "V1^2 + V2^2 + V3^2 + V4^2", "H2^2 - Xi^2"),
    ("U.V", "U1*V1 + U2*V2 + U3*V3 + U4*V4", "0"),
    ("U2V1-U1V2", "U2*V1 - U1*V2", "L1*Xi - K1*H2"),
    ("U3V1-U1V3", "U3*V1 - U1*V3", "L2*Xi - K2*H2"),
    ("U4V1-U1V4", "U4*V1 - U1*V4", "L3*Xi - K3*H2"),
    ("U4V3-U3V4", "U4*V3 - U3*V4", "K1*Xi - L1*H2"),
    ("U2V4-U4V2", "U2*V4 - U4*V2", "K2*Xi - L2*H2"),
    ("U3V2-U2V3", "U3*V2 - U2*V3", "K3*Xi - L3*H2"),
)

# further quadratic relations among K, L, H2, Xi used by the sphere reduction
SUPPLEMENTARY_RELATIONS: tuple[tuple[str, str, str], ...] = (
    ("norm K + norm L", "K1^2 + K2^2 + K3^2 + L1^2 + L2^2 + L3^2", "H2^2 + Xi^2"),
    ("K.L", "K1*L1 + K2*L2 + K3*L3", "H2*Xi"),
)


@dataclass
class RelationCheck:
    name: str
    lhs: Polynomial
    rhs: Polynomial
    status: str  # "identity", "on-shell" or "fail"

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def verify_orbit_relations(supplementary: bool = False) -> list[RelationCheck]:
    """Test each relation globally in Q[q, p]; fall back to mod <Xi>."""
    out = []
    ideal = xi_ideal()
    rels = ORBIT_RELATIONS + (SUPPLEMENTARY_RELATIONS if supplementary else ())
    for name, l, r in rels:
        lhs, rhs = _rel(l, r)
        diff = expand(lhs - rhs)
        if diff.is_zero():
            status = "identity"
        elif ideal.contains(diff):
            status = "on-shell"
        else:
            status = "fail"
        out.append(RelationCheck(name, lhs, rhs, status))
    return out


# sign conditions of the orbit space, each with a sum-of-squares certificate:
# expand(expr) == sum_i c_i * expand(g_i)^2 with every c_i > 0
ORBIT_INEQUALITIES: tuple[tuple[str, str, tuple[tuple[Fraction, str], ...]], ...] = (
    ("norm U >= 0", "H2^2 - Xi^2", tuple((Fraction(1), f"U{i}") for i in range(1, 5))),
    ("H2 >= 0", "H2", tuple((Fraction(1, 2), v) for v in ("q1", "q2", "q3", "q4", "p1", "p2", "p3", "p4"))),
    ("norm V >= 0", "H2^2 - Xi^2", tuple((Fraction(1), f"V{i}") for i in range(1, 5))),
)


@dataclass
class InequalityCheck:
    name: str
    expression: Polynomial
    certificate: str
    passed: bool


def verify_orbit_inequalities() -> list[InequalityCheck]:
    """Check each ``expr >= 0`` by an exact sum-of-squares identity upstairs."""
    from .exact.polynomial import parse

    out = []
    for name, text, squares in ORBIT_INEQUALITIES:
        e = parse(text, INVARIANT)
        total = Polynomial.zero(CANONICAL)
        for c, g in squares:
            gp = expand(inv(g)) if g in INVARIANT.variables else Polynomial.variable(CANONICAL, g)
            total = total + (gp * gp).scale(c)
        ok = all(c > 0 for c, _ in squares) and expand(e) == total
        cert = " + ".join(f"{c}*{g}^2" if c != 1 else f"{g}^2" for c, g in squares)
        out.append(InequalityCheck(name, e, cert, ok))
    return out


# -- KS map and the regularized Hamiltonian --------------------------------------


@dataclass(frozen=True)
class KSMap:
    """``x`` as polynomials; ``y`` as numerators over ``<q, q> = H2 + V1``."""

    x: tuple[Polynomial, Polynomial, Polynomial]
    y_num: tuple[Polynomial, Polynomial, Polynomial]
    qq: Polynomial
    x_inv: tuple[Polynomial, Polynomial, Polynomial] = field(default=None)

    def check(self) -> dict[str, bool]:
        g = canonical_generators()
        v = gens(CANONICAL)
        q = [v[f"q{i}"] for i in range(1, 5)]
        p = [v[f"p{i}"] for i in range(1, 5)]
        raw_x = (
            2 * (q[0] * q[2] + q[1] * q[3]),
            2 * (q[0] * q[3] - q[1] * q[2]),
            q[0] ** 2 + q[1] ** 2 - q[2] ** 2 - q[3] ** 2,
        )
        raw_y = (
            q[0] * p[2] + q[1] * p[3] + q[2] * p[0] + q[3] * p[1],
            q[0] * p[3] - q[1] * p[2] - q[2] * p[1] + q[3] * p[0],
            q[0] * p[0] + q[1] * p[1] - q[2] * p[2] - q[3] * p[3],
        )
        qq = sum((qi * qi for qi in q), Polynomial.zero(CANONICAL))
        out = {}
        for i, (a, b) in enumerate(zip(raw_x, self.x)):
            out[f"x{i + 1}"] = (a - b).is_zero()
        for i, (a, b) in enumerate(zip(raw_y, self.y_num)):
            out[f"y{i + 1}"] = (a - b).is_zero()
        out["<q,q> = H2 + V1"] = (qq - (g["H2"] + g["V1"])).is_zero()
        out["|x|^2 = <q,q>^2"] = (sum((xi * xi for xi in raw_x), Polynomial.zero(CANONICAL)) - qq * qq).is_zero()
        return out


def ks_map() -> KSMap:
    g = canonical_generators()
    x = (g["U2"] - g["K1"], g["U3"] - g["K2"], g["U4"] - g["K3"])
    y = (g["V2"], g["V3"], g["V4"])
    return KSMap(x, y, g["H2"] + g["V1"])


def regularized_hamiltonian() -> Polynomial:
    """``H2 + eps*beta*(U4 V1 + H2 U4 - K3 V1 - H2 K3)`` on the invariant space."""
    H2, U4, V1, K3 = inv("H2"), inv("U4"), inv("V1"), inv("K3")
    eb = inv("eps") * inv("beta")
    return H2 + eb * (U4 * V1 + H2 * U4 - K3 * V1 - H2 * K3)


def preregularized_times_norm(literal: bool = False) -> Polynomial:
    """``|x| * Kpre(x, y)`` pulled back through KS, cleared of denominators.

    ``Kpre = 1/2 |x| (<y,y> + 1) + eps*beta*x3*|x|``.  With ``literal=True``
    the bracket reads ``(<y,y> + |x|)`` instead.
    """
    ks = ks_map()
    r = ks.qq
    eb = Polynomial.variable(CANONICAL, "eps") * Polynomial.variable(CANONICAL, "beta")
    yy_num = sum((v * v for v in ks.y_num), Polynomial.zero(CANONICAL))
    half = Fraction(1, 2)
    # |x| <y,y> = yy_num / r; multiply everything by r
    tail = r * r * r if literal else r * r
    return half * yy_num + half * tail + eb * ks.x[2] * r * r


def ks_pullback_hamiltonian() -> Polynomial:
    """The regularized Hamiltonian, after checking it against the KS pullback.

    Verifies that ``<q,q> * expand(H) - <q,q> * Kpre(KS(q, p))`` lies in
    ``<Xi>``; all arithmetic stays polynomial.
    """
    H = regularized_hamiltonian()
    ks = ks_map()
    residual = ks.qq * expand(H) - preregularized_times_norm()
    if not xi_ideal().contains(residual):
        raise KSConsistencyError("KS pullback differs from the regularized Hamiltonian off <Xi>")
    return H


# -- derivation displays ---------------------------------------------------------


@dataclass(frozen=True)
class ComponentCheck:
    generator: str
    variable: str
    computed: str
    printed: str

    @property
    def matches(self) -> bool:
        return self.computed == self.printed


def compare_derivation(name: str) -> list[ComponentCheck]:
    """Component-by-component comparison of ``Y_name`` with its printed display.

    Every variable that is nonzero in either the computed field or the
    display (including duplicated printed entries) yields one record.
    """
    from .exact.polynomial import parse
    from .reference import DERIVATION_DISPLAYS, DERIVATION_DUPLICATES

    computed = build_bracket_structure().derivation_components(name)
    printed = DERIVATION_DISPLAYS[name]
    out = []
    for v in INVARIANT_NAMES:
        c = computed.get(v)
        p = printed.get(v)
        if c is None and p is None:
            continue
        ct = str(c) if c is not None else "0"
        pt = str(parse(p, INVARIANT)) if p is not None else "0"
        out.append(ComponentCheck(name, v, ct, pt))
    for v, p in DERIVATION_DUPLICATES.get(name, []):
        c = computed.get(v)
        out.append(ComponentCheck(name, v, str(c) if c is not None else "0", str(parse(p, INVARIANT))))
    return out
