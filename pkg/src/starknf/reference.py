"""Printed reference values that the pipeline is compared against.

Each entry is a polynomial in the text grammar over the invariant space
(or the sigma space for the reduced Hamiltonian).  Entries are checkpoints,
never inputs: every value used downstream is recomputed.  ``W1`` and ``W4``
in the descriptions abbreviate ``U1^2 + V1^2`` and ``U4^2 + V4^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .exact.polynomial import Polynomial, parse
from .exact.space import INVARIANT, SIGMA, VariableSpace

__all__ = [
    "ReferenceValue", "REFERENCE", "reference", "DERIVATION_DISPLAYS", "DERIVATION_DUPLICATES",
    "K3_AVERAGES", "H2_SQUARE_AVERAGES", "SPHERE_RELATIONS", "ZK3_EQUATIONS", "ZK3_FLOW_DISPLAY",
    "PRINTED_SIGMA",
]


@dataclass(frozen=True)
class ReferenceValue:
    key: str
    anchor: str
    text: str
    space_name: str = "invariant"

    @property
    def space(self) -> VariableSpace:
        return SIGMA if self.space_name == "sigma" else INVARIANT

    @property
    def value(self) -> Polynomial:
        return parse(self.text, self.space)


_W1 = "(U1^2 + V1^2)"
_ENTRIES = [
    # first order
    ("nf1.avg_H2U4_K3V1", "first-order average of H2*U4 - K3*V1", "0"),
    ("nf1.avg_U4V1", "first-order average of U4*V1", "1/2*U4*V1 - 1/2*U1*V4"),
    ("nf1.avg_U4V1_onshell", "first-order average of U4*V1 on Xi = 0", "-1/2*H2*K3"),
    ("nf1.avg_P", "first-order average of the perturbation", "-3/2*H2*K3"),
    ("nf1.normal_form", "first-order normal form", "H2 - 3/2*eps*beta*H2*K3"),
    # generating function
    ("gen.rhs", "homological right-hand side",
     "-beta*U4*V1 - 1/2*beta*H2*K3 - beta*H2*U4 + beta*K3*V1"),
    ("gen.F1", "first generator piece with pi-terms",
     "1/8*beta*U1*U4 - 1/8*beta*V1*V4 + 1/4*pi*beta*U4*V1 - 1/4*pi*beta*U1*V4 + 1/4*pi*beta*H2*K3"),
    ("gen.F1_onshell", "first generator piece on Xi = 0", "1/8*beta*U1*U4 - 1/8*beta*V1*V4"),
    ("gen.F2", "second generator piece", "-1/2*beta*H2*V4 - 1/2*beta*K3*U1"),
    ("gen.F", "generating function on Xi = 0",
     "1/8*beta*U1*U4 - 1/8*beta*V1*V4 - 1/2*beta*H2*V4 - 1/2*beta*K3*U1"),
    ("gen.LH2_F2", "H2-derivative of the second generator piece", "beta*H2*U4 - beta*K3*V1"),
    ("gen.LH2_F", "H2-derivative of the generating function",
     "1/2*beta*U4*V1 + 1/2*beta*U1*V4 + beta*H2*U4 - beta*K3*V1"),
    ("gen.LK3_F", "K3-derivative of the generating function",
     "-1/4*beta*U4^2 + 1/4*beta*U1^2 + 1/4*beta*V4^2 - 1/4*beta*V1^2 - beta*H2*V1 + beta*K3*U4"),
    ("gen.LU4_F", "U4-derivative of the generating function",
     "beta*V4^2 + beta*K3^2 - 1/4*beta*K3*U4 + 1/4*beta*H2*V1 + beta*H2^2"),
    ("gen.LV1_F", "V1-derivative of the generating function", "-beta*U2*V2 - 1/4*beta*U4*V1"),
    # time-weighted integrals
    ("tw.t_sin4t", "time-weighted mean of sin 4t", "-1/4"),
    ("tw.t_cos2_2t", "time-weighted mean of cos^2 2t", "1/4*pi"),
    ("tw.t_sin2_2t", "time-weighted mean of sin^2 2t", "1/4*pi"),
    # second-order audit, each already carrying its sign and prefactor
    ("audit.1", "average of beta*(L_{U4} F)*V1",
     "1/8*beta^2*H2*K3^2 + 1/8*beta^2*H2*U1^2 + 1/8*beta^2*H2*V1^2"),
    ("audit.2", "average of beta*U4*(L_{V1} F)", "0"),
    ("audit.3", "average of -beta/2*(L_F H2)*K3", "0"),
    ("audit.4", "average of beta/2*H2*(L_{K3} F)", "0"),
    ("audit.5", "average of -beta*(L_F H2)*U4",
     "1/2*beta^2*H2*U4^2 + 1/2*beta^2*H2*V4^2 + 1/2*beta^2*K3*U4*V1 - 1/2*beta^2*K3*U1*V4"),
    ("audit.6", "average of beta*H2*(L_{U4} F)",
     "1/2*beta^2*H2*U4^2 + 1/2*beta^2*H2*V4^2 + beta^2*H2*K3^2 + beta^2*H2^3"),
    ("audit.7", "average of -beta*(L_{K3} F)*V1",
     "1/2*beta^2*H2*U1^2 + 1/2*beta^2*H2*V1^2 + 1/2*beta^2*K3*U4*V1 - 1/2*beta^2*K3*U1*V4"),
    ("audit.8", "average of -beta*K3*(L_{V1} F)", "1/4*beta^2*K3*U4*V1 - 1/4*beta^2*K3*U1*V4"),
    ("nf2.avg_first_piece", "average of -3/2*beta*L_F(H2*K3)", "0"),
    ("nf2.bracket_total", "average of L_F^2 H2",
     "9/8*beta^2*H2*K3^2 + beta^2*H2^3 + 5/8*beta^2*H2*U1^2 + 5/8*beta^2*H2*V1^2"
     " + beta^2*H2*U4^2 + beta^2*H2*V4^2 + 5/4*beta^2*K3*U4*V1 - 5/4*beta^2*K3*U1*V4"),
    ("nf2.normal_form", "second-order normal form",
     "H2 - 3/2*eps*beta*H2*K3 - 9/16*eps^2*beta^2*H2*K3^2 - 1/2*eps^2*beta^2*H2^3"
     " - 5/16*eps^2*beta^2*H2*U1^2 - 5/16*eps^2*beta^2*H2*V1^2 - 1/2*eps^2*beta^2*H2*U4^2"
     " - 1/2*eps^2*beta^2*H2*V4^2 - 5/8*eps^2*beta^2*K3*U4*V1 + 5/8*eps^2*beta^2*K3*U1*V4"),
    # second stage
    ("stage2.restricted", "second-order normal form on the level set, constant dropped",
     "-3/2*eps*beta*h*K3 - 9/16*eps^2*beta^2*K3^2 - 5/16*eps^2*beta^2*U1^2 - 5/16*eps^2*beta^2*V1^2"
     " - 1/2*eps^2*beta^2*h*U4^2 - 1/2*eps^2*beta^2*h*V4^2 - 1/2*eps^2*beta^2*K3*U4*V1"
     " + 1/2*eps^2*beta^2*K3*U1*V4"),
    ("stage2.dropped_constant", "constant dropped on the level set", "h - 1/2*eps^2*beta^2*h^3"),
    ("stage2.rescaled", "rescaled Hamiltonian on the level set",
     "h*K3 + 3/8*eps*beta*K3^2 + 5/24*eps*beta*U1^2 + 5/24*eps*beta*V1^2"
     " + 1/3*eps*beta*K3*U4*V1 - 1/3*eps*beta*K3*U1*V4"),
    ("stage2.T", "term averaged over the K3 flow",
     "9/8*K3^2 + 5/8*U1^2 + 5/8*V1^2 + h*U4^2 + h*V4^2 + K3*U4*V1 - K3*U1*V4"),
    ("stage2.T_bar", "K3-average of the term",
     "9/8*K3^2 - h*K3^2 + 13/16*h*U1^2 + 13/16*h*V1^2 + 13/16*h*U4^2 + 13/16*h*V4^2"),
    ("stage2.normal_form", "second normal form",
     "h*K3 + 3/8*eps*beta*K3^2 - 1/3*eps*beta*h*K3^2 + 13/48*eps*beta*U1^2 + 13/48*eps*beta*V1^2"
     " + 13/48*eps*beta*U2^2 + 13/48*eps*beta*V2^2"),
    ("sphere.hamiltonian", "normal form on the product of spheres",
     "h*K3 + 3/8*eps*beta*K3^2 - 1/16*eps*beta*h*K3^2 + 13/48*eps*beta*h^3 - 13/48*eps*beta*h*L3^2"),
]

_SIGMA_ENTRIES = [
    ("reduced.hamiltonian", "reduced one-degree-of-freedom Hamiltonian", "-13/12*eps*beta*sigma6^2"),
    ("reduced.dropped_constant", "constant dropped from the reduced Hamiltonian",
     "h*k + 3/8*eps*beta*k^2 - 1/16*eps*beta*h*k^2 + 13/48*eps*beta*h^3"),
]

REFERENCE: dict[str, ReferenceValue] = {k: ReferenceValue(k, a, t) for k, a, t in _ENTRIES}
REFERENCE.update({k: ReferenceValue(k, a, t, "sigma") for k, a, t in _SIGMA_ENTRIES})


@lru_cache(maxsize=None)
def reference(key: str) -> Polynomial:
    return REFERENCE[key].value


# Printed derivations: generator -> {variable: component}
DERIVATION_DISPLAYS: dict[str, dict[str, str]] = {
    "H2": {"U1": "2*V1", "U2": "2*V2", "U3": "2*V3", "U4": "2*V4",
           "V1": "-2*U1", "V2": "-2*U2", "V3": "-2*U3", "V4": "-2*U4"},
    "K3": {"K1": "-2*L2", "K2": "2*L1", "L1": "-2*K2", "L2": "2*K1",
           "U1": "-2*U4", "U4": "2*U1", "V1": "-2*V4", "V4": "2*V1"},
    "U4": {"K1": "-2*U1", "L1": "-2*U3", "L2": "2*U3", "H2": "-2*V4",
           "U1": "-2*K3", "U2": "2*L2", "U3": "2*V3", "V4": "-2*H2"},
    "V1": {"K1": "-2*V2", "L2": "2*V2", "H2": "2*U2",
           "U2": "2*H2", "V2": "2*K1", "V3": "2*K2", "V4": "2*U4"},
}
# the V1 display lists d/dL2 twice, once with -2*V1; both are kept
DERIVATION_DUPLICATES: dict[str, list[tuple[str, str]]] = {"V1": [("L2", "-2*V1")]}

# Printed averages along the K3 flow
K3_AVERAGES: dict[str, str] = {
    "U1^2": "1/2*U1^2 + 1/2*U4^2",
    "U4^2": "1/2*U1^2 + 1/2*U4^2",
    "V1^2": "1/2*V1^2 + 1/2*V4^2",
    "V4^2": "1/2*V1^2 + 1/2*V4^2",
}

# Printed averages along the H2 flow used inside the K3-derivative step
H2_SQUARE_AVERAGES: dict[str, str] = {
    "U1^2": "1/2*U1^2 + 1/2*V1^2",
    "V1^2": "1/2*U1^2 + 1/2*V1^2",
    "U4^2": "1/2*U4^2 + 1/2*V4^2",
    "V4^2": "1/2*U4^2 + 1/2*V4^2",
}

# Sphere identities on the level set (left = right)
SPHERE_RELATIONS: list[tuple[str, str]] = [
    ("U2*V1 - U1*V2", "-h*K1"),
    ("U3*V1 - U1*V3", "-h*K2"),
    ("U4*V1 - U2*V4", "-h*K3"),
    ("U4*V3 - U3*V4", "-h*L1"),
    ("U4*V2 - U2*V4", "h*L2"),
    ("U4*V1 - U1*V4", "-h*K3"),
    ("U1^2 + V1^2", "K1^2 + K2^2 + K3^2"),
    ("U4^2 + V4^2", "L1^2 + L2^2 + K3^2"),
    ("U1^2 + V1^2 + U4^2 + V4^2", "K1^2 + K2^2 + 2*K3^2 + L1^2 + L2^2"),
    ("K1^2 + K2^2 + K3^2 + L1^2 + L2^2 + L3^2", "h"),
    ("K1*L1 + K2*L2 + K3*L3", "0"),
]

# Equations of motion of the K3 = (xi3 + eta3)/2 flow on (xi, eta), as printed
ZK3_EQUATIONS: dict[str, str] = {
    "xi1": "-1/2*xi2", "xi2": "1/2*xi1", "xi3": "0",
    "eta1": "1/2*eta2", "eta2": "-1/2*eta1", "eta3": "0",
}
# Printed closed-form flow at frequency 1/2: variable -> (cos part, sin part)
ZK3_FLOW_DISPLAY: dict[str, tuple[str, str]] = {
    "xi1": ("xi1", "-xi2"), "xi2": ("xi2", "xi1"), "xi3": ("xi3", "0"),
    "eta1": ("eta1", "eta2"), "eta2": ("-eta2", "eta1"), "eta3": ("eta3", "0"),
}

# Printed K3-invariants on (xi, eta)
PRINTED_SIGMA: dict[str, str] = {
    "sigma1": "xi1^2 + xi2^2", "sigma2": "eta1^2 + eta2^2",
    "sigma3": "xi1*eta2 - xi2*eta1", "sigma4": "xi1*eta1 + xi2*eta2",
    "sigma5": "1/2*xi3 + 1/2*eta3", "sigma6": "1/2*xi3 - 1/2*eta3",
}
