"""Floating-point oracles for the exact computations.

* quadrature of an observable along a closed-form periodic flow, compared
  with the exact average;
* the pointwise identity between the preregularized Hamiltonian composed
  with the KS map and the regularized Hamiltonian;
* the chain from the Stark Hamiltonian on a negative energy level to the
  preregularized Hamiltonian on its level 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..averaging.trig import FlowSpec, average
from ..exact.polynomial import Polynomial
from ..exact.sampling import ExactPoint
from ..exact.space import CANONICAL
from ..invariants import canonical_generators, expand, ks_map, regularized_hamiltonian
from .constants import CONSTANTS
from .evaluate import compile_polynomial, compile_vector, eval_expression

__all__ = [
    "flow_matrix",
    "numeric_average_oracle",
    "OracleComparison",
    "compare_average",
    "invariant_point",
    "preregularized",
    "ks_image",
    "ks_identity_residual",
    "ks_preimage",
    "PreregularizationReport",
    "verify_preregularization",
]


def flow_matrix(spec: FlowSpec) -> np.ndarray:
    names = spec.space.variables
    M = np.zeros((len(names), len(names)))
    for i, row in spec.rows.items():
        for j, v in row.items():
            M[names.index(i), names.index(j)] = float(v)
    return M


@lru_cache(maxsize=None)
def _quadrature(panels: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for k in range(panels):
        xs.append((k + (x + 1) / 2) / panels)
        ws.append(w / (2 * panels))
    return np.concatenate(xs), np.concatenate(ws)


def numeric_average_oracle(f: Polynomial, spec: FlowSpec, point: dict[str, float],
                           panels: int | None = None, nodes: int | None = None) -> float:
    """``(1/T) int_0^T f(phi_t(x)) dt`` by composite Gauss quadrature.

    The flow is evaluated in closed form,
    ``x(t) = x + sin(wt)/w M x + (1 - cos(wt))/w^2 M^2 x``.
    ``point`` binds the variables of the flow's space and any parameters of ``f``.
    """
    panels = panels or CONSTANTS["quad_panels"]
    nodes = nodes or CONSTANTS["quad_nodes"]
    names = spec.space.variables
    x = np.array([float(point[n]) for n in names])
    M = flow_matrix(spec)
    w = float(spec.omega)
    T = 2 * math.pi / w
    s, wt = _quadrature(panels, nodes)
    t = s * T
    Mx, M2x = M @ x, M @ (M @ x)
    X = x[:, None] + np.outer(Mx, np.sin(w * t) / w) + np.outer(M2x, (1 - np.cos(w * t)) / (w * w))
    params = sorted(f.free_symbols() & set(spec.space.parameters))
    cp = compile_polynomial(f, names, {p: float(point[p]) for p in params})
    vals = cp(*X)
    return float(np.sum(wt * vals))


def invariant_point(pt: ExactPoint, **params) -> dict[str, float]:
    """Values of the invariant generators at a canonical point, plus parameters."""
    d = pt.as_dict()
    out = {n: float(g.evaluate(d).rational()) for n, g in canonical_generators().items()}
    out.update({k: float(v) for k, v in params.items()})
    return out


@dataclass(frozen=True)
class OracleComparison:
    observable: str
    quadrature: float
    exact: float

    @property
    def error(self) -> float:
        return abs(self.quadrature - self.exact)


def compare_average(f: Polynomial, spec: FlowSpec, point: dict[str, float], label: str = "") -> OracleComparison:
    exact = average(f, spec)
    used = exact.free_symbols()
    ev = eval_expression(exact, {n: point[n] for n in used}) if used else exact.constant_term().to_float()
    return OracleComparison(label or str(f), numeric_average_oracle(f, spec, point), float(ev))


# -- KS identity -----------------------------------------------------------------


def preregularized(x: np.ndarray, y: np.ndarray, eps: float, beta: float, literal: bool = False) -> float:
    """``1/2 |x| (<y,y> + 1) + eps*beta*x3*|x|``; with ``literal`` the ``+1`` reads ``+|x|``."""
    r = float(np.linalg.norm(x))
    tail = r if literal else 1.0
    return 0.5 * r * (float(y @ y) + tail) + eps * beta * float(x[2]) * r


@lru_cache(maxsize=None)
def _ks_compiled():
    ks = ks_map()
    return compile_vector([*ks.x, *ks.y_num, ks.qq], CANONICAL.variables)


def ks_image(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v = _ks_compiled()(*z)
    return v[:3], v[3:6] / v[6]


@lru_cache(maxsize=32)
def _H(eps: float, beta: float):
    return compile_polynomial(expand(regularized_hamiltonian()), CANONICAL.variables, {"eps": eps, "beta": beta})


def ks_identity_residual(z: np.ndarray, eps: float, beta: float, literal: bool = False) -> float:
    """``Kpre(KS(q, p)) - H(q, p)`` at a point with ``Xi = 0``."""
    x, y = ks_image(np.asarray(z, dtype=float))
    return preregularized(x, y, eps, beta, literal) - _H(eps, beta)(*z)


def ks_preimage(x, y) -> np.ndarray:
    """A point ``(q, p)`` with ``Xi = 0`` mapping to ``(x, y)`` under KS."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    r = float(np.linalg.norm(x))
    if r == 0:
        raise ValueError("x = 0 has no KS preimage in T_0 R^4")
    if x[2] >= 0:
        q1 = math.sqrt((r + x[2]) / 2)
        q = np.array([q1, 0.0, x[0] / (2 * q1), x[1] / (2 * q1)])
    else:
        q3 = math.sqrt((r - x[2]) / 2)
        q = np.array([x[0] / (2 * q3), -x[1] / (2 * q3), q3, 0.0])
    q1, q2, q3, q4 = q
    # rows: numerators of y1, y2, y3 and Xi, linear in p
    A = np.array([
        [q3, q4, q1, q2],
        [q4, -q3, -q2, q1],
        [q1, q2, -q3, -q4],
        [-q2, q1, -q4, q3],
    ])
    rhs = np.concatenate([r * y, [0.0]])
    p = np.linalg.solve(A, rhs)
    return np.concatenate([q, p])


# -- preregularization chain -----------------------------------------------------------------


@dataclass
class PreregularizationReport:
    values: dict[str, float] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def verify_preregularization(x, y, eps: float = 0.0, beta: float = 1.0, k: float | None = None,
                             tol: float = CONSTANTS["ks_identity"]) -> PreregularizationReport:
    """Follow a point on ``K = -k^2/2`` through time rescaling, scaling and KS.

    The energy-level form of the Stark Hamiltonian is multiplied by
    ``|x|/k`` to give ``Khat = |x| (<y,y> + k^2)/(2k) + f x3 |x|/k = 1/k``.
    With ``X = k^2 x``, ``Y = y/k`` (a conformal rescaling) ``k * Khat``
    becomes ``Kpre(X, Y)`` with field ``f/k^4``, on its level 1.  For
    ``k = 1`` every rescaling is the identity.  Finally
    ``Kpre(X, Y) = H(q, p)`` for a KS preimage with Xi = 0.
    """
    x, y = np.asarray(x, float), np.asarray(y, float)
    r = float(np.linalg.norm(x))
    if r == 0:
        raise ValueError("|x| = 0: the Stark Hamiltonian is singular")
    f = eps * beta
    K = 0.5 * float(y @ y) - 1 / r + f * x[2]
    if k is None:
        if K >= 0:
            raise ValueError("the point is not on a negative energy level")
        k = math.sqrt(-2 * K)
    rep = PreregularizationReport()
    rep.values.update({"K": K, "k": k})
    rep.checks["on level -k^2/2"] = bool(abs(K + 0.5 * k * k) <= tol)
    rescaled = (r * float(y @ y) + k * k * r) / (2 * k) - 1 / k + f * x[2] * r / k
    rep.values["rescaled_energy_equation"] = rescaled
    rep.checks["rescaled energy equation vanishes"] = bool(abs(rescaled) <= tol)
    khat = r * (float(y @ y) + k * k) / (2 * k) + f * x[2] * r / k
    khat_printed = r * (float(y @ y) + k * k * r) / (2 * k) + f * x[2] * r / k
    rep.values.update({"Khat": khat, "Khat_printed": khat_printed})
    rep.checks["Khat = 1/k"] = bool(abs(khat - 1 / k) <= tol)
    X, Y = k * k * x, y / k
    eps_eff = eps / k ** 4
    kpre = preregularized(X, Y, eps_eff, beta)
    rep.values["Kpre"] = kpre
    rep.checks["Kpre = 1 at the scaled point"] = bool(abs(kpre - 1) <= tol)
    rep.values["Kpre_literal"] = preregularized(X, Y, eps_eff, beta, literal=True)
    z = ks_preimage(X, Y)
    Xb, Yb = ks_image(z)
    rep.checks["KS preimage maps back"] = bool(np.max(np.abs(np.concatenate([Xb - X, Yb - Y]))) <= tol * 10)
    xi = eval_expression(canonical_generators()["Xi"], dict(zip(CANONICAL.variables, z)))
    rep.values["Xi"] = xi
    rep.checks["preimage has Xi = 0"] = bool(abs(xi) <= tol)
    Hv = _H(eps_eff, beta)(*z)
    rep.values["H"] = Hv
    rep.checks["H(q, p) = Kpre(x, y)"] = bool(abs(Hv - kpre) <= tol * max(1.0, abs(kpre)))
    return rep
