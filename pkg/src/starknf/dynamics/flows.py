"""Numerical flows of the regularized Hamiltonian and of the sphere-level normal form."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..exact.polynomial import Polynomial
from ..exact.sampling import sample_variety_point
from ..exact.space import CANONICAL, XIETA
from ..invariants import canonical_generators, expand, regularized_hamiltonian
from .evaluate import compile_vector
from .integrators import IntegratorConfig, integrate

__all__ = [
    "Params",
    "Trajectory",
    "integrate_full",
    "integrate_reduced",
    "full_vector_field",
    "hamiltonian_vector_field",
    "sample_initial_state",
    "sample_sphere_point",
    "FULL_OBSERVABLES",
    "REDUCED_OBSERVABLES",
]

FULL_OBSERVABLES = ("H", "H2", "Xi", "K3", "L3", "U1", "U2", "U3", "U4", "V1", "V2", "V3", "V4")
REDUCED_OBSERVABLES = ("Hhat", "xi2", "eta2", "K3", "sigma1", "sigma2", "sigma3", "sigma4", "sigma5",
                       "sigma6", "relation")


@dataclass(frozen=True)
class Params:
    """``eps`` perturbation size, ``beta`` field factor (f = eps*beta), ``h`` level of H2, ``k`` level of K3."""

    eps: float
    beta: float = 1.0
    h: float = 1.0
    k: float = 0.0

    def __post_init__(self):
        vals = (self.eps, self.beta, self.h, self.k)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("parameters must be finite")
        if self.eps < 0 or self.h <= 0:
            raise ValueError("need eps >= 0 and h > 0")

    def fixed(self) -> dict[str, float]:
        return {"eps": self.eps, "beta": self.beta, "h": self.h}


@dataclass
class Trajectory:
    kind: str
    t: np.ndarray
    states: np.ndarray
    logs: dict[str, np.ndarray]
    params: Params
    config: IntegratorConfig
    notes: dict[str, float] = field(default_factory=dict)

    def drift(self, name: str, relative: bool = False) -> float:
        v = self.logs[name]
        d = float(np.max(np.abs(v - v[0])))
        if relative:
            d /= max(abs(float(v[0])), 1e-300)
        return d

    def max_abs(self, name: str) -> float:
        return float(np.max(np.abs(self.logs[name])))

    def write_csv(self, path: str) -> None:
        names = XIETA.variables if self.kind == "reduced" else CANONICAL.variables
        cols = list(self.logs)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", *names, *cols])
            for i, t in enumerate(self.t):
                w.writerow([repr(float(t)), *(repr(float(x)) for x in self.states[i]),
                            *(repr(float(self.logs[c][i])) for c in cols)])

    def summary(self) -> dict:
        out = {"kind": self.kind, "params": asdict(self.params), "config": asdict(self.config),
               "t_end": float(self.t[-1]), "samples": len(self.t)}
        out["drift"] = {n: self.drift(n) for n in self.logs}
        out.update(self.notes)
        return out


def hamiltonian_vector_field(H: Polynomial, fixed: dict[str, float]):
    """Canonical vector field ``q' = dH/dp``, ``p' = -dH/dq`` as a vectorized function."""
    comps = [H.diff(f"p{i}") for i in range(1, 5)] + [-H.diff(f"q{i}") for i in range(1, 5)]
    g = compile_vector(comps, CANONICAL.variables, fixed)
    return lambda y: g(*y)


@lru_cache(maxsize=32)
def full_vector_field(eps: float, beta: float):
    return hamiltonian_vector_field(expand(regularized_hamiltonian()), {"eps": eps, "beta": beta})


@lru_cache(maxsize=32)
def _full_observables(eps: float, beta: float):
    g = canonical_generators()
    polys = [expand(regularized_hamiltonian())] + [g[n] for n in FULL_OBSERVABLES[1:]]
    f = compile_vector(polys, CANONICAL.variables, {"eps": eps, "beta": beta})
    return lambda Y: dict(zip(FULL_OBSERVABLES, f(*Y.T)))


def sample_initial_state(seed: int, h=1) -> np.ndarray:
    """A rational point on ``Xi = 0``, ``H2 = h``, as floats.  A float ``h`` is read as its shortest decimal."""
    if isinstance(h, float):
        h = Fraction(repr(h))
    return np.array(sample_variety_point(seed, h).as_floats())


def integrate_full(params: Params, x0, t_end: float, cfg: IntegratorConfig | None = None,
                   n_out: int = 1000) -> Trajectory:
    """Integrate the canonical equations of the regularized Hamiltonian on R^8."""
    cfg = cfg or IntegratorConfig()
    f = full_vector_field(params.eps, params.beta)
    t, ys = integrate(f, x0, t_end, n_out, cfg)
    logs = _full_observables(params.eps, params.beta)(ys)
    return Trajectory("full", t, ys, logs, params, cfg)


# -- reduced flow on S^2 x S^2 ----------------------------------------------------


def sphere_hamiltonian(which: str = "computed") -> Polynomial:
    """Sphere-level normal form in K3, L3: recomputed (``computed``) or as printed (``printed``)."""
    if which == "computed":
        from ..reduction import reduced_hamiltonian

        return reduced_hamiltonian().sphere_form
    if which == "printed":
        from ..reference import reference

        return reference("sphere.hamiltonian")
    raise ValueError("hamiltonian must be 'computed' or 'printed'")


@lru_cache(maxsize=32)
def _reduced_system(eps: float, beta: float, h: float, which: str):
    from ..reduction import build_xi_eta_algebra, sigma_chart, to_xi_eta

    alg = build_xi_eta_algebra()
    H = to_xi_eta(sphere_hamiltonian(which))
    fixed = {"eps": eps, "beta": beta, "h": h, "k": 0.0}
    comps = [alg.bracket(Polynomial.variable(XIETA, n), H) for n in XIETA.variables]
    vf = compile_vector(comps, XIETA.variables, fixed)
    chart = sigma_chart()
    xi2, eta2 = alg.casimirs()
    sig = [chart.sigma[f"sigma{i}"] for i in range(1, 7)]
    # relation: sigma3^2 + sigma4^2 - (h^2 - (s5+s6)^2)(h^2 - (s5-s6)^2), pulled back
    rel = chart.pullback(chart.eliminated)
    obs = compile_vector([H, xi2, eta2, sig[4], *sig, rel], XIETA.variables, fixed)
    return (lambda y: vf(*y)), (lambda Y: dict(zip(REDUCED_OBSERVABLES, obs(*Y.T))))


def sample_sphere_point(seed: int, h: float = 1.0, k: float | None = None) -> np.ndarray:
    """Random ``(xi, eta)`` with ``|xi| = |eta| = h``; with ``k``, also ``(xi3 + eta3)/2 = k``."""
    rng = np.random.default_rng(seed)
    if k is None:
        a, b = rng.normal(size=3), rng.normal(size=3)
        return np.concatenate([h * a / np.linalg.norm(a), h * b / np.linalg.norm(b)])
    if abs(k) > h:
        raise ValueError(f"|k| = {abs(k)} exceeds h = {h}")
    # xi3 = k + d, eta3 = k - d with both in [-h, h]
    dmax = h - abs(k)
    d = rng.uniform(-dmax, dmax)
    out = []
    for z in (k + d, k - d):
        r = math.sqrt(max(h * h - z * z, 0.0))
        phi = rng.uniform(0, 2 * math.pi)
        out += [r * math.cos(phi), r * math.sin(phi), z]
    return np.array(out)


def integrate_reduced(params: Params, z0, t_end: float, cfg: IntegratorConfig | None = None,
                      n_out: int = 1000, hamiltonian: str = "computed", project: bool = False) -> Trajectory:
    """Integrate ``xi' = {xi, H}``, ``eta' = {eta, H}`` with the abstract two-sphere bracket.

    With ``project=True`` the state is pulled back onto the spheres after
    every output interval and the largest correction is logged.
    """
    cfg = cfg or IntegratorConfig()
    z0 = np.asarray(z0, dtype=float)
    h = params.h
    for part, name in ((z0[:3], "xi"), (z0[3:], "eta")):
        if abs(np.linalg.norm(part) - h) > 1e-12 * max(1.0, h):
            raise ValueError(f"|{name}0| differs from h by more than 1e-12")
    f, observe = _reduced_system(params.eps, params.beta, h, hamiltonian)
    if not project:
        t, ys = integrate(f, z0, t_end, n_out, cfg)
        notes = {"projection": 0.0}
    else:
        dt = t_end / n_out
        ys = [z0]
        worst = 0.0
        y = z0
        for _ in range(n_out):
            _, seg = integrate(f, y, dt, 1, cfg)
            y = seg[-1].copy()
            for sl in (slice(0, 3), slice(3, 6)):
                n = np.linalg.norm(y[sl])
                worst = max(worst, abs(n - h))
                y[sl] *= h / n
            ys.append(y)
        t, ys = np.linspace(0.0, t_end, n_out + 1), np.array(ys)
        notes = {"projection": worst}
    return Trajectory("reduced", t, ys, observe(ys), params, cfg, notes)
