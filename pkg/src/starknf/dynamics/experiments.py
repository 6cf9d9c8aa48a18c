"""Dynamical check of the first-order normal form.

For each eps the full flow is compared with the prediction

    x(t) ~ phi^F_{eps}( phi^{N1}_t( phi^F_{-eps}(x0) ) ),

where ``F`` is the generating function, ``phi^F`` its canonical flow and
``N1`` the first-order normal form.  On ``Xi = 0`` both K3 and L3 Poisson
commute with the normal form through second order, so their deviation on
slow times ``eps*t <= s`` should scale like ``eps^2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ..exact.space import CANONICAL
from ..invariants import canonical_generators, expand
from .evaluate import compile_vector
from .flows import Params, hamiltonian_vector_field, integrate_full, sample_initial_state
from .integrators import IntegratorConfig, integrate

__all__ = ["LadderResult", "compare_normalform", "transform", "normal_form_prediction"]


@lru_cache(maxsize=32)
def _generator_field(beta: float):
    from ..averaging.normalform import solve_F

    return hamiltonian_vector_field(expand(solve_F().F_onshell), {"beta": beta, "eps": 0.0})


@lru_cache(maxsize=32)
def _nf1_field(eps: float, beta: float):
    from ..averaging.normalform import normalize_first_order

    return hamiltonian_vector_field(expand(normalize_first_order().normal_form), {"eps": eps, "beta": beta})


@lru_cache(maxsize=None)
def _slow_observables():
    g = canonical_generators()
    f = compile_vector([g["K3"], g["L3"], g["H2"]], CANONICAL.variables)
    return lambda Y: f(*Y.T)


def transform(points: np.ndarray, time: float, beta: float, cfg: IntegratorConfig) -> np.ndarray:
    """Move every row of ``points`` along the canonical flow of F for the given time."""
    f = _generator_field(beta)
    pts = np.atleast_2d(points)
    n = len(pts)
    if time == 0:
        return pts.copy()
    sol = solve_ivp(lambda t, y: f(y.reshape(8, n)).ravel(), (0.0, time), pts.T.ravel(),
                    method="DOP853", rtol=cfg.rtol, atol=cfg.atol)
    if sol.status != 0:
        raise RuntimeError(f"generator flow failed: {sol.message}")
    return sol.y[:, -1].reshape(8, n).T


def normal_form_prediction(params: Params, x0, t_end: float, n_out: int, cfg: IntegratorConfig):
    y0 = transform(np.asarray(x0, float), -params.eps, params.beta, cfg)[0]
    t, ys = integrate(_nf1_field(params.eps, params.beta), y0, t_end, n_out, cfg)
    return t, transform(ys, params.eps, params.beta, cfg)


@dataclass
class LadderResult:
    eps: list[float]
    slow_time: float
    deviation: list[float]
    deviation_K3: list[float]
    deviation_L3: list[float]
    H2_oscillation: list[float]
    ratios: list[float]
    order: float
    runs: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def compare_normalform(eps_ladder: Sequence[float] = (4e-3, 2e-3, 1e-3), beta: float = 1.0, h: float = 1.0,
                       slow_time: float = 1.0, seed: int = 0, cfg: IntegratorConfig | None = None,
                       samples_per_unit: float = 20.0) -> LadderResult:
    """Deviation of K3 and L3 from the normal-form prediction over ``eps*t <= slow_time``.

    ``ratios[i]`` is ``deviation[i] / deviation[i+1]``; ``order`` is the
    least-squares slope of log deviation against log eps.
    """
    if len(eps_ladder) < 2:
        raise ValueError("the eps ladder needs at least two values")
    cfg = cfg or IntegratorConfig()
    x0 = sample_initial_state(seed, h)
    obs = _slow_observables()
    devs, dK, dL, osc, runs = [], [], [], [], []
    for eps in eps_ladder:
        p = Params(eps, beta, h)
        t_end = slow_time / eps if eps > 0 else slow_time
        n_out = max(1, int(math.ceil(t_end * samples_per_unit)))
        full = integrate_full(p, x0, t_end, cfg, n_out)
        _, pred = normal_form_prediction(p, x0, t_end, n_out, cfg)
        a, b = obs(full.states), obs(pred)
        k3 = float(np.max(np.abs(a[0] - b[0])))
        l3 = float(np.max(np.abs(a[1] - b[1])))
        dK.append(k3)
        dL.append(l3)
        devs.append(max(k3, l3))
        osc.append(float(np.max(a[2]) - np.min(a[2])))
        runs.append({"eps": eps, "t_end": t_end, "samples": n_out + 1, "energy_drift": full.drift("H", True)})
    ratios = [devs[i] / devs[i + 1] for i in range(len(devs) - 1)]
    le, ld = np.log(np.asarray(eps_ladder, float)), np.log(np.asarray(devs))
    order = float(np.polyfit(le, ld, 1)[0])
    return LadderResult(list(eps_ladder), slow_time, devs, dK, dL, osc, ratios, order, runs)
