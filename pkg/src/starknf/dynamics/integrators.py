"""ODE integrators: scipy's DOP853 and a fixed-step Gauss-Legendre method.

The Gauss-Legendre collocation method is symmetric, so integrating forward
and then backward with the same step returns to the start up to round-off
and the stage-iteration tolerance.  It is written here so that the two
integrators share no code and can cross-check one another.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial as NpPoly
from numpy.polynomial import legendre
from scipy.integrate import solve_ivp

from .constants import CONSTANTS

__all__ = ["IntegratorConfig", "IntegrationError", "gauss_tableau", "integrate", "METHODS"]

METHODS = ("dop853", "gauss")


class IntegrationError(RuntimeError):
    """Integration failed; ``last_state`` holds the last finite state."""

    def __init__(self, msg: str, t: float, last_state: np.ndarray):
        super().__init__(f"{msg} at t = {t}")
        self.t = t
        self.last_state = last_state


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "dop853"
    rtol: float = CONSTANTS["rtol"]
    atol: float = CONSTANTS["atol"]
    step: float = CONSTANTS["gauss_step"]
    stages: int = CONSTANTS["gauss_stages"]
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not (self.rtol > 0 and self.atol > 0 and self.step > 0 and self.stages >= 1):
            raise ValueError("tolerances, step and stage count must be positive")


@lru_cache(maxsize=None)
def gauss_tableau(s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Butcher tableau ``(A, b, c)`` of the s-stage Gauss-Legendre method (order 2s)."""
    x, w = legendre.leggauss(s)
    c = (x + 1) / 2
    b = w / 2
    A = np.empty((s, s))
    for j in range(s):
        # Lagrange basis polynomial l_j on the nodes c
        lj = NpPoly([1.0])
        for m in range(s):
            if m != j:
                lj = lj * NpPoly([-c[m], 1.0]) / (c[j] - c[m])
        Lj = lj.integ()
        A[:, j] = Lj(c) - Lj(0.0)
    return A, b, c


def _gauss_step(f, y: np.ndarray, h: float, A, b, tol: float, max_iter: int) -> np.ndarray:
    s = len(b)
    K = np.repeat(f(y[:, None]), s, axis=1)
    prev = np.inf
    for _ in range(max_iter):
        Z = y[:, None] + h * K @ A.T
        Kn = f(Z)
        delta = np.max(np.abs(Kn - K))
        K = Kn
        scale = max(1.0, np.max(np.abs(K)))
        # converged, or stalled at round-off level
        if delta <= tol * scale or (delta >= prev and delta <= 1e-12 * scale):
            break
        prev = delta
    else:
        raise IntegrationError("Gauss stage iteration did not converge", 0.0, y)
    return y + h * K @ b


def _gauss(f, y0: np.ndarray, t_end: float, t_eval: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    A, b, _ = gauss_tableau(cfg.stages)
    tol, max_iter = CONSTANTS["gauss_iter_tol"], CONSTANTS["gauss_max_iter"]
    sign = 1.0 if t_end >= 0 else -1.0
    out = np.empty((len(t_eval), len(y0)))
    y = np.array(y0, dtype=float)
    t = 0.0
    k = 0
    # step exactly onto every requested output time
    for target in t_eval:
        span = abs(target - t)
        n = int(np.ceil(span / cfg.step - 1e-12)) if span > 0 else 0
        h = sign * span / n if n else 0.0
        for _ in range(n):
            try:
                y = _gauss_step(f, y, h, A, b, tol, max_iter)
            except IntegrationError as exc:
                raise IntegrationError(str(exc).split(" at t")[0], t, y) from None
            t += h
            if not np.all(np.isfinite(y)):
                raise IntegrationError("nonfinite state", t, out[k - 1] if k else y0)
        t = target
        out[k] = y
        k += 1
    return out


def integrate(f: Callable[[np.ndarray], np.ndarray], y0, t_end: float, n_out: int,
              cfg: IntegratorConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the autonomous system ``y' = f(y)`` from 0 to ``t_end``.

    ``f`` must accept a state of shape ``(n,)`` or a stage block ``(n, s)``.
    Returns ``n_out + 1`` equally spaced samples, both endpoints included.
    ``t_end`` may be negative.
    """
    cfg = cfg or IntegratorConfig()
    y0 = np.asarray(y0, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial state is not finite")
    t_eval = np.linspace(0.0, t_end, n_out + 1)
    if t_end == 0:
        return t_eval, np.repeat(y0[None, :], n_out + 1, axis=0)
    if cfg.method == "gauss":
        return t_eval, _gauss(f, y0, t_end, t_eval, cfg)
    sol = solve_ivp(lambda t, y: f(y), (0.0, t_end), y0, method="DOP853",
                    rtol=cfg.rtol, atol=cfg.atol, t_eval=t_eval)
    if sol.status != 0:
        last = sol.y[:, -1] if sol.y.size else y0
        raise IntegrationError(sol.message, float(sol.t[-1]) if sol.t.size else 0.0, last)
    ys = sol.y.T
    if not np.all(np.isfinite(ys)):
        raise IntegrationError("nonfinite state", float(sol.t[-1]), ys[np.isfinite(ys).all(axis=1)][-1])
    return t_eval, ys
