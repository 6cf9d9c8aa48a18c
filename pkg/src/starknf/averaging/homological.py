"""Solving ``L_Y F = g - mean(g)`` along a periodic linear flow."""

from __future__ import annotations

from dataclasses import dataclass

from ..exact.polynomial import Polynomial
from .trig import FlowSpec, flow_pullback

__all__ = ["HomologicalSolution", "homological_solve", "fourier_mode_solve", "HomologicalResidualError", "lie_along"]


class HomologicalResidualError(AssertionError):
    pass


def lie_along(spec: FlowSpec, f: Polynomial) -> Polynomial:
    """Derivative of ``f`` along the flow: ``sum_i (M x)_i df/dx_i``."""
    out = Polynomial.zero(spec.space)
    for i, row in spec.rows.items():
        d = f.diff(i)
        if d.is_zero():
            continue
        vi = Polynomial.zero(spec.space)
        for j, v in row.items():
            vi = vi + Polynomial.variable(spec.space, j).scale(v)
        out = out + d * vi
    return out


@dataclass(frozen=True)
class HomologicalSolution:
    F: Polynomial
    mean: Polynomial
    mode_part: Polynomial


def homological_solve(g: Polynomial, spec: FlowSpec) -> HomologicalSolution:
    """Time-weighted solution ``F = (1/T) int_0^T t phi_t^* g dt``.

    The derivation identity ``L_Y F = g - mean(g)`` is checked exactly, and
    the result is compared with the Fourier-mode solution, which must differ
    from it by exactly ``(T/2) * mean(g)``.
    """
    tp = flow_pullback(g, spec)
    mean = tp.mean()
    F = tp.time_weighted()
    modes = tp.mode_solution()
    if not (lie_along(spec, F) - (g - mean)).is_zero():
        raise HomologicalResidualError("time-weighted solution fails L_Y F = g - mean(g)")
    half_period = spec.period / 2
    if not (F - modes - mean.scale(half_period)).is_zero():
        raise HomologicalResidualError("time-weighted and Fourier-mode solutions disagree")
    return HomologicalSolution(F, mean, modes)


def fourier_mode_solve(g: Polynomial, spec: FlowSpec) -> Polynomial:
    """Zero-mean solution obtained by dividing each Fourier mode by its frequency."""
    F = flow_pullback(g, spec).mode_solution()
    tp = flow_pullback(g, spec)
    if not (lie_along(spec, F) - (g - tp.mean())).is_zero():
        raise HomologicalResidualError("Fourier-mode solution fails L_Y F = g - mean(g)")
    return F
