"""Averaging along periodic linear flows and the normal-form pipeline."""

from .homological import HomologicalSolution, fourier_mode_solve, homological_solve, lie_along
from .trig import FlowSpec, FlowSpecError, TrigPolynomial, average, flow_pullback, time_weighted_average

__all__ = [
    "FlowSpec",
    "FlowSpecError",
    "TrigPolynomial",
    "average",
    "flow_pullback",
    "time_weighted_average",
    "HomologicalSolution",
    "homological_solve",
    "fourier_mode_solve",
    "lie_along",
]
