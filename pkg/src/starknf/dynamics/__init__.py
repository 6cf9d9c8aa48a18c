"""Floating-point evaluation, integration and numerical oracles."""

from .constants import CONSTANTS, PI
from .evaluate import CompiledPolynomial, UnboundVariableError, compile_polynomial, compile_vector, eval_expression
from .experiments import LadderResult, compare_normalform, normal_form_prediction
from .flows import (
    FULL_OBSERVABLES,
    REDUCED_OBSERVABLES,
    Params,
    Trajectory,
    integrate_full,
    integrate_reduced,
    sample_initial_state,
    sample_sphere_point,
)
from .integrators import METHODS, IntegrationError, IntegratorConfig, gauss_tableau, integrate
from .oracles import (
    compare_average,
    ks_identity_residual,
    ks_preimage,
    numeric_average_oracle,
    verify_preregularization,
)

__all__ = [
    "CONSTANTS", "PI",
    "CompiledPolynomial", "UnboundVariableError", "compile_polynomial", "compile_vector", "eval_expression",
    "LadderResult", "compare_normalform", "normal_form_prediction",
    "FULL_OBSERVABLES", "REDUCED_OBSERVABLES", "Params", "Trajectory", "integrate_full", "integrate_reduced",
    "sample_initial_state", "sample_sphere_point",
    "METHODS", "IntegrationError", "IntegratorConfig", "gauss_tableau", "integrate",
    "compare_average", "ks_identity_residual", "ks_preimage", "numeric_average_oracle", "verify_preregularization",
]
