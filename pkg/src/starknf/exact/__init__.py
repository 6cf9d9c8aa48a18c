"""Exact coefficients, sparse polynomials, brackets and ideal reduction."""

from .coefficient import PI, ExactCoefficient, as_fraction
from .ideal import IdealSpec, UnsupportedIdealError, groebner_basis, level_ideal, reduce_mod, xi_ideal
from .linalg import NotInSpanError, linear_combination, solve_exact
from .poisson import NotCanonicalError, PoissonStructure, derivation, poisson_bracket
from .polynomial import ParseError, Polynomial, const, gens, parse, var
from .sampling import DegenerateSampleError, ExactPoint, sample_variety_point, variety_points
from .space import CANONICAL, INVARIANT, INVARIANT_NAMES, SIGMA, XIETA, SpaceMismatchError, VariableSpace

__all__ = [
    "PI", "ExactCoefficient", "as_fraction",
    "IdealSpec", "UnsupportedIdealError", "groebner_basis", "level_ideal", "reduce_mod", "xi_ideal",
    "NotInSpanError", "linear_combination", "solve_exact",
    "NotCanonicalError", "PoissonStructure", "derivation", "poisson_bracket",
    "ParseError", "Polynomial", "const", "gens", "parse", "var",
    "DegenerateSampleError", "ExactPoint", "sample_variety_point", "variety_points",
    "CANONICAL", "INVARIANT", "INVARIANT_NAMES", "SIGMA", "XIETA", "SpaceMismatchError", "VariableSpace",
]
