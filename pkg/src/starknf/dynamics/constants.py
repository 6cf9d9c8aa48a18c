"""Numerical constants and tolerances used by the floating-point layer.

All thresholds are chosen for this package; none is taken from an external
source.  Keeping them in one table makes every report quote the same values.
"""

from __future__ import annotations

import math
from types import MappingProxyType

PI = math.pi

CONSTANTS = MappingProxyType({
    "pi": PI,
    # default adaptive integrator
    "rtol": 1e-13,
    "atol": 1e-15,
    # fixed-step Gauss-Legendre cross-check
    "gauss_stages": 4,
    "gauss_step": 0.02,
    "gauss_iter_tol": 1e-15,
    "gauss_max_iter": 60,
    # acceptance thresholds
    "full_energy_drift": 1e-10,
    "full_xi_drift": 1e-12,
    "reduced_drift": 1e-10,
    "integrator_agreement": 1e-9,
    "time_reversal": 1e-9,
    "oracle_agreement": 1e-12,
    "ks_identity": 1e-12,
    "ratio_window": (3.2, 4.8),
    # quadrature
    "quad_panels": 8,
    "quad_nodes": 16,
})

__all__ = ["CONSTANTS", "PI"]
