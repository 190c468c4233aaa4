"""Counting (g, k; lambda)-difference matrices over Z_g.

Exact enumeration, Monte Carlo, the asymptotic main term and rigorous
two-sided bounds, all built on the lattice random walk whose return
probability equals the normalised count.
"""
from .bounds import (
    asymptotic_count_log,
    complex_power_bounds,
    gaussian_sandwich,
    growth_check,
    lu_factors,
    probability_bounds,
    taylor_bounds_check,
)
from .charfn import apply_sqrt, det_m, exact_moments, phi, quad_form
from .errors import BudgetError, DiffmatError, DomainError, IntegrityError
from .exact import count, count_brute, count_dft, exact_return_probability, parity_obstruction
from .lattice import (
    building_block,
    classify_region,
    enumerate_lambda0,
    expand_lattice,
    lambda_membership,
    structure_defects,
)
from .params import Params, coord_of, flat_index, make_params
from .quad import QuadratureSpec, integrate_box_gaussian, integrate_box_phi, sandwich_report
from .walk import enumerate_columns, mc_return_probability, z_map

__all__ = [
    "Params", "make_params", "flat_index", "coord_of",
    "z_map", "enumerate_columns", "mc_return_probability",
    "phi", "quad_form", "det_m", "exact_moments", "apply_sqrt",
    "building_block", "expand_lattice", "enumerate_lambda0", "lambda_membership",
    "classify_region", "structure_defects",
    "count", "count_brute", "count_dft", "exact_return_probability", "parity_obstruction",
    "asymptotic_count_log", "lu_factors", "probability_bounds", "complex_power_bounds",
    "gaussian_sandwich", "taylor_bounds_check", "growth_check",
    "QuadratureSpec", "integrate_box_phi", "integrate_box_gaussian", "sandwich_report",
    "DiffmatError", "DomainError", "BudgetError", "IntegrityError",
]
