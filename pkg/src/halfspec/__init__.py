"""Discrete spectra and eigenvalue sums of half-line Schrodinger operators
with complex integrable potentials: Jost functions, eigenvalue enumeration,
Lieb-Thirring and Jensen sums, and checks of the known explicit bounds."""

from .barrier import BarrierSpec, FixedPointSolution, enumerate_spectrum, solve_fixed_point
from .branchcuts import dist_to_halfline, im_sqrt_plus, sq_minus, sq_plus
from .jost import (
    JostEvaluation,
    jost_ode,
    jost_series,
    jost_transfer_matrix,
    jost_upper_bound,
    line_wronskian,
)
from .potentials import (
    SampledPotential,
    StepPotential,
    WeightPair,
    barrier,
    even_extension,
    l1_norm,
    poly_weight,
    shift_superpose,
    truncate,
    unit_weight,
    weighted_norm,
    zero_potential,
)
from .spectra import Eigenvalue, EnclosureReport, count_zeros_in_contour, enclosure, find_spectrum
from .sums import SumReport, SumSpec, eval_sum, sandwich_checks

__version__ = "0.1.0"

__all__ = [
    "BarrierSpec",
    "Eigenvalue",
    "EnclosureReport",
    "FixedPointSolution",
    "JostEvaluation",
    "SampledPotential",
    "StepPotential",
    "SumReport",
    "SumSpec",
    "WeightPair",
    "barrier",
    "count_zeros_in_contour",
    "dist_to_halfline",
    "enclosure",
    "enumerate_spectrum",
    "eval_sum",
    "even_extension",
    "find_spectrum",
    "im_sqrt_plus",
    "jost_ode",
    "jost_series",
    "jost_transfer_matrix",
    "jost_upper_bound",
    "l1_norm",
    "line_wronskian",
    "poly_weight",
    "sandwich_checks",
    "shift_superpose",
    "solve_fixed_point",
    "sq_minus",
    "sq_plus",
    "truncate",
    "unit_weight",
    "weighted_norm",
    "zero_potential",
]
