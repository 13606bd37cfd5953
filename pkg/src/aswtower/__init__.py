"""Artin-Schreier-Witt towers with minimal break ratios: a-number formulas,
explicit Cartier operators, T-module checks and T-adic Newton polygons."""
from .algebra import GF, FieldParams, Poly, TruncSeries, make_field, prime_field
from .cartier import ANumberResult, cartier_matrix, higher_anumbers, regular_basis
from .profile import (
    LambdaMode,
    TowerProfile,
    anumber_exact_r1,
    anumber_formula,
    count_delta,
    genus,
    mu,
    xi,
)
from .tower import SpecError, Tower, TowerError, TowerSpec, build_tower, table1_specs

__version__ = "0.1.0"

__all__ = [
    "GF", "FieldParams", "Poly", "TruncSeries", "make_field", "prime_field",
    "ANumberResult", "cartier_matrix", "higher_anumbers", "regular_basis",
    "LambdaMode", "TowerProfile", "anumber_exact_r1", "anumber_formula", "count_delta",
    "genus", "mu", "xi",
    "SpecError", "Tower", "TowerError", "TowerSpec", "build_tower", "table1_specs",
]
