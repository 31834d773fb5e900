"""Consistent maps on places of Q and quadratic fields, and their functionals."""

from .arith_ext import AdditiveFunctionKind, build_extension, continuity_diagnostic, omega, psi
from .consistent import (
    ConsistentMap,
    LocalValue,
    Float,
    OverLogP,
    PlainRational,
    canonical_from_y,
    check_consistency_suite,
    evaluate_at,
    lambda_map,
    lambda_value,
    normalize_to_Jq,
    zero_map,
)
from .errors import CMapError
from .functional import (
    FunctionalSpec,
    build_map_from_functional,
    krational_check,
    nonarch_y,
    regulator_system,
    solve_arch_y,
    sqrt2_example,
    sqrt2_example_map,
    sunit_basis,
    sunit_decompose,
)
from .numerics import LogLinearNumber, rational_detect
from .phi import norm_compatibility_check, phi_eval, product_formula_check, zero_phi_classify
from .places import Place, ideal_generator_search, log_abs, places_above, valuation
from .quadfield import QQ, FieldElement, QuadField, fundamental_unit, make_field, parse_element

__version__ = "0.1.0"

__all__ = [
    "AdditiveFunctionKind",
    "CMapError",
    "ConsistentMap",
    "FieldElement",
    "Float",
    "FunctionalSpec",
    "LocalValue",
    "LogLinearNumber",
    "OverLogP",
    "Place",
    "PlainRational",
    "QQ",
    "QuadField",
    "build_extension",
    "build_map_from_functional",
    "canonical_from_y",
    "check_consistency_suite",
    "continuity_diagnostic",
    "evaluate_at",
    "fundamental_unit",
    "ideal_generator_search",
    "krational_check",
    "lambda_map",
    "lambda_value",
    "log_abs",
    "make_field",
    "nonarch_y",
    "norm_compatibility_check",
    "normalize_to_Jq",
    "omega",
    "parse_element",
    "phi_eval",
    "places_above",
    "product_formula_check",
    "psi",
    "rational_detect",
    "regulator_system",
    "solve_arch_y",
    "sqrt2_example",
    "sqrt2_example_map",
    "sunit_basis",
    "sunit_decompose",
    "valuation",
    "zero_map",
    "zero_phi_classify",
]
