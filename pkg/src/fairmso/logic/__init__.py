from .evaluate import compile_formula, evaluate, evaluate_masks
from .formula import (FREE, Adj, And, DerivedParams, Eq, ExistsS, ExistsV, ForallS, ForallV,
                      FormulaError, FormulaMetrics, Implies, In, Not, Or, derive_params,
                      free_polarity, metrics, parse_formula, to_sexpr)
from .presets import NatSet, preset_formula, sigma_rho_formula

__all__ = [
    "FREE", "Adj", "And", "DerivedParams", "Eq", "ExistsS", "ExistsV", "ForallS", "ForallV",
    "FormulaError", "FormulaMetrics", "Implies", "In", "NatSet", "Not", "Or", "compile_formula",
    "derive_params", "evaluate", "evaluate_masks", "free_polarity", "metrics", "parse_formula",
    "preset_formula", "sigma_rho_formula", "to_sexpr",
]
