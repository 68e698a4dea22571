"""Substitution rules: model, text format, validation and built-ins."""
from .builtins import MATRIX_NAMES, NAMES, builtin, builtin_matrix
from .exprs import ExprError, evaluate
from .model import (
    ChildPlacement,
    Group,
    Prototile,
    RuleError,
    SubstitutionRule,
    expand_group,
    orbit_labels,
    substitution_matrix,
)
from .parser import RuleParseError, load_rule, parse_rule, rules_equal, serialize_rule
from .validate import ValidationReport, validate_rule

__all__ = [
    "ChildPlacement", "ExprError", "Group", "MATRIX_NAMES", "NAMES", "Prototile", "RuleError",
    "RuleParseError", "SubstitutionRule", "ValidationReport", "builtin", "builtin_matrix", "evaluate",
    "expand_group", "load_rule", "orbit_labels", "parse_rule", "rules_equal", "serialize_rule",
    "substitution_matrix", "validate_rule",
]
