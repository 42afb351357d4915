"""First-order syntax, parsing, and evaluation over finite structures."""

from .parser import formula_to_text, parse_formula, parse_raw_formula, partitioned_to_text
from .semantics import evaluate, term_value
from .syntax import (
    And,
    Const,
    Eq,
    Exists,
    ForAll,
    Formula,
    Func,
    Iff,
    Implies,
    Not,
    Or,
    PartitionedFormula,
    Rel,
    Signature,
    Term,
    Var,
    all_vars,
    bound_vars,
    conjoin,
    free_vars,
    validate_formula,
)
from .transforms import encode_selector, fresh_names, substitute, swap_partition

__all__ = [
    "And",
    "Const",
    "Eq",
    "Exists",
    "ForAll",
    "Formula",
    "Func",
    "Iff",
    "Implies",
    "Not",
    "Or",
    "PartitionedFormula",
    "Rel",
    "Signature",
    "Term",
    "Var",
    "all_vars",
    "bound_vars",
    "conjoin",
    "encode_selector",
    "evaluate",
    "formula_to_text",
    "free_vars",
    "fresh_names",
    "parse_formula",
    "parse_raw_formula",
    "partitioned_to_text",
    "substitute",
    "swap_partition",
    "term_value",
    "validate_formula",
]
