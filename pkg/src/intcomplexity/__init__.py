"""Integer complexity: exact tables, defects, stability and low-defect polynomials."""

from intcomplexity.complexity import (
    ComplexityTable,
    Expression,
    best_expression,
    build_table,
    complexity,
    default_table,
    expression_complexity,
)
from intcomplexity.defect import (
    ExactDefect,
    compare,
    congruence_class,
    defect_of,
    less_than_int,
    mod1_congruent,
)
from intcomplexity.errors import (
    CacheFormatError,
    ContractError,
    IndeterminateError,
    IntComplexityError,
    OutOfRangeError,
    ResourceLimitError,
)
from intcomplexity.kernel import BACKEND
from intcomplexity.stability import (
    Kind,
    Policy,
    StabilityVerdict,
    delta_gap,
    goodfac_check,
    is_stable,
    k_of,
    stability_scan,
    stable_by_small_defect,
    stable_complexity,
    stable_defect,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CacheFormatError",
    "ComplexityTable",
    "ContractError",
    "ExactDefect",
    "Expression",
    "IndeterminateError",
    "IntComplexityError",
    "Kind",
    "OutOfRangeError",
    "Policy",
    "ResourceLimitError",
    "StabilityVerdict",
    "best_expression",
    "build_table",
    "compare",
    "complexity",
    "congruence_class",
    "default_table",
    "defect_of",
    "delta_gap",
    "expression_complexity",
    "goodfac_check",
    "is_stable",
    "k_of",
    "less_than_int",
    "mod1_congruent",
    "stability_scan",
    "stable_by_small_defect",
    "stable_complexity",
    "stable_defect",
]
