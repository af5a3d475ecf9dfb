"""Online event correlation and forecasting over multivariate sensor streams."""

from evcast._core import (
    AgingPolicy,
    CusumDetector,
    EventSymbol,
    EventVector,
    ForestParams,
    NameTable,
    PatternForest,
    Prediction,
    ProbTemporalRule,
    ShewhartDetector,
    exponential_weight,
    format_rule,
    linear_weight,
    merge_probability,
    node_budget,
    parse_rule,
    predict,
    symbols_for_step,
)

__all__ = [
    "AgingPolicy",
    "CusumDetector",
    "EventSymbol",
    "EventVector",
    "ForestParams",
    "NameTable",
    "PatternForest",
    "Prediction",
    "ProbTemporalRule",
    "ShewhartDetector",
    "exponential_weight",
    "format_rule",
    "linear_weight",
    "merge_probability",
    "node_budget",
    "parse_rule",
    "predict",
    "symbols_for_step",
]
