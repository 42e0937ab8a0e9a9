"""Reverse-Holder and Muckenhoupt constants of weights on homogeneous trees."""

from .exponents import ExponentResult, improvement_range, p0_solve, power_weight_constant
from .rearrange import (
    PrefixReport,
    StepFunction,
    prefix_average,
    prefix_muckenhoupt_constant,
    prefix_rhi_constant,
    ratio_curve,
    rearrangement,
)
from .trace import (
    DecompositionTrace,
    FractionalSet,
    build_gamma,
    build_top_set,
    lemma21_check,
    select_fathers,
    stopping_decomposition,
    trace_theorem1,
)
from .tree import NodeId, TreeSpace
from .weight import (
    DyadicWeight,
    RhiReport,
    WeakTypeResult,
    gen_constant,
    gen_power,
    gen_random,
    gen_two_value,
    load_weight,
    save_weight,
)

__all__ = [
    "DecompositionTrace",
    "DyadicWeight",
    "ExponentResult",
    "FractionalSet",
    "NodeId",
    "PrefixReport",
    "RhiReport",
    "StepFunction",
    "TreeSpace",
    "WeakTypeResult",
    "build_gamma",
    "build_top_set",
    "gen_constant",
    "gen_power",
    "gen_random",
    "gen_two_value",
    "improvement_range",
    "lemma21_check",
    "load_weight",
    "p0_solve",
    "power_weight_constant",
    "prefix_average",
    "prefix_muckenhoupt_constant",
    "prefix_rhi_constant",
    "ratio_curve",
    "rearrangement",
    "save_weight",
    "select_fathers",
    "stopping_decomposition",
    "trace_theorem1",
]

__version__ = "0.1.0"
