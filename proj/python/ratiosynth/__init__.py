"""Ratio-objective policy synthesis for labeled MDPs under Rabin tasks."""

from ._core import (
    RatioSynthError,
    case2_sweep,
    decompose,
    evaluate,
    generate_case1,
    generate_case2,
    simulate,
    synthesize,
)

__all__ = [
    "RatioSynthError",
    "case2_sweep",
    "decompose",
    "evaluate",
    "generate_case1",
    "generate_case2",
    "simulate",
    "synthesize",
]
