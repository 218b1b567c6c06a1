"""uniquant - uniform decomposition and deterministic quantization of discrete measures.

This package splits a discrete probability measure into n pieces of equal
mass supported in small cubes, builds the deterministic n-point quantizer
with certified Wasserstein error bounds, and provides the exact transport
solver and experiments used to check those bounds.
"""

from uniquant.api.main import UniquantAPI
from uniquant.api.types import CommandResult, Settings
from uniquant.core import (
    BalancedClassification,
    Cube,
    DiscreteMeasure,
    Quantizer,
    TransportPlan,
    UniformDecomposition,
    classify,
    decompose,
    exact_wasserstein,
    quantize,
    quantize_unbounded,
    rate_bound,
    zeta,
)
from uniquant.errors import ConfigError, NumericalFailure, UniquantError

__version__ = "0.1.0"

__all__ = [
    "BalancedClassification",
    "CommandResult",
    "ConfigError",
    "Cube",
    "DiscreteMeasure",
    "NumericalFailure",
    "Quantizer",
    "Settings",
    "TransportPlan",
    "UniformDecomposition",
    "UniquantAPI",
    "UniquantError",
    "classify",
    "decompose",
    "exact_wasserstein",
    "quantize",
    "quantize_unbounded",
    "rate_bound",
    "zeta",
]
