"""uniquant numerical core.

This package provides discrete measures, the uniform decomposition, the
deterministic quantizer, balanced classification and exact transport.
"""

from uniquant.core.classification import (
    BalancedClassification,
    classification_cost,
    classify,
    cost_bound,
)
from uniquant.core.decomposition import (
    DecompositionPiece,
    UniformDecomposition,
    cell_diameter_bound,
    decompose,
    heavy_cube,
    partition_resolution,
)
from uniquant.core.measure import (
    Cube,
    DiscreteMeasure,
    GeneratorSpec,
    bounding_radius,
    load_measure,
    load_measure_file,
    parse_generator_spec,
    point_mass,
    restrict_and_rescale,
    save_measure,
    synth,
    truncate,
)
from uniquant.core.quantization import (
    Quantizer,
    RateRegime,
    Regime,
    UnboundedCertificate,
    closed_form_chain_bound,
    coupling_upper_bound,
    quantize,
    quantize_unbounded,
    rate_bound,
    truncation_cost,
    truncation_schedule,
    zeta,
    zeta_bracket,
)
from uniquant.core.transport import (
    TransportPlan,
    coupling_cost,
    exact_wasserstein,
    wasserstein,
    wasserstein_1d,
)

__all__ = [
    "BalancedClassification",
    "Cube",
    "DecompositionPiece",
    "DiscreteMeasure",
    "GeneratorSpec",
    "Quantizer",
    "RateRegime",
    "Regime",
    "TransportPlan",
    "UnboundedCertificate",
    "UniformDecomposition",
    "bounding_radius",
    "cell_diameter_bound",
    "classification_cost",
    "classify",
    "closed_form_chain_bound",
    "cost_bound",
    "coupling_cost",
    "coupling_upper_bound",
    "decompose",
    "exact_wasserstein",
    "heavy_cube",
    "load_measure",
    "load_measure_file",
    "parse_generator_spec",
    "partition_resolution",
    "point_mass",
    "quantize",
    "quantize_unbounded",
    "rate_bound",
    "restrict_and_rescale",
    "save_measure",
    "synth",
    "truncate",
    "truncation_cost",
    "truncation_schedule",
    "wasserstein",
    "wasserstein_1d",
    "zeta",
    "zeta_bracket",
]
