"""Numerical laboratory for absolute matrix summability factors.

Sequences are lazy and graded by growth diagnostics; lower-triangular
methods expose their series-to-sequence and series-to-series companions;
summability indices, the Abel-transformed decomposition and Fourier
experiments are built on top.
"""

from .errors import AccuracyError, ConfigError, DomainError, SummabilityError
from .sequences import (
    CONSISTENT,
    DIVERGING,
    INCONCLUSIVE,
    GrowthReport,
    LazySequence,
    Thresholds,
    WeightSystem,
    make_weights,
    sequence_from_expression,
    unit_weights,
)
from .matrices import (
    TriangularMethod,
    cesaro_method,
    check_matrix_conditions,
    identity_method,
    weighted_mean_method,
)
from .summability import HypothesisLedger, SummabilityLedger, check_hypotheses, index_matrix

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "ConfigError",
    "DomainError",
    "SummabilityError",
    "CONSISTENT",
    "DIVERGING",
    "INCONCLUSIVE",
    "GrowthReport",
    "LazySequence",
    "Thresholds",
    "WeightSystem",
    "make_weights",
    "sequence_from_expression",
    "unit_weights",
    "TriangularMethod",
    "cesaro_method",
    "check_matrix_conditions",
    "identity_method",
    "weighted_mean_method",
    "HypothesisLedger",
    "SummabilityLedger",
    "check_hypotheses",
    "index_matrix",
]
