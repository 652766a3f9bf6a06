"""RAG benchmark-and-recommend harness."""

__version__ = "0.1.0"

from .config import (  # noqa: F401
    CombinationSpec,
    ExperimentConfig,
    GridAxes,
    MetricWeights,
    ThresholdSet,
    enumerate_combinations,
    estimate_cost,
    map_weight,
    validate_config,
)
from .session import ProviderRegistry, SessionState, run_session  # noqa: F401
