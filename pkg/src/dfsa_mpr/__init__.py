"""DFSA RFID anticollision simulator and analysis library for MPR-capable readers."""

from .estimator import (
    FrameObservation,
    MapEstimate,
    log_posterior,
    map_estimate,
    posterior_curve,
)
from .frame_optimizer import (
    FramePlan,
    next_frame_length,
    optimal_frame_length,
    verify_stationarity,
)
from .harness import (
    AggregateMetrics,
    ExperimentSpec,
    analyze_curves,
    emit_results,
    run_experiment,
)
from .prob_model import (
    Load,
    MprOrder,
    SlotProbabilities,
    binomial_occupancy,
    channel_efficiency,
    expected_success_slots,
    slot_probabilities,
)
from .protocol import (
    InterrogationResult,
    NonTerminationError,
    ProtocolConfig,
    Variant,
    run_frame,
    run_interrogation,
)

__all__ = [
    "AggregateMetrics",
    "ExperimentSpec",
    "FrameObservation",
    "FramePlan",
    "InterrogationResult",
    "Load",
    "MapEstimate",
    "MprOrder",
    "NonTerminationError",
    "ProtocolConfig",
    "SlotProbabilities",
    "Variant",
    "analyze_curves",
    "binomial_occupancy",
    "channel_efficiency",
    "emit_results",
    "expected_success_slots",
    "log_posterior",
    "map_estimate",
    "next_frame_length",
    "optimal_frame_length",
    "posterior_curve",
    "run_experiment",
    "run_frame",
    "run_interrogation",
    "slot_probabilities",
    "verify_stationarity",
]
