"""Design-space exploration for pod-based scale-out server processors."""

from .chip import ChipDesign, ChipStyle, Constraint, compose_fixed, compose_scale_out, chip_metrics
from .components import (
    ComponentLibrary,
    CoreKind,
    InterconnectKind,
    ScaleFactors,
    apply_scale_factors,
    default_library,
    load_component_library,
)
from .dse import Metric, SearchSpace, optimal_pod, rank_pods
from .errors import ConfigError, InfeasibleError, ModelError
from .perf import PodConfig, evaluate_pod
from .workloads import WorkloadProfile, WorkloadSuite, default_suite, load_workload_suite

__all__ = [
    "ChipDesign", "ChipStyle", "ComponentLibrary", "ConfigError", "Constraint", "CoreKind",
    "InfeasibleError", "InterconnectKind", "Metric", "ModelError", "PodConfig", "ScaleFactors",
    "SearchSpace", "WorkloadProfile", "WorkloadSuite", "apply_scale_factors", "chip_metrics",
    "compose_fixed", "compose_scale_out", "default_library", "default_suite", "evaluate_pod",
    "load_component_library", "load_workload_suite", "optimal_pod", "rank_pods",
]
