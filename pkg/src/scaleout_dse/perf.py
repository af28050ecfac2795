"""Analytic CPI-stack performance model for a pod.

Per-core CPI is the sum of a core-bound component, the LLC access cost and the
exposed off-chip miss cost::

    CPI = cpi_base * core_cpi_scale[kind]
          + apki_llc / 1000 * llc_latency
          + stall_exposure[kind] * mpki(C) / 1000 * mem_latency

Every LLC access pays the interconnect traversal and the bank latency; misses
additionally pay the memory latency.
"""

from __future__ import annotations

from dataclasses import dataclass

from .components import (
    CacheModel,
    ComponentLibrary,
    CoreModel,
    InterconnectModel,
    MemoryChannelModel,
    TechnologyParams,
)
from .errors import InfeasibleError
from .workloads import WorkloadProfile, WorkloadSuite, llc_miss_ratio

MAX_POD_CORES = 256
LINE_BYTES = 64


@dataclass(frozen=True)
class PodConfig:
    core: CoreModel
    core_count: int
    llc_capacity: float  # MB
    interconnect: InterconnectModel

    def __post_init__(self):
        if isinstance(self.core_count, bool) or not isinstance(self.core_count, int):
            raise ValueError(f"core_count must be an integer, got {self.core_count!r}")
        if not 1 <= self.core_count <= MAX_POD_CORES:
            raise ValueError(f"core_count must lie in [1, {MAX_POD_CORES}], got {self.core_count}")
        if not self.llc_capacity > 0:
            raise ValueError(f"llc_capacity must be > 0 MB, got {self.llc_capacity!r}")

    @property
    def feasible(self) -> bool:
        return self.interconnect.supports(self.core_count)

    @property
    def shape(self) -> tuple[int, float, str]:
        """(cores, LLC MB, interconnect) -- what "same pod" means in comparisons."""
        return (self.core_count, self.llc_capacity, self.interconnect.kind.value)

    @property
    def sort_key(self) -> tuple[str, int, float, str]:
        return (self.core.kind.value, *self.shape)

    def describe(self) -> str:
        return f"{self.core_count} {self.core.kind.value} cores / {self.llc_capacity:g} MB / {self.interconnect.kind.value}"


@dataclass(frozen=True)
class PodEvaluation:
    per_core_ipc: float
    throughput: float  # user instructions per cycle, whole pod
    bandwidth_demand: float  # GB/s
    llc_latency: float  # cycles
    mpki: float


def _check_feasible(pod: PodConfig) -> None:
    if not pod.feasible:
        raise InfeasibleError(
            f"{pod.interconnect.kind.value} supports at most {pod.interconnect.max_nodes} nodes, "
            f"pod has {pod.core_count}",
            constraint="interconnect",
        )


def llc_latency(pod: PodConfig, cache: CacheModel) -> float:
    """Average LLC access latency in cycles: bank access plus fabric traversal."""
    _check_feasible(pod)
    return cache.bank_latency(pod.llc_capacity) + pod.interconnect.traversal_latency(pod.core_count)


def per_core_ipc(
    pod: PodConfig,
    profile: WorkloadProfile,
    cache: CacheModel,
    mem: MemoryChannelModel,
    *,
    latency: float | None = None,
) -> float:
    if latency is None:
        latency = llc_latency(pod, cache)
    kind = pod.core.kind
    cpi = (
        profile.cpi_base * profile.core_cpi_scale[kind]
        + profile.apki_llc / 1000.0 * latency
        + profile.stall_exposure[kind] * llc_miss_ratio(profile, pod.llc_capacity) / 1000.0 * mem.mem_latency
    )
    return min(1.0 / cpi, pod.core.peak_ipc)


def bandwidth_demand(pod: PodConfig, profile: WorkloadProfile, ipc: float, tech: TechnologyParams) -> float:
    """Off-chip traffic of the whole pod in GB/s (one line fill per miss)."""
    misses_per_instr = llc_miss_ratio(profile, pod.llc_capacity) / 1000.0
    return pod.core_count * ipc * tech.frequency * misses_per_instr * LINE_BYTES


def evaluate_pod(pod: PodConfig, suite: WorkloadSuite, lib: ComponentLibrary) -> tuple[PodEvaluation, ...]:
    """Evaluate ``pod`` on every workload of ``suite``, in suite order."""
    latency = llc_latency(pod, lib.llc)
    out = []
    for profile in suite.profiles:
        ipc = per_core_ipc(pod, profile, lib.llc, lib.memory, latency=latency)
        out.append(
            PodEvaluation(
                per_core_ipc=ipc,
                throughput=pod.core_count * ipc,
                bandwidth_demand=bandwidth_demand(pod, profile, ipc, lib.technology),
                llc_latency=latency,
                mpki=llc_miss_ratio(profile, pod.llc_capacity),
            )
        )
    return tuple(out)
