"""Chip composition: replicate pods (or lay out one fixed organization), size
memory channels, enforce budgets, and compute chip-level metrics."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .components import (
    ComponentLibrary,
    CoreKind,
    InterconnectKind,
    MemoryChannelModel,
    TechnologyParams,
    core_effective_power,
)
from .errors import InfeasibleError
from .perf import MAX_POD_CORES, PodConfig, PodEvaluation, evaluate_pod
from .workloads import WorkloadSuite, aggregate


class ChipStyle(str, enum.Enum):
    CONVENTIONAL = "Conventional"
    TILED_OOO = "Tiled (OoO)"
    TILED_INORDER = "Tiled (In-Order)"
    SCALE_OUT = "Scale-Out"


class Constraint(str, enum.Enum):
    POWER = "Power"
    AREA = "Area"
    CHANNELS = "Channels"


# When several budgets fail at k+1 the first one listed here is reported.
CONSTRAINT_PRIORITY = (Constraint.POWER, Constraint.AREA, Constraint.CHANNELS)

FIXED_STYLE_CORE = {
    ChipStyle.CONVENTIONAL: CoreKind.CONVENTIONAL,
    ChipStyle.TILED_OOO: CoreKind.OOO,
    ChipStyle.TILED_INORDER: CoreKind.INORDER,
}
FIXED_STYLE_INTERCONNECT = {
    ChipStyle.CONVENTIONAL: InterconnectKind.CROSSBAR,
    ChipStyle.TILED_OOO: InterconnectKind.MESH,
    ChipStyle.TILED_INORDER: InterconnectKind.MESH,
}


@dataclass(frozen=True)
class Metrics:
    pd: float  # performance / mm^2
    p3: float  # performance / W, DRAM included


@dataclass(frozen=True)
class ChipDesign:
    style: ChipStyle
    pod: PodConfig
    pod_count: int
    total_cores: int
    total_llc: float  # MB
    channels: int
    area: float  # mm^2
    chip_power: float  # W, on-die only
    dram_power: float  # W
    total_power_with_dram: float  # W
    performance: float  # suite-mean user instructions per cycle
    bandwidth: float  # GB/s, worst workload
    limiting_constraint: Constraint

    @property
    def metrics(self) -> Metrics:
        return chip_metrics(self)

    @property
    def label(self) -> str:
        if self.style is ChipStyle.SCALE_OUT:
            return "Scale-Out (OoO)" if self.pod.core.kind is CoreKind.OOO else (
                "Scale-Out (In-Order)" if self.pod.core.kind is CoreKind.INORDER else "Scale-Out (Conventional)"
            )
        return self.style.value


def chip_metrics(design: ChipDesign) -> Metrics:
    return metrics_from(design.performance, design.area, design.total_power_with_dram)


def metrics_from(performance: float, area: float, power: float) -> Metrics:
    if not (area > 0 and power > 0):
        raise ValueError(f"area and power must be > 0, got {area!r} mm^2 and {power!r} W")
    if performance < 0:
        raise ValueError(f"performance must be >= 0, got {performance!r}")
    return Metrics(pd=performance / area, p3=performance / power)


def pod_area(pod: PodConfig, lib: ComponentLibrary) -> float:
    n = pod.core_count
    return n * pod.core.area + pod.llc_capacity * lib.llc.area_per_mb + pod.interconnect.area(n)


def pod_power(pod: PodConfig, per_workload_ipc: Sequence[float], lib: ComponentLibrary) -> list[float]:
    """Pod power for each workload's achieved per-core IPC."""
    fixed = pod.llc_capacity * lib.llc.power_per_mb + pod.interconnect.power(pod.core_count)
    return [pod.core_count * core_effective_power(pod.core, ipc) + fixed for ipc in per_workload_ipc]


def dram_power(channels: int, achieved_bw: float, mem: MemoryChannelModel) -> float:
    """DRAM power in W: per-channel background plus access energy for the traffic."""
    capacity = channels * mem.usable_bandwidth
    if achieved_bw > capacity * (1 + 1e-12):
        raise InfeasibleError(
            f"{achieved_bw:.3f} GB/s exceeds {channels} channel(s) x {mem.usable_bandwidth:.3f} GB/s usable",
            constraint=Constraint.CHANNELS.value,
        )
    # pJ/bit * GB/s * 8 bit/B = 1e-12 * 1e9 * 8 W
    return channels * mem.background_power + mem.access_energy * achieved_bw * 8e-3


def channels_needed(demand: float, mem: MemoryChannelModel) -> int:
    """Smallest channel count (at least one) serving ``demand`` GB/s, unbounded."""
    if demand < 0:
        raise ValueError(f"bandwidth demand must be >= 0, got {demand}")
    usable = mem.usable_bandwidth
    c = max(1, math.ceil(demand / usable))
    while c > 1 and demand <= (c - 1) * usable:
        c -= 1
    while demand > c * usable:
        c += 1
    return c


def size_channels(demand: float, mem: MemoryChannelModel, tech: TechnologyParams) -> int:
    c = channels_needed(demand, mem)
    if c > tech.max_channels:
        raise InfeasibleError(
            f"{demand:.3f} GB/s needs {c} channels, at most {tech.max_channels} available",
            constraint=Constraint.CHANNELS.value,
        )
    return c


@dataclass(frozen=True)
class _Budget:
    area: float
    power: float
    channels: int
    demand: float

    def failures(self, tech: TechnologyParams, area_tolerance: float = 0.0) -> list[Constraint]:
        failed = []
        if self.power > tech.power_budget:
            failed.append(Constraint.POWER)
        if self.area > tech.area_budget * (1 + area_tolerance):
            failed.append(Constraint.AREA)
        if self.channels > tech.max_channels:
            failed.append(Constraint.CHANNELS)
        return failed


class _PodTotals:
    """Per-pod quantities that do not depend on the replication count."""

    def __init__(self, pod: PodConfig, evals: Sequence[PodEvaluation], suite: WorkloadSuite, lib: ComponentLibrary):
        self.area = pod_area(pod, lib)
        self.power = pod_power(pod, [e.per_core_ipc for e in evals], lib)
        self.mean_power = aggregate(self.power, suite)
        self.demands = [e.bandwidth_demand for e in evals]
        self.max_demand = max(self.demands)
        self.mean_throughput = aggregate([e.throughput for e in evals], suite)


def _budget(totals: _PodTotals, k: int, lib: ComponentLibrary, channels: int | None = None) -> _Budget:
    demand = k * totals.max_demand
    ch = channels_needed(demand, lib.memory) if channels is None else channels
    return _Budget(
        area=k * totals.area + ch * lib.memory.controller_area + lib.soc.area,
        power=k * totals.mean_power + ch * lib.memory.controller_power + lib.soc.power,
        channels=ch,
        demand=demand,
    )


def _design(style, pod, k, totals, budget, suite, lib, limiting) -> ChipDesign:
    dram = aggregate([dram_power(budget.channels, k * d, lib.memory) for d in totals.demands], suite)
    return ChipDesign(
        style=style,
        pod=pod,
        pod_count=k,
        total_cores=k * pod.core_count,
        total_llc=k * pod.llc_capacity,
        channels=budget.channels,
        area=budget.area,
        chip_power=budget.power,
        dram_power=dram,
        total_power_with_dram=budget.power + dram,
        performance=k * totals.mean_throughput,
        bandwidth=budget.demand,
        limiting_constraint=limiting,
    )


def compose_scale_out(
    pod: PodConfig,
    suite: WorkloadSuite,
    lib: ComponentLibrary,
    tech: TechnologyParams | None = None,
    *,
    evaluations: Sequence[PodEvaluation] | None = None,
) -> ChipDesign:
    """Replicate ``pod`` as many times as the area, power and channel budgets allow.

    ``evaluations`` may carry a precomputed :func:`evaluate_pod` result; power
    and area always come from ``lib``.
    """
    tech = tech or lib.technology
    evals = evaluate_pod(pod, suite, lib) if evaluations is None else evaluations
    totals = _PodTotals(pod, evals, suite, lib)

    first = _budget(totals, 1, lib)
    failed = first.failures(tech)
    if failed:
        raise InfeasibleError(
            f"a single {pod.describe()} pod violates the {failed[0].value.lower()} budget",
            constraint=failed[0].value,
        )

    # every budget grows with k, so feasibility is monotone and bisection is exact
    lo = 1
    hi = max(2, math.floor((tech.area_budget - lib.soc.area) / totals.area) + 2)
    while not _budget(totals, hi, lib).failures(tech):
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _budget(totals, mid, lib).failures(tech):
            hi = mid
        else:
            lo = mid
    budget = _budget(totals, lo, lib)
    over = _budget(totals, lo + 1, lib).failures(tech)
    limiting = next(c for c in CONSTRAINT_PRIORITY if c in over)
    return _design(ChipStyle.SCALE_OUT, pod, lo, totals, budget, suite, lib, limiting)


def compose_fixed(
    style: ChipStyle | str,
    cores: int,
    llc: float,
    suite: WorkloadSuite,
    lib: ComponentLibrary,
    tech: TechnologyParams | None = None,
    *,
    interconnect: InterconnectKind | str | None = None,
    channels: int | None = None,
    area_tolerance: float = 0.0,
) -> ChipDesign:
    """Evaluate a conventional or tiled chip: one shared LLC behind one fabric.

    ``channels`` pins the memory-controller count (it must still carry the
    demand); by default it is sized from demand. ``area_tolerance`` is the
    relative slack allowed on the area budget.
    """
    style = ChipStyle(style)
    if style is ChipStyle.SCALE_OUT:
        raise ValueError("use compose_scale_out for scale-out chips")
    tech = tech or lib.technology
    ic = lib.interconnect(interconnect or FIXED_STYLE_INTERCONNECT[style])
    core = lib.core(FIXED_STYLE_CORE[style])

    def evaluate(n: int) -> tuple[PodConfig, _PodTotals, _Budget]:
        pod = PodConfig(core, n, llc, ic)
        totals = _PodTotals(pod, evaluate_pod(pod, suite, lib), suite, lib)
        return pod, totals, _budget(totals, 1, lib, channels)

    pod, totals, budget = evaluate(cores)
    if channels is not None and budget.demand > channels * lib.memory.usable_bandwidth:
        raise InfeasibleError(
            f"{channels} channel(s) cannot carry {budget.demand:.3f} GB/s", constraint=Constraint.CHANNELS.value
        )
    failed = budget.failures(tech, area_tolerance)
    if failed:
        raise InfeasibleError(
            f"{style.value} with {cores} cores violates the {failed[0].value.lower()} budget "
            f"(area {budget.area:.1f} mm^2, power {budget.power:.1f} W, {budget.channels} channels)",
            constraint=failed[0].value,
        )

    over: list[Constraint] = []
    if cores < MAX_POD_CORES and ic.supports(cores + 1):
        nxt = evaluate(cores + 1)[2]
        over = nxt.failures(tech, area_tolerance)
        if channels is not None and nxt.demand > channels * lib.memory.usable_bandwidth:
            over.append(Constraint.CHANNELS)
    if over:
        limiting = next(c for c in CONSTRAINT_PRIORITY if c in over)
    else:
        utilization = {
            Constraint.POWER: budget.power / tech.power_budget,
            Constraint.AREA: budget.area / tech.area_budget,
            Constraint.CHANNELS: budget.demand / (tech.max_channels * lib.memory.usable_bandwidth),
        }
        limiting = max(CONSTRAINT_PRIORITY, key=lambda c: utilization[c])
    return _design(style, pod, 1, totals, budget, suite, lib, limiting)


@dataclass(frozen=True)
class BaselineShape:
    style: ChipStyle
    cores: int
    llc: float
    channels: int


# Published conventional and tiled organizations (cores, LLC MB, memory controllers).
PUBLISHED_BASELINES = (
    BaselineShape(ChipStyle.CONVENTIONAL, 17, 48.0, 3),
    BaselineShape(ChipStyle.TILED_OOO, 139, 80.0, 3),
    BaselineShape(ChipStyle.TILED_INORDER, 225, 80.0, 5),
)

# The published tiled (OoO) organization sums to slightly more than the area
# budget once its fabric is counted; this slack admits it.
BASELINE_AREA_TOLERANCE = 0.02


def compose_baseline(shape: BaselineShape, suite: WorkloadSuite, lib: ComponentLibrary) -> ChipDesign:
    return compose_fixed(
        shape.style, shape.cores, shape.llc, suite, lib,
        channels=shape.channels, area_tolerance=BASELINE_AREA_TOLERANCE,
    )


REPORT_COLUMNS = ("design", "constraint", "cores", "llc_mb", "mcs", "area_mm2", "performance", "power_w", "pd", "p3")


def report_row(design: ChipDesign) -> dict:
    m = design.metrics
    return {
        "design": design.label,
        "constraint": f"{design.limiting_constraint.value}-limited",
        "cores": design.total_cores,
        "llc_mb": design.total_llc,
        "mcs": design.channels,
        "area_mm2": design.area,
        "performance": design.performance,
        "power_w": design.total_power_with_dram,
        "pd": m.pd,
        "p3": m.p3,
    }
