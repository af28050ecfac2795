"""Exhaustive pod-space exploration and optimum selection."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .chip import ChipDesign, compose_scale_out
from .components import ComponentLibrary, CoreKind, InterconnectKind, TechnologyParams
from .errors import InfeasibleError
from .perf import MAX_POD_CORES, PodConfig, PodEvaluation, evaluate_pod
from .workloads import WorkloadSuite

POD_LLC_RANGE = (1.0, 8.0)
DEFAULT_LLC_CAPACITIES = (1.0, 2.0, 4.0, 8.0)


class Metric(str, enum.Enum):
    P3 = "p3"
    PD = "pd"

    def of(self, design: ChipDesign) -> float:
        m = design.metrics
        return m.p3 if self is Metric.P3 else m.pd


@dataclass(frozen=True)
class SearchSpace:
    core_kinds: tuple[CoreKind, ...] = (CoreKind.OOO,)
    core_counts: tuple[int, ...] = tuple(range(1, MAX_POD_CORES + 1))
    llc_capacities: tuple[float, ...] = DEFAULT_LLC_CAPACITIES
    interconnects: tuple[InterconnectKind, ...] = tuple(InterconnectKind)

    def __post_init__(self):
        for name in ("core_kinds", "core_counts", "llc_capacities", "interconnects"):
            if not getattr(self, name):
                raise ValueError(f"search space {name} must be non-empty")
        object.__setattr__(self, "core_kinds", tuple(CoreKind(k) for k in self.core_kinds))
        object.__setattr__(self, "interconnects", tuple(InterconnectKind(k) for k in self.interconnects))
        for n in self.core_counts:
            if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= MAX_POD_CORES:
                raise ValueError(f"core count {n!r} outside [1, {MAX_POD_CORES}]")
        lo, hi = POD_LLC_RANGE
        for c in self.llc_capacities:
            if not lo <= c <= hi:
                raise ValueError(f"pod LLC capacity {c!r} MB outside [{lo:g}, {hi:g}]")

    @classmethod
    def for_core(cls, kind: CoreKind | str, **kwargs) -> "SearchSpace":
        return cls(core_kinds=(CoreKind(kind),), **kwargs)


@dataclass(frozen=True)
class RankedResult:
    pod: PodConfig
    chip: ChipDesign
    metric_value: float


def enumerate_pods(space: SearchSpace, lib: ComponentLibrary) -> list[PodConfig]:
    """Cartesian product of the space, minus fabrics too small for the core count.

    Order: core kind, core count, LLC capacity, interconnect (as listed in the space).
    """
    pods = []
    for kind, n, c, ic in itertools.product(
        space.core_kinds, sorted(set(space.core_counts)), sorted(set(space.llc_capacities)), space.interconnects
    ):
        fabric = lib.interconnect(ic)
        if fabric.supports(n):
            pods.append(PodConfig(lib.core(kind), n, float(c), fabric))
    return pods


EvaluationCache = Mapping[tuple, Sequence[PodEvaluation]]


def evaluate_space(pods: Iterable[PodConfig], suite: WorkloadSuite, lib: ComponentLibrary) -> dict:
    """Performance of every pod, keyed by ``PodConfig.sort_key``.

    Performance does not depend on energy parameters, so the result can be
    reused across libraries that differ only by :class:`ScaleFactors`.
    """
    return {pod.sort_key: evaluate_pod(pod, suite, lib) for pod in pods}


def ranking_key(result: RankedResult) -> tuple:
    # higher metric first; then smaller area, smaller power, pod shape
    return (-result.metric_value, result.chip.area, result.chip.total_power_with_dram, result.pod.sort_key)


def rank_pods(
    pods: Iterable[PodConfig],
    metric: Metric | str,
    suite: WorkloadSuite,
    lib: ComponentLibrary,
    tech: TechnologyParams | None = None,
    *,
    evaluations: EvaluationCache | None = None,
) -> list[RankedResult]:
    """Compose a full chip around every pod and sort by ``metric``; pods that
    cannot form a feasible chip are dropped."""
    metric = Metric(metric)
    results = []
    for pod in pods:
        evals = evaluations.get(pod.sort_key) if evaluations is not None else None
        try:
            chip = compose_scale_out(pod, suite, lib, tech, evaluations=evals)
        except InfeasibleError:
            continue
        results.append(RankedResult(pod, chip, metric.of(chip)))
    results.sort(key=ranking_key)
    return results


def optimal_pod(
    space: SearchSpace,
    metric: Metric | str,
    suite: WorkloadSuite,
    lib: ComponentLibrary,
    tech: TechnologyParams | None = None,
    *,
    evaluations: EvaluationCache | None = None,
) -> RankedResult:
    ranking = rank_pods(enumerate_pods(space, lib), metric, suite, lib, tech, evaluations=evaluations)
    if not ranking:
        raise InfeasibleError("no pod in the search space yields a feasible chip")
    return ranking[0]


@dataclass(frozen=True)
class Comparison:
    subject: str
    reference: str
    metric: Metric
    ratio: float

    @property
    def percent(self) -> float:
        return (self.ratio - 1.0) * 100.0

    def render(self) -> str:
        return (
            f"{self.subject} vs {self.reference}: {self.metric.value.upper()} "
            f"{self.ratio:.2f}x ({self.percent:+.1f}%)"
        )


def compare_values(subject: str, a: float, reference: str, b: float, metric: Metric | str) -> Comparison:
    return Comparison(subject, reference, Metric(metric), a / b)


def compare_designs(designs: Sequence[ChipDesign], metrics: Sequence[Metric] = (Metric.P3, Metric.PD)) -> list[Comparison]:
    """Pairwise metric ratios, later design over earlier, for every pair i < j.

    With the baselines listed first, each line reads as a gain over a baseline.
    """
    if len(designs) < 2:
        raise ValueError("need at least two designs to compare")
    out = []
    for metric in metrics:
        for a, b in itertools.combinations(designs, 2):
            out.append(compare_values(b.label, metric.of(b), a.label, metric.of(a), metric))
    return out
