"""Energy-parameter sweeps and the regions where the optimal pod stays put."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .components import ComponentLibrary, ScaleFactors, TechnologyParams, apply_scale_factors
from .dse import Metric, SearchSpace, enumerate_pods, evaluate_space, rank_pods
from .perf import PodConfig
from .workloads import WorkloadSuite

AXES = ScaleFactors.axes()


def log_grid(points: int = 25, low: float = 0.1, high: float = 10.0) -> tuple[float, ...]:
    """Log-spaced factors from ``low`` to ``high``; an odd count centred on a
    symmetric range lands exactly on 1.0."""
    if points < 1:
        raise ValueError("a grid needs at least one point")
    if points == 1:
        return (1.0,)
    lo_exp, hi_exp = math.log10(low), math.log10(high)
    values = []
    for i in range(points):
        e = lo_exp + (hi_exp - lo_exp) * i / (points - 1)
        values.append(1.0 if abs(e) < 1e-12 else 10.0 ** e)
    return tuple(values)


class SweepMode(str, enum.Enum):
    ONE_AT_A_TIME = "one_at_a_time"
    FULL_FACTORIAL = "full_factorial"


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[str, ...] = AXES
    grids: Mapping[str, tuple[float, ...]] = field(default_factory=dict)
    metric: Metric = Metric.P3
    space: SearchSpace = field(default_factory=SearchSpace)
    mode: SweepMode = SweepMode.ONE_AT_A_TIME

    def __post_init__(self):
        if not self.axes:
            raise ValueError("a sweep needs at least one axis")
        unknown = [a for a in self.axes if a not in AXES]
        if unknown:
            raise ValueError(f"unknown sweep axis {unknown[0]!r}; choose from {', '.join(AXES)}")
        if len(set(self.axes)) != len(self.axes):
            raise ValueError("sweep axes must be distinct")
        grids = {a: tuple(float(v) for v in self.grids.get(a, log_grid())) for a in self.axes}
        for a, grid in grids.items():
            if 1.0 not in grid:
                raise ValueError(f"grid for {a} must contain 1.0")
            if any(b <= x for x, b in zip(grid, grid[1:])):
                raise ValueError(f"grid for {a} must be strictly increasing")
            if grid[0] <= 0:
                raise ValueError(f"grid for {a} must be positive")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "metric", Metric(self.metric))
        object.__setattr__(self, "mode", SweepMode(self.mode))

    def points(self) -> list[ScaleFactors]:
        if self.mode is SweepMode.FULL_FACTORIAL:
            combos = itertools.product(*(self.grids[a] for a in self.axes))
            return [ScaleFactors(**dict(zip(self.axes, c))) for c in combos]
        pts = [ScaleFactors()]
        for a in self.axes:
            pts.extend(ScaleFactors(**{a: v}) for v in self.grids[a] if v != 1.0)
        return pts


@dataclass(frozen=True)
class SweepCell:
    factors: ScaleFactors
    pod: PodConfig | None  # None: no feasible pod at this point
    metric_value: float | None

    @property
    def shape(self) -> tuple | None:
        return None if self.pod is None else self.pod.shape

    @property
    def feasible(self) -> bool:
        return self.pod is not None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    cells: tuple[SweepCell, ...]

    def cell(self, factors: ScaleFactors) -> SweepCell:
        for c in self.cells:
            if c.factors == factors:
                return c
        raise KeyError(factors)

    def line(self, axis: str) -> list[SweepCell]:
        """Cells along ``axis`` with every other factor at 1.0, in grid order."""
        return [self.cell(ScaleFactors(**{axis: v})) for v in self.spec.grids[axis]]


def sweep(
    spec: SweepSpec,
    suite: WorkloadSuite,
    lib: ComponentLibrary,
    tech: TechnologyParams | None = None,
) -> SweepResult:
    """Re-select the optimal pod at every grid point of ``spec``."""
    pods = enumerate_pods(spec.space, lib)
    # scale factors touch energy only, so performance is evaluated once
    evaluations = evaluate_space(pods, suite, lib)
    cells = []
    for factors in spec.points():
        scaled = apply_scale_factors(lib, factors)
        # pods carry their core model, so they are rebuilt from the scaled library
        ranking = rank_pods(enumerate_pods(spec.space, scaled), spec.metric, suite, scaled, tech, evaluations=evaluations)
        if ranking:
            cells.append(SweepCell(factors, ranking[0].pod, ranking[0].metric_value))
        else:
            cells.append(SweepCell(factors, None, None))
    return SweepResult(spec, tuple(cells))


@dataclass(frozen=True)
class StabilityRegion:
    baseline: tuple
    per_axis_bounds: Mapping[str, tuple[float, float]]
    rectangle: Mapping[str, tuple[float, float]] | None = None

    def summary(self) -> str:
        n, c, ic = self.baseline
        lines = [f"baseline pod: {n} cores / {c:g} MB / {ic}"]
        for axis, (lo, hi) in self.per_axis_bounds.items():
            lines.append(f"{axis}: {lo:.6g} .. {hi:.6g}")
        if self.rectangle is not None:
            box = ", ".join(f"{a} {lo:.6g}..{hi:.6g}" for a, (lo, hi) in self.rectangle.items())
            lines.append(f"rectangle: {box}")
        return "\n".join(lines) + "\n"


def _shape_of(baseline: PodConfig | tuple) -> tuple:
    return baseline.shape if isinstance(baseline, PodConfig) else tuple(baseline)


def stability_region(result: SweepResult, baseline: PodConfig | tuple) -> StabilityRegion:
    """Largest contiguous interval around 1.0 per axis (other axes at 1.0)
    where the optimum equals ``baseline``; on a full-factorial sweep also a
    box verified at every grid point inside it."""
    shape = _shape_of(baseline)
    try:
        origin = result.cell(ScaleFactors())
    except KeyError:
        raise ValueError("sweep does not contain the all-ones point") from None
    if origin.shape != shape:
        raise ValueError(f"baseline {shape} is not optimal at the all-ones point (optimum {origin.shape})")

    bounds = {}
    for axis in result.spec.axes:
        grid = result.spec.grids[axis]
        line = [c.shape == shape for c in result.line(axis)]
        centre = grid.index(1.0)
        lo = hi = centre
        while lo > 0 and line[lo - 1]:
            lo -= 1
        while hi < len(grid) - 1 and line[hi + 1]:
            hi += 1
        bounds[axis] = (grid[lo], grid[hi])

    rectangle = None
    if result.spec.mode is SweepMode.FULL_FACTORIAL:
        rectangle = _verified_box(result, shape, bounds)
    return StabilityRegion(shape, bounds, rectangle)


def _verified_box(result: SweepResult, shape: tuple, bounds: Mapping[str, tuple[float, float]]):
    """Shrink the per-axis box greedily until every grid point inside it keeps
    ``shape`` optimal. Each step drops the outermost slab holding the most
    mismatches (ties: first axis, low side first)."""
    spec = result.spec
    idx = {}
    for a in spec.axes:
        g = spec.grids[a]
        idx[a] = [g.index(bounds[a][0]), g.index(bounds[a][1])]
    by_factors = {c.factors: c.shape == shape for c in result.cells}

    while True:
        inside = [
            f for f, ok in by_factors.items()
            if all(spec.grids[a][idx[a][0]] <= getattr(f, a) <= spec.grids[a][idx[a][1]] for a in spec.axes)
        ]
        bad = [f for f in inside if not by_factors[f]]
        if not bad:
            return {a: (spec.grids[a][idx[a][0]], spec.grids[a][idx[a][1]]) for a in spec.axes}
        best = None
        for a in spec.axes:
            g = spec.grids[a]
            centre = g.index(1.0)
            for side in (0, 1):
                if idx[a][side] == centre:
                    continue
                edge = g[idx[a][side]]
                hits = sum(1 for f in bad if getattr(f, a) == edge)
                if best is None or hits > best[0]:
                    best = (hits, a, side)
        if best is None or best[0] == 0:
            # mismatch sits on the all-ones lines themselves; nothing left to cut
            return {a: (1.0, 1.0) for a in spec.axes}
        _, a, side = best
        idx[a][side] += 1 if side == 0 else -1


def llc_trend_violations(result: SweepResult, axis: str, direction: int) -> list[tuple[float, float]]:
    """Adjacent grid pairs along ``axis`` where the optimal LLC capacity moves
    against ``direction`` (+1: must not shrink, -1: must not grow)."""
    out = []
    cells = [c for c in result.line(axis) if c.feasible]
    for a, b in zip(cells, cells[1:]):
        delta = b.pod.llc_capacity - a.pod.llc_capacity
        if delta * direction < 0:
            out.append((getattr(a.factors, axis), getattr(b.factors, axis)))
    return out


SWEEP_COLUMNS = (*AXES, "cores", "llc_mb", "interconnect", "metric")


def sweep_rows(result: SweepResult) -> list[dict]:
    rows = []
    for c in result.cells:
        row = {a: getattr(c.factors, a) for a in AXES}
        if c.feasible:
            row.update(cores=c.pod.core_count, llc_mb=c.pod.llc_capacity, interconnect=c.pod.interconnect.kind.value,
                       metric=c.metric_value)
        else:
            row.update(cores="", llc_mb="", interconnect="infeasible", metric="")
        rows.append(row)
    return rows
