"""CSV and text output with stable number formatting."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .chip import PUBLISHED_BASELINES, REPORT_COLUMNS, ChipDesign, compose_baseline, report_row
from .components import ComponentLibrary, CoreKind
from .dse import Metric, RankedResult, SearchSpace, compare_designs, optimal_pod
from .workloads import WorkloadSuite

SIGNIFICANT_DIGITS = 6


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def to_csv(rows: Iterable[Mapping], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def write_csv(path: Path, rows: Iterable[Mapping], columns: Sequence[str]) -> None:
    path.write_text(to_csv(rows, columns), encoding="utf-8")


def _parse_cell(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_csv(source: str | Path) -> list[dict]:
    """Read a CSV written by this package, converting numeric cells."""
    text = Path(source).read_text(encoding="utf-8") if isinstance(source, Path) else source
    return [{k: _parse_cell(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


RANKING_COLUMNS = (
    "rank", "core_kind", "pod_cores", "pod_llc_mb", "interconnect", "pods", "cores", "llc_mb", "mcs",
    "area_mm2", "chip_power_w", "power_w", "performance", "constraint", "pd", "p3",
)


def ranking_rows(ranking: Sequence[RankedResult]) -> list[dict]:
    rows = []
    for i, r in enumerate(ranking, 1):
        chip, m = r.chip, r.chip.metrics
        rows.append({
            "rank": i,
            "core_kind": r.pod.core.kind.value,
            "pod_cores": r.pod.core_count,
            "pod_llc_mb": r.pod.llc_capacity,
            "interconnect": r.pod.interconnect.kind.value,
            "pods": chip.pod_count,
            "cores": chip.total_cores,
            "llc_mb": chip.total_llc,
            "mcs": chip.channels,
            "area_mm2": chip.area,
            "chip_power_w": chip.chip_power,
            "power_w": chip.total_power_with_dram,
            "performance": chip.performance,
            "constraint": chip.limiting_constraint.value,
            "pd": m.pd,
            "p3": m.p3,
        })
    return rows


def reference_chips(
    suite: WorkloadSuite, lib: ComponentLibrary, metric: Metric | str = Metric.P3
) -> list[ChipDesign]:
    """The five comparison chips: published conventional/tiled shapes and the
    metric-optimal scale-out chip for each small core, in table order."""
    conventional, tiled_ooo, tiled_inorder = (compose_baseline(b, suite, lib) for b in PUBLISHED_BASELINES)
    so_ooo = optimal_pod(SearchSpace.for_core(CoreKind.OOO), metric, suite, lib).chip
    so_inorder = optimal_pod(SearchSpace.for_core(CoreKind.INORDER), metric, suite, lib).chip
    return [conventional, tiled_ooo, so_ooo, tiled_inorder, so_inorder]


def comparison_text(designs: Sequence[ChipDesign]) -> str:
    return "\n".join(c.render() for c in compare_designs(designs)) + "\n"


def table_csv(designs: Sequence[ChipDesign]) -> str:
    return to_csv([report_row(d) for d in designs], REPORT_COLUMNS)
