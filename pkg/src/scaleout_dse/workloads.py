"""Analytic workload profiles and suite-level aggregation.

A workload document is TOML with one ``[[workload]]`` table per profile::

    [[workload]]
    name = "Web-Search"
    cpi_base = 0.9
    apki_llc = 30.0
    mpki_at_1mb = 6.0
    miss_exponent = 0.5
    mpki_floor = 1.0

    [workload.core_cpi_scale]
    inorder = 1.6
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

import tomli_w

from .components import CoreKind, parse_toml
from .errors import ConfigError

# cpi_base is defined at the out-of-order core; it cannot beat that core's width.
REFERENCE_PEAK_IPC = 3.0

DEFAULT_CORE_CPI_SCALE = {CoreKind.CONVENTIONAL: 0.7, CoreKind.OOO: 1.0, CoreKind.INORDER: 1.6}
DEFAULT_STALL_EXPOSURE = {CoreKind.CONVENTIONAL: 1.0, CoreKind.OOO: 1.0, CoreKind.INORDER: 1.0}

DEFAULT_WORKLOADS_RESOURCE = "workloads-default.toml"


class Aggregation(str, enum.Enum):
    ARITHMETIC_MEAN = "arithmetic_mean"


@dataclass(frozen=True, eq=True)
class WorkloadProfile:
    """Parameters of the CPI-stack model for one workload.

    ``stall_exposure`` is the fraction of memory latency each core kind fails
    to hide (1.0 means every miss stalls the core for the full latency).
    """

    name: str
    cpi_base: float
    apki_llc: float
    mpki_at_1mb: float
    miss_exponent: float
    mpki_floor: float
    core_cpi_scale: Mapping[CoreKind, float] = field(default_factory=lambda: dict(DEFAULT_CORE_CPI_SCALE))
    stall_exposure: Mapping[CoreKind, float] = field(default_factory=lambda: dict(DEFAULT_STALL_EXPOSURE))

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise ConfigError("must be a non-empty string", "name")
        for name in ("cpi_base", "apki_llc", "mpki_at_1mb", "miss_exponent", "mpki_floor"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"expected a finite number, got {value!r}", name)
        if self.cpi_base < 1.0 / REFERENCE_PEAK_IPC:
            raise ConfigError(f"must be >= 1/{REFERENCE_PEAK_IPC:g}, got {self.cpi_base}", "cpi_base")
        if self.miss_exponent < 0:
            raise ConfigError(f"must be >= 0, got {self.miss_exponent}", "miss_exponent")
        if not self.apki_llc >= self.mpki_at_1mb >= self.mpki_floor >= 0:
            raise ConfigError(
                f"need apki_llc >= mpki_at_1mb >= mpki_floor >= 0, got "
                f"{self.apki_llc} / {self.mpki_at_1mb} / {self.mpki_floor}",
                "mpki_at_1mb",
            )
        for mapping_name in ("core_cpi_scale", "stall_exposure"):
            mapping = getattr(self, mapping_name)
            missing = [k.value for k in CoreKind if k not in mapping]
            if missing:
                raise ConfigError(f"missing core kind(s) {', '.join(missing)}", mapping_name)
            for kind, value in mapping.items():
                if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                    raise ConfigError(f"must be > 0, got {value!r}", f"{mapping_name}.{kind.value}")


@dataclass(frozen=True)
class WorkloadSuite:
    profiles: tuple[WorkloadProfile, ...]
    aggregation: Aggregation = Aggregation.ARITHMETIC_MEAN

    def __post_init__(self):
        if not self.profiles:
            raise ConfigError("suite must contain at least one workload", "workload")
        seen = set()
        for p in self.profiles:
            if p.name in seen:
                raise ConfigError(f"duplicate workload name {p.name!r}", "workload")
            seen.add(p.name)

    def __len__(self) -> int:
        return len(self.profiles)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.profiles)


def llc_miss_ratio(profile: WorkloadProfile, capacity: float) -> float:
    """LLC misses per kilo-instruction at ``capacity`` MB (power law with a floor)."""
    if not capacity > 0:
        raise ValueError(f"LLC capacity must be > 0 MB, got {capacity!r}")
    return max(profile.mpki_floor, profile.mpki_at_1mb * capacity ** (-profile.miss_exponent))


def aggregate(values: Sequence[float], suite: WorkloadSuite) -> float:
    """Combine one value per workload into a suite-level number."""
    values = list(values)
    if len(values) != len(suite.profiles):
        raise ValueError(f"expected {len(suite.profiles)} values, got {len(values)}")
    return math.fsum(values) / len(values)


_PROFILE_KEYS = {f.name for f in fields(WorkloadProfile)}


def _kind_map(raw: Any, defaults: Mapping[CoreKind, float], where: str) -> dict[CoreKind, float]:
    if not isinstance(raw, Mapping):
        raise ConfigError("expected a table", where)
    out = dict(defaults)
    for key, value in raw.items():
        try:
            kind = CoreKind(key)
        except ValueError:
            raise ConfigError(f"unknown core kind {key!r}", where) from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", f"{where}.{key}")
        out[kind] = float(value)
    return out


def profile_from_dict(raw: Mapping[str, Any], index: int = 0) -> WorkloadProfile:
    where = f"workload[{index}]"
    if not isinstance(raw, Mapping):
        raise ConfigError("expected a table", where)
    unknown = sorted(set(raw) - _PROFILE_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(unknown)}", where)
    required = ("name", "cpi_base", "apki_llc", "mpki_at_1mb")
    missing = [k for k in required if k not in raw]
    if missing:
        raise ConfigError(f"missing key(s) {', '.join(missing)}", where)
    kwargs = {k: v for k, v in raw.items() if k not in ("core_cpi_scale", "stall_exposure")}
    kwargs.setdefault("miss_exponent", 0.5)
    kwargs.setdefault("mpki_floor", 0.0)
    kwargs["core_cpi_scale"] = _kind_map(raw.get("core_cpi_scale", {}), DEFAULT_CORE_CPI_SCALE, f"{where}.core_cpi_scale")
    kwargs["stall_exposure"] = _kind_map(raw.get("stall_exposure", {}), DEFAULT_STALL_EXPOSURE, f"{where}.stall_exposure")
    name = raw.get("name")
    try:
        return WorkloadProfile(**kwargs)
    except ConfigError as exc:
        label = f"workload {name!r}" if isinstance(name, str) else where
        raise ConfigError(exc.message, f"{label}.{exc.field}") from None


def suite_from_dict(doc: Mapping[str, Any]) -> WorkloadSuite:
    unknown = sorted(set(doc) - {"workload", "aggregation"})
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(unknown)}")
    raw = doc.get("workload", [])
    if not isinstance(raw, list):
        raise ConfigError("expected an array of tables", "workload")
    try:
        aggregation = Aggregation(doc.get("aggregation", Aggregation.ARITHMETIC_MEAN.value))
    except ValueError:
        raise ConfigError(f"unsupported policy {doc['aggregation']!r}", "aggregation") from None
    return WorkloadSuite(tuple(profile_from_dict(p, i) for i, p in enumerate(raw)), aggregation)


def load_workload_suite(source: str | Path | Mapping[str, Any] | None = None) -> WorkloadSuite:
    """Load a suite from a TOML path, TOML text, or a parsed mapping; ``None``
    loads the shipped calibrated suite."""
    if source is None:
        text = resources.files(__package__).joinpath("data", DEFAULT_WORKLOADS_RESOURCE).read_text("utf-8")
        return suite_from_dict(parse_toml(text, DEFAULT_WORKLOADS_RESOURCE))
    if isinstance(source, Mapping):
        return suite_from_dict(source)
    if isinstance(source, Path):
        return suite_from_dict(parse_toml(source.read_text("utf-8"), str(source)))
    return suite_from_dict(parse_toml(source))


def default_suite() -> WorkloadSuite:
    return load_workload_suite(None)


def suite_to_dict(suite: WorkloadSuite) -> dict:
    rows = []
    for p in suite.profiles:
        row = {f.name: getattr(p, f.name) for f in fields(p) if f.name not in ("core_cpi_scale", "stall_exposure")}
        row["core_cpi_scale"] = {k.value: p.core_cpi_scale[k] for k in CoreKind}
        row["stall_exposure"] = {k.value: p.stall_exposure[k] for k in CoreKind}
        rows.append(row)
    return {"aggregation": suite.aggregation.value, "workload": rows}


def dump_workload_suite(suite: WorkloadSuite) -> str:
    return tomli_w.dumps(suite_to_dict(suite))
