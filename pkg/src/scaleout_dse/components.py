"""Component library: per-component area/power/latency parameters at 14 nm.

The library is loaded from a TOML document with the sections ``[technology]``,
``[cores.<kind>]``, ``[llc]``, ``[interconnect.<kind>]``, ``[memory]`` and
``[soc]``. Every key is optional and falls back to the defaults below; unknown
sections or keys are rejected.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import sys
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, ModelError


class CoreKind(str, enum.Enum):
    CONVENTIONAL = "conventional"
    OOO = "ooo"
    INORDER = "inorder"


class InterconnectKind(str, enum.Enum):
    CROSSBAR = "crossbar"
    MESH = "mesh"
    FLATTENED_BUTTERFLY = "flattened_butterfly"


def _positive(obj: Any, *names: str) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ConfigError(f"must be > 0, got {value!r}", name)


def _non_negative(obj: Any, *names: str) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
            raise ConfigError(f"must be >= 0, got {value!r}", name)


@dataclass(frozen=True)
class CoreModel:
    """One core type. ``peak_power`` is drawn at ``peak_ipc``; a fixed
    ``static_fraction`` of it is drawn regardless of activity."""

    kind: CoreKind
    area: float  # mm^2
    peak_power: float  # W
    peak_ipc: float
    static_fraction: float

    def __post_init__(self):
        _positive(self, "area", "peak_power", "peak_ipc")
        if not 0.0 <= self.static_fraction <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {self.static_fraction!r}", "static_fraction")

    @property
    def static_power(self) -> float:
        return self.static_fraction * self.peak_power

    @property
    def dynamic_power(self) -> float:
        """Dynamic power at peak IPC."""
        return (1.0 - self.static_fraction) * self.peak_power


@dataclass(frozen=True)
class CacheModel:
    area_per_mb: float  # mm^2 / MB
    power_per_mb: float  # W / MB
    base_latency: float  # cycles at 1 MB
    latency_per_doubling: float  # cycles

    def __post_init__(self):
        _positive(self, "area_per_mb", "power_per_mb", "base_latency", "latency_per_doubling")

    def bank_latency(self, capacity_mb: float) -> float:
        return self.base_latency + self.latency_per_doubling * math.log2(capacity_mb)


@dataclass(frozen=True)
class InterconnectModel:
    """Intra-pod fabric.

    Traversal latency by kind, for ``n`` attached cores:

    * crossbar: ``hop_latency + wire_delay * n`` (the switch span grows with
      its port count);
    * mesh: ``ceil(2 * sqrt(n) / 3) * hop_latency``;
    * flattened butterfly: ``2 * (hop_latency + wire_delay * sqrt(n))``
      (two hops, each spanning a row or column of the grid).
    """

    kind: InterconnectKind
    area_per_node: float  # mm^2
    power_per_node: float  # W
    max_power: float  # W
    hop_latency: float  # cycles
    wire_delay: float = 0.0  # cycles, see class docstring
    max_nodes: int | None = None

    def __post_init__(self):
        _positive(self, "area_per_node", "power_per_node", "max_power", "hop_latency")
        _non_negative(self, "wire_delay")
        if self.max_nodes is not None and (not isinstance(self.max_nodes, int) or self.max_nodes < 1):
            raise ConfigError(f"must be a positive integer, got {self.max_nodes!r}", "max_nodes")

    def supports(self, nodes: int) -> bool:
        return self.max_nodes is None or nodes <= self.max_nodes

    def traversal_latency(self, nodes: int) -> float:
        if self.kind is InterconnectKind.CROSSBAR:
            return self.hop_latency + self.wire_delay * nodes
        if self.kind is InterconnectKind.MESH:
            return math.ceil(2.0 * math.sqrt(nodes) / 3.0) * self.hop_latency
        return 2.0 * (self.hop_latency + self.wire_delay * math.sqrt(nodes))

    def area(self, nodes: int) -> float:
        return self.area_per_node * nodes

    def power(self, nodes: int) -> float:
        return min(self.max_power, self.power_per_node * nodes)


@dataclass(frozen=True)
class MemoryChannelModel:
    controller_area: float  # mm^2 (PHY + controller)
    controller_power: float  # W
    peak_bandwidth: float  # GB/s
    utilization_cap: float
    background_power: float  # W per channel
    access_energy: float  # pJ/bit
    mem_latency: float  # cycles

    def __post_init__(self):
        _positive(self, "controller_area", "controller_power", "peak_bandwidth", "mem_latency")
        _non_negative(self, "background_power", "access_energy")
        if not 0.0 < self.utilization_cap <= 1.0:
            raise ConfigError(f"must lie in (0, 1], got {self.utilization_cap!r}", "utilization_cap")

    @property
    def usable_bandwidth(self) -> float:
        """Bandwidth one channel may carry under the utilization cap, GB/s."""
        return self.peak_bandwidth * self.utilization_cap


@dataclass(frozen=True)
class SoCOverhead:
    area: float  # mm^2
    power: float  # W

    def __post_init__(self):
        _non_negative(self, "area", "power")


@dataclass(frozen=True)
class TechnologyParams:
    frequency: float  # GHz
    area_budget: float  # mm^2
    power_budget: float  # W, chip only (DRAM excluded)
    max_channels: int

    def __post_init__(self):
        _positive(self, "frequency", "area_budget", "power_budget")
        if not isinstance(self.max_channels, int) or self.max_channels < 1:
            raise ConfigError(f"must be an integer >= 1, got {self.max_channels!r}", "max_channels")


@dataclass(frozen=True)
class ScaleFactors:
    """Multipliers on the energy-related library parameters."""

    core_dynamic: float = 1.0
    core_static: float = 1.0
    llc_power: float = 1.0
    dram_access_energy: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"scale factor {f.name} must be > 0, got {value!r}")

    @classmethod
    def axes(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def __mul__(self, other: "ScaleFactors") -> "ScaleFactors":
        return ScaleFactors(**{a: getattr(self, a) * getattr(other, a) for a in self.axes()})


@dataclass(frozen=True)
class ComponentLibrary:
    technology: TechnologyParams
    cores: Mapping[CoreKind, CoreModel]
    llc: CacheModel
    interconnects: Mapping[InterconnectKind, InterconnectModel]
    memory: MemoryChannelModel
    soc: SoCOverhead

    def core(self, kind: CoreKind | str) -> CoreModel:
        return self.cores[CoreKind(kind)]

    def interconnect(self, kind: InterconnectKind | str) -> InterconnectModel:
        return self.interconnects[InterconnectKind(kind)]


# 14 nm component figures plus calibrated constants. static_fraction and the
# fabric power figures are tuned so the reference chips sit at the 95 W budget.
DEFAULT_TECHNOLOGY = {"frequency": 2.0, "area_budget": 280.0, "power_budget": 95.0, "max_channels": 6}

DEFAULT_CORES = {
    CoreKind.CONVENTIONAL: {"area": 3.1, "peak_power": 3.8, "peak_ipc": 4.0, "static_fraction": 0.9351},
    CoreKind.OOO: {"area": 1.1, "peak_power": 0.4, "peak_ipc": 3.0, "static_fraction": 0.995},
    CoreKind.INORDER: {"area": 0.32, "peak_power": 0.2, "peak_ipc": 2.0, "static_fraction": 0.9715},
}

DEFAULT_LLC = {"area_per_mb": 0.62, "power_per_mb": 0.2, "base_latency": 8.0, "latency_per_doubling": 2.29}

DEFAULT_INTERCONNECTS = {
    InterconnectKind.CROSSBAR: {
        "area_per_node": 0.015, "power_per_node": 0.025, "max_power": 5.0,
        "hop_latency": 3.227, "wire_delay": 0.3013, "max_nodes": 64,
    },
    InterconnectKind.MESH: {
        "area_per_node": 0.018, "power_per_node": 0.022, "max_power": 1.5,
        "hop_latency": 6.0, "wire_delay": 0.0, "max_nodes": None,
    },
    InterconnectKind.FLATTENED_BUTTERFLY: {
        "area_per_node": 0.02911, "power_per_node": 0.04603, "max_power": 5.0,
        "hop_latency": 3.0, "wire_delay": 0.9866, "max_nodes": None,
    },
}

DEFAULT_MEMORY = {
    "controller_area": 12.0, "controller_power": 5.7, "peak_bandwidth": 19.2,
    "utilization_cap": 0.7, "background_power": 1.0, "access_energy": 90.0,
    "mem_latency": 200.0,
}

DEFAULT_SOC = {"area": 42.0, "power": 5.0}

DEFAULT_LIBRARY_RESOURCE = "library-default.toml"


def _build(cls, section: str, raw: Any, defaults: Mapping[str, Any], **fixed):
    if not isinstance(raw, Mapping):
        raise ConfigError("expected a table", section)
    names = {f.name for f in fields(cls)} - set(fixed)
    unknown = sorted(set(raw) - names)
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(unknown)}", section)
    values = dict(defaults)
    values.update(raw)
    kwargs = {}
    for f in fields(cls):
        if f.name in fixed:
            continue
        value = values.get(f.name)
        if isinstance(value, bool) or not (value is None or isinstance(value, (int, float))):
            raise ConfigError(f"expected a number, got {value!r}", f"{section}.{f.name}")
        if f.type in ("float",) and isinstance(value, int):
            value = float(value)
        kwargs[f.name] = value
    try:
        return cls(**kwargs, **fixed)
    except ConfigError as exc:
        raise ConfigError(exc.message, f"{section}.{exc.field}") from None


_SECTIONS = ("technology", "cores", "llc", "interconnect", "memory", "soc")


def library_from_dict(doc: Mapping[str, Any]) -> ComponentLibrary:
    """Validate a parsed library document and fill in defaults."""
    unknown = sorted(set(doc) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s) {', '.join(unknown)}")

    raw_cores = doc.get("cores", {})
    raw_ics = doc.get("interconnect", {})
    for section, raw, kinds in (("cores", raw_cores, CoreKind), ("interconnect", raw_ics, InterconnectKind)):
        if not isinstance(raw, Mapping):
            raise ConfigError("expected a table", section)
        bad = sorted(set(raw) - {k.value for k in kinds})
        if bad:
            raise ConfigError(f"unknown kind(s) {', '.join(bad)}", section)

    cores = {
        kind: _build(CoreModel, f"cores.{kind.value}", raw_cores.get(kind.value, {}), DEFAULT_CORES[kind], kind=kind)
        for kind in CoreKind
    }
    interconnects = {
        kind: _build(
            InterconnectModel, f"interconnect.{kind.value}", raw_ics.get(kind.value, {}),
            DEFAULT_INTERCONNECTS[kind], kind=kind,
        )
        for kind in InterconnectKind
    }
    return ComponentLibrary(
        technology=_build(TechnologyParams, "technology", doc.get("technology", {}), DEFAULT_TECHNOLOGY),
        cores=cores,
        llc=_build(CacheModel, "llc", doc.get("llc", {}), DEFAULT_LLC),
        interconnects=interconnects,
        memory=_build(MemoryChannelModel, "memory", doc.get("memory", {}), DEFAULT_MEMORY),
        soc=_build(SoCOverhead, "soc", doc.get("soc", {}), DEFAULT_SOC),
    )


def parse_toml(text: str, source: str = "<string>") -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the decoder message already carries "(at line X, column Y)"
        raise ConfigError(f"{source}: {exc}") from None


def load_component_library(source: str | Path | Mapping[str, Any] | None = None) -> ComponentLibrary:
    """Load a library from a TOML path, TOML text, or an already-parsed mapping.

    ``None`` loads the shipped default document.
    """
    if source is None:
        text = resources.files(__package__).joinpath("data", DEFAULT_LIBRARY_RESOURCE).read_text("utf-8")
        return library_from_dict(parse_toml(text, DEFAULT_LIBRARY_RESOURCE))
    if isinstance(source, Mapping):
        return library_from_dict(source)
    if isinstance(source, Path):
        return library_from_dict(parse_toml(source.read_text("utf-8"), str(source)))
    return library_from_dict(parse_toml(source))


def default_library() -> ComponentLibrary:
    return load_component_library(None)


def _plain(obj: Any, skip: tuple[str, ...] = ("kind",)) -> dict:
    out = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        if f.name in skip or value is None:
            continue
        out[f.name] = value
    return out


def library_to_dict(lib: ComponentLibrary) -> dict:
    return {
        "technology": _plain(lib.technology),
        "cores": {k.value: _plain(lib.cores[k]) for k in CoreKind},
        "llc": _plain(lib.llc),
        "interconnect": {k.value: _plain(lib.interconnects[k]) for k in InterconnectKind},
        "memory": _plain(lib.memory),
        "soc": _plain(lib.soc),
    }


def dump_component_library(lib: ComponentLibrary) -> str:
    return tomli_w.dumps(library_to_dict(lib))


def apply_scale_factors(lib: ComponentLibrary, factors: ScaleFactors) -> ComponentLibrary:
    """Return a copy of ``lib`` with energy parameters scaled; areas untouched."""
    if not isinstance(factors, ScaleFactors):
        raise TypeError("factors must be a ScaleFactors instance")
    cores = dict(lib.cores)
    if factors.core_static != 1.0 or factors.core_dynamic != 1.0:
        for kind, core in lib.cores.items():
            static = core.static_power * factors.core_static
            dynamic = core.dynamic_power * factors.core_dynamic
            peak = static + dynamic
            cores[kind] = replace(core, peak_power=peak, static_fraction=static / peak)
    llc = lib.llc
    if factors.llc_power != 1.0:
        llc = replace(llc, power_per_mb=llc.power_per_mb * factors.llc_power)
    memory = lib.memory
    if factors.dram_access_energy != 1.0:
        memory = replace(memory, access_energy=memory.access_energy * factors.dram_access_energy)
    return dataclasses.replace(lib, cores=cores, llc=llc, memory=memory)


def core_effective_power(core: CoreModel, achieved_ipc: float) -> float:
    """Core power at ``achieved_ipc``: static floor plus IPC-proportional dynamic part."""
    if achieved_ipc < 0 or achieved_ipc > core.peak_ipc * (1 + 1e-12):
        raise ModelError(f"achieved IPC {achieved_ipc} outside [0, {core.peak_ipc}] for {core.kind.value} core")
    return core.static_power + core.dynamic_power * (achieved_ipc / core.peak_ipc)
