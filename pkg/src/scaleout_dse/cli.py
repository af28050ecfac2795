"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 infeasible design space, 3 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import report
from .chip import REPORT_COLUMNS, compose_scale_out, report_row
from .components import (
    DEFAULT_LIBRARY_RESOURCE,
    ComponentLibrary,
    CoreKind,
    InterconnectKind,
    library_from_dict,
    parse_toml,
)
from .dse import DEFAULT_LLC_CAPACITIES, Metric, SearchSpace, enumerate_pods, rank_pods
from .errors import ConfigError, InfeasibleError
from .perf import MAX_POD_CORES, PodConfig
from .sensitivity import AXES, SweepMode, SweepSpec, log_grid, stability_region, sweep, sweep_rows, SWEEP_COLUMNS
from .workloads import DEFAULT_WORKLOADS_RESOURCE, WorkloadSuite, suite_from_dict

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3

LIBRARY_SECTIONS = ("technology", "cores", "llc", "interconnect", "memory", "soc")


def _read_document(path: str | None, resource: str) -> dict:
    if path is None:
        text = resources.files(__package__).joinpath("data", resource).read_text("utf-8")
        return parse_toml(text, resource)
    p = Path(path)
    return parse_toml(p.read_text(encoding="utf-8"), str(p))


def _parse_value(text: str):
    try:
        return parse_toml(f"v = {text}")["v"]
    except ConfigError:
        return text


def apply_overrides(library_doc: dict, workloads_doc: dict, overrides: Sequence[str]) -> tuple[dict, dict]:
    """Apply ``dotted.path=value`` overrides onto copies of the raw documents.

    Library paths start with a library section (``memory.access_energy=95``);
    workload paths are ``workload.<name>.<field>``.
    """
    library_doc, workloads_doc = copy.deepcopy(library_doc), copy.deepcopy(workloads_doc)
    for item in overrides:
        key, sep, raw = item.partition("=")
        parts = key.strip().split(".")
        if not sep or len(parts) < 2 or not all(parts):
            raise ConfigError(f"override {item!r} is not of the form dotted.path=value")
        value = _parse_value(raw.strip())
        if parts[0] in LIBRARY_SECTIONS:
            target = library_doc
        elif parts[0] == "workload":
            if len(parts) < 3:
                raise ConfigError(f"workload override {item!r} needs workload.<name>.<field>")
            matches = [w for w in workloads_doc.get("workload", []) if w.get("name") == parts[1]]
            if not matches:
                raise ConfigError(f"no workload named {parts[1]!r}", key)
            target, parts = matches[0], parts[2:]
        else:
            raise ConfigError(f"unknown override path {key!r}")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"{part!r} is not a table", key)
        target[parts[-1]] = value
    return library_doc, workloads_doc


def load_inputs(args) -> tuple[ComponentLibrary, WorkloadSuite]:
    library_doc = _read_document(args.library, DEFAULT_LIBRARY_RESOURCE)
    workloads_doc = _read_document(args.workloads, DEFAULT_WORKLOADS_RESOURCE)
    library_doc, workloads_doc = apply_overrides(library_doc, workloads_doc, args.override)
    return library_from_dict(library_doc), suite_from_dict(workloads_doc)


def _search_space(args) -> SearchSpace:
    counts = tuple(range(1, args.max_cores + 1))
    llc = tuple(args.llc) if args.llc else DEFAULT_LLC_CAPACITIES
    ics = tuple(args.interconnect) if args.interconnect else tuple(InterconnectKind)
    return SearchSpace(core_kinds=(CoreKind(args.cores),), core_counts=counts, llc_capacities=llc, interconnects=ics)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_explore(args, lib, suite) -> int:
    space = _search_space(args)
    ranking = rank_pods(enumerate_pods(space, lib), args.metric, suite, lib)
    if not ranking:
        raise InfeasibleError("no pod in the search space yields a feasible chip")
    out = _out_dir(args)
    report.write_csv(out / "ranking.csv", report.ranking_rows(ranking), report.RANKING_COLUMNS)
    best = ranking[0]
    text = (
        f"metric: {Metric(args.metric).value}\n"
        f"core_kind: {best.pod.core.kind.value}\n"
        f"pod_cores: {best.pod.core_count}\n"
        f"pod_llc_mb: {report.fmt(best.pod.llc_capacity)}\n"
        f"interconnect: {best.pod.interconnect.kind.value}\n"
        f"pods: {best.chip.pod_count}\n"
        f"value: {report.fmt(best.metric_value)}\n"
    )
    (out / "optimum.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_compose(args, lib, suite) -> int:
    pod = PodConfig(lib.core(args.cores), args.pod_cores, args.pod_llc, lib.interconnect(args.pod_interconnect))
    design = compose_scale_out(pod, suite, lib)
    text = report.to_csv([report_row(design)], REPORT_COLUMNS)
    (_out_dir(args) / "chip.csv").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args, lib, suite) -> int:
    axes = tuple(args.axis) if args.axis else AXES
    grid = log_grid(args.points)
    spec = SweepSpec(
        axes=axes,
        grids={a: grid for a in axes},
        metric=args.metric,
        space=_search_space(args),
        mode=SweepMode.FULL_FACTORIAL if args.full_factorial else SweepMode.ONE_AT_A_TIME,
    )
    result = sweep(spec, suite, lib)
    out = _out_dir(args)
    report.write_csv(out / "sweep.csv", sweep_rows(result), SWEEP_COLUMNS)
    origin = result.cells[0]
    if origin.pod is None:
        raise InfeasibleError("no feasible pod at the unscaled point")
    region = stability_region(result, origin.pod)
    text = region.summary()
    (out / "stability.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_report(args, lib, suite) -> int:
    designs = report.reference_chips(suite, lib, args.metric)
    out = _out_dir(args)
    table = report.table_csv(designs)
    (out / "report.csv").write_text(table, encoding="utf-8")
    (out / "comparisons.txt").write_text(report.comparison_text(designs), encoding="utf-8")
    sys.stdout.write(table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--library", help="component library TOML (default: shipped 14 nm library)")
    common.add_argument("--workloads", help="workload suite TOML (default: shipped calibrated suite)")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="dotted-path override, e.g. memory.access_energy=120 (repeatable)")
    common.add_argument("--metric", choices=[m.value for m in Metric], default=Metric.P3.value)
    common.add_argument("--cores", choices=[k.value for k in CoreKind], default=CoreKind.OOO.value)
    common.add_argument("--out", default=".", help="output directory")

    space = argparse.ArgumentParser(add_help=False)
    space.add_argument("--llc", type=float, action="append", metavar="MB",
                       help="pod LLC capacity to consider, 1-8 MB (repeatable)")
    space.add_argument("--interconnect", action="append", choices=[k.value for k in InterconnectKind])
    space.add_argument("--max-cores", type=int, default=MAX_POD_CORES)

    parser = argparse.ArgumentParser(prog="scaleout-dse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("explore", parents=[common, space], help="rank every pod and report the optimum")
    p = sub.add_parser("compose", parents=[common], help="build the scale-out chip for one pod")
    p.add_argument("--pod-cores", type=int, default=16)
    p.add_argument("--pod-llc", type=float, default=4.0)
    p.add_argument("--pod-interconnect", choices=[k.value for k in InterconnectKind], default="crossbar")
    p = sub.add_parser("sweep", parents=[common, space], help="scale energy parameters and track the optimum")
    p.add_argument("--axis", action="append", choices=list(AXES))
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--full-factorial", action="store_true")
    sub.add_parser("report", parents=[common], help="write the five-design comparison table")
    return parser


COMMANDS = {"explore": cmd_explore, "compose": cmd_compose, "sweep": cmd_sweep, "report": cmd_report}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lib, suite = load_inputs(args)
        return COMMANDS[args.command](args, lib, suite)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
