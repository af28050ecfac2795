import dataclasses
import math

from hypothesis import given, settings, strategies as st

from scaleout_dse.chip import _budget, _PodTotals, compose_scale_out, metrics_from
from scaleout_dse.components import (
    CoreKind,
    CoreModel,
    InterconnectKind,
    ScaleFactors,
    apply_scale_factors,
    core_effective_power,
    default_library,
    dump_component_library,
    library_from_dict,
    load_component_library,
)
from scaleout_dse.dse import Metric, RankedResult, SearchSpace, enumerate_pods, rank_pods, ranking_key
from scaleout_dse.errors import InfeasibleError
from scaleout_dse.perf import PodConfig, bandwidth_demand, evaluate_pod, per_core_ipc
from scaleout_dse.workloads import (
    WorkloadProfile,
    WorkloadSuite,
    aggregate,
    dump_workload_suite,
    llc_miss_ratio,
    load_workload_suite,
)

LIB = default_library()
pos = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)
factor = st.floats(min_value=0.1, max_value=10.0, allow_nan=False)
capacity = st.floats(min_value=0.1, max_value=64.0, allow_nan=False)


@st.composite
def profiles(draw, name="w"):
    apki = draw(st.floats(min_value=0.0, max_value=80.0))
    m1 = draw(st.floats(min_value=0.0, max_value=apki))
    floor = draw(st.floats(min_value=0.0, max_value=m1))
    return WorkloadProfile(
        name,
        cpi_base=draw(st.floats(min_value=0.34, max_value=3.0)),
        apki_llc=apki,
        mpki_at_1mb=m1,
        miss_exponent=draw(st.floats(min_value=0.0, max_value=1.5)),
        mpki_floor=floor,
    )


@st.composite
def suites(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    return WorkloadSuite(tuple(draw(profiles(f"w{i}")) for i in range(n)))


@st.composite
def pods(draw):
    kind = draw(st.sampled_from(list(CoreKind)))
    ic = draw(st.sampled_from(list(InterconnectKind)))
    n = draw(st.integers(min_value=1, max_value=64))
    c = draw(st.sampled_from([1.0, 2.0, 4.0, 8.0]))
    return PodConfig(LIB.core(kind), n, c, LIB.interconnect(ic))


@given(profiles(), capacity, capacity)
def test_miss_ratio_non_increasing(p, a, b):
    lo, hi = sorted((a, b))
    assert llc_miss_ratio(p, hi) <= llc_miss_ratio(p, lo)


@given(profiles(), capacity)
def test_miss_ratio_bounds(p, c):
    m = llc_miss_ratio(p, c)
    assert p.mpki_floor <= m <= max(p.mpki_at_1mb, llc_miss_ratio(p, 0.1))


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=8), st.randoms())
def test_aggregate_order_independent(values, rnd):
    suite = WorkloadSuite(tuple(WorkloadProfile(f"w{i}", 1.0, 1.0, 1.0, 0.5, 0.0) for i in range(len(values))))
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert aggregate(values, suite) == aggregate(shuffled, suite)


@given(pos, st.floats(min_value=1.0, max_value=4.0), st.floats(min_value=0.0, max_value=1.0), st.data())
def test_core_power_monotone_and_linear(peak, peak_ipc, s, data):
    core = CoreModel(CoreKind.OOO, 1.0, peak, peak_ipc, s)
    a = data.draw(st.floats(min_value=0.0, max_value=peak_ipc))
    b = data.draw(st.floats(min_value=a, max_value=peak_ipc))
    pa, pb = core_effective_power(core, a), core_effective_power(core, b)
    assert pa <= pb + 1e-12
    lo, hi = core_effective_power(core, 0.0), core_effective_power(core, peak_ipc)
    assert math.isclose(pa, lo + (hi - lo) * a / peak_ipc, rel_tol=1e-9, abs_tol=1e-12)


@given(factor, factor, factor, factor, factor, factor, factor, factor)
def test_scale_factors_compose(a1, a2, a3, a4, b1, b2, b3, b4):
    fa, fb = ScaleFactors(a1, a2, a3, a4), ScaleFactors(b1, b2, b3, b4)
    once = apply_scale_factors(LIB, fa * fb)
    twice = apply_scale_factors(apply_scale_factors(LIB, fa), fb)
    assert math.isclose(once.llc.power_per_mb, twice.llc.power_per_mb, rel_tol=1e-12)
    assert math.isclose(once.memory.access_energy, twice.memory.access_energy, rel_tol=1e-12)
    for k in CoreKind:
        assert math.isclose(once.core(k).static_power, twice.core(k).static_power, rel_tol=1e-9)
        assert math.isclose(once.core(k).dynamic_power, twice.core(k).dynamic_power, rel_tol=1e-9)
        assert once.core(k).area == LIB.core(k).area


@given(pods(), profiles())
def test_ipc_monotone_in_latencies(pod, p):
    base = per_core_ipc(pod, p, LIB.llc, LIB.memory)
    assert base <= pod.core.peak_ipc
    slower_llc = per_core_ipc(pod, p, LIB.llc, LIB.memory, latency=LIB.llc.bank_latency(pod.llc_capacity) + 500)
    assert slower_llc <= base
    slow_mem = library_from_dict({"memory": {"mem_latency": LIB.memory.mem_latency * 2}})
    assert per_core_ipc(pod, p, LIB.llc, slow_mem.memory) <= base


@given(st.sampled_from(list(CoreKind)), st.integers(min_value=1, max_value=64), profiles())
def test_bandwidth_non_increasing_in_capacity(kind, n, p):
    core, ic = LIB.core(kind), LIB.interconnect("crossbar")
    bws = []
    for c in (1.0, 2.0, 4.0, 8.0):
        pod = PodConfig(core, n, c, ic)
        bws.append(bandwidth_demand(pod, p, per_core_ipc(pod, p, LIB.llc, LIB.memory), LIB.technology))
    assert all(b <= a * (1 + 1e-12) for a, b in zip(bws, bws[1:]))


@given(pods(), profiles())
def test_ipc_non_decreasing_in_capacity_at_fixed_latency(pod, p):
    lat = 20.0
    small = per_core_ipc(pod, p, LIB.llc, LIB.memory, latency=lat)
    bigger = PodConfig(pod.core, pod.core_count, pod.llc_capacity * 2, pod.interconnect)
    assert per_core_ipc(bigger, p, LIB.llc, LIB.memory, latency=lat) >= small


@given(st.floats(min_value=0.0, max_value=1e4), pos, pos)
def test_metric_identities(perf, area, power):
    m = metrics_from(perf, area * 10, power * 10)
    assert math.isclose(m.pd * area * 10, perf, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(m.p3 * power * 10, perf, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(suites(), st.sampled_from(list(Metric)), st.floats(min_value=0.01, max_value=100.0))
def test_argmax_invariant_under_common_performance_scaling(suite, metric, scale):
    space = SearchSpace(core_counts=(4, 8, 16, 32), llc_capacities=(1.0, 4.0),
                        interconnects=(InterconnectKind.CROSSBAR, InterconnectKind.MESH))
    ranked = rank_pods(enumerate_pods(space, LIB), metric, suite, LIB)
    if not ranked:
        return
    scaled = []
    for r in ranked:
        chip = dataclasses.replace(r.chip, performance=r.chip.performance * scale)
        scaled.append(RankedResult(r.pod, chip, metric.of(chip)))
    assert min(scaled, key=ranking_key).pod == ranked[0].pod


@settings(max_examples=40, deadline=None)
@given(pods(), suites())
def test_replication_is_maximal_and_monotone(pod, suite):
    try:
        d = compose_scale_out(pod, suite, LIB)
    except InfeasibleError:
        return
    totals = _PodTotals(pod, evaluate_pod(pod, suite, LIB), suite, LIB)
    for k in range(1, d.pod_count + 1):
        assert not _budget(totals, k, LIB).failures(LIB.technology)
    over = _budget(totals, d.pod_count + 1, LIB).failures(LIB.technology)
    assert d.limiting_constraint in over
    assert d.bandwidth <= d.channels * LIB.memory.usable_bandwidth * (1 + 1e-12)


@given(st.dictionaries(st.sampled_from(["access_energy", "mem_latency", "background_power"]), pos, max_size=3))
def test_library_round_trip(memory):
    lib = library_from_dict({"memory": memory})
    assert load_component_library(dump_component_library(lib)) == lib


@given(suites())
def test_suite_round_trip(suite):
    assert load_workload_suite(dump_workload_suite(suite)) == suite
