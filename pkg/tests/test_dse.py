import random

import pytest

from scaleout_dse.components import CoreKind, InterconnectKind
from scaleout_dse.dse import (
    Metric,
    SearchSpace,
    compare_designs,
    compare_values,
    enumerate_pods,
    evaluate_space,
    optimal_pod,
    rank_pods,
)
from scaleout_dse.chip import compose_scale_out
from scaleout_dse.errors import InfeasibleError
from scaleout_dse.perf import PodConfig


def test_singleton_space(lib):
    space = SearchSpace(core_counts=(16,), llc_capacities=(4.0,), interconnects=(InterconnectKind.CROSSBAR,))
    pods = enumerate_pods(space, lib)
    assert [p.shape for p in pods] == [(16, 4.0, "crossbar")]


def test_full_space_count(lib):
    pods = enumerate_pods(SearchSpace(), lib)
    assert len(pods) == 256 * 4 * 3 - (256 - 64) * 4
    assert not any(p.shape[0] == 65 and p.shape[2] == "crossbar" for p in pods)


@pytest.mark.parametrize("kwargs", [
    {"core_counts": ()},
    {"core_counts": (0,)},
    {"core_counts": (257,)},
    {"llc_capacities": (0.5,)},
    {"llc_capacities": (16.0,)},
    {"interconnects": ("ring",)},
])
def test_space_validation(kwargs):
    with pytest.raises(ValueError):
        SearchSpace(**kwargs)


def test_infeasible_space_raises(lib, suite):
    space = SearchSpace.for_core(CoreKind.CONVENTIONAL, core_counts=(256,), llc_capacities=(8.0,),
                                 interconnects=(InterconnectKind.MESH,))
    with pytest.raises(InfeasibleError):
        optimal_pod(space, Metric.P3, suite, lib)


def test_ranking_is_sorted_and_cache_transparent(lib, suite):
    space = SearchSpace(core_counts=tuple(range(4, 40, 4)), llc_capacities=(2.0, 4.0))
    pods = enumerate_pods(space, lib)
    plain = rank_pods(pods, "pd", suite, lib)
    cached = rank_pods(pods, "pd", suite, lib, evaluations=evaluate_space(pods, suite, lib))
    assert [r.pod.sort_key for r in plain] == [r.pod.sort_key for r in cached]
    values = [r.metric_value for r in plain]
    assert values == sorted(values, reverse=True)


def test_permutation_invariance(lib, suite):
    space = SearchSpace(core_counts=tuple(range(8, 48, 2)), llc_capacities=(2.0, 4.0, 8.0))
    pods = enumerate_pods(space, lib)
    best = rank_pods(pods, Metric.P3, suite, lib)[0].pod
    shuffled = list(pods)
    random.Random(7).shuffle(shuffled)
    assert rank_pods(shuffled, Metric.P3, suite, lib)[0].pod == best


def test_comparison_rendering():
    c = compare_values("Scale-Out (OoO)", 0.84, "Conventional", 0.22, "p3")
    assert c.ratio == pytest.approx(3.818, abs=1e-3)
    assert c.render() == "Scale-Out (OoO) vs Conventional: P3 3.82x (+281.8%)"
    assert compare_values("a", 0.84, "b", 0.67, "p3").percent == pytest.approx(25.4, abs=0.05)
    assert compare_values("a", 0.83, "b", 0.58, "p3").percent == pytest.approx(43.1, abs=0.05)


def test_compare_designs_puts_the_later_design_first(lib, suite):
    a = compose_scale_out(PodConfig(lib.core("ooo"), 16, 4.0, lib.interconnect("crossbar")), suite, lib)
    b = compose_scale_out(PodConfig(lib.core("inorder"), 32, 4.0, lib.interconnect("crossbar")), suite, lib)
    p3, pd = compare_designs([a, b])
    assert (p3.metric, pd.metric) == (Metric.P3, Metric.PD)
    assert p3.ratio == pytest.approx(b.metrics.p3 / a.metrics.p3)
    assert pd.render().startswith(f"{b.label} vs {a.label}: PD ")


def test_compare_designs_needs_two():
    with pytest.raises(ValueError):
        compare_designs([])
