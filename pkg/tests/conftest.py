import pytest

from scaleout_dse.components import CoreKind, CoreModel, InterconnectKind, InterconnectModel, default_library
from scaleout_dse.workloads import WorkloadProfile, default_suite


@pytest.fixture(scope="session")
def lib():
    return default_library()


@pytest.fixture(scope="session")
def suite():
    return default_suite()


@pytest.fixture
def ooo_core():
    return CoreModel(CoreKind.OOO, area=1.1, peak_power=0.4, peak_ipc=3.0, static_fraction=0.3)


@pytest.fixture
def inorder_core():
    return CoreModel(CoreKind.INORDER, area=0.32, peak_power=0.2, peak_ipc=2.0, static_fraction=0.3)


@pytest.fixture
def flat_crossbar():
    # fixed 5-cycle crossbar without per-node wire delay
    return InterconnectModel(InterconnectKind.CROSSBAR, area_per_node=0.03, power_per_node=0.02,
                             max_power=5.0, hop_latency=5.0, wire_delay=0.0, max_nodes=64)


@pytest.fixture
def profile():
    return WorkloadProfile("w", cpi_base=0.8, apki_llc=60.0, mpki_at_1mb=20.0, miss_exponent=0.5, mpki_floor=0.0)
