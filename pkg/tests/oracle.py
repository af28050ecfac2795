"""Brute-force reference for chip composition and pod selection.

Written from the model definitions without reusing the engine's helpers: it
tries every replication count from 1 upwards and recomputes each budget
from scratch.
"""

import math


def _ipc(core, n, c, ic, prof, lib):
    bank = lib.llc.base_latency + lib.llc.latency_per_doubling * math.log2(c)
    if ic.kind.value == "crossbar":
        trav = ic.hop_latency + ic.wire_delay * n
    elif ic.kind.value == "mesh":
        trav = math.ceil(2 * math.sqrt(n) / 3) * ic.hop_latency
    else:
        trav = 2 * (ic.hop_latency + ic.wire_delay * math.sqrt(n))
    mpki = max(prof.mpki_floor, prof.mpki_at_1mb * c ** -prof.miss_exponent)
    cpi = (prof.cpi_base * prof.core_cpi_scale[core.kind] + prof.apki_llc * (bank + trav) / 1000
           + prof.stall_exposure[core.kind] * mpki * lib.memory.mem_latency / 1000)
    return min(1 / cpi, core.peak_ipc), mpki


def chip(pod, suite, lib):
    """(metric tuple) for the largest feasible replication, or None."""
    core, n, c, ic = pod.core, pod.core_count, pod.llc_capacity, pod.interconnect
    tech, mem = lib.technology, lib.memory
    usable = mem.peak_bandwidth * mem.utilization_cap
    ipcs, bws = [], []
    for prof in suite.profiles:
        ipc, mpki = _ipc(core, n, c, ic, prof, lib)
        ipcs.append(ipc)
        bws.append(n * ipc * tech.frequency * mpki / 1000 * 64)
    area1 = n * core.area + c * lib.llc.area_per_mb + n * ic.area_per_node
    powers = []
    for ipc in ipcs:
        s = core.static_fraction * core.peak_power
        d = (1 - core.static_fraction) * core.peak_power
        powers.append(n * (s + d * ipc / core.peak_ipc) + c * lib.llc.power_per_mb
                      + min(ic.max_power, n * ic.power_per_node))
    p1 = sum(powers) / len(powers)
    best = None
    k = 1
    while True:
        demand = k * max(bws)
        ch = 1
        while demand > ch * usable:
            ch += 1
        area = k * area1 + ch * mem.controller_area + lib.soc.area
        power = k * p1 + ch * mem.controller_power + lib.soc.power
        if power > tech.power_budget or area > tech.area_budget or ch > tech.max_channels:
            break
        dram = sum(ch * mem.background_power + mem.access_energy * k * b * 8e-3 for b in bws) / len(bws)
        perf = k * n * sum(ipcs) / len(ipcs)
        best = (perf / area, perf / (power + dram), area, power + dram, k)
        k += 1
    return best


def select(pods, suite, lib, metric):
    """Argmax with the documented tie-break: metric, then area, power, shape."""
    scored = []
    for pod in pods:
        r = chip(pod, suite, lib)
        if r is None:
            continue
        value = r[0] if metric == "pd" else r[1]
        scored.append(((-value, r[2], r[3], pod.sort_key), pod))
    if not scored:
        return None
    return min(scored, key=lambda t: t[0])[1]
