"""Cycle-accurate simulation of one decoding iteration on the torus NoC.

Synchronous model, two cycles per hop (crossbar traversal, then link).  Each
cycle, in order: scheduled link/ejection deliveries land, finished checks
emit their messages, each PE injects at most one flit into its LOCAL queue,
PEs start reading a check once all its inputs are present, and every router
arbitrates each output port round-robin over the requesting input FIFOs.
FIFOs are unbounded during simulation; their peak occupancy sizes the
hardware queues afterwards.

Wrap messages (a variable's last check back to its first) are delivered
inside the window but consumed only in the next iteration, so the same
single-iteration program repeats unchanged; on iteration one the wrap slots
hold the received soft values instead.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .schedule import SRC_BYPASS, SRC_CHAIN, InjectionSchedule
from .topology import OPPOSITE, Port, Topology, route_o1turn
from .trace import FlitRecord, NocTrace, SimulationDeadlock

HOP_CYCLES = 2  # one cycle through the crossbar, one on the link


def _mix64(a: int, b: int) -> int:
    """splitmix64-style hash; the per-flit routing coin must not depend on
    event order, only on (seed, uid)."""
    x = (a * 0x9E3779B97F4A7C15 + b) & 0xFFFFFFFFFFFFFFFF
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


class _Flit:
    __slots__ = ("rec", "route", "hop")

    def __init__(self, rec: FlitRecord, route: list[Port]):
        self.rec = rec
        self.route = route
        self.hop = 0

    @property
    def next_port(self) -> Port:
        return self.route[self.hop]


def simulate_iteration(
    topo: Topology,
    schedule: InjectionSchedule,
    seed: int,
    pipeline_depth: int = 4,
    label: str = "",
) -> NocTrace:
    if schedule.p != topo.p:
        raise ValueError(f"schedule is for {schedule.p} PEs, topology has {topo.p}")
    p = topo.p
    n_checks = schedule.n_checks

    # flits, with O1Turn routes fixed up front by the seeded coin
    flits: list[_Flit] = []
    for e in schedule.network_flits:
        src_pe = int(schedule.host[e.src_check])
        coin = _mix64(seed, e.uid) & 1
        rec = FlitRecord(
            uid=e.uid, var=e.var, src_check=e.src_check, dst_check=e.dst_check,
            dst_pos=e.dst_pos, src_pe=src_pe, dst_pe=e.dst_pe, coin=coin, wrap=e.wrap,
        )
        flits.append(_Flit(rec, route_o1turn(src_pe, e.dst_pe, topo.n, coin)))

    fifos = [[deque() for _ in range(5)] for _ in range(p)]
    fifo_max = np.zeros((p, 5), dtype=np.int64)
    rr_ptr = np.zeros((p, 5), dtype=np.int64)
    rm_ops: list[list[tuple[int, int, int]]] = [[] for _ in range(p)]
    arrivals: list[list[tuple[int, int, int, int, int]]] = [[] for _ in range(p)]

    # per-check availability: inputs other than wrap/self must arrive first
    src_kinds = schedule.input_src
    missing = ((src_kinds == SRC_CHAIN) | (src_kinds == SRC_BYPASS)).sum(axis=1).astype(np.int64)

    serve = schedule.order
    ptr = [0] * p
    read_free = [0] * p
    inj_queue: list[deque[_Flit]] = [deque() for _ in range(p)]
    flit_by_uid = {f.rec.uid: f for f in flits}
    emission_flits = {
        (e.src_check, e.src_pos): flit_by_uid[e.uid]
        for m in range(n_checks)
        for e in schedule.emissions[m]
        if e.network
    }

    deliveries: dict[int, list[tuple[str, int, int, _Flit]]] = {}
    completions: dict[int, list[int]] = {}
    check_start = np.full(n_checks, -1, dtype=np.int64)
    check_complete = np.full(n_checks, -1, dtype=np.int64)
    deg_of = {m: len(schedule.emissions[m]) for m in range(n_checks)}

    delivered = 0
    last_receipt = -1
    last_progress = 0
    watchdog = max(64, topo.n * topo.n + pipeline_depth + 16)
    pending_checks = sum(len(s) for s in serve)
    t = 0

    def push_fifo(node: int, port: int, flit: _Flit):
        fifos[node][port].append(flit)
        depth = len(fifos[node][port])
        if depth > fifo_max[node, port]:
            fifo_max[node, port] = depth

    while True:
        progressed = False

        # 1. deliveries scheduled for this cycle
        for kind, node, port, flit in deliveries.pop(t, ()):
            progressed = True
            if kind == "link":
                push_fifo(node, port, flit)
            else:  # ejection into the PE
                delivered += 1
                flit.rec.receipt_cycle = t
                last_receipt = max(last_receipt, t)
                if not flit.rec.wrap:
                    missing[flit.rec.dst_check] -= 1

        # 2. checks leaving the pipeline emit their messages
        for m in completions.pop(t, ()):
            progressed = True
            check_complete[m] = t
            for e in schedule.emissions[m]:
                if e.network:
                    f = emission_flits[(e.src_check, e.src_pos)]
                    inj_queue[int(schedule.host[m])].append(f)
                elif not e.wrap:
                    missing[e.dst_check] -= 1  # same-PE forward, available now

        # 3. injection: one flit per PE per cycle through the LOCAL port
        for pe in range(p):
            if inj_queue[pe]:
                f = inj_queue[pe].popleft()
                f.rec.inject_cycle = t
                push_fifo(pe, Port.LOCAL, f)
                progressed = True

        # 4. PEs start reading the next served check when its block is full
        for pe in range(p):
            if ptr[pe] < len(serve[pe]) and read_free[pe] <= t:
                m = serve[pe][ptr[pe]]
                if missing[m] == 0:
                    check_start[m] = t
                    d = deg_of[m]
                    read_free[pe] = t + d
                    completions.setdefault(t + d + pipeline_depth, []).append(m)
                    ptr[pe] += 1
                    pending_checks -= 1
                    progressed = True

        # 5. arbitration: each output picks one requesting input, round-robin
        for node in range(p):
            nf = fifos[node]
            busy = [bool(q) for q in nf]
            if not any(busy):
                continue
            for out in range(5):
                base = int(rr_ptr[node, out])
                for k in range(5):
                    inp = (base + k) % 5
                    q = nf[inp]
                    if q and int(q[0].next_port) == out:
                        flit = q.popleft()
                        rm_ops[node].append((t, out, inp))
                        rr_ptr[node, out] = (inp + 1) % 5
                        flit.hop += 1
                        flit.rec.hops += 1
                        if out == Port.LOCAL:
                            pe = node
                            arrivals[pe].append(
                                (flit.rec.dst_check, flit.rec.dst_pos,
                                 flit.rec.src_pe, flit.rec.uid, t + HOP_CYCLES)
                            )
                            deliveries.setdefault(t + HOP_CYCLES, []).append(
                                ("eject", pe, Port.LOCAL, flit)
                            )
                        else:
                            nbr = topo.neighbor(node, Port(out))
                            deliveries.setdefault(t + HOP_CYCLES, []).append(
                                ("link", nbr, int(OPPOSITE[Port(out)]), flit)
                            )
                        progressed = True
                        break

        if progressed:
            last_progress = t

        done = (
            delivered == len(flits)
            and pending_checks == 0
            and not completions
            and not deliveries
            and all(not q for q in inj_queue)
        )
        if done:
            break
        if t - last_progress > watchdog:
            stuck = [m for m in range(n_checks) if check_start[m] < 0]
            raise SimulationDeadlock(
                f"no progress since cycle {last_progress} (cycle {t}); "
                f"{len(flits) - delivered} flits in flight, "
                f"{len(stuck)} checks not started (first: {stuck[:5]})"
            )
        t += 1

    k_i = last_receipt + 1 if last_receipt >= 0 else 0

    trace = NocTrace(
        n=topo.n,
        seed=seed,
        pipeline_depth=pipeline_depth,
        k_i=k_i,
        rm_ops=rm_ops,
        arrivals=arrivals,
        fifo_max=fifo_max,
        flits=[f.rec for f in flits],
        check_start=check_start,
        check_complete=check_complete,
        n_network=len(flits),
        n_bypass=schedule.n_bypass,
        label=label,
    )
    _assert_invariants(trace, schedule)
    return trace


def _assert_invariants(trace: NocTrace, schedule: InjectionSchedule) -> None:
    # conservation: everything injected arrives exactly once
    receipts = [f.receipt_cycle for f in trace.flits]
    if any(r < 0 for r in receipts):
        raise AssertionError("undelivered flit after drain")
    for pe, lst in enumerate(trace.arrivals):
        uids = [a[3] for a in lst]
        if len(uids) != len(set(uids)):
            raise AssertionError(f"duplicate arrival at PE {pe}")
    total_arrivals = sum(len(a) for a in trace.arrivals)
    if total_arrivals != trace.n_network:
        raise AssertionError("arrival count != injected flits")

    if trace.k_i:
        loads = trace.link_loads()
        if trace.k_i < loads.max():
            raise AssertionError("k_i below busiest-link lower bound")
        if trace.k_i < HOP_CYCLES * trace.max_hops():
            raise AssertionError("k_i below max-distance lower bound")

    # a wrap value must land only after its consumer's block was read out
    starts = trace.check_start
    for f in trace.flits:
        if f.wrap and starts[f.dst_check] >= 0:
            read_end = starts[f.dst_check] + len(schedule.emissions[f.dst_check])
            if f.receipt_cycle <= read_end:
                raise AssertionError(
                    f"wrap flit {f.uid} overwrites check {f.dst_check} before its read"
                )
