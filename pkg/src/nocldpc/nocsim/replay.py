"""Table-driven re-execution of decoding through a configuration image.

The product NoC carries no headers and takes no routing decisions: every
cycle each router applies one routing-memory word, and every PE writes
arrivals at WAG addresses and reads blocks per CNT/CMP.  Replay therefore
has two parts:

1. validate_config walks the routing memories cycle by cycle with identity
   tokens (a PE's injection order is fixed by its serving schedule, so the
   k-th flit out of a PE is known without headers).  It re-derives PE timing
   from the deliveries the RM produces and checks that every pop finds a
   flit, every ejection lands at its host PE in WAG order, every block slot
   is written exactly once, and the declared slot map matches.  The result
   is the validated dataflow wiring between memory slots.

2. replay_decode runs frames over that wiring: values live in the per-PE
   L(q) block memories, check updates use the same saturating kernel as the
   golden decoder, and each output value moves to the successor slot the
   network was just proven to deliver it to.  The outcome must match the
   golden layered decoder bit for bit.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..codes.matrix import ParityCheckMatrix
from ..configgen.image import ConfigImage, unpack_rm_word
from ..decoder.layout import CodeLayout
from ..decoder.nms import DecodeParams, DecodeResult, _check_node_update, hard_decision
from ..fixedpoint import quantize, reciprocal_scale_table, saturate
from ..mapper import Mapping
from .schedule import SRC_BYPASS, SRC_CHAIN, build_schedule
from .simulate import HOP_CYCLES
from .topology import OPPOSITE, Port, Topology
from .trace import NocTrace


class ReplayIntegrityError(ValueError):
    pass


@dataclass
class ReplayWiring:
    """Validated slot-level dataflow extracted from a configuration image."""

    n_d: int
    slot_mask: np.ndarray  # (M, N_d) slot < degree
    next_row: np.ndarray  # (M, N_d) successor check of the value computed here
    next_slot: np.ndarray  # (M, N_d) successor slot
    prefill_rows: np.ndarray  # slots holding received soft values at start
    prefill_slots: np.ndarray
    prefill_vars: np.ndarray
    home_row: np.ndarray  # (N,) slot holding each variable's latest value
    home_slot: np.ndarray


def validate_config(
    h: ParityCheckMatrix,
    mapping: Mapping,
    trace: NocTrace,
    config: ConfigImage,
) -> ReplayWiring:
    """Verify the image against its inputs and extract the dataflow wiring."""
    config.verify_digest()
    if config.trace_digest != trace.content_digest():
        raise ReplayIntegrityError("configuration was generated from a different trace")
    if config.mapping_digest != hashlib.sha256(mapping.to_json().encode()).hexdigest():
        raise ReplayIntegrityError("configuration was generated from a different mapping")
    if config.h_digest != h.content_digest():
        raise ReplayIntegrityError("configuration was generated from a different code")

    schedule = build_schedule(h, mapping)
    topo = Topology(config.n)
    p = topo.p
    n_d = config.n_d
    serve_pos = schedule.serve_pos

    for pe in range(p):
        want = [(int(serve_pos[m]) * n_d, len(h.rows[m])) for m in mapping.order[pe]]
        if [tuple(x) for x in config.cnt_cmp[pe]] != want:
            raise ReplayIntegrityError(f"CNT/CMP table mismatch on PE {pe}")

    # token walk through the routing memories
    inj_orders = [deque(lst) for lst in schedule.pe_injection_orders()]
    fifos = [[deque() for _ in range(5)] for _ in range(p)]
    missing = (
        ((schedule.input_src == SRC_CHAIN) | (schedule.input_src == SRC_BYPASS))
        .sum(axis=1)
        .astype(np.int64)
    )
    serve = schedule.order
    ptr = [0] * p
    read_free = [0] * p
    inj_stage = [deque() for _ in range(p)]
    deliveries: dict[int, list[tuple[str, int, int, object]]] = {}
    completions: dict[int, list[int]] = {}
    wag_next = [0] * p
    slot_seen: dict[tuple[int, int], int] = {}
    delivered = 0

    for t in range(config.k_i):
        for kind, node, port, tok in deliveries.pop(t, ()):
            if kind == "link":
                fifos[node][port].append(tok)
            else:
                delivered += 1
                if not tok.wrap:
                    missing[tok.dst_check] -= 1
        for m in completions.pop(t, ()):
            for e in schedule.emissions[m]:
                if e.network:
                    inj_stage[int(schedule.host[m])].append(e)
                elif not e.wrap:
                    missing[e.dst_check] -= 1
        for pe in range(p):
            if inj_stage[pe]:
                fifos[pe][Port.LOCAL].append(inj_stage[pe].popleft())
        for pe in range(p):
            if ptr[pe] < len(serve[pe]) and read_free[pe] <= t:
                m = serve[pe][ptr[pe]]
                if missing[m] == 0:
                    d = len(h.rows[m])
                    read_free[pe] = t + d
                    completions.setdefault(t + d + config.pipeline_depth, []).append(m)
                    ptr[pe] += 1
        for node in range(p):
            word = config.rm[node][t]
            if not word:
                continue
            for out, inp in unpack_rm_word(word):
                q = fifos[node][inp]
                if not q:
                    raise ReplayIntegrityError(
                        f"cycle {t}: node {node} pops empty FIFO {inp}"
                    )
                tok = q.popleft()
                if out == Port.LOCAL:
                    if tok.dst_pe != node:
                        raise ReplayIntegrityError(
                            f"cycle {t}: flit for PE {tok.dst_pe} ejected at {node}"
                        )
                    if wag_next[node] >= len(config.wag[node]):
                        raise ReplayIntegrityError(f"PE {node}: WAG table exhausted")
                    addr = config.wag[node][wag_next[node]]
                    wag_next[node] += 1
                    pos_in_order = addr // n_d
                    slot = addr % n_d
                    if pos_in_order >= len(serve[node]):
                        raise ReplayIntegrityError(f"PE {node}: WAG address {addr} out of range")
                    check = serve[node][pos_in_order]
                    if check != tok.dst_check or slot >= len(h.rows[check]):
                        raise ReplayIntegrityError(
                            f"cycle {t}: WAG address {addr} routes to check {check}, "
                            f"flit belongs to {tok.dst_check}"
                        )
                    key = (check, tok.dst_pos)
                    if key in slot_seen:
                        raise ReplayIntegrityError(f"slot for {key} written twice")
                    slot_seen[key] = slot
                    deliveries.setdefault(t + HOP_CYCLES, []).append(
                        ("eject", node, int(Port.LOCAL), tok)
                    )
                else:
                    nbr = topo.neighbor(node, Port(out))
                    deliveries.setdefault(t + HOP_CYCLES, []).append(
                        ("link", nbr, int(OPPOSITE[Port(out)]), tok)
                    )

    for t in sorted(deliveries):
        for kind, node, port, tok in deliveries[t]:
            if kind == "eject":
                delivered += 1
                if not tok.wrap:
                    missing[tok.dst_check] -= 1
            else:
                raise ReplayIntegrityError("flit still on a link after k_i cycles")
    if delivered != schedule.n_network:
        raise ReplayIntegrityError(
            f"{delivered} of {schedule.n_network} flits delivered by the program"
        )
    if any(q for node in fifos for q in node):
        raise ReplayIntegrityError("flits left in FIFOs after k_i cycles")
    for pe in range(p):
        if wag_next[pe] != len(config.wag[pe]):
            raise ReplayIntegrityError(f"PE {pe}: WAG table not fully consumed")

    # slot map: walked network slots plus leftover inputs in position order
    slot_of = dict(slot_seen)
    used: list[set[int]] = [set() for _ in range(h.n_rows)]
    for (check, _pos), slot in slot_seen.items():
        if slot in used[check]:
            raise ReplayIntegrityError(f"check {check}: slot {slot} assigned twice")
        used[check].add(slot)
    for m in range(h.n_rows):
        free = [s for s in range(len(h.rows[m])) if s not in used[m]]
        it = iter(free)
        for pos in range(len(h.rows[m])):
            if (m, pos) not in slot_of:
                slot_of[(m, pos)] = next(it)
    if slot_of != config.slot_of:
        raise ReplayIntegrityError("declared slot map differs from the RM walk")

    return _build_wiring(h, schedule, slot_of, n_d)


def _build_wiring(h, schedule, slot_of, n_d) -> ReplayWiring:
    m_checks = h.n_rows
    slot_mask = np.zeros((m_checks, n_d), dtype=bool)
    next_row = np.tile(np.arange(m_checks, dtype=np.int64)[:, None], (1, n_d))
    next_slot = np.tile(np.arange(n_d, dtype=np.int64)[None, :], (m_checks, 1))
    var_at = np.full((m_checks, n_d), -1, dtype=np.int64)
    for m in range(m_checks):
        for pos, j in enumerate(h.rows[m]):
            slot_mask[m, slot_of[(m, pos)]] = True
            var_at[m, slot_of[(m, pos)]] = int(j)
    for m in range(m_checks):
        for e in schedule.emissions[m]:
            s_slot = slot_of[(e.src_check, e.src_pos)]
            d_slot = slot_of[(e.dst_check, e.dst_pos)]
            next_row[e.src_check, s_slot] = e.dst_check
            next_slot[e.src_check, s_slot] = d_slot

    heads = sorted(schedule.first_slot.items())
    prefill_rows = np.array([c for _, (c, _p) in heads], dtype=np.int64)
    prefill_slots = np.array([slot_of[(c, p_)] for _, (c, p_) in heads], dtype=np.int64)
    prefill_vars = np.array([j for j, _ in heads], dtype=np.int64)
    home_row = np.zeros(h.n_cols, dtype=np.int64)
    home_slot = np.zeros(h.n_cols, dtype=np.int64)
    home_row[prefill_vars] = prefill_rows
    home_slot[prefill_vars] = prefill_slots
    return ReplayWiring(
        n_d=n_d,
        slot_mask=slot_mask,
        next_row=next_row,
        next_slot=next_slot,
        prefill_rows=prefill_rows,
        prefill_slots=prefill_slots,
        prefill_vars=prefill_vars,
        home_row=home_row,
        home_slot=home_slot,
    )


def replay_decode(
    h: ParityCheckMatrix,
    mapping: Mapping,
    trace: NocTrace,
    config: ConfigImage,
    channel_llrs,
    params: DecodeParams,
    layout: CodeLayout | None = None,
    wiring: ReplayWiring | None = None,
) -> DecodeResult:
    """Decode one frame with all extrinsic transport table-driven.

    Must produce results bit-identical to decode_layered_nms on the same
    inputs; pass a pre-validated wiring when decoding many frames.
    """
    if wiring is None:
        wiring = validate_config(h, mapping, trace, config)
    if layout is None:
        layout = CodeLayout.build(h)
    llrs = np.asarray(channel_llrs, dtype=np.float64)
    if len(llrs) != h.n_cols:
        raise ValueError(f"expected {h.n_cols} channel LLRs, got {len(llrs)}")

    fmt = params.fmt
    alpha_lut = reciprocal_scale_table(params.alpha, fmt)
    codes = quantize(llrs, fmt)

    lq_mem = np.zeros((h.n_rows, wiring.n_d), dtype=np.int32)
    lq_mem[wiring.prefill_rows, wiring.prefill_slots] = codes[wiring.prefill_vars]
    r_mem = np.zeros_like(lq_mem)

    iterations = 0
    converged = False
    for _ in range(params.it_max):
        for rows in layout.layer_rows:
            mask = wiring.slot_mask[rows]
            q = saturate(lq_mem[rows].astype(np.int64) - r_mem[rows], fmt)
            rnew = saturate(_check_node_update(q, mask, alpha_lut), fmt)
            lnew = saturate(q.astype(np.int64) + rnew, fmt)
            r_mem[rows] = rnew
            tr = wiring.next_row[rows][mask]
            ts = wiring.next_slot[rows][mask]
            lq_mem[tr, ts] = lnew[mask]
        iterations += 1
        bits = hard_decision(lq_mem[wiring.home_row, wiring.home_slot])
        if params.early_stop and layout.syndrome_ok(bits):
            converged = True
            break
    final = lq_mem[wiring.home_row, wiring.home_slot].astype(np.int32)
    bits = hard_decision(final)
    if not converged:
        converged = layout.syndrome_ok(bits)
    return DecodeResult(
        hard_bits=bits,
        iterations_run=iterations,
        converged=converged,
        final_llrs=final,
        fmt=fmt,
    )
