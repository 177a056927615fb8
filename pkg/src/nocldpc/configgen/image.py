"""Static configuration synthesis from a simulation trace.

The trace's per-cycle routing decisions become routing-memory words, the
registered arrival orders become write-address tables, the serving order
becomes the read-address counter/comparator table, and observed FIFO peaks
become queue depths.

Routing-memory word layout (25 bits), version nocldpc-config-v1:
  bits [4o+3 : 4o], o = output port 0..4:  valid << 3 | selected input port
  bit  [20+i], i = input port 0..4:        pop enable for input FIFO i
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from ..codes.matrix import ParityCheckMatrix
from ..mapper import Mapping
from ..nocsim.schedule import build_schedule
from ..nocsim.trace import NocTrace

FORMAT = "nocldpc-config-v1"
_BIN_MAGIC = b"NOCLDPCC"


class ConfigIntegrityError(ValueError):
    pass


def pack_rm_word(selections: list[tuple[int, int]]) -> int:
    """Pack (out_port, in_port) crossbar selections into one control word."""
    word = 0
    for out, inp in selections:
        word |= ((0x8 | inp) << (4 * out)) | (1 << (20 + inp))
    return word


def unpack_rm_word(word: int) -> list[tuple[int, int]]:
    sel = []
    for out in range(5):
        nibble = (word >> (4 * out)) & 0xF
        if nibble & 0x8:
            sel.append((out, nibble & 0x7))
    return sel


@dataclass
class ConfigImage:
    label: str
    n: int
    k_i: int
    n_d: int
    n_pc: int
    pipeline_depth: int
    rm: list[list[int]]  # per node: k_i words
    wag: list[list[int]]  # per PE: one address per network arrival, in order
    cnt_cmp: list[list[tuple[int, int]]]  # per PE: (offset, degree) per served check
    fifo_depth: np.ndarray  # (P, 5)
    slot_of: dict[tuple[int, int], int]  # (check, position) -> slot in its block
    trace_digest: str
    mapping_digest: str
    h_digest: str
    digest: str = field(default="")

    @property
    def p(self) -> int:
        return self.n * self.n

    def _payload_obj(self) -> dict:
        return {
            "format": FORMAT,
            "label": self.label,
            "n": self.n,
            "k_i": self.k_i,
            "n_d": self.n_d,
            "n_pc": self.n_pc,
            "pipeline_depth": self.pipeline_depth,
            "rm": self.rm,
            "wag": self.wag,
            "cnt_cmp": [[list(x) for x in pe] for pe in self.cnt_cmp],
            "fifo_depth": self.fifo_depth.tolist(),
            "slot_of": {f"{c}:{p}": s for (c, p), s in sorted(self.slot_of.items())},
            "trace_digest": self.trace_digest,
            "mapping_digest": self.mapping_digest,
            "h_digest": self.h_digest,
        }

    def compute_digest(self) -> str:
        text = json.dumps(self._payload_obj(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def verify_digest(self) -> None:
        if self.digest != self.compute_digest():
            raise ConfigIntegrityError("configuration image digest mismatch")

    def to_json(self) -> str:
        obj = self._payload_obj()
        obj["digest"] = self.digest
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ConfigImage":
        obj = json.loads(text)
        if obj.get("format") != FORMAT:
            raise ConfigIntegrityError("not a nocldpc configuration image")
        img = cls(
            label=obj["label"],
            n=obj["n"],
            k_i=obj["k_i"],
            n_d=obj["n_d"],
            n_pc=obj["n_pc"],
            pipeline_depth=obj["pipeline_depth"],
            rm=[[int(w) for w in node] for node in obj["rm"]],
            wag=[[int(a) for a in pe] for pe in obj["wag"]],
            cnt_cmp=[[tuple(x) for x in pe] for pe in obj["cnt_cmp"]],
            fifo_depth=np.asarray(obj["fifo_depth"], dtype=np.int64),
            slot_of={
                (int(k.split(":")[0]), int(k.split(":")[1])): int(v)
                for k, v in obj["slot_of"].items()
            },
            trace_digest=obj["trace_digest"],
            mapping_digest=obj["mapping_digest"],
            h_digest=obj["h_digest"],
            digest=obj.get("digest", ""),
        )
        return img

    def rm_to_binary(self) -> bytes:
        """Compact fixed-width dump of the routing memories."""
        head = _BIN_MAGIC + struct.pack("<III", self.n, self.k_i, self.p)
        body = b"".join(
            struct.pack(f"<{self.k_i}I", *node) for node in self.rm
        )
        return head + body

    @classmethod
    def rm_from_binary(cls, blob: bytes) -> list[list[int]]:
        if blob[:8] != _BIN_MAGIC:
            raise ConfigIntegrityError("bad RM binary magic")
        n, k_i, p = struct.unpack("<III", blob[8:20])
        words = struct.unpack(f"<{k_i * p}I", blob[20:])
        return [list(words[i * k_i : (i + 1) * k_i]) for i in range(p)]


def gen_config(
    trace: NocTrace,
    mapping: Mapping,
    h: ParityCheckMatrix,
    fifo_pow2: bool = False,
) -> ConfigImage:
    """Translate a trace into the decoder's static configuration."""
    schedule = build_schedule(h, mapping)
    p = trace.p
    if mapping.p != p:
        raise ConfigIntegrityError(f"mapping is for {mapping.p} PEs, trace for {p}")
    n_d = h.max_row_degree
    n_pc = max((len(rows) for rows in mapping.order), default=0)
    serve_pos = schedule.serve_pos

    # slots: network arrivals claim slots in arrival order, remaining inputs
    # (bypass / wrap-in-place / self) fill the leftover slots in position order
    slot_of: dict[tuple[int, int], int] = {}
    next_slot = np.zeros(h.n_rows, dtype=np.int64)
    seen: set[tuple[int, int]] = set()
    for pe in range(p):
        for check, pos, _src, _uid, _rc in trace.arrivals[pe]:
            key = (int(check), int(pos))
            if key in seen:
                raise ConfigIntegrityError(f"duplicate arrival for {key}")
            seen.add(key)
            if int(mapping.assignment[check]) != pe:
                raise ConfigIntegrityError(
                    f"check {check} arrived at PE {pe}, hosted on {mapping.assignment[check]}"
                )
            slot_of[key] = int(next_slot[check])
            next_slot[check] += 1
    network_inputs = {
        (m, pos)
        for m in range(h.n_rows)
        for pos in range(len(h.rows[m]))
        if schedule.input_pred[m, pos] >= 0
        and schedule.host[schedule.input_pred[m, pos]] != schedule.host[m]
    }
    if network_inputs != seen:
        raise ConfigIntegrityError(
            f"trace delivered {len(seen)} inputs, schedule expects {len(network_inputs)}"
        )
    for m in range(h.n_rows):
        for pos in range(len(h.rows[m])):
            if (m, pos) not in slot_of:
                slot_of[(m, pos)] = int(next_slot[m])
                next_slot[m] += 1

    wag: list[list[int]] = []
    for pe in range(p):
        addrs = [
            int(serve_pos[check]) * n_d + slot_of[(int(check), int(pos))]
            for check, pos, *_ in trace.arrivals[pe]
        ]
        if len(set(addrs)) != len(addrs):
            raise ConfigIntegrityError(f"WAG address collision on PE {pe}")
        wag.append(addrs)

    cnt_cmp = [
        [(int(serve_pos[m]) * n_d, len(h.rows[m])) for m in mapping.order[pe]]
        for pe in range(p)
    ]

    rm = [[0] * trace.k_i for _ in range(p)]
    for node, ops in enumerate(trace.rm_ops):
        by_cycle: dict[int, list[tuple[int, int]]] = {}
        for cycle, out, inp in ops:
            if cycle >= trace.k_i:
                raise ConfigIntegrityError("routing operation beyond k_i")
            by_cycle.setdefault(cycle, []).append((out, inp))
        for cycle, sel in by_cycle.items():
            rm[node][cycle] = pack_rm_word(sel)

    fifo_depth = trace.fifo_max.copy()
    if fifo_pow2:
        fifo_depth = 1 << np.ceil(np.log2(np.maximum(fifo_depth, 1))).astype(np.int64)
        fifo_depth[trace.fifo_max == 0] = 0

    img = ConfigImage(
        label=trace.label or h.label,
        n=trace.n,
        k_i=trace.k_i,
        n_d=n_d,
        n_pc=n_pc,
        pipeline_depth=trace.pipeline_depth,
        rm=rm,
        wag=wag,
        cnt_cmp=cnt_cmp,
        fifo_depth=fifo_depth,
        slot_of=slot_of,
        trace_digest=trace.content_digest(),
        mapping_digest=hashlib.sha256(mapping.to_json().encode()).hexdigest(),
        h_digest=h.content_digest(),
    )
    img.digest = img.compute_digest()
    return img
