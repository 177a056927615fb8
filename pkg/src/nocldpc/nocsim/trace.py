"""Trace records produced by the cycle-accurate simulation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np


class SimulationDeadlock(RuntimeError):
    """No flit or PE made progress for a full watchdog window."""


@dataclass
class FlitRecord:
    uid: int
    var: int
    src_check: int
    dst_check: int
    dst_pos: int
    src_pe: int
    dst_pe: int
    coin: int
    wrap: bool
    inject_cycle: int = -1
    receipt_cycle: int = -1
    hops: int = 0


@dataclass
class NocTrace:
    """Everything the configuration generator needs from one iteration."""

    n: int
    seed: int
    pipeline_depth: int
    k_i: int
    rm_ops: list[list[tuple[int, int, int]]]  # per node: (cycle, out_port, in_port)
    arrivals: list[list[tuple[int, int, int, int, int]]]
    # per PE: (dst_check, dst_pos, src_pe, uid, receipt_cycle) in arrival order
    fifo_max: np.ndarray  # (P, 5) peak occupancy
    flits: list[FlitRecord]
    check_start: np.ndarray  # (M,) first read cycle per check
    check_complete: np.ndarray  # (M,) emission-ready cycle per check
    n_network: int
    n_bypass: int
    label: str = ""

    @property
    def p(self) -> int:
        return self.n * self.n

    def link_loads(self) -> np.ndarray:
        """Flits forwarded per (node, output port) over the iteration."""
        loads = np.zeros((self.p, 5), dtype=np.int64)
        for node, ops in enumerate(self.rm_ops):
            for _, out, _ in ops:
                loads[node, out] += 1
        return loads

    def max_hops(self) -> int:
        return max((f.hops for f in self.flits), default=0)

    def summary(self) -> dict:
        loads = self.link_loads()
        return {
            "label": self.label,
            "n": self.n,
            "p": self.p,
            "k_i": self.k_i,
            "seed": self.seed,
            "pipeline_depth": self.pipeline_depth,
            "network_messages": self.n_network,
            "bypass_messages": self.n_bypass,
            "fifo_max_overall": int(self.fifo_max.max()) if self.fifo_max.size else 0,
            "fifo_max_per_port": self.fifo_max.max(axis=0).tolist() if self.fifo_max.size else [],
            "max_link_load": int(loads.max()) if loads.size else 0,
            "max_hops": self.max_hops(),
            "k_i_lower_bound_link": int(loads.max()) if loads.size else 0,
            "k_i_lower_bound_distance": 2 * self.max_hops(),
        }

    def to_json_obj(self) -> dict:
        return {
            "format": "nocldpc-trace-v1",
            "n": self.n,
            "seed": self.seed,
            "pipeline_depth": self.pipeline_depth,
            "k_i": self.k_i,
            "label": self.label,
            "rm_ops": [[[int(x) for x in op] for op in ops] for ops in self.rm_ops],
            "arrivals": [[[int(x) for x in a] for a in pe] for pe in self.arrivals],
            "fifo_max": self.fifo_max.tolist(),
            "flits": [
                [f.uid, f.var, f.src_check, f.dst_check, f.dst_pos, f.src_pe,
                 f.dst_pe, f.coin, int(f.wrap), f.inject_cycle, f.receipt_cycle, f.hops]
                for f in self.flits
            ],
            "check_start": self.check_start.tolist(),
            "check_complete": self.check_complete.tolist(),
            "n_network": self.n_network,
            "n_bypass": self.n_bypass,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "NocTrace":
        if obj.get("format") != "nocldpc-trace-v1":
            raise ValueError("not a nocldpc trace file")
        flits = [
            FlitRecord(uid=f[0], var=f[1], src_check=f[2], dst_check=f[3],
                       dst_pos=f[4], src_pe=f[5], dst_pe=f[6], coin=f[7],
                       wrap=bool(f[8]), inject_cycle=f[9], receipt_cycle=f[10], hops=f[11])
            for f in obj["flits"]
        ]
        return cls(
            n=obj["n"],
            seed=obj["seed"],
            pipeline_depth=obj["pipeline_depth"],
            k_i=obj["k_i"],
            rm_ops=[[tuple(op) for op in ops] for ops in obj["rm_ops"]],
            arrivals=[[tuple(a) for a in pe] for pe in obj["arrivals"]],
            fifo_max=np.asarray(obj["fifo_max"], dtype=np.int64),
            flits=flits,
            check_start=np.asarray(obj["check_start"], dtype=np.int64),
            check_complete=np.asarray(obj["check_complete"], dtype=np.int64),
            n_network=obj["n_network"],
            n_bypass=obj["n_bypass"],
            label=obj.get("label", ""),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "NocTrace":
        return cls.from_json_obj(json.loads(text))

    def content_digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()
