"""Precompiled index arrays for fast per-layer decoding.

Decoding touches the same adjacency thousands of times per BER point, so the
padded gather/scatter indices are built once per code and reused across
frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..codes.matrix import ParityCheckMatrix, compute_layers


@dataclass
class CodeLayout:
    h: ParityCheckMatrix
    n_d: int
    idx: np.ndarray  # (M, N_d) variable index per (row, position), 0-padded
    mask: np.ndarray  # (M, N_d) validity of each position
    deg: np.ndarray  # (M,) row degrees
    layer_rows: list[np.ndarray]  # rows of each layer, ascending

    @classmethod
    def build(cls, h: ParityCheckMatrix) -> "CodeLayout":
        if h.layers is None:
            compute_layers(h)
        m = h.n_rows
        n_d = h.max_row_degree
        idx = np.zeros((m, n_d), dtype=np.int32)
        mask = np.zeros((m, n_d), dtype=bool)
        deg = np.zeros(m, dtype=np.int32)
        for r, row in enumerate(h.rows):
            d = len(row)
            idx[r, :d] = row
            mask[r, :d] = True
            deg[r] = d
        layer_rows = [np.sort(np.asarray(l, dtype=np.int64)) for l in h.layers]
        return cls(h=h, n_d=n_d, idx=idx, mask=mask, deg=deg, layer_rows=layer_rows)

    def syndrome_ok(self, bits: np.ndarray) -> bool:
        """True iff every row's parity over its variables is zero."""
        par = (bits[self.idx].astype(np.int32) & self.mask).sum(axis=1) & 1
        return not par.any()
