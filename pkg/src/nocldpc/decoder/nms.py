"""Fixed-point layered normalized min-sum decoding.

Golden model of the hardware datapath: per layer, each check subtracts its
stored extrinsic from the running variable LLR, extracts the two smallest
magnitudes and the sign parity, scales by the reciprocal of the
normalization factor, and writes the refreshed extrinsic and variable LLR
back.  All arithmetic saturates in the configured n_m format.

Sign convention: the new extrinsic for position j carries the product of the
signs of the other operands (an even number of negative inputs yields a
positive extrinsic), which is the convergent min-sum update for LLRs defined
as log(P0/P1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..fixedpoint import QFormat, quantize, reciprocal_scale_table, saturate
from ..codes.matrix import ParityCheckMatrix
from .layout import CodeLayout

_PAD_MAG = np.int32(1) << 30


@dataclass
class DecodeParams:
    alpha: float = 1.15
    it_max: int = 10
    fmt: QFormat = field(default_factory=QFormat)
    early_stop: bool = True
    psi_eps: float = 1e-12  # input magnitude floor for the float Psi oracle

    def __post_init__(self):
        if self.alpha < 1.0:
            raise ValueError(f"normalization factor must be >= 1, got {self.alpha}")
        if self.it_max < 1:
            raise ValueError(f"it_max must be >= 1, got {self.it_max}")
        if self.psi_eps <= 0.0:
            raise ValueError("psi_eps must be positive")


@dataclass
class DecodeResult:
    hard_bits: np.ndarray  # uint8, length N
    iterations_run: int
    converged: bool
    final_llrs: np.ndarray  # int32 codes (fixed point) or float64 (float oracle)
    fmt: QFormat | None = None


@dataclass
class CheckState:
    """Decoder state: per-variable LLR codes and per-(row, position) extrinsics."""

    lq: np.ndarray  # (N,) int32 codes
    r: np.ndarray  # (M, N_d) int32 codes, 0 beyond each row's degree
    fmt: QFormat

    @classmethod
    def init(cls, layout: CodeLayout, channel_llrs: np.ndarray, fmt: QFormat) -> "CheckState":
        lq = quantize(channel_llrs, fmt)
        r = np.zeros((layout.h.n_rows, layout.n_d), dtype=np.int32)
        return cls(lq=lq, r=r, fmt=fmt)


def min2(values) -> tuple[int, int, int]:
    """First and second minimum of a magnitude sequence.

    Returns (min1, argmin index t, min2) where min2 excludes position t; on
    ties for the first minimum t is the lowest index and min2 equals min1.
    """
    vals = np.asarray(values)
    if vals.ndim != 1 or len(vals) < 2:
        raise ValueError("min2 needs a 1-D sequence of length >= 2")
    t = int(vals.argmin())
    m1 = vals[t]
    rest = np.delete(vals, t)
    return m1.item(), t, rest.min().item()


def _check_node_update(q: np.ndarray, mask: np.ndarray, alpha_lut: np.ndarray) -> np.ndarray:
    """Vectorized check update on a block of rows.

    q holds saturated L(q_mj) codes, one row per check.  Returns the new
    extrinsic codes before final saturation, zero at padded positions.
    """
    mag = np.abs(q.astype(np.int64))
    mag[~mask] = _PAD_MAG
    neg = (q < 0) & mask
    parity = (neg.sum(axis=1) & 1).astype(bool)
    odd_others = parity[:, None] ^ neg  # odd negative count among the other positions

    t = mag.argmin(axis=1)
    rows = np.arange(q.shape[0])
    min1 = mag[rows, t]
    mag[rows, t] = _PAD_MAG
    min2_ = mag.min(axis=1)

    pos = np.arange(q.shape[1])[None, :]
    sel = np.where(pos == t[:, None], min2_[:, None], min1[:, None])
    sel = np.minimum(sel, len(alpha_lut) - 1)  # degree-1 rows see an empty minimum
    rmag = alpha_lut[sel]
    rnew = np.where(odd_others, -rmag, rmag)
    rnew[~mask] = 0
    return rnew


def layer_update(layout: CodeLayout, layer_index: int, state: CheckState, params: DecodeParams,
                 alpha_lut: np.ndarray | None = None) -> CheckState:
    """Apply one layer's check updates in place and return the state."""
    if alpha_lut is None:
        alpha_lut = reciprocal_scale_table(params.alpha, state.fmt)
    rows = layout.layer_rows[layer_index]
    idx = layout.idx[rows]
    mask = layout.mask[rows]

    q = saturate(state.lq[idx].astype(np.int64) - state.r[rows], state.fmt)
    rnew = _check_node_update(q, mask, alpha_lut)
    rnew = saturate(rnew, state.fmt)
    lq_new = saturate(q.astype(np.int64) + rnew, state.fmt)

    state.r[rows] = rnew
    state.lq[idx[mask]] = lq_new[mask]  # disjoint support inside a layer
    return state


def hard_decision(lq_codes: np.ndarray) -> np.ndarray:
    """Bit = 1 iff the LLR is negative; an exact zero decodes to 0."""
    return (lq_codes < 0).astype(np.uint8)


def syndrome_check(h: ParityCheckMatrix, hard_bits, layout: CodeLayout | None = None) -> bool:
    """True iff H * bits = 0 over GF(2)."""
    bits = np.asarray(hard_bits, dtype=np.uint8)
    if len(bits) != h.n_cols:
        raise ValueError(f"expected {h.n_cols} bits, got {len(bits)}")
    if layout is None:
        layout = CodeLayout.build(h)
    return layout.syndrome_ok(bits)


def decode_layered_nms(
    h: ParityCheckMatrix,
    channel_llrs,
    params: DecodeParams,
    layout: CodeLayout | None = None,
    record_history: list | None = None,
) -> DecodeResult:
    """Decode one frame with the fixed-point layered normalized min-sum.

    Variable LLRs start from the quantized received soft values and all
    extrinsics from zero; layers are swept in order.  With early_stop on,
    decoding ends after the first iteration whose hard decisions satisfy
    every parity check.  record_history, when given, collects the hard
    decisions after every executed iteration (test hook).
    """
    llrs = np.asarray(channel_llrs, dtype=np.float64)
    if len(llrs) != h.n_cols:
        raise ValueError(f"expected {h.n_cols} channel LLRs, got {len(llrs)}")
    if layout is None:
        layout = CodeLayout.build(h)
    state = CheckState.init(layout, llrs, params.fmt)
    alpha_lut = reciprocal_scale_table(params.alpha, params.fmt)

    iterations = 0
    converged = False
    for _ in range(params.it_max):
        for li in range(len(layout.layer_rows)):
            layer_update(layout, li, state, params, alpha_lut)
        iterations += 1
        if record_history is not None:
            record_history.append(hard_decision(state.lq))
        if params.early_stop:
            if layout.syndrome_ok(hard_decision(state.lq)):
                converged = True
                break
    bits = hard_decision(state.lq)
    if not converged:
        converged = layout.syndrome_ok(bits)
    return DecodeResult(
        hard_bits=bits,
        iterations_run=iterations,
        converged=converged,
        final_llrs=state.lq.copy(),
        fmt=params.fmt,
    )
