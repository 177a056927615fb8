"""Floating-point flooding sum-product decoder.

Reference oracle for the fixed-point path: classic two-phase schedule where
every check node updates from the previous iteration's variable messages,
then every variable re-accumulates.  Check nodes use the self-inverse
transform Psi(x) = -ln(tanh(|x| / 2)); inputs are floored at a small epsilon
because Psi is unbounded at zero.
"""

from __future__ import annotations

import numpy as np

from ..codes.matrix import ParityCheckMatrix
from .layout import CodeLayout
from .nms import DecodeParams, DecodeResult, hard_decision


def psi(x, eps: float = 1e-12) -> np.ndarray:
    """Self-inverse check-node transform, clamped away from the pole at 0."""
    ax = np.maximum(np.abs(np.asarray(x, dtype=np.float64)), eps)
    return -np.log(np.tanh(ax / 2.0))


def decode_flooding_spa(
    h: ParityCheckMatrix,
    channel_llrs,
    params: DecodeParams,
    layout: CodeLayout | None = None,
) -> DecodeResult:
    llrs = np.asarray(channel_llrs, dtype=np.float64)
    if len(llrs) != h.n_cols:
        raise ValueError(f"expected {h.n_cols} channel LLRs, got {len(llrs)}")
    if layout is None:
        layout = CodeLayout.build(h)

    idx = layout.idx
    mask = layout.mask
    cols_flat = idx[mask].astype(np.int64)

    c2v = np.zeros(idx.shape, dtype=np.float64)
    total = llrs.copy()

    iterations = 0
    converged = False
    for _ in range(params.it_max):
        v2c = np.where(mask, total[idx] - c2v, 0.0)

        a = psi(v2c, params.psi_eps)
        a[~mask] = 0.0
        row_sum = a.sum(axis=1, keepdims=True)
        c2v_mag = psi(row_sum - a, params.psi_eps)

        neg = (v2c < 0.0) & mask
        parity = (neg.sum(axis=1) & 1).astype(bool)
        odd_others = parity[:, None] ^ neg
        c2v = np.where(odd_others, -c2v_mag, c2v_mag)
        c2v[~mask] = 0.0

        total = llrs + np.bincount(cols_flat, weights=c2v[mask], minlength=h.n_cols)
        iterations += 1
        if params.early_stop and layout.syndrome_ok(hard_decision(total)):
            converged = True
            break

    bits = hard_decision(total)
    if not converged:
        converged = layout.syndrome_ok(bits)
    return DecodeResult(
        hard_bits=bits,
        iterations_run=iterations,
        converged=converged,
        final_llrs=total,
        fmt=None,
    )
