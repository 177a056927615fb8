"""AWGN/BPSK channel model and Monte Carlo BER harness.

All-zero-codeword methodology: the transmitted word is all zeros (BPSK +1),
valid for this symmetric channel and sign-symmetric decoders, so no encoder
is needed and every position counts toward the bit-error ratio.

Eb/N0 convention: sigma^2 = 1 / (2 * rate * 10^(snr_db / 10)) and
LLR = 2 y / sigma^2.

Reproducibility: frame f of a run draws its unit noise from a generator
seeded with (seed, f), and the same unit noise is rescaled for every SNR
point and quantization format (paired comparisons).  Frames are consumed in
fixed-size blocks with the stop rule evaluated between blocks, so results
are identical for any worker count.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .codes.matrix import ParityCheckMatrix
from .decoder import CodeLayout, DecodeParams, decode_flooding_spa, decode_layered_nms
from .fixedpoint import QFormat

_BLOCK = 32  # frames per scheduling block; fixed so threading cannot change results

ALGORITHMS = ("layered-nms", "flooding-spa")


@dataclass
class StopRule:
    min_bit_errors: int = 100
    max_frames: int = 10000

    def __post_init__(self):
        if self.min_bit_errors < 1 or self.max_frames < 1:
            raise ValueError("stop criteria must be positive")


@dataclass
class BerPoint:
    snr_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    avg_iterations: float
    label: str = ""
    fmt: str = ""

    def as_dict(self) -> dict:
        return {
            "snr_db": self.snr_db,
            "frames": self.frames,
            "bit_errors": self.bit_errors,
            "frame_errors": self.frame_errors,
            "ber": self.ber,
            "fer": self.fer,
            "avg_iterations": self.avg_iterations,
            "label": self.label,
            "fmt": self.fmt,
        }

    CSV_HEADER = "snr_db,frames,bit_errors,frame_errors,ber,fer,avg_iterations"

    def as_csv_row(self) -> str:
        return (
            f"{self.snr_db},{self.frames},{self.bit_errors},{self.frame_errors},"
            f"{self.ber:.6e},{self.fer:.6e},{self.avg_iterations:.4f}"
        )


def noise_sigma(rate: float, snr_db: float) -> float:
    if not 0.0 < rate < 1.0:
        raise ValueError(f"code rate must be in (0, 1), got {rate}")
    return float(np.sqrt(1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0))))


def _frame_rng(seed: int, frame: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, frame))))


def awgn_llrs(n: int, rate: float, snr_db: float, seed: int, frame: int = 0) -> np.ndarray:
    """Channel LLRs for one all-zero frame, deterministic under (seed, frame)."""
    sigma = noise_sigma(rate, snr_db)
    g = _frame_rng(seed, frame).standard_normal(n)
    y = 1.0 + sigma * g
    return 2.0 * y / (sigma * sigma)


def _decode_one(h, layout, params, algorithm, unit_noise, sigma):
    llrs = 2.0 * (1.0 + sigma * unit_noise) / (sigma * sigma)
    if algorithm == "layered-nms":
        res = decode_layered_nms(h, llrs, params, layout)
    elif algorithm == "flooding-spa":
        res = decode_flooding_spa(h, llrs, params, layout)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    errs = int(res.hard_bits.sum())
    return errs, res.iterations_run


def run_ber(
    h: ParityCheckMatrix,
    params: DecodeParams,
    snr_list,
    stop: StopRule | dict,
    seed: int = 0,
    algorithm: str = "layered-nms",
    threads: int = 1,
    layout: CodeLayout | None = None,
    rate: float | None = None,
) -> list[BerPoint]:
    """Monte Carlo BER/FER/average-iterations per SNR point.

    Frames are decoded until min_bit_errors bit errors are seen or
    max_frames is reached, whichever first (checked between fixed blocks).
    """
    if isinstance(stop, dict):
        stop = StopRule(**stop)
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if layout is None:
        layout = CodeLayout.build(h)
    if rate is None:
        rate = 1.0 - h.n_rows / h.n_cols
    n = h.n_cols

    points = []
    for snr_db in snr_list:
        sigma = noise_sigma(rate, float(snr_db))
        bit_errors = 0
        frame_errors = 0
        iters_total = 0
        frame = 0
        while frame < stop.max_frames and bit_errors < stop.min_bit_errors:
            block = min(_BLOCK, stop.max_frames - frame)
            frames = range(frame, frame + block)
            if threads > 1:
                with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
                    results = list(
                        pool.map(
                            lambda f: _decode_one(
                                h, layout, params, algorithm,
                                _frame_rng(seed, f).standard_normal(n), sigma,
                            ),
                            frames,
                        )
                    )
            else:
                results = [
                    _decode_one(
                        h, layout, params, algorithm,
                        _frame_rng(seed, f).standard_normal(n), sigma,
                    )
                    for f in frames
                ]
            for errs, iters in results:
                bit_errors += errs
                frame_errors += int(errs > 0)
                iters_total += iters
            frame += block
        points.append(
            BerPoint(
                snr_db=float(snr_db),
                frames=frame,
                bit_errors=bit_errors,
                frame_errors=frame_errors,
                ber=bit_errors / (frame * n),
                fer=frame_errors / frame,
                avg_iterations=iters_total / frame,
                label=h.label,
                fmt=str(params.fmt) if algorithm == "layered-nms" else "float",
            )
        )
    return points


def quantization_sweep(
    h: ParityCheckMatrix,
    formats: list[QFormat],
    snr_db: float,
    params: DecodeParams,
    stop: StopRule | dict,
    seed: int = 0,
    threads: int = 1,
    layout: CodeLayout | None = None,
) -> list[BerPoint]:
    """BER of several fixed-point formats at one SNR with shared noise."""
    if len(formats) < 2:
        raise ValueError("need at least two formats to compare")
    if layout is None:
        layout = CodeLayout.build(h)
    out = []
    for fmt in formats:
        p = DecodeParams(
            alpha=params.alpha,
            it_max=params.it_max,
            fmt=fmt,
            early_stop=params.early_stop,
            psi_eps=params.psi_eps,
        )
        point = run_ber(
            h, p, [snr_db], stop, seed=seed, algorithm="layered-nms",
            threads=threads, layout=layout,
        )[0]
        point.fmt = str(fmt)
        out.append(point)
    return out
