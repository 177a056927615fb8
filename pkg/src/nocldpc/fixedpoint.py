"""Saturating fixed-point arithmetic for extrinsic values.

LLRs exchanged by the fixed-point decoder use an ``n_m`` two's-complement
format: n total bits, of which m are fractional.  A value is stored as an
integer code with weight 2**-m; the representable range is
[-(2**(n-1)) * 2**-m, (2**(n-1)-1) * 2**-m].  Every operation saturates at
those bounds and never wraps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QFormat:
    """An n_m fixed-point format (n total bits, m fractional bits)."""

    n_bits: int = 8
    frac_bits: int = 1

    def __post_init__(self):
        if not 2 <= self.n_bits <= 24:
            raise ValueError(f"unsupported total bit width {self.n_bits}")
        if not 0 <= self.frac_bits < self.n_bits:
            raise ValueError(
                f"fractional bits {self.frac_bits} not representable in {self.n_bits} bits"
            )

    @property
    def min_code(self) -> int:
        return -(1 << (self.n_bits - 1))

    @property
    def max_code(self) -> int:
        return (1 << (self.n_bits - 1)) - 1

    @property
    def lsb(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def min_value(self) -> float:
        return self.min_code * self.lsb

    @property
    def max_value(self) -> float:
        return self.max_code * self.lsb

    @classmethod
    def parse(cls, text: str) -> "QFormat":
        """Parse the ``n_m`` notation, e.g. ``8_1``."""
        try:
            n, m = text.strip().split("_")
            return cls(int(n), int(m))
        except (ValueError, AttributeError) as exc:
            raise ValueError(f"bad quantization format {text!r}, expected 'n_m'") from exc

    def __str__(self) -> str:
        return f"{self.n_bits}_{self.frac_bits}"


def quantize(x, fmt: QFormat) -> np.ndarray:
    """Quantize real LLRs to integer codes.

    Rounds to nearest with ties away from zero, then saturates.  Accepts a
    scalar or array; always returns int32 codes.
    """
    x = np.asarray(x, dtype=np.float64)
    scaled = x * (1 << fmt.frac_bits)
    codes = np.where(scaled >= 0.0, np.floor(scaled + 0.5), np.ceil(scaled - 0.5))
    return np.clip(codes, fmt.min_code, fmt.max_code).astype(np.int32)


def to_real(codes, fmt: QFormat) -> np.ndarray:
    """Convert integer codes back to real LLR values."""
    return np.asarray(codes, dtype=np.float64) * fmt.lsb


def saturate(codes, fmt: QFormat) -> np.ndarray:
    """Clamp (wider) integer codes into the representable range."""
    return np.clip(codes, fmt.min_code, fmt.max_code).astype(np.int32)


def sat_add(a, b, fmt: QFormat) -> np.ndarray:
    return saturate(np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64), fmt)


def sat_sub(a, b, fmt: QFormat) -> np.ndarray:
    return saturate(np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64), fmt)


def reciprocal_scale_table(alpha: float, fmt: QFormat) -> np.ndarray:
    """Magnitude lookup table realizing division by the normalization factor.

    Division by alpha is implemented as multiplication by 1/alpha in double
    precision followed by re-quantization to the working format.  Index i of
    the table holds the scaled magnitude code for input magnitude code i;
    indices run up to |min_code| because the most negative code has the
    largest magnitude.
    """
    if alpha < 1.0:
        raise ValueError(f"normalization factor must be >= 1, got {alpha}")
    mags = np.arange(-fmt.min_code + 1, dtype=np.float64)
    return np.floor(mags * (1.0 / alpha) + 0.5).astype(np.int32)


@dataclass(frozen=True)
class QLlr:
    """A single fixed-point LLR: integer code plus its format.

    Convenience wrapper for interface-level code and tests; the decoding
    hot path works on raw code arrays.
    """

    code: int
    fmt: QFormat = QFormat()

    @classmethod
    def from_real(cls, x: float, fmt: QFormat = QFormat()) -> "QLlr":
        return cls(int(quantize(x, fmt)), fmt)

    @property
    def value(self) -> float:
        return self.code * self.fmt.lsb

    def _check_fmt(self, other: "QLlr"):
        if other.fmt != self.fmt:
            raise ValueError("mixed fixed-point formats")

    def __add__(self, other: "QLlr") -> "QLlr":
        self._check_fmt(other)
        return QLlr(int(sat_add(self.code, other.code, self.fmt)), self.fmt)

    def __sub__(self, other: "QLlr") -> "QLlr":
        self._check_fmt(other)
        return QLlr(int(sat_sub(self.code, other.code, self.fmt)), self.fmt)

    def __neg__(self) -> "QLlr":
        return QLlr(int(saturate(-self.code, self.fmt)), self.fmt)

    def __abs__(self) -> "QLlr":
        return QLlr(int(saturate(abs(self.code), self.fmt)), self.fmt)
