"""Uniform scalar quantization of embedding vectors.

Mid-rise quantizer with ``2**bits`` cells per component over a per-component
[lo, hi] range; out-of-range values clamp to the edge cells and dequantized
values are cell midpoints, so the round-trip error of any in-range value is
at most ``(hi - lo) / 2**(bits + 1)``.

Ranges are stored at float32 precision because that is how they travel in
payload headers; quantize and dequantize both use the rounded values so the
two ends of a link always agree on cell geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BITS_MIN = 1
BITS_MAX = 16

# Minimum representable range; keeps hi > lo on constant data.
_MIN_RANGE = 1e-6


@dataclass(frozen=True)
class QuantSpec:
    bits: int
    lo: np.ndarray  # (k,) float32
    hi: np.ndarray  # (k,) float32

    def __post_init__(self):
        if not (BITS_MIN <= self.bits <= BITS_MAX):
            raise ValueError(f"bits must be in [{BITS_MIN},{BITS_MAX}], got {self.bits}")
        lo = np.atleast_1d(np.asarray(self.lo, dtype=np.float32))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=np.float32))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1-D arrays of equal length")
        if not np.all(hi > lo):
            raise ValueError("hi must exceed lo in every component")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def rank(self) -> int:
        return self.lo.shape[0]

    @property
    def levels(self) -> int:
        return 1 << self.bits

    @classmethod
    def from_data(cls, vectors, bits: int) -> "QuantSpec":
        """Per-component min/max of the data, widened where degenerate."""
        v = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        lo = v.min(axis=0)
        hi = v.max(axis=0)
        narrow = hi - lo < _MIN_RANGE
        hi = np.where(narrow, lo + _MIN_RANGE, hi)
        return cls(bits=bits, lo=lo.astype(np.float32), hi=hi.astype(np.float32))

    def __eq__(self, other):
        if not isinstance(other, QuantSpec):
            return NotImplemented
        return (
            self.bits == other.bits
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )


def quantize(spec: QuantSpec, v) -> np.ndarray:
    """Map vector components to integer codes in [0, 2**bits - 1]."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != spec.rank:
        raise ValueError(f"expected {spec.rank} components, got {v.shape[-1]}")
    lo = spec.lo.astype(np.float64)
    hi = spec.hi.astype(np.float64)
    scaled = np.floor((v - lo) / (hi - lo) * spec.levels)
    return np.clip(scaled, 0, spec.levels - 1).astype(np.uint16)


def dequantize(spec: QuantSpec, codes) -> np.ndarray:
    """Cell midpoints for the given codes."""
    codes = np.asarray(codes)
    if codes.shape[-1] != spec.rank:
        raise ValueError(f"expected {spec.rank} components, got {codes.shape[-1]}")
    if codes.size and (codes.min() < 0 or codes.max() >= spec.levels):
        raise ValueError("code out of range for quantizer")
    lo = spec.lo.astype(np.float64)
    hi = spec.hi.astype(np.float64)
    return lo + (codes.astype(np.float64) + 0.5) * (hi - lo) / spec.levels
