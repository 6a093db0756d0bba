"""Modulation, AWGN channel simulation and Monte-Carlo BER measurement.

SNR convention: ``snr_db`` is Es/N0 per channel use (symbol energy over
noise spectral density).  The channel adds zero-mean Gaussian noise with
variance N0/2 per real dimension, so for unit-energy constellations
N0 = 10**(-snr_db/10).  ``snr_db=None`` is the noiseless sentinel (spelled
``"noiseless"`` in configuration files).

LLR sign convention: positive LLR favors bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ldpc import LdpcCode, ldpc_decode, ldpc_encode

BPSK = "BPSK"
QPSK = "QPSK"
MODULATIONS = (BPSK, QPSK)
NOISELESS = "noiseless"

# Effective Es/N0 substituted for the noiseless sentinel when forming LLRs;
# keeps decoder inputs finite while saturating any realistic confidence.
_NOISELESS_SNR_LINEAR = 1e12


@dataclass(frozen=True)
class ChannelConfig:
    """AWGN channel parameters; ``snr_db=None`` means noiseless."""

    snr_db: float | None = 10.0
    modulation: str = BPSK
    seed: int = 1

    def __post_init__(self):
        if self.modulation not in MODULATIONS:
            raise ValueError(f"unknown modulation {self.modulation!r}")
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite or None (noiseless)")

    @property
    def noiseless(self) -> bool:
        return self.snr_db is None


def snr_db_from_json(value) -> float | None:
    if value == NOISELESS or value is None:
        return None
    return float(value)


def snr_db_to_json(value: float | None):
    return NOISELESS if value is None else value


def esn0_to_ebn0(esn0_db: float, code_rate: float, modulation: str = BPSK) -> float:
    """Convert the Es/N0 convention to Eb/N0 for a given code rate."""
    bits_per_symbol = 2 if modulation == QPSK else 1
    return esn0_db - 10.0 * math.log10(code_rate * bits_per_symbol)


def ebn0_to_esn0(ebn0_db: float, code_rate: float, modulation: str = BPSK) -> float:
    bits_per_symbol = 2 if modulation == QPSK else 1
    return ebn0_db + 10.0 * math.log10(code_rate * bits_per_symbol)


def modulate(bits, modulation: str = BPSK) -> np.ndarray:
    """Map bits to unit-energy symbols: BPSK 0->+1, QPSK Gray-mapped."""
    bits = np.asarray(bits, dtype=np.uint8)
    if modulation == BPSK:
        return 1.0 - 2.0 * bits.astype(np.float64)
    if modulation == QPSK:
        if bits.size % 2:
            raise ValueError("QPSK requires an even number of bits")
        pairs = bits.reshape(-1, 2)
        re = 1.0 - 2.0 * pairs[:, 0].astype(np.float64)
        im = 1.0 - 2.0 * pairs[:, 1].astype(np.float64)
        return (re + 1j * im) / math.sqrt(2.0)
    raise ValueError(f"unknown modulation {modulation!r}")


def awgn(symbols: np.ndarray, config: ChannelConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Add white Gaussian noise at the configured Es/N0.

    Noise variance is N0/2 per real dimension.  With no explicit ``rng``
    the generator is derived from ``config.seed``, so repeated calls with
    identical arguments produce identical noise.
    """
    symbols = np.asarray(symbols)
    if config.noiseless:
        return symbols.copy()
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence([0xA36, config.seed]))
    n0 = 10.0 ** (-config.snr_db / 10.0)
    sigma = math.sqrt(n0 / 2.0)
    if np.iscomplexobj(symbols):
        noise = rng.normal(0.0, sigma, symbols.shape) + 1j * rng.normal(0.0, sigma, symbols.shape)
        return symbols + noise
    return symbols + rng.normal(0.0, sigma, symbols.shape)


def llr_from_symbols(symbols: np.ndarray, snr_db: float | None, modulation: str = BPSK) -> np.ndarray:
    """Per-bit channel LLRs for unit-energy BPSK/QPSK over AWGN.

    BPSK: llr = 4 * snr * y.  QPSK: llr = 2*sqrt(2) * snr * component, with
    the real component giving the first bit of each pair.  ``snr`` is the
    linear Es/N0; the noiseless sentinel uses a large finite stand-in.
    """
    symbols = np.asarray(symbols)
    snr = _NOISELESS_SNR_LINEAR if snr_db is None else 10.0 ** (snr_db / 10.0)
    if modulation == BPSK:
        return 4.0 * snr * np.real(symbols).astype(np.float64)
    if modulation == QPSK:
        comps = np.empty(symbols.size * 2, dtype=np.float64)
        comps[0::2] = np.real(symbols)
        comps[1::2] = np.imag(symbols)
        return 2.0 * math.sqrt(2.0) * snr * comps
    raise ValueError(f"unknown modulation {modulation!r}")


def transmit_codeword(bits: np.ndarray, config: ChannelConfig, rng=None) -> np.ndarray:
    """modulate -> awgn -> llr for one codeword's bits."""
    symbols = modulate(bits, config.modulation)
    noisy = awgn(symbols, config, rng=rng)
    return llr_from_symbols(noisy, config.snr_db, config.modulation)


@dataclass(frozen=True)
class BerResult:
    snr_db: float | None
    code_id: str
    modulation: str
    info_bits: int
    bit_errors: int
    frames: int
    frame_errors: int
    residual_errors: int = 0  # exact Hamming distance of best estimates

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits if self.info_bits else 0.0

    @property
    def bler(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0


def measure_ber(
    code: LdpcCode,
    config: ChannelConfig,
    num_bits: int,
    max_iters: int = 25,
) -> BerResult:
    """Monte-Carlo BER/BLER over random messages.

    Each frame owns an independent generator derived from (seed, frame
    index), so results do not depend on evaluation order.

    A frame whose decode does not converge delivers no usable payload (the
    pipeline discards it), so its bits are accounted as coin flips: k/2 of
    its message bits count as errors.  The exact Hamming distance of the
    decoder's best estimates is still reported as ``residual_errors``.
    """
    frames = max(1, -(-num_bits // code.k))
    bit_errors = 0
    frame_errors = 0
    residual = 0
    for trial in range(frames):
        rng = np.random.default_rng(np.random.SeedSequence([0xBE4, config.seed, trial]))
        message = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        codeword = ldpc_encode(code, message)
        llrs = transmit_codeword(codeword, config, rng=rng)
        result = ldpc_decode(code, llrs, max_iters=max_iters)
        errors = int(np.count_nonzero(result.message != message))
        residual += errors
        if result.converged:
            bit_errors += errors
            frame_errors += errors > 0
        else:
            bit_errors += code.k // 2
            frame_errors += 1
    return BerResult(
        snr_db=config.snr_db,
        code_id=code.code_id,
        modulation=config.modulation,
        info_bits=frames * code.k,
        bit_errors=bit_errors,
        frames=frames,
        frame_errors=frame_errors,
        residual_errors=residual,
    )
