"""Self-contained block-DCT image codec, the traditional-transmission baseline.

8x8 orthonormal DCT per block, quality-scaled uniform quantization of the
coefficients, zigzag scan, zero run-length coding, and fixed-layout
category/amplitude bit packing (4-bit run, 4-bit size, then the amplitude
bits).  The bitstream decodes losslessly back to the quantized
coefficients; all information loss happens in the quantizer.

The DC quantization step is capped so flat regions survive within one
intensity level at any quality setting.
"""

from __future__ import annotations

import struct

import numpy as np

DCT_MAGIC = b"GSCD"
DCT_VERSION = 1
DC_STEP_CAP = 16

# ITU T.81 Annex K luminance table, the customary base for quality scaling.
BASE_QUANT = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)

_ZIGZAG = np.array(
    [
        0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5,
        12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6, 7, 14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
    ]
)


class DctStreamError(ValueError):
    """Corrupt or truncated codec bitstream."""


def _dct_matrix() -> np.ndarray:
    k = np.arange(8)
    t = np.cos((2 * k[None, :] + 1) * k[:, None] * np.pi / 16.0) * 0.5
    t[0] /= np.sqrt(2.0)
    return t


_DCT = _dct_matrix()


def quant_table(quality: int) -> np.ndarray:
    if not (1 <= quality <= 100):
        raise ValueError("quality must be in [1, 100]")
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    table = np.floor((BASE_QUANT * scale + 50.0) / 100.0)
    table = np.clip(table, 1, 255)
    table[0, 0] = min(table[0, 0], DC_STEP_CAP)
    return table


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, nbits: int):
        if nbits == 0:
            return
        self.acc = (self.acc << nbits) | (value & ((1 << nbits) - 1))
        self.nbits += nbits
        while self.nbits >= 8:
            self.nbits -= 8
            self.out.append((self.acc >> self.nbits) & 0xFF)
        self.acc &= (1 << self.nbits) - 1

    def getvalue(self) -> bytes:
        if self.nbits:
            return bytes(self.out) + bytes([(self.acc << (8 - self.nbits)) & 0xFF])
        return bytes(self.out)


class _BitReader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0
        self.acc = 0
        self.nbits = 0

    def read(self, nbits: int) -> int:
        while self.nbits < nbits:
            if self.pos >= len(self.buf):
                raise DctStreamError("bitstream exhausted")
            self.acc = (self.acc << 8) | self.buf[self.pos]
            self.pos += 1
            self.nbits += 8
        self.nbits -= nbits
        value = (self.acc >> self.nbits) & ((1 << nbits) - 1)
        self.acc &= (1 << self.nbits) - 1
        return value


def _amplitude_bits(value: int) -> tuple[int, int]:
    # JPEG-style category coding: size = bit length of |v|, negative values
    # stored in one's complement of the magnitude field.
    size = int(value).bit_length() if value > 0 else int(-value).bit_length()
    if value >= 0:
        return size, value
    return size, value + (1 << size) - 1


def _amplitude_value(raw: int, size: int) -> int:
    if size == 0:
        return 0
    if raw < (1 << (size - 1)):
        return raw - (1 << size) + 1
    return raw


def _to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)


def _from_blocks(blocks: np.ndarray, h: int, w: int) -> np.ndarray:
    return blocks.reshape(h // 8, w // 8, 8, 8).transpose(0, 2, 1, 3).reshape(h, w)


def _encode_plane(plane: np.ndarray, table: np.ndarray, writer: _BitWriter):
    blocks = _to_blocks(plane.astype(np.float64) - 128.0)
    coeffs = np.einsum("ij,bjk,lk->bil", _DCT, blocks, _DCT)
    quantized = np.rint(coeffs / table).astype(np.int64).reshape(-1, 64)[:, _ZIGZAG]
    prev_dc = 0
    for zz in quantized:
        dc = int(zz[0])
        size, amp = _amplitude_bits(dc - prev_dc)
        prev_dc = dc
        writer.write(size, 4)
        writer.write(amp, size)
        nonzero = np.flatnonzero(zz[1:]) + 1
        pos = 1
        for idx in nonzero:
            run = int(idx) - pos
            while run > 15:
                writer.write(0xF0, 8)  # ZRL: sixteen zeros
                run -= 16
            size, amp = _amplitude_bits(int(zz[idx]))
            writer.write((run << 4) | size, 8)
            writer.write(amp, size)
            pos = int(idx) + 1
        if pos <= 63:
            writer.write(0x00, 8)  # EOB


def _decode_plane(reader: _BitReader, table: np.ndarray, h: int, w: int) -> np.ndarray:
    nblocks = (h // 8) * (w // 8)
    zz = np.zeros((nblocks, 64), dtype=np.float64)
    prev_dc = 0
    for b in range(nblocks):
        size = reader.read(4)
        if size > 12:
            raise DctStreamError(f"invalid DC size {size} in block {b}")
        prev_dc += _amplitude_value(reader.read(size), size)
        zz[b, 0] = prev_dc
        pos = 1
        while pos <= 63:
            rs = reader.read(8)
            if rs == 0x00:
                break
            run, size = rs >> 4, rs & 0x0F
            if size == 0:
                if run != 15:
                    raise DctStreamError(f"invalid zero-size run {run} in block {b}")
                pos += 16
                continue
            pos += run
            if pos > 63:
                raise DctStreamError(f"coefficient index overflow in block {b}")
            zz[b, pos] = _amplitude_value(reader.read(size), size)
            pos += 1
    coeffs = np.zeros((nblocks, 64))
    coeffs[:, _ZIGZAG] = zz
    blocks = coeffs.reshape(-1, 8, 8) * table
    pixels = np.einsum("ji,bjk,kl->bil", _DCT, blocks, _DCT) + 128.0
    return _from_blocks(pixels, h, w)


def _pad_to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    ph = (-h) % 8
    pw = (-w) % 8
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    return plane


def dct_baseline_encode(image, quality: int) -> bytes:
    """Encode a grayscale (H, W) or color (H, W, C) image in [0, 255]."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3 or img.shape[2] not in (1, 3):
        raise ValueError("expected (H, W) or (H, W, 1|3) image")
    h, w, channels = img.shape
    table = quant_table(quality)
    writer = _BitWriter()
    for c in range(channels):
        _encode_plane(_pad_to_blocks(img[:, :, c]), table, writer)
    header = DCT_MAGIC + struct.pack("<BIIBB", DCT_VERSION, h, w, channels, quality)
    return header + writer.getvalue()


def dct_baseline_decode(buf: bytes):
    """Decode back to a uint8 image of the original dimensions."""
    if len(buf) < 15:
        raise DctStreamError("stream shorter than header")
    if buf[:4] != DCT_MAGIC:
        raise DctStreamError("bad magic: not a DCT stream")
    version, h, w, channels, quality = struct.unpack("<BIIBB", buf[4:15])
    if version != DCT_VERSION:
        raise DctStreamError(f"unsupported version {version}")
    if channels not in (1, 3) or h == 0 or w == 0:
        raise DctStreamError("invalid image geometry")
    table = quant_table(quality)
    reader = _BitReader(buf[15:])
    ph = h + ((-h) % 8)
    pw = w + ((-w) % 8)
    planes = [
        np.clip(np.rint(_decode_plane(reader, table, ph, pw)[:h, :w]), 0, 255).astype(np.uint8)
        for _ in range(channels)
    ]
    if channels == 1:
        return planes[0]
    return np.stack(planes, axis=2)
