"""Wire formats: semantic payloads, tensor blobs and basis blobs.

All integers are little-endian.

Payload ("GSCP", version 1)::

    magic "GSCP" | version u8 | stream_count u8 | streams...

Vector stream (types 0=task, 1=perceptual)::

    stream_type u8 | basis_id_len u8 | basis_id bytes | rank u16 |
    vector_count u32 | bits u8 | lo f32 * rank | hi f32 * rank |
    packed codes (bits each, MSB-first, zero-padded to a byte boundary)

Text stream (type 2)::

    stream_type u8 | byte_length u32 | raw bytes

Tensor blob ("GSCT", version 1)::

    magic "GSCT" | version u8 | dtype u8 (0=u8, 1=f32, 2=f64) | ndim u8 |
    dims u32 * ndim | row-major little-endian data

Basis blob ("GSCB", version 1), used when a payload travels with its own
codebook (self-contained basis mode)::

    magic "GSCB" | version u8 | basis_id_len u8 | basis_id bytes |
    mean tensor (GSCT f64) | components tensor (GSCT f64)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .pca import PcaBasis
from .quant import QuantSpec

PAYLOAD_MAGIC = b"GSCP"
PAYLOAD_VERSION = 1
TENSOR_MAGIC = b"GSCT"
TENSOR_VERSION = 1
BASIS_MAGIC = b"GSCB"
BASIS_VERSION = 1

STREAM_TASK = 0
STREAM_PERCEPTUAL = 1
STREAM_TEXT = 2

_DTYPE_CODES = {0: np.dtype("<u1"), 1: np.dtype("<f4"), 2: np.dtype("<f8")}
_DTYPE_IDS = {np.dtype("uint8"): 0, np.dtype("float32"): 1, np.dtype("float64"): 2}

HEADER_SIZE = 6  # magic + version + stream_count


class PayloadError(ValueError):
    """Malformed payload, tensor or basis bytes."""


class TruncatedPayload(PayloadError):
    pass


class BadMagic(PayloadError):
    pass


class VersionMismatch(PayloadError):
    pass


@dataclass(frozen=True)
class VectorStream:
    """Quantized embedding vectors plus the quantizer that decodes them."""

    stream_type: int
    basis_id: str
    codes: np.ndarray  # (count, rank) uint16
    quant: QuantSpec

    def __post_init__(self):
        if self.stream_type not in (STREAM_TASK, STREAM_PERCEPTUAL):
            raise ValueError(f"bad vector stream type {self.stream_type}")
        codes = np.atleast_2d(np.asarray(self.codes, dtype=np.uint16))
        if codes.shape[1] != self.quant.rank:
            raise ValueError("code width does not match quantizer rank")
        if len(self.basis_id.encode()) > 255:
            raise ValueError("basis_id longer than 255 bytes")
        object.__setattr__(self, "codes", codes)

    @property
    def count(self) -> int:
        return self.codes.shape[0]

    @property
    def rank(self) -> int:
        return self.codes.shape[1]

    def vectors(self) -> np.ndarray:
        from .quant import dequantize

        return dequantize(self.quant, self.codes)

    def __eq__(self, other):
        if not isinstance(other, VectorStream):
            return NotImplemented
        return (
            self.stream_type == other.stream_type
            and self.basis_id == other.basis_id
            and np.array_equal(self.codes, other.codes)
            and self.quant == other.quant
        )


@dataclass(frozen=True)
class TextStream:
    data: bytes

    @property
    def stream_type(self) -> int:
        return STREAM_TEXT


@dataclass(frozen=True)
class SemanticPayload:
    """Ordered bundle of vector and text streams, the unit of transmission."""

    streams: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "streams", tuple(self.streams))
        if len(self.streams) > 255:
            raise ValueError("at most 255 streams per payload")

    def _vector_streams(self, stream_type):
        return [s for s in self.streams if s.stream_type == stream_type]

    @property
    def task_streams(self) -> list[VectorStream]:
        return self._vector_streams(STREAM_TASK)

    @property
    def perceptual_streams(self) -> list[VectorStream]:
        return self._vector_streams(STREAM_PERCEPTUAL)

    @property
    def task_vectors(self) -> list[np.ndarray]:
        return [s.vectors() for s in self.task_streams]

    @property
    def perceptual_vectors(self) -> list[np.ndarray]:
        return [s.vectors() for s in self.perceptual_streams]

    @property
    def text_segments(self) -> list[bytes]:
        return [s.data for s in self.streams if s.stream_type == STREAM_TEXT]

    @property
    def basis_ids(self) -> list[str]:
        return [getattr(s, "basis_id", "") for s in self.streams]

    def __eq__(self, other):
        if not isinstance(other, SemanticPayload):
            return NotImplemented
        return self.streams == other.streams


# --- bit packing -----------------------------------------------------------

def pack_codes(codes: np.ndarray, bits: int) -> bytes:
    """Pack integer codes, ``bits`` each, MSB-first, zero-padded at the end."""
    flat = np.asarray(codes, dtype=np.uint16).reshape(-1)
    if flat.size == 0:
        return b""
    shifts = np.arange(bits - 1, -1, -1, dtype=np.uint16)
    bit_rows = (flat[:, None] >> shifts) & 1
    return np.packbits(bit_rows.astype(np.uint8).reshape(-1)).tobytes()


def unpack_codes(buf: bytes, bits: int, count: int) -> np.ndarray:
    """Inverse of :func:`pack_codes` for ``count`` codes."""
    need_bits = bits * count
    if len(buf) * 8 < need_bits:
        raise TruncatedPayload("packed code section shorter than declared")
    raw = np.unpackbits(np.frombuffer(buf, dtype=np.uint8), count=need_bits)
    weights = (1 << np.arange(bits - 1, -1, -1, dtype=np.uint32))
    return (raw.reshape(count, bits).astype(np.uint32) @ weights).astype(np.uint16)


def packed_size(count: int, rank: int, bits: int) -> int:
    return (count * rank * bits + 7) // 8


# --- tensor blobs ----------------------------------------------------------

def write_tensor(arr: np.ndarray) -> bytes:
    arr = np.asarray(arr)
    if arr.dtype not in _DTYPE_IDS:
        raise ValueError(f"unsupported tensor dtype {arr.dtype}")
    if arr.ndim > 255:
        raise ValueError("too many dimensions")
    out = bytearray()
    out += TENSOR_MAGIC
    out += struct.pack("<BBB", TENSOR_VERSION, _DTYPE_IDS[arr.dtype], arr.ndim)
    for dim in arr.shape:
        out += struct.pack("<I", dim)
    out += np.ascontiguousarray(arr, dtype=arr.dtype.newbyteorder("<")).tobytes()
    return bytes(out)


def read_tensor(buf: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Parse one tensor blob; returns ``(array, next_offset)``."""
    cur = _Cursor(buf, offset)
    magic = cur.take(4, "tensor magic")
    if magic != TENSOR_MAGIC:
        raise BadMagic(f"bad tensor magic at offset {offset}")
    version, dtype_id, ndim = struct.unpack("<BBB", cur.take(3, "tensor header"))
    if version != TENSOR_VERSION:
        raise VersionMismatch(f"tensor version {version} not supported")
    if dtype_id not in _DTYPE_CODES:
        raise PayloadError(f"unknown tensor dtype id {dtype_id}")
    dims = [struct.unpack("<I", cur.take(4, "tensor dims"))[0] for _ in range(ndim)]
    dtype = _DTYPE_CODES[dtype_id]
    nbytes = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize if dims else dtype.itemsize
    if ndim == 0:
        nbytes = dtype.itemsize
    data = cur.take(nbytes, "tensor data")
    arr = np.frombuffer(data, dtype=dtype).reshape(dims).copy()
    return arr, cur.offset


def tensor_size(arr: np.ndarray) -> int:
    arr = np.asarray(arr)
    return 7 + 4 * arr.ndim + arr.nbytes


# --- basis blobs -----------------------------------------------------------

def write_basis(basis: PcaBasis) -> bytes:
    ident = basis.basis_id.encode()
    if len(ident) > 255:
        raise ValueError("basis_id longer than 255 bytes")
    out = bytearray()
    out += BASIS_MAGIC
    out += struct.pack("<BB", BASIS_VERSION, len(ident))
    out += ident
    out += write_tensor(basis.mean.astype(np.float64))
    out += write_tensor(basis.components.astype(np.float64))
    return bytes(out)


def read_basis(buf: bytes, offset: int = 0) -> tuple[PcaBasis, int]:
    cur = _Cursor(buf, offset)
    magic = cur.take(4, "basis magic")
    if magic != BASIS_MAGIC:
        raise BadMagic(f"bad basis magic at offset {offset}")
    version, id_len = struct.unpack("<BB", cur.take(2, "basis header"))
    if version != BASIS_VERSION:
        raise VersionMismatch(f"basis version {version} not supported")
    ident = cur.take(id_len, "basis id").decode()
    mean, off = read_tensor(buf, cur.offset)
    components, off = read_tensor(buf, off)
    return PcaBasis(mean=mean, components=components, basis_id=ident), off


def basis_size(basis: PcaBasis) -> int:
    return 6 + len(basis.basis_id.encode()) + tensor_size(basis.mean) + tensor_size(basis.components)


# --- payload serialization --------------------------------------------------

class _Cursor:
    def __init__(self, buf: bytes, offset: int = 0):
        self.buf = buf
        self.offset = offset

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.buf):
            raise TruncatedPayload(
                f"truncated input: needed {n} bytes for {what} at offset {self.offset}"
            )
        out = self.buf[self.offset : self.offset + n]
        self.offset += n
        return out


def serialize_payload(p: SemanticPayload) -> bytes:
    out = bytearray()
    out += PAYLOAD_MAGIC
    out += struct.pack("<BB", PAYLOAD_VERSION, len(p.streams))
    for s in p.streams:
        if isinstance(s, TextStream):
            out += struct.pack("<B", STREAM_TEXT)
            out += struct.pack("<I", len(s.data))
            out += s.data
            continue
        ident = s.basis_id.encode()
        out += struct.pack("<B", s.stream_type)
        out += struct.pack("<B", len(ident))
        out += ident
        out += struct.pack("<HIB", s.rank, s.count, s.quant.bits)
        out += s.quant.lo.astype("<f4").tobytes()
        out += s.quant.hi.astype("<f4").tobytes()
        out += pack_codes(s.codes, s.quant.bits)
    return bytes(out)


def read_payload(buf: bytes, offset: int = 0) -> tuple[SemanticPayload, int, list[tuple[int, int]]]:
    """Cursor-style payload parse.

    Returns ``(payload, next_offset, spans)`` where ``spans`` holds the
    [start, end) byte range of each stream, used to map undecoded channel
    frames onto per-stream validity flags.
    """
    cur = _Cursor(buf, offset)
    magic = cur.take(4, "payload magic")
    if magic != PAYLOAD_MAGIC:
        raise BadMagic("bad magic: not a payload")
    version, stream_count = struct.unpack("<BB", cur.take(2, "payload header"))
    if version != PAYLOAD_VERSION:
        raise VersionMismatch(f"payload version {version} not supported")
    streams = []
    spans = []
    for _ in range(stream_count):
        start = cur.offset
        (stream_type,) = struct.unpack("<B", cur.take(1, "stream type"))
        if stream_type == STREAM_TEXT:
            (nbytes,) = struct.unpack("<I", cur.take(4, "text length"))
            data = cur.take(nbytes, "text bytes")
            streams.append(TextStream(bytes(data)))
        elif stream_type in (STREAM_TASK, STREAM_PERCEPTUAL):
            (id_len,) = struct.unpack("<B", cur.take(1, "basis id length"))
            ident = cur.take(id_len, "basis id").decode()
            rank, count, bits = struct.unpack("<HIB", cur.take(7, "stream header"))
            if rank == 0:
                raise PayloadError("stream rank must be positive")
            lo = np.frombuffer(cur.take(4 * rank, "lo values"), dtype="<f4").copy()
            hi = np.frombuffer(cur.take(4 * rank, "hi values"), dtype="<f4").copy()
            spec = QuantSpec(bits=bits, lo=lo, hi=hi)
            packed = cur.take(packed_size(count, rank, bits), "packed codes")
            codes = unpack_codes(packed, bits, count * rank).reshape(count, rank)
            if codes.size and codes.max() >= spec.levels:
                raise PayloadError("packed code exceeds quantizer levels")
            streams.append(VectorStream(stream_type, ident, codes, spec))
        else:
            raise PayloadError(f"unknown stream type {stream_type}")
        spans.append((start, cur.offset))
    return SemanticPayload(tuple(streams)), cur.offset, spans


def deserialize_payload(buf: bytes) -> SemanticPayload:
    """Strict parse of exactly one payload; trailing bytes are an error."""
    payload, end, _ = read_payload(buf, 0)
    if end != len(buf):
        raise PayloadError(f"{len(buf) - end} trailing bytes after payload")
    return payload


def payload_byte_size(p: SemanticPayload) -> int:
    """Exact wire size in bytes; equals ``len(serialize_payload(p))``."""
    total = HEADER_SIZE
    for s in p.streams:
        if isinstance(s, TextStream):
            total += 1 + 4 + len(s.data)
        else:
            total += vector_stream_size(s.count, s.rank, s.quant.bits, s.basis_id)
    return total


def vector_stream_size(count: int, rank: int, bits: int, basis_id: str = "") -> int:
    """Wire size of one vector stream, header included (pure accounting)."""
    return 1 + 1 + len(basis_id.encode()) + 7 + 8 * rank + packed_size(count, rank, bits)


def text_stream_size(nbytes: int) -> int:
    return 1 + 4 + nbytes
