"""Dense GF(2) linear algebra on bit-packed matrices.

Rows are stored as uint64 words, 64 columns per word, bit ``j`` of word
``j // 64`` holding column ``j``.  Packing keeps Gauss-Jordan elimination
of parity-check matrices with a few thousand rows under a couple of
seconds, which is what code construction needs.
"""

from __future__ import annotations

import numpy as np


def pack_rows(mat: np.ndarray) -> np.ndarray:
    """Pack a (m, n) 0/1 matrix into (m, ceil(n/64)) uint64 words."""
    mat = np.asarray(mat, dtype=np.uint8) & 1
    m, n = mat.shape
    words = (n + 63) // 64
    padded = np.zeros((m, words * 64), dtype=np.uint8)
    padded[:, :n] = mat
    # packbits is MSB-first per byte; view as little-endian words after a
    # per-byte bit reversal keeps column j at bit position j % 64.
    cols = np.arange(words * 64)
    bit_pos = (cols // 8) * 8 + (7 - cols % 8)
    reordered = np.zeros_like(padded)
    reordered[:, bit_pos] = padded
    packed_bytes = np.packbits(reordered, axis=1)
    return packed_bytes.view("<u8").copy()


def unpack_rows(packed: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`, recovering the first ``n`` columns."""
    packed = np.asarray(packed, dtype=np.uint64)
    m, words = packed.shape
    as_bytes = packed.astype("<u8").view(np.uint8).reshape(m, words * 8)
    bits = np.unpackbits(as_bytes, axis=1)
    cols = np.arange(words * 64)
    bit_pos = (cols // 8) * 8 + (7 - cols % 8)
    return bits[:, bit_pos][:, :n].astype(np.uint8)


def get_column(packed: np.ndarray, j: int) -> np.ndarray:
    word, bit = divmod(j, 64)
    return ((packed[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)


def row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Gauss-Jordan over GF(2).

    Returns the fully reduced matrix (identity on pivot columns, entries
    eliminated above and below) and the pivot column list, whose length is
    the rank.
    """
    packed = pack_rows(mat)
    m, n = np.asarray(mat).shape
    pivot_cols: list[int] = []
    pivot_row = 0
    for col in range(n):
        if pivot_row >= m:
            break
        colbits = get_column(packed, col)
        candidates = np.flatnonzero(colbits[pivot_row:])
        if candidates.size == 0:
            continue
        src = pivot_row + candidates[0]
        if src != pivot_row:
            packed[[pivot_row, src]] = packed[[src, pivot_row]]
            colbits[[pivot_row, src]] = colbits[[src, pivot_row]]
        colbits[pivot_row] = False
        packed[colbits] ^= packed[pivot_row]
        pivot_cols.append(col)
        pivot_row += 1
    return unpack_rows(packed, n), pivot_cols


def rank(mat: np.ndarray) -> int:
    return len(row_reduce(mat)[1])


def matmul_f2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a @ b) mod 2 via float32 BLAS; exact while inner dim < 2**24."""
    a = np.asarray(a, dtype=np.float32)
    b = np.asarray(b, dtype=np.float32)
    return (np.rint(a @ b).astype(np.int64) & 1).astype(np.uint8)
