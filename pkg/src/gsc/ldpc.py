"""Quasi-cyclic LDPC codes: construction, systematic encoding, min-sum decoding.

Codes are built by lifting a (3,6)-regular base graph with circulant
permutation blocks, then deriving a systematic encoder from the Gauss-Jordan
reduction of the parity-check matrix.  Constructed codes are permuted so
message bits occupy codeword positions [0, k); codes imported from alist
files keep their column order and record the message positions explicitly.

Decoding is flooding-schedule normalized min-sum (factor 0.8) with a zero
syndrome early exit.  All hot paths operate on flat edge arrays so decoding
stays vectorized.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import gf2

DEFAULT_MIN_SUM_SCALE = 0.8
DEFAULT_MAX_ITERS = 25
CONSTRUCTION_ATTEMPTS = 16

DEFAULT_Z = 64
DEFAULT_BASE_ROWS = 64
DEFAULT_BASE_COLS = 128
DEFAULT_CODE_ID = "qc3x6-z64-r05"


class CodeConstructionError(ValueError):
    """Construction failed to reach a full-rank parity matrix."""


@dataclass
class LdpcCode:
    """Binary LDPC code described by its sparse parity-check matrix.

    ``row_idx``/``col_idx`` list the coordinates of the ones in H, sorted by
    row.  ``msg_cols`` are the codeword positions that carry message bits
    verbatim; ``pivot_cols`` carry the parity bits, and ``enc_matrix`` maps
    messages to parity bits over GF(2).
    """

    code_id: str
    n: int
    k: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    msg_cols: np.ndarray
    pivot_cols: np.ndarray
    enc_matrix: np.ndarray  # (m, k) uint8
    _enc_f32: np.ndarray | None = field(default=None, repr=False)
    _decoder_arrays: tuple | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.n - self.k

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def num_edges(self) -> int:
        return self.row_idx.shape[0]

    def parity_dense(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        h[self.row_idx, self.col_idx] = 1
        return h

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        """H @ bits mod 2 using the sparse edge list."""
        bits = np.asarray(bits, dtype=np.uint8)
        return np.bincount(self.row_idx, weights=bits[self.col_idx], minlength=self.m).astype(np.int64) % 2


@dataclass(frozen=True)
class CodedFrame:
    """One codeword worth of channel bits with framing metadata."""

    code_id: str
    index: int
    payload_bits: int  # total payload bits in the whole frame stream, pre-padding
    bits: np.ndarray   # (n,) uint8

    def __post_init__(self):
        object.__setattr__(self, "bits", np.asarray(self.bits, dtype=np.uint8))


@dataclass(frozen=True)
class DecodeResult:
    message: np.ndarray
    codeword: np.ndarray
    converged: bool
    iterations: int


def _base_graph_edges(base_rows: int, base_cols: int, col_weight: int, rng) -> list[tuple[int, int]]:
    # Configuration-model pairing of row and column sockets; re-draw until
    # no cell is used twice.  Deterministic for a given generator state.
    total = base_cols * col_weight
    if total % base_rows != 0:
        raise CodeConstructionError(
            f"column weight {col_weight} with {base_rows}x{base_cols} base "
            "does not give an integer row weight"
        )
    cols = np.repeat(np.arange(base_cols), col_weight)
    rows = np.repeat(np.arange(base_rows), total // base_rows)[rng.permutation(total)]
    for _ in range(100 * total):
        edge_index: dict[tuple[int, int], int] = {}
        dup = -1
        for i, (r, c) in enumerate(zip(rows.tolist(), cols.tolist())):
            if (r, c) in edge_index and dup < 0:
                dup = i
            edge_index[(r, c)] = i
        if dup < 0:
            return sorted(zip(rows.tolist(), cols.tolist()))
        # Swap the duplicate's row with a random edge when that creates
        # neither of the two new cells twice.
        for _ in range(200):
            j = int(rng.integers(total))
            ri, ci = int(rows[dup]), int(cols[dup])
            rj, cj = int(rows[j]), int(cols[j])
            if ri == rj or ci == cj:
                continue
            if (rj, ci) in edge_index or (ri, cj) in edge_index:
                continue
            rows[dup], rows[j] = rj, ri
            break
    raise CodeConstructionError("could not realize a simple regular base graph")


def _lift(base_edges, shifts, z: int) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    cols = []
    offsets = np.arange(z)
    for (rb, cb), shift in zip(base_edges, shifts):
        rows.append(rb * z + offsets)
        cols.append(cb * z + (offsets + shift) % z)
    return np.concatenate(rows), np.concatenate(cols)


def _systematic_metadata(h_dense: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m, n = h_dense.shape
    reduced, pivots = gf2.row_reduce(h_dense)
    if len(pivots) < m:
        raise CodeConstructionError(f"parity matrix rank {len(pivots)} < {m}")
    pivot_cols = np.asarray(pivots, dtype=np.int64)
    msg_cols = np.setdiff1d(np.arange(n), pivot_cols)
    enc = reduced[:, msg_cols].astype(np.uint8)
    return msg_cols, pivot_cols, enc


def from_parity_matrix(h_dense: np.ndarray, code_id: str) -> LdpcCode:
    """Build a code (with encoder metadata) from a dense 0/1 parity matrix."""
    h_dense = np.asarray(h_dense, dtype=np.uint8) & 1
    m, n = h_dense.shape
    msg_cols, pivot_cols, enc = _systematic_metadata(h_dense)
    rows, cols = np.nonzero(h_dense)
    order = np.lexsort((cols, rows))
    return LdpcCode(
        code_id=code_id,
        n=n,
        k=n - m,
        row_idx=rows[order].astype(np.int64),
        col_idx=cols[order].astype(np.int64),
        msg_cols=msg_cols,
        pivot_cols=pivot_cols,
        enc_matrix=enc,
    )


def make_regular_qc_ldpc(
    z: int,
    base_rows: int,
    base_cols: int,
    seed: int = 0,
    col_weight: int = 3,
    code_id: str | None = None,
) -> LdpcCode:
    """Construct a regular QC-LDPC code by circulant lifting.

    Deterministic for fixed arguments.  If a draw of circulant shifts gives
    a rank-deficient parity matrix the shifts are re-drawn, up to
    ``CONSTRUCTION_ATTEMPTS`` times.  The returned code is column-permuted
    so message bits occupy positions [0, k).
    """
    if z < 4:
        raise ValueError("lifting size z must be >= 4")
    if base_rows >= base_cols:
        raise ValueError("base graph must be wider than tall")
    rng = np.random.default_rng(np.random.SeedSequence([0x6C6470, seed]))
    base_edges = _base_graph_edges(base_rows, base_cols, col_weight, rng)
    n = base_cols * z
    m = base_rows * z
    last_err = None
    for attempt in range(CONSTRUCTION_ATTEMPTS):
        shifts = rng.integers(0, z, size=len(base_edges))
        rows, cols = _lift(base_edges, shifts, z)
        h = np.zeros((m, n), dtype=np.uint8)
        h[rows, cols] = 1
        try:
            msg_cols, pivot_cols, enc = _systematic_metadata(h)
        except CodeConstructionError as e:
            last_err = e
            continue
        # Permute columns so the code is systematic in its public order.
        perm = np.concatenate([msg_cols, pivot_cols])
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        new_cols = inv[cols]
        order = np.lexsort((new_cols, rows))
        ident = code_id or f"qc{col_weight}x{2 * col_weight}-z{z}-b{base_rows}x{base_cols}-s{seed}"
        return LdpcCode(
            code_id=ident,
            n=n,
            k=n - m,
            row_idx=rows[order].astype(np.int64),
            col_idx=new_cols[order].astype(np.int64),
            msg_cols=np.arange(n - m, dtype=np.int64),
            pivot_cols=np.arange(n - m, n, dtype=np.int64),
            enc_matrix=enc,
        )
    raise CodeConstructionError(
        f"no full-rank construction in {CONSTRUCTION_ATTEMPTS} attempts: {last_err}"
    )


@functools.lru_cache(maxsize=4)
def default_code() -> LdpcCode:
    """The rate-1/2 (3,6)-regular default code: z=64, n=8192, k=4096."""
    code = make_regular_qc_ldpc(DEFAULT_Z, DEFAULT_BASE_ROWS, DEFAULT_BASE_COLS, seed=1)
    code.code_id = DEFAULT_CODE_ID
    return code


def ldpc_encode(code: LdpcCode, message: np.ndarray) -> np.ndarray:
    """Systematic encode of one (k,) message or an (batch, k) block.

    Message bits land on ``code.msg_cols`` verbatim; parity bits solve
    H c = 0 over GF(2).
    """
    msg = np.asarray(message, dtype=np.uint8)
    single = msg.ndim == 1
    msg2 = np.atleast_2d(msg)
    if msg2.shape[1] != code.k:
        raise ValueError(f"message length {msg2.shape[1]} != k={code.k}")
    if code._enc_f32 is None:
        code._enc_f32 = code.enc_matrix.astype(np.float32)
    parity = (np.rint(msg2.astype(np.float32) @ code._enc_f32.T).astype(np.int64) & 1).astype(np.uint8)
    out = np.zeros((msg2.shape[0], code.n), dtype=np.uint8)
    out[:, code.msg_cols] = msg2
    out[:, code.pivot_cols] = parity
    return out[0] if single else out


def _decoder_arrays(code: LdpcCode):
    if code._decoder_arrays is None:
        row_counts = np.bincount(code.row_idx, minlength=code.m)
        if row_counts.min() == 0:
            raise ValueError("parity matrix has an empty row")
        row_starts = np.concatenate([[0], np.cumsum(row_counts)[:-1]])
        edge_row = code.row_idx  # already sorted by row
        code._decoder_arrays = (row_starts.astype(np.int64), edge_row, code.col_idx)
    return code._decoder_arrays


def ldpc_decode(
    code: LdpcCode,
    llrs: np.ndarray,
    max_iters: int = DEFAULT_MAX_ITERS,
    scale: float = DEFAULT_MIN_SUM_SCALE,
) -> DecodeResult:
    """Normalized min-sum decode; positive LLR means bit 0.

    Exits as soon as the hard decision satisfies every parity check; when
    the iteration budget runs out the best current estimate is returned
    with ``converged=False``.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got {llrs.shape}")
    row_starts, edge_row, edge_col = _decoder_arrays(code)
    num_edges = edge_col.shape[0]
    positions = np.arange(num_edges)

    posterior = llrs.copy()
    hard = (posterior < 0).astype(np.uint8)
    if not code.syndrome(hard).any():
        return DecodeResult(hard[code.msg_cols], hard, True, 0)

    r_msg = np.zeros(num_edges)
    for iteration in range(1, max_iters + 1):
        q = posterior[edge_col] - r_msg
        neg = np.signbit(q)
        mag = np.abs(q)
        row_neg = np.bitwise_xor.reduceat(neg, row_starts)
        min1 = np.minimum.reduceat(mag, row_starts)
        # First edge attaining min1 in each row, then the runner-up min.
        sentinel = np.where(mag == min1[edge_row], positions, num_edges)
        first_pos = np.minimum.reduceat(sentinel, row_starts)
        mag2 = mag.copy()
        mag2[first_pos] = np.inf
        min2 = np.maximum(np.minimum.reduceat(mag2, row_starts), 0.0)
        out_mag = np.where(positions == first_pos[edge_row], min2[edge_row], min1[edge_row])
        out_neg = row_neg[edge_row] ^ neg
        r_msg = scale * np.where(out_neg, -out_mag, out_mag)
        posterior = llrs + np.bincount(edge_col, weights=r_msg, minlength=code.n)
        hard = (posterior < 0).astype(np.uint8)
        if not code.syndrome(hard).any():
            return DecodeResult(hard[code.msg_cols], hard, True, iteration)
    return DecodeResult(hard[code.msg_cols], hard, False, max_iters)
