"""alist import/export for parity-check matrices.

The alist layout (1-based indices, zero padding to the maximum degree)::

    n m
    max_col_degree max_row_degree
    col degrees (n values)
    row degrees (m values)
    n lines: row indices of the ones in each column
    m lines: column indices of the ones in each row

Lets users drop in externally generated matrices (for example actual
5G-NR base-graph expansions) in place of the built-in construction.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .ldpc import LdpcCode, from_parity_matrix


class AlistParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"alist line {line}: {message}")
        self.line = line


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as e:
        raise AlistParseError(lineno, f"non-integer token ({e})") from e


def load_alist(text: str, code_id: str | None = None) -> LdpcCode:
    """Parse alist text into a code with systematic-encoding metadata.

    The parity matrix must have full row rank; the message positions are
    derived deterministically from the matrix, so load(dump(code)) yields
    an identical code.
    """
    lines = [ln for ln in text.splitlines()]
    idx = 0

    def next_line() -> tuple[str, int]:
        nonlocal idx
        while idx < len(lines) and not lines[idx].strip():
            idx += 1
        if idx >= len(lines):
            raise AlistParseError(len(lines), "unexpected end of file")
        idx += 1
        return lines[idx - 1], idx

    header, lineno = next_line()
    vals = _ints(header, lineno)
    if len(vals) != 2:
        raise AlistParseError(lineno, "expected 'n m'")
    n, m = vals
    if n <= 0 or m <= 0 or m >= n:
        raise AlistParseError(lineno, f"bad dimensions n={n} m={m}")
    degline, lineno = next_line()
    vals = _ints(degline, lineno)
    if len(vals) != 2:
        raise AlistParseError(lineno, "expected max column and row degrees")
    max_col, max_row = vals
    col_line, lineno = next_line()
    col_deg = _ints(col_line, lineno)
    if len(col_deg) != n:
        raise AlistParseError(lineno, f"expected {n} column degrees, got {len(col_deg)}")
    row_line, lineno = next_line()
    row_deg = _ints(row_line, lineno)
    if len(row_deg) != m:
        raise AlistParseError(lineno, f"expected {m} row degrees, got {len(row_deg)}")
    if max(col_deg, default=0) > max_col or max(row_deg, default=0) > max_row:
        raise AlistParseError(lineno, "degree exceeds declared maximum")

    h = np.zeros((m, n), dtype=np.uint8)
    for col in range(n):
        line, lineno = next_line()
        entries = _ints(line, lineno)
        nonzero = [e for e in entries if e != 0]
        if len(nonzero) != col_deg[col]:
            raise AlistParseError(
                lineno, f"column {col + 1} lists {len(nonzero)} entries, declared {col_deg[col]}"
            )
        for e in nonzero:
            if not (1 <= e <= m):
                raise AlistParseError(lineno, f"row index {e} out of range [1,{m}]")
            h[e - 1, col] = 1
    for row in range(m):
        line, lineno = next_line()
        entries = _ints(line, lineno)
        nonzero = [e for e in entries if e != 0]
        if len(nonzero) != row_deg[row]:
            raise AlistParseError(
                lineno, f"row {row + 1} lists {len(nonzero)} entries, declared {row_deg[row]}"
            )
        for e in nonzero:
            if not (1 <= e <= n):
                raise AlistParseError(lineno, f"column index {e} out of range [1,{n}]")
            if h[row, e - 1] != 1:
                raise AlistParseError(lineno, f"entry ({row + 1},{e}) not in column lists")
    if int(h.sum(axis=0).max()) != max(col_deg):
        raise AlistParseError(lineno, "column lists disagree with degrees")
    ident = code_id or "alist-" + hashlib.sha256(h.tobytes()).hexdigest()[:8]
    return from_parity_matrix(h, ident)


def dump_alist(code: LdpcCode) -> str:
    """Serialize the parity matrix of a code to alist text."""
    h = code.parity_dense()
    m, n = h.shape
    col_lists = [list(np.flatnonzero(h[:, j]) + 1) for j in range(n)]
    row_lists = [list(np.flatnonzero(h[i]) + 1) for i in range(m)]
    max_col = max(len(c) for c in col_lists)
    max_row = max(len(r) for r in row_lists)
    out = [f"{n} {m}", f"{max_col} {max_row}"]
    out.append(" ".join(str(len(c)) for c in col_lists))
    out.append(" ".join(str(len(r)) for r in row_lists))
    for entries, width in ((col_lists, max_col), (row_lists, max_row)):
        for lst in entries:
            padded = lst + [0] * (width - len(lst))
            out.append(" ".join(str(v) for v in padded))
    return "\n".join(out) + "\n"
