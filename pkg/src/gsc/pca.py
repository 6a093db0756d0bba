"""PCA basis fitting, projection and reconstruction for embedding vectors.

The basis is computed by eigendecomposition of the sample covariance
(dense, suitable for dimensions up to a few hundred).  Component signs
follow a deterministic convention and exactly degenerate (zero-variance)
directions are completed from the standard basis, so identical inputs
always produce identical bases.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

ORTHONORMAL_TOL = 1e-8
_ZERO_EIGVAL_REL = 1e-12
_SIGN_EPS = 1e-12


@dataclass(frozen=True)
class PcaBasis:
    """Row-orthonormal projection basis with the sample mean."""

    mean: np.ndarray        # (d,)
    components: np.ndarray  # (k, d), rows orthonormal
    basis_id: str = ""

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        comp = np.asarray(self.components, dtype=np.float64)
        if comp.ndim != 2 or mean.ndim != 1 or comp.shape[1] != mean.shape[0]:
            raise ValueError("components must be (k, d) with mean of length d")
        if comp.shape[0] < 1:
            raise ValueError("basis rank must be at least 1")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "components", comp)
        if not self.basis_id:
            object.__setattr__(self, "basis_id", _content_id(mean, comp))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def rank(self) -> int:
        return self.components.shape[0]

    def orthonormality_defect(self) -> float:
        gram = self.components @ self.components.T
        return float(np.abs(gram - np.eye(self.rank)).max())

    def __eq__(self, other):
        if not isinstance(other, PcaBasis):
            return NotImplemented
        return (
            self.basis_id == other.basis_id
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.components, other.components)
        )


def _content_id(mean: np.ndarray, components: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(mean.tobytes())
    h.update(components.tobytes())
    return "pca-" + h.hexdigest()[:12]


def _fix_signs(components: np.ndarray) -> np.ndarray:
    # First element with magnitude above _SIGN_EPS is made positive.
    out = components.copy()
    for row in out:
        nz = np.flatnonzero(np.abs(row) > _SIGN_EPS)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return out


def _complete_from_standard_basis(rows: list[np.ndarray], d: int, need: int) -> list[np.ndarray]:
    # Deterministic orthonormal completion: walk e_0..e_{d-1}, Gram-Schmidt
    # against what we already have, keep vectors with non-negligible residual.
    added = []
    for i in range(d):
        if len(added) == need:
            break
        v = np.zeros(d)
        v[i] = 1.0
        for row in rows:
            v -= (row @ v) * row
        for row in added:
            v -= (row @ v) * row
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            added.append(v / norm)
    if len(added) < need:
        raise ValueError("could not complete orthonormal basis")
    return added


def fit_basis(samples, rank: int, basis_id: str = "") -> PcaBasis:
    """Fit a rank-``k`` PCA basis to a set of d-vectors.

    Components are the top-k eigenvectors of the sample covariance, sorted
    by decreasing eigenvalue.  Requires at least ``rank`` samples and
    ``rank <= d``.  Directions with (numerically) zero variance are
    replaced by deterministic standard-basis completions.
    """
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("samples must be a 2-D array of shape (n, d)")
    n, d = X.shape
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if rank > d:
        raise ValueError(f"rank {rank} exceeds dimension {d}")
    if n < rank:
        raise ValueError(f"need at least {rank} samples, got {n}")
    mean = X.mean(axis=0)
    centered = X - mean
    cov = (centered.T @ centered) / max(n - 1, 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    zero_tol = max(eigvals[0], 0.0) * _ZERO_EIGVAL_REL
    keep = [i for i in range(rank) if eigvals[i] > zero_tol]
    rows = [eigvecs[:, i] for i in keep]
    if len(rows) < rank:
        rows += _complete_from_standard_basis(rows, d, rank - len(rows))
    components = _fix_signs(np.vstack(rows))
    return PcaBasis(mean=mean, components=components, basis_id=basis_id)


def project(basis: PcaBasis, x) -> np.ndarray:
    """Project one d-vector or an (n, d) batch onto the basis."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != basis.dim:
        raise ValueError(f"expected dimension {basis.dim}, got {x.shape[-1]}")
    return (x - basis.mean) @ basis.components.T


def reconstruct(basis: PcaBasis, y) -> np.ndarray:
    """Inverse of :func:`project` up to the subspace truncation error."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape[-1] != basis.rank:
        raise ValueError(f"expected rank {basis.rank}, got {y.shape[-1]}")
    return y @ basis.components + basis.mean


def truncate_basis(basis: PcaBasis, rank: int) -> PcaBasis:
    """Keep the top ``rank`` components (used when shrinking to a byte budget)."""
    if not (1 <= rank <= basis.rank):
        raise ValueError(f"rank must be in [1, {basis.rank}]")
    if rank == basis.rank:
        return basis
    return PcaBasis(mean=basis.mean, components=basis.components[:rank].copy())
