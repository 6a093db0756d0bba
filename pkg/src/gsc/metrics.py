"""Evaluation quantities: NMSE, semantic NMSE, histogram KL, CER, report rows."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KL_EPSILON = 1e-9
KL_BINS = 64


def nmse(x, xhat) -> float:
    """Normalized mean-square error ||x - xhat||^2 / ||x||^2.

    A zero-norm reference is an error (it almost always signals a broken
    fixture), never 0 or infinity.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    xhat = np.asarray(xhat, dtype=np.float64).reshape(-1)
    if x.shape != xhat.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {xhat.shape}")
    ref = float(x @ x)
    if ref == 0.0:
        raise ValueError("reference vector has zero norm")
    diff = x - xhat
    return float(diff @ diff) / ref


def semantic_nmse(source, destination, extract_task_vectors) -> float:
    """NMSE between task-relevant features extracted from both ends.

    ``extract_task_vectors(item)`` must return the list of task tensors the
    semantic extractor produces; they are flattened and concatenated in
    stream order (the fixed, documented order) before the NMSE.
    """
    src = [np.asarray(t, dtype=np.float64).reshape(-1) for t in extract_task_vectors(source)]
    dst = [np.asarray(t, dtype=np.float64).reshape(-1) for t in extract_task_vectors(destination)]
    if len(src) != len(dst) or any(a.shape != b.shape for a, b in zip(src, dst)):
        raise ValueError("extractor produced mismatched shapes for source and destination")
    if not src:
        raise ValueError("extractor produced no task vectors")
    return nmse(np.concatenate(src), np.concatenate(dst))


def kl_divergence_hist(samples_p, samples_q, bins: int = KL_BINS, epsilon: float = KL_EPSILON) -> float:
    """KL divergence between histograms of two sample sets.

    Bin edges are shared, computed from the union range of both sets.
    Probabilities get additive epsilon smoothing and renormalization, so
    the result is finite and >= 0 (0 for identical sample sets).
    """
    p = np.asarray(samples_p, dtype=np.float64).reshape(-1)
    q = np.asarray(samples_q, dtype=np.float64).reshape(-1)
    if p.size == 0 or q.size == 0:
        raise ValueError("sample sets must be nonempty")
    if bins < 2:
        raise ValueError("need at least 2 bins")
    lo = min(p.min(), q.min())
    hi = max(p.max(), q.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    hp, _ = np.histogram(p, bins=edges)
    hq, _ = np.histogram(q, bins=edges)
    pp = (hp / hp.sum() + epsilon) / (1.0 + bins * epsilon)
    qq = (hq / hq.sum() + epsilon) / (1.0 + bins * epsilon)
    return float(np.sum(pp * np.log(pp / qq)))


def character_error_rate(reference: str, hypothesis: str) -> float:
    """Levenshtein distance over the reference length (0 for equal strings)."""
    if reference == hypothesis:
        return 0.0
    if not reference:
        raise ValueError("reference text is empty")
    prev = list(range(len(hypothesis) + 1))
    for i, rc in enumerate(reference, start=1):
        cur = [i]
        for j, hc in enumerate(hypothesis, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (rc != hc)))
        prev = cur
    return prev[-1] / len(reference)


@dataclass
class MetricReport:
    """One evaluated pipeline run; one row of the results table.

    Optional metrics are ``None`` when they do not apply (text-only paths
    have no semantic NMSE unless an embedding extractor is supplied; NRQM
    exists only when an external metric adapter reported it).
    """

    scenario: str
    method: str
    budget_label: str
    bytes_transmitted: int
    flops_estimate: int
    seed: int = 0
    item: str = ""
    semantic_nmse: float | None = None
    piqe: float | None = None
    kl_divergence: float | None = None
    cer: float | None = None
    nrqm: float | None = None
    task_constraint_pass: bool | None = None
    perceptual_constraint_pass: bool | None = None

    def __post_init__(self):
        if self.bytes_transmitted < 0 or self.flops_estimate < 0:
            raise ValueError("byte and flop counts must be non-negative")
        for name, value, lo, hi in (
            ("semantic_nmse", self.semantic_nmse, 0.0, math.inf),
            ("piqe", self.piqe, 0.0, 100.0),
            ("kl_divergence", self.kl_divergence, 0.0, math.inf),
            ("cer", self.cer, 0.0, math.inf),
        ):
            if value is None:
                continue
            if not math.isfinite(value) or not (lo <= value <= hi):
                raise ValueError(f"{name}={value} outside [{lo},{hi}]")
