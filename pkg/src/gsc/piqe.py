"""Perception-based no-reference image quality score (PIQE).

Blockwise analysis of mean-subtracted contrast-normalized (MSCN)
coefficients: 16x16 blocks whose MSCN variance exceeds an activity
threshold are "spatially active"; each active block is tested for
noticeable artifacts (low-variance segments along its edges) and for
Gaussian-noise behavior (center vs surround deviation), and the distortion
scores pool into a 0-100 score.  Lower is better; a uniform image scores
100.  All constants below follow the original published formulation.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

BLOCK_SIZE = 16
ACTIVITY_THRESHOLD = 0.1
BLOCK_IMPAIRED_THRESHOLD = 0.1
SEGMENT_WINDOW = 6
POOLING_CONSTANT = 1.0
MIN_SIDE = 32

# MSCN window: 7-tap Gaussian, sigma 7/6, replicated borders.
_MSCN_SIGMA = 7.0 / 6.0
_MSCN_TRUNCATE = 3.0 / _MSCN_SIGMA


def _mscn(image: np.ndarray) -> np.ndarray:
    mu = gaussian_filter(image, sigma=_MSCN_SIGMA, truncate=_MSCN_TRUNCATE, mode="nearest")
    second = gaussian_filter(image * image, sigma=_MSCN_SIGMA, truncate=_MSCN_TRUNCATE, mode="nearest")
    sigma = np.sqrt(np.abs(second - mu * mu))
    return (image - mu) / (sigma + 1.0)


def _segment_stds(edge: np.ndarray) -> np.ndarray:
    n_segments = BLOCK_SIZE - SEGMENT_WINDOW + 1
    windows = np.lib.stride_tricks.sliding_window_view(edge, SEGMENT_WINDOW)[:n_segments]
    return windows.std(axis=1, ddof=1)


def _noticeable_artifact(block: np.ndarray) -> bool:
    edges = (block[0, :], block[:, -1], block[-1, :], block[:, 0])
    return any(bool((_segment_stds(e) < BLOCK_IMPAIRED_THRESHOLD).any()) for e in edges)


def _noise_criterion(block: np.ndarray, block_sigma: float) -> bool:
    center1 = (BLOCK_SIZE - 1 + 1) // 2  # columns 8 and 9, 1-based
    center = np.concatenate([block[:, center1 - 1], block[:, center1]])
    surround = np.delete(block, (center1 - 1, center1), axis=1)
    center_std = center.std(ddof=1)
    surround_std = surround.std(ddof=1)
    ratio = center_std / surround_std if surround_std > 0 else 0.0
    if np.isnan(ratio):
        ratio = 0.0
    beta = abs(block_sigma - ratio) / max(block_sigma, ratio)
    return block_sigma > 2.0 * beta


def piqe(image) -> float:
    """Score a grayscale intensity grid (values in [0, 255]); lower is better.

    Deterministic; requires at least a 32x32 image.  The result is clamped
    to [0, 100].
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 3:
        img = img.mean(axis=2)
    if img.ndim != 2:
        raise ValueError("expected a 2-D intensity grid")
    if min(img.shape) < MIN_SIDE:
        raise ValueError(f"image must be at least {MIN_SIDE}x{MIN_SIDE}")
    if not np.isfinite(img).all():
        raise ValueError("image contains non-finite values")
    img = np.round(img)

    rows = -(-img.shape[0] // BLOCK_SIZE) * BLOCK_SIZE
    cols = -(-img.shape[1] // BLOCK_SIZE) * BLOCK_SIZE
    if (rows, cols) != img.shape:
        img = np.pad(img, ((0, rows - img.shape[0]), (0, cols - img.shape[1])), mode="symmetric")

    coeffs = _mscn(img)
    dist_score = 0.0
    active_blocks = 0
    for i in range(0, rows, BLOCK_SIZE):
        for j in range(0, cols, BLOCK_SIZE):
            block = coeffs[i : i + BLOCK_SIZE, j : j + BLOCK_SIZE]
            var = block.var(ddof=1)
            if var <= ACTIVITY_THRESHOLD:
                continue
            active_blocks += 1
            impaired = _noticeable_artifact(block)
            noisy = _noise_criterion(block, float(np.sqrt(var)))
            dist_score += impaired * (1.0 - var) + noisy * var
    score = 100.0 * (dist_score + POOLING_CONSTANT) / (POOLING_CONSTANT + active_blocks)
    return float(min(max(score, 0.0), 100.0))
