"""8x8 block partitioning, homogeneity ranking and residual-block enhancement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .transforms import from_blocks, to_blocks

__all__ = [
    "BLOCK",
    "BlockIndex",
    "BlockStats",
    "partition_blocks",
    "merge_blocks",
    "block_stats",
    "rank_homogeneous",
    "enhance_block",
    "enhance_residual_blocks",
    "select_blocks",
]

BLOCK = 8


@dataclass(frozen=True, order=True)
class BlockIndex:
    band: str
    layer: str
    row: int
    col: int

    def token(self) -> str:
        return f"{self.band},{self.row},{self.col}"


@dataclass(frozen=True)
class BlockStats:
    index: BlockIndex
    mean: float
    variance: float


def partition_blocks(plane, block: int = BLOCK) -> np.ndarray:
    """Split a plane into an (n, block, block) stack in raster-scan order."""
    tiles = to_blocks(plane, block)
    return tiles.reshape(-1, block, block).copy()


def merge_blocks(blocks, shape: tuple[int, int]) -> np.ndarray:
    """Inverse of :func:`partition_blocks` for a plane of the given shape."""
    b = np.asarray(blocks)
    size = b.shape[-1]
    h, w = shape
    return from_blocks(b.reshape(h // size, w // size, size, size))


def block_stats(plane, band: str = "LL", layer: str = "R", block: int = BLOCK) -> list[BlockStats]:
    """Mean and population variance of every block, raster order."""
    tiles = to_blocks(np.asarray(plane, dtype=np.float64), block)
    means = tiles.mean(axis=(2, 3))
    variances = tiles.var(axis=(2, 3))
    nr, nc = means.shape
    return [
        BlockStats(BlockIndex(band, layer, r, c), float(means[r, c]), float(variances[r, c]))
        for r in range(nr)
        for c in range(nc)
    ]


def rank_homogeneous(stats: list[BlockStats]) -> list[BlockStats]:
    """Sort ascending by variance; ties keep raster-scan order."""
    return sorted(stats, key=lambda s: (s.variance, s.index.row, s.index.col))


def enhance_block(block, gain: float) -> np.ndarray:
    """Scale a block's deviation from its mean by ``gain``; the mean is kept."""
    if not gain > 1:
        raise ValueError(f"enhancement gain must be > 1, got {gain}")
    b = np.asarray(block, dtype=np.float64)
    mu = b.mean()
    return mu + gain * (b - mu)


def enhance_residual_blocks(blocks, gain: float) -> list[np.ndarray]:
    return [enhance_block(b, gain) for b in blocks]


def select_blocks(
    ranked: list[BlockStats],
    n_payload: int,
    n_enhance: int | None = None,
    homogeneous_fraction: float = 0.5,
) -> tuple[list[BlockIndex], list[BlockIndex]]:
    """Pick payload blocks and the residual homogeneous blocks to enhance.

    The first ``n_payload`` ranked blocks carry the payload. Unless
    ``n_enhance`` is given, the homogeneous pool is the lowest-variance
    ``ceil(homogeneous_fraction * len(ranked))`` blocks, and whatever the
    payload leaves of that pool is enhanced.
    """
    if n_payload > len(ranked):
        raise ValueError(f"{n_payload} payload blocks requested, only {len(ranked)} available")
    if n_enhance is None:
        pool = max(n_payload, math.ceil(homogeneous_fraction * len(ranked)))
        n_enhance = pool - n_payload
    n_enhance = max(0, min(n_enhance, len(ranked) - n_payload))
    chosen = [s.index for s in ranked[:n_payload]]
    extra = [s.index for s in ranked[n_payload:n_payload + n_enhance]]
    return chosen, extra
