"""Orthonormal 2D transforms: single-level Daubechies DWT, block DCT/WHT, DFT.

The wavelet is the 4-tap orthonormal Daubechies filter (two vanishing
moments; called "D4" or "db2" depending on the naming convention). Boundaries
are periodic, which keeps the transform exactly orthogonal. Because of the
normalisation, the lowpass taps sum to sqrt(2), so a constant plane of value c
maps to an LL band of constant 2c.

Every transform pair here is orthonormal, so energy is preserved and
``inverse(forward(x)) == x`` up to floating point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy.linalg import hadamard

__all__ = [
    "D4_LOWPASS",
    "D4_HIGHPASS",
    "SubbandSet",
    "dwt2_forward",
    "dwt2_inverse",
    "to_blocks",
    "from_blocks",
    "dct2_block",
    "idct2_block",
    "wht2_block",
    "iwht2_block",
    "dft2",
    "idft2",
    "walsh_matrix",
    "zigzag_order",
]

_S3 = np.sqrt(3.0)
D4_LOWPASS = np.array([1 + _S3, 3 + _S3, 3 - _S3, 1 - _S3]) / (4 * np.sqrt(2.0))
# quadrature mirror: g[k] = (-1)^k h[3-k]
D4_HIGHPASS = np.array([D4_LOWPASS[3], -D4_LOWPASS[2], D4_LOWPASS[1], -D4_LOWPASS[0]])


@dataclass(frozen=True, eq=False)
class SubbandSet:
    """First-level subbands of an H x W plane, each (H/2) x (W/2).

    Naming: the first letter is the horizontal (along-row) filter, the second
    the vertical one. ``lh`` is therefore horizontally smooth / vertically
    detailed, and ``hh`` holds the diagonal detail.
    """

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray

    def __post_init__(self):
        shapes = {np.shape(b) for b in (self.ll, self.lh, self.hl, self.hh)}
        if len(shapes) != 1:
            raise ValueError(f"subband planes disagree in shape: {sorted(shapes)}")
        if len(next(iter(shapes))) != 2:
            raise ValueError("subbands must be 2D planes")

    @property
    def shape(self) -> tuple[int, int]:
        return np.shape(self.ll)

    def band(self, name: str) -> np.ndarray:
        return getattr(self, name.lower())

    def replace(self, **bands) -> SubbandSet:
        planes = {k: getattr(self, k) for k in ("ll", "lh", "hl", "hh")}
        planes.update({k.lower(): v for k, v in bands.items()})
        return SubbandSet(**planes)


def _analyze(x: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    half = np.arange(n // 2)
    lo = np.zeros(x.shape[:-1] + (n // 2,))
    hi = np.zeros_like(lo)
    for k in range(4):
        tap = x[..., (2 * half + k) % n]
        lo += D4_LOWPASS[k] * tap
        hi += D4_HIGHPASS[k] * tap
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def _synthesize(lo: np.ndarray, hi: np.ndarray, axis: int) -> np.ndarray:
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    n = 2 * lo.shape[-1]
    half = np.arange(n // 2)
    out = np.zeros(lo.shape[:-1] + (n,))
    for k in range(4):
        # for a fixed tap the target indices are distinct, so += is safe
        out[..., (2 * half + k) % n] += D4_LOWPASS[k] * lo + D4_HIGHPASS[k] * hi
    return np.moveaxis(out, -1, axis)


def dwt2_forward(image) -> SubbandSet:
    """Single-level separable D4 DWT (rows, then columns), periodic boundary."""
    x = np.asarray(image, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("dwt2_forward expects a 2D plane")
    h, w = x.shape
    if h % 2 or w % 2 or h < 4 or w < 4:
        raise ValueError(f"dwt2_forward needs even dimensions >= 4, got {w}x{h}")
    row_lo, row_hi = _analyze(x, axis=1)
    ll, lh = _analyze(row_lo, axis=0)
    hl, hh = _analyze(row_hi, axis=0)
    return SubbandSet(ll=ll, lh=lh, hl=hl, hh=hh)


def dwt2_inverse(bands: SubbandSet) -> np.ndarray:
    """Perfect-reconstruction inverse of :func:`dwt2_forward`."""
    ll, lh, hl, hh = (np.asarray(b, dtype=np.float64) for b in (bands.ll, bands.lh, bands.hl, bands.hh))
    if not (ll.shape == lh.shape == hl.shape == hh.shape):
        raise ValueError("subband planes disagree in shape")
    if min(ll.shape) < 2:
        raise ValueError("subbands too small to invert")
    row_lo = _synthesize(ll, lh, axis=0)
    row_hi = _synthesize(hl, hh, axis=0)
    return _synthesize(row_lo, row_hi, axis=1)


# --------------------------------------------------------------------------
# block helpers


def to_blocks(plane, block: int = 8) -> np.ndarray:
    """View an (H, W) plane as (H/b, W/b, b, b) tiles in raster order."""
    x = np.asarray(plane)
    if x.ndim != 2:
        raise ValueError("expected a 2D plane")
    h, w = x.shape
    if h % block or w % block:
        raise ValueError(f"plane {w}x{h} is not divisible into {block}x{block} blocks")
    return x.reshape(h // block, block, w // block, block).swapaxes(1, 2)


def from_blocks(blocks) -> np.ndarray:
    b = np.asarray(blocks)
    nr, nc, bh, bw = b.shape
    return b.swapaxes(1, 2).reshape(nr * bh, nc * bw)


@lru_cache(maxsize=None)
def walsh_matrix(n: int = 8) -> np.ndarray:
    """Orthonormal Walsh matrix with rows in sequency (sign-change) order."""
    hm = hadamard(n).astype(np.float64)
    changes = (np.diff(hm, axis=1) != 0).sum(axis=1)
    out = hm[np.argsort(changes, kind="stable")] / np.sqrt(n)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def zigzag_order(n: int = 8) -> tuple[tuple[int, int], ...]:
    """JPEG zigzag scan of an n x n block as (row, col) pairs."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    return tuple(sorted(cells, key=lambda rc: (rc[0] + rc[1], -rc[0] if (rc[0] + rc[1]) % 2 == 0 else rc[0])))


def dct2_block(plane, block: int = 8) -> np.ndarray:
    """Orthonormal DCT-II applied independently to each block."""
    tiles = to_blocks(np.asarray(plane, dtype=np.float64), block)
    return from_blocks(sfft.dctn(tiles, type=2, norm="ortho", axes=(2, 3)))


def idct2_block(coeffs, block: int = 8) -> np.ndarray:
    tiles = to_blocks(np.asarray(coeffs, dtype=np.float64), block)
    return from_blocks(sfft.idctn(tiles, type=2, norm="ortho", axes=(2, 3)))


def wht2_block(plane, block: int = 8) -> np.ndarray:
    """Orthonormal sequency-ordered Walsh-Hadamard transform per block."""
    m = walsh_matrix(block)
    tiles = to_blocks(np.asarray(plane, dtype=np.float64), block)
    return from_blocks(m @ tiles @ m.T)


def iwht2_block(coeffs, block: int = 8) -> np.ndarray:
    m = walsh_matrix(block)
    tiles = to_blocks(np.asarray(coeffs, dtype=np.float64), block)
    return from_blocks(m.T @ tiles @ m)


def dft2(plane) -> np.ndarray:
    """Unitary 2D DFT of a whole plane (any dimensions)."""
    x = np.asarray(plane)
    if x.ndim != 2:
        raise ValueError("dft2 expects a 2D plane")
    return np.fft.fft2(x, norm="ortho")


def idft2(coeffs) -> np.ndarray:
    """Inverse of :func:`dft2`; returns a complex plane."""
    x = np.asarray(coeffs)
    if x.ndim != 2:
        raise ValueError("idft2 expects a 2D plane")
    return np.fft.ifft2(x, norm="ortho")
