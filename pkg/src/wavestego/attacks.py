"""Channel impairments applied to a stego image before extraction.

Attack strings (used by the CLI and the comparison config)::

    gaussian:SIGMA      additive N(0, SIGMA^2) noise
    saltpepper:DENSITY  impulses; half salt (255), half pepper (0)
    mean:K              K x K box filter (K odd, >= 3)
    median:K            K x K median filter
    jpeg:QUALITY        8x8 DCT quantisation with the standard luminance
                        table scaled IJG-style; no entropy coding
    histeq              histogram equalisation
    rescale:FACTOR      bilinear resize by FACTOR, then back to the original size
    none                identity

Every attack works layer by layer and returns 8-bit output. Stochastic
attacks draw from ``numpy.random.default_rng(seed)``, one stream per image,
layers in R, G, B order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imagecore import RgbImage
from .transforms import dct2_block, idct2_block

__all__ = ["AttackSpec", "parse_attack", "apply_attack", "attack_plane", "JPEG_LUMA", "jpeg_table"]

JPEG_LUMA = np.array(
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

KINDS = ("none", "gaussian", "saltpepper", "mean", "median", "jpeg", "histeq", "rescale")
_NEEDS_VALUE = {"gaussian", "saltpepper", "mean", "median", "jpeg", "rescale"}


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    value: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown attack {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.kind in _NEEDS_VALUE and self.value is None:
            raise ValueError(f"attack {self.kind!r} needs a parameter")
        v = self.value
        if self.kind == "gaussian" and not v >= 0:
            raise ValueError("gaussian sigma must be >= 0")
        if self.kind == "saltpepper" and not 0 <= v <= 1:
            raise ValueError("salt-and-pepper density must lie in [0, 1]")
        if self.kind in ("mean", "median") and (v != int(v) or v < 3 or int(v) % 2 == 0):
            raise ValueError(f"{self.kind} filter size must be an odd integer >= 3")
        if self.kind == "jpeg" and not 1 <= v <= 100:
            raise ValueError("jpeg quality must lie in [1, 100]")
        if self.kind == "rescale" and not v > 0:
            raise ValueError("rescale factor must be positive")

    @property
    def label(self) -> str:
        return self.kind if self.value is None else f"{self.kind}:{self.value:g}"


def parse_attack(text: str, seed: int = 0) -> AttackSpec:
    kind, _, arg = text.strip().lower().partition(":")
    value = float(arg) if arg else None
    return AttackSpec(kind, value, seed)


def jpeg_table(quality: float) -> np.ndarray:
    q = float(quality)
    scale = 5000.0 / q if q < 50 else 200.0 - 2.0 * q
    return np.clip(np.floor((JPEG_LUMA * scale + 50.0) / 100.0), 1, 255)


def _to_u8(x: np.ndarray) -> np.ndarray:
    return np.floor(np.clip(x, 0, 255) + 0.5).astype(np.uint8)


def attack_plane(plane: np.ndarray, spec: AttackSpec, rng: np.random.Generator) -> np.ndarray:
    """Apply ``spec`` to one uint8 layer."""
    x = np.asarray(plane).astype(np.float64)
    kind, v = spec.kind, spec.value
    if kind == "none":
        return _to_u8(x)
    if kind == "gaussian":
        return _to_u8(x + rng.normal(0.0, 1.0, x.shape) * v)
    if kind == "saltpepper":
        u = rng.random(x.shape)
        out = x.copy()
        out[u < v / 2] = 0
        out[(u >= v / 2) & (u < v)] = 255
        return _to_u8(out)
    if kind == "mean":
        return _to_u8(ndimage.uniform_filter(x, size=int(v), mode="reflect"))
    if kind == "median":
        return _to_u8(ndimage.median_filter(x, size=int(v), mode="reflect"))
    if kind == "jpeg":
        table = np.tile(jpeg_table(v), (x.shape[0] // 8, x.shape[1] // 8))
        coeffs = dct2_block(x - 128.0)
        return _to_u8(idct2_block(np.round(coeffs / table) * table) + 128.0)
    if kind == "histeq":
        hist = np.bincount(x.astype(np.int64).ravel(), minlength=256)
        cdf = np.cumsum(hist)
        lo = cdf[np.nonzero(hist)[0][0]]
        if cdf[-1] == lo:
            return _to_u8(x)
        lut = np.floor((cdf - lo) / (cdf[-1] - lo) * 255 + 0.5)
        return _to_u8(lut[x.astype(np.int64)])
    if kind == "rescale":
        small = ndimage.zoom(x, v, order=1, mode="nearest")
        back = ndimage.zoom(
            small, (x.shape[0] / small.shape[0], x.shape[1] / small.shape[1]), order=1, mode="nearest"
        )
        if back.shape != x.shape:
            fixed = np.empty_like(x)
            h, w = min(back.shape[0], x.shape[0]), min(back.shape[1], x.shape[1])
            fixed[:] = np.pad(back[:h, :w], ((0, x.shape[0] - h), (0, x.shape[1] - w)), mode="edge")
            back = fixed
        return _to_u8(back)
    raise ValueError(f"unknown attack {kind!r}")


def apply_attack(image: RgbImage, spec: AttackSpec) -> RgbImage:
    rng = np.random.default_rng(spec.seed)
    layers = [attack_plane(layer.pixels, spec, rng) for layer in image.layers]
    return RgbImage.from_array(np.stack(layers))
