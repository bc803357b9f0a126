"""Deterministic synthetic inputs: a natural-looking cover, a logo, speech-like audio.

These stand in for the usual test images and recordings so that the demo,
the test suite and the acceptance run need no external files.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .imagecore import PcmAudio, RasterImage

__all__ = ["synthetic_cover", "synthetic_logo", "synthetic_audio", "SAMPLE_TEXT"]

SAMPLE_TEXT = (
    "Multiresolution steganography test message: three payloads, two copies each, "
    "hidden in the homogeneous blocks of every colour layer."
)


def synthetic_cover(size: int = 256, seed: int = 0) -> RasterImage:
    """Smooth shading, a few soft-edged shapes and fine texture, in [16, 240]."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / size
    img = 110 + 60 * np.sin(2.2 * xx + 0.7) * np.cos(1.7 * yy - 0.3)
    img += 35 * (yy - 0.5)
    for _ in range(6):
        cy, cx = rng.uniform(0.15, 0.85, 2)
        r = rng.uniform(0.06, 0.2)
        level = rng.uniform(-55, 55)
        mask = ((yy - cy) ** 2 + (xx - cx) ** 2) < r ** 2
        img += level * ndimage.gaussian_filter(mask.astype(float), 1.5)
    texture = ndimage.gaussian_filter(rng.normal(0, 1, (size, size)), 1.0)
    band = (xx > 0.55) & (yy > 0.5)
    img += np.where(band, 18, 4) * texture / texture.std()
    img += rng.normal(0, 1.2, (size, size))
    return RasterImage(np.clip(np.rint(img), 16, 240).astype(np.uint8))


def synthetic_logo(size: int = 64, seed: int = 1) -> RasterImage:
    """A grey-level emblem: shaded disc, ring and bars."""
    rng = np.random.default_rng(seed)
    yy, xx = (np.mgrid[0:size, 0:size] + 0.5) / size - 0.5
    rr = np.hypot(xx, yy)
    img = 200 - 120 * rr
    img = np.where(rr < 0.32, 60 + 260 * (xx + 0.5) * 0.5, img)
    img = np.where((rr > 0.36) & (rr < 0.42), 20, img)
    bars = (np.abs(yy) < 0.05) | (np.abs(xx) < 0.05)
    img = np.where(bars & (rr < 0.3), 235, img)
    img += rng.normal(0, 3, img.shape)
    return RasterImage(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def synthetic_audio(n: int = 16000, rate: int = 8000, seed: int = 2) -> PcmAudio:
    """Two seconds of vowel-like harmonics with a syllabic envelope."""
    rng = np.random.default_rng(seed)
    t = np.arange(n) / rate
    f0 = 140 + 25 * np.sin(2 * np.pi * 0.7 * t)
    phase = 2 * np.pi * np.cumsum(f0) / rate
    voice = sum(a * np.sin(k * phase) for k, a in ((1, 1.0), (2, 0.6), (3, 0.35), (5, 0.2)))
    envelope = 0.55 + 0.45 * np.sin(2 * np.pi * 2.5 * t) ** 2
    signal = 28 * envelope * voice + rng.normal(0, 2.0, n)
    return PcmAudio(rate, np.clip(np.rint(signal), -128, 127).astype(np.int8))
