"""Payload canvases and the keyed row/column scrambler.

Text, audio and image payloads are all turned into an 8-bit grayscale
canvas so that one embedding path serves every kind. ``im2noise`` then
permutes whole rows and whole columns of a canvas under a secret key so that
it looks like noise; ``noise2im`` undoes the permutation. Scrambling is a
permutation only, not a cipher: pixel values and the histogram are kept.

Permutation generator (part of the stego file contract, version 1)
-------------------------------------------------------------------
* PRNG: SplitMix64. State ``s`` (uint64) starts at the key seed. Each draw
  does ``s += 0x9E3779B97F4A7C15`` and returns ``mix64(s)`` where ``mix64`` is
  ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31`` (all mod 2**64).
* Bounded draw in ``[0, n)``: reject ``x >= 2**64 - (2**64 mod n)``, return
  ``x mod n``.
* Fisher-Yates: start from ``[0, 1, ..., n-1]``; for ``i = n-1`` down to ``1``
  draw ``j`` in ``[0, i]`` and swap entries ``i`` and ``j``.
* One stream per key: the row permutation ``rho`` (length H) is drawn
  first, the column permutation ``sigma`` (length W) continues the same
  stream. ``im2noise(x)[r, c] = x[rho[r], sigma[c]]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .imagecore import PcmAudio, RasterImage

__all__ = [
    "PayloadError",
    "PayloadKind",
    "PayloadDescriptor",
    "StegoKey",
    "SplitMix64",
    "keyed_permutation",
    "derive_slot_keys",
    "parse_master_key",
    "text_to_canvas",
    "canvas_to_text",
    "audio_to_canvas",
    "canvas_to_audio",
    "image_to_canvas",
    "canvas_to_image",
    "im2noise",
    "noise2im",
    "TEXT_CANVAS_SHAPE",
    "MAX_TEXT_CHARS",
    "AUDIO_BIAS",
]

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

MAX_TEXT_CHARS = 256
TEXT_CANVAS_SHAPE = (32, 64)  # (height, width): 2048 bits
AUDIO_BIAS = 128


class PayloadError(ValueError):
    """A payload violates its size or type constraints."""


class PayloadKind(str, enum.Enum):
    TEXT = "text"
    IMAGE = "image"
    AUDIO = "audio"


@dataclass(frozen=True, eq=False)
class PayloadDescriptor:
    """A payload rendered as a grayscale canvas, plus what is needed to undo it."""

    kind: PayloadKind
    canvas: RasterImage
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StegoKey:
    key_id: str
    seed: int

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError("key seed must be an unsigned 64-bit integer")


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 generator; see the module docstring for the exact contract."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def _fisher_yates(rng: SplitMix64, n: int) -> np.ndarray:
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return np.array(perm, dtype=np.intp)


@lru_cache(maxsize=256)
def keyed_permutation(seed: int, height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column permutations for a (height, width) canvas (read-only arrays)."""
    rng = SplitMix64(seed)
    rows = _fisher_yates(rng, height)
    cols = _fisher_yates(rng, width)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


SLOT_LABELS = ("R/LL", "R/HH", "G/LL", "G/HH", "B/LL", "B/HH")


def derive_slot_keys(master: int) -> list[StegoKey]:
    """Expand one 64-bit master secret into the six per-slot keys.

    Slot ``i`` (order R/LL, R/HH, G/LL, G/HH, B/LL, B/HH) gets
    ``seed_i = mix64(master XOR ((i + 1) * 0x9E3779B97F4A7C15 mod 2**64))``.
    """
    master &= MASK64
    return [
        StegoKey(label, mix64(master ^ (((i + 1) * GOLDEN_GAMMA) & MASK64)))
        for i, label in enumerate(SLOT_LABELS)
    ]


def parse_master_key(text: str) -> int:
    """Parse a master key written as up to 16 hex digits (optional 0x prefix)."""
    s = text.strip().lower()
    if s.startswith("0x"):
        s = s[2:]
    if not s or len(s) > 16 or any(ch not in "0123456789abcdef" for ch in s):
        raise ValueError(f"master key must be 1-16 hex digits, got {text!r}")
    return int(s, 16)


# --------------------------------------------------------------------------
# canvases


def text_to_canvas(text: str) -> PayloadDescriptor:
    """Render text as a 64x32 binary canvas, 8 bits per char, MSB first."""
    if len(text) > MAX_TEXT_CHARS:
        raise PayloadError(f"text has {len(text)} characters; the limit is {MAX_TEXT_CHARS}")
    try:
        raw = text.encode("latin-1")
    except UnicodeEncodeError as exc:
        raise PayloadError("text must use an 8-bit (Latin-1) character set") from exc
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
    h, w = TEXT_CANVAS_SHAPE
    flat = np.zeros(h * w, dtype=np.uint8)
    flat[: bits.size] = bits * 255
    return PayloadDescriptor(PayloadKind.TEXT, RasterImage(flat.reshape(h, w)), {"count": len(raw)})


def canvas_to_text(desc: PayloadDescriptor) -> str:
    if desc.kind is not PayloadKind.TEXT:
        raise PayloadError(f"expected a text payload, got {desc.kind.value}")
    bits = (desc.canvas.pixels.reshape(-1) >= 128).astype(np.uint8)
    raw = np.packbits(bits).tobytes()
    return raw[: int(desc.meta["count"])].decode("latin-1")


def audio_to_canvas(audio: PcmAudio) -> PayloadDescriptor:
    """Bias samples by +128 and lay them row-major on a ceil(sqrt(N)) square.

    Cells past the last sample hold the bias value, i.e. silence.
    """
    n = len(audio)
    side = max(1, math.isqrt(n - 1) + 1) if n else 1
    flat = np.full(side * side, AUDIO_BIAS, dtype=np.uint8)
    flat[:n] = (audio.samples.astype(np.int16) + AUDIO_BIAS).astype(np.uint8)
    meta = {"samples": n, "rate": audio.sample_rate, "bias": AUDIO_BIAS}
    return PayloadDescriptor(PayloadKind.AUDIO, RasterImage(flat.reshape(side, side)), meta)


def canvas_to_audio(desc: PayloadDescriptor) -> PcmAudio:
    if desc.kind is not PayloadKind.AUDIO:
        raise PayloadError(f"expected an audio payload, got {desc.kind.value}")
    n = int(desc.meta["samples"])
    bias = int(desc.meta.get("bias", AUDIO_BIAS))
    flat = desc.canvas.pixels.reshape(-1)[:n].astype(np.int16) - bias
    return PcmAudio(int(desc.meta["rate"]), np.clip(flat, -128, 127).astype(np.int8))


def image_to_canvas(image: RasterImage, cover_dim: int) -> PayloadDescriptor:
    """Use a grayscale logo verbatim; each side must be <= cover_dim / 4."""
    limit = cover_dim // 4
    if image.width > limit or image.height > limit:
        raise PayloadError(
            f"image payload {image.width}x{image.height} exceeds {limit}x{limit} "
            f"(a quarter of the {cover_dim}-pixel cover)"
        )
    meta = {"width": image.width, "height": image.height}
    return PayloadDescriptor(PayloadKind.IMAGE, RasterImage(image.pixels), meta)


def canvas_to_image(desc: PayloadDescriptor) -> RasterImage:
    if desc.kind is not PayloadKind.IMAGE:
        raise PayloadError(f"expected an image payload, got {desc.kind.value}")
    return RasterImage(desc.canvas.pixels)


# --------------------------------------------------------------------------
# scrambling


def scramble(pixels: np.ndarray, seed: int) -> np.ndarray:
    rows, cols = keyed_permutation(seed, *pixels.shape[:2])
    return pixels[rows][:, cols]


def unscramble(pixels: np.ndarray, seed: int) -> np.ndarray:
    rows, cols = keyed_permutation(seed, *pixels.shape[:2])
    out = np.empty_like(pixels)
    out[np.ix_(rows, cols)] = pixels
    return out


def im2noise(canvas: RasterImage, key: StegoKey) -> RasterImage:
    """Permute rows then columns of ``canvas`` under ``key``."""
    return RasterImage(scramble(canvas.pixels, key.seed))


def noise2im(noise: RasterImage, key: StegoKey) -> RasterImage:
    """Exact inverse of :func:`im2noise` under the same key."""
    return RasterImage(unscramble(noise.pixels, key.seed))
