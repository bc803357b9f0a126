"""8-bit rasters and 8-bit mono PCM audio, with bit-exact file I/O.

Images are stored as binary Netpbm (P5 for grayscale, P6 for RGB, maxval
255). Audio is RIFF WAVE, PCM format tag 1, mono, 8 bits per sample. On disk
8-bit WAV samples are unsigned with a 128 bias; in memory they are signed
integers in [-128, 127].
"""

from __future__ import annotations

import os
import wave
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FormatError",
    "RasterImage",
    "RgbImage",
    "PcmAudio",
    "load_gray",
    "save_gray",
    "load_rgb",
    "save_rgb",
    "load_wav",
    "save_wav",
    "gray_to_rgb",
]

LAYER_NAMES = ("R", "G", "B")


class FormatError(ValueError):
    """A file is malformed or uses an unsupported encoding."""


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class RasterImage:
    """A 2D grid of 8-bit unsigned samples, stored as a read-only (H, W) array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"raster must be 2D, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("raster dimensions must be positive")
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255) or np.any(arr != np.floor(arr)):
                raise ValueError("raster samples must be integers in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(arr, np.uint8))

    @classmethod
    def from_samples(cls, width: int, height: int, samples) -> RasterImage:
        data = np.frombuffer(bytes(samples), dtype=np.uint8) if isinstance(
            samples, (bytes, bytearray)
        ) else np.asarray(samples)
        if data.size != width * height:
            raise ValueError(
                f"expected {width * height} samples for {width}x{height}, got {data.size}"
            )
        return cls(data.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def samples(self) -> bytes:
        """Row-major sample bytes."""
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Three RasterImage layers (R, G, B) of identical dimensions."""

    r: RasterImage
    g: RasterImage
    b: RasterImage

    def __post_init__(self):
        shapes = {layer.pixels.shape for layer in (self.r, self.g, self.b)}
        if len(shapes) != 1:
            raise ValueError(f"RGB layers disagree in shape: {sorted(shapes)}")

    @classmethod
    def from_array(cls, array, channels_last: bool = False) -> RgbImage:
        """Build from a (3, H, W) uint8 array, or (H, W, 3) with ``channels_last``."""
        arr = np.asarray(array)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3D array, got shape {arr.shape}")
        if channels_last:
            arr = np.moveaxis(arr, -1, 0)
        if arr.shape[0] != 3:
            raise ValueError(f"expected three layers, got shape {arr.shape}")
        return cls(*(RasterImage(layer) for layer in arr))

    @property
    def layers(self) -> tuple[RasterImage, RasterImage, RasterImage]:
        return (self.r, self.g, self.b)

    def layer(self, name: str) -> RasterImage:
        return self.layers[LAYER_NAMES.index(name)]

    @property
    def width(self) -> int:
        return self.r.width

    @property
    def height(self) -> int:
        return self.r.height

    def to_array(self) -> np.ndarray:
        """Stacked (3, H, W) uint8 copy."""
        return np.stack([layer.pixels for layer in self.layers])

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return all(a == b for a, b in zip(self.layers, other.layers))

    def __repr__(self):
        return f"RgbImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class PcmAudio:
    """Mono 8-bit PCM audio with signed samples in [-128, 127]."""

    sample_rate: int
    samples: np.ndarray
    channels: int = field(default=1)

    def __post_init__(self):
        if self.channels != 1:
            raise ValueError("only mono audio is supported")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        arr = np.asarray(self.samples)
        if arr.ndim != 1:
            raise ValueError("audio samples must be one-dimensional")
        if arr.dtype != np.int8:
            if arr.size and (arr.min() < -128 or arr.max() > 127):
                raise ValueError("audio samples must lie in [-128, 127]")
        object.__setattr__(self, "samples", _frozen(arr, np.int8))

    def __len__(self):
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, PcmAudio):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and np.array_equal(self.samples, other.samples)
        )


# --------------------------------------------------------------------------
# Netpbm


def _read_header(data: bytes, magic: bytes) -> tuple[int, int, int]:
    """Parse a binary Netpbm header; return (width, height, data_offset)."""
    if data[:2] != magic:
        raise FormatError(f"not a {magic.decode()} Netpbm file (magic {data[:2]!r})")
    pos = 2
    tokens = []
    while len(tokens) < 3:
        if pos >= len(data):
            raise FormatError("truncated Netpbm header")
        ch = data[pos:pos + 1]
        if ch == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise FormatError("truncated Netpbm header comment")
            pos = end + 1
        elif ch.isspace():
            pos += 1
        elif ch.isdigit():
            start = pos
            while pos < len(data) and data[pos:pos + 1].isdigit():
                pos += 1
            tokens.append(int(data[start:pos]))
        else:
            raise FormatError(f"unexpected byte {ch!r} in Netpbm header")
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after Netpbm maxval")
    width, height, maxval = tokens
    if width <= 0 or height <= 0:
        raise FormatError(f"invalid Netpbm dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}; only 255 is accepted")
    return width, height, pos + 1


def _read_netpbm(path, magic: bytes, depth: int) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    width, height, offset = _read_header(data, magic)
    need = width * height * depth
    body = data[offset:offset + need]
    if len(body) < need:
        raise FormatError(f"truncated raster: expected {need} bytes, found {len(body)}")
    arr = np.frombuffer(body, dtype=np.uint8)
    if depth == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, depth)


def load_gray(path: str | os.PathLike) -> RasterImage:
    """Read an 8-bit binary PGM (P5)."""
    return RasterImage(_read_netpbm(path, b"P5", 1))


def save_gray(image: RasterImage, path: str | os.PathLike) -> None:
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + image.pixels.tobytes())


def load_rgb(path: str | os.PathLike) -> RgbImage:
    """Read an 8-bit binary PPM (P6)."""
    return RgbImage.from_array(_read_netpbm(path, b"P6", 3), channels_last=True)


def save_rgb(image: RgbImage, path: str | os.PathLike) -> None:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    interleaved = np.ascontiguousarray(np.moveaxis(image.to_array(), 0, -1))
    with open(path, "wb") as fh:
        fh.write(header + interleaved.tobytes())


# --------------------------------------------------------------------------
# WAV


def load_wav(path: str | os.PathLike) -> PcmAudio:
    """Read a mono 8-bit PCM WAV file; other encodings raise FormatError."""
    try:
        with wave.open(os.fspath(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            frames = wf.readframes(wf.getnframes())
            nframes = wf.getnframes()
    except wave.Error as exc:
        msg = str(exc)
        if msg.startswith("unknown format"):
            raise FormatError(
                f"unsupported WAV encoding ({msg}); only PCM format tag 1 is accepted"
            ) from exc
        raise FormatError(f"malformed WAV file: {msg}") from exc
    except EOFError as exc:
        raise FormatError("truncated WAV file") from exc
    if channels != 1:
        raise FormatError(f"unsupported WAV: {channels} channels, only mono is accepted")
    if width != 1:
        raise FormatError(
            f"unsupported WAV: {8 * width}-bit samples, only 8-bit is accepted"
        )
    if len(frames) != nframes:
        raise FormatError(
            f"truncated WAV data: header declares {nframes} frames, found {len(frames)}"
        )
    raw = np.frombuffer(frames, dtype=np.uint8).astype(np.int16) - 128
    return PcmAudio(rate, raw.astype(np.int8))


def save_wav(audio: PcmAudio, path: str | os.PathLike) -> None:
    data = (audio.samples.astype(np.int16) + 128).astype(np.uint8).tobytes()
    with wave.open(os.fspath(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(1)
        wf.setframerate(audio.sample_rate)
        wf.writeframes(data)


def gray_to_rgb(cover: RasterImage) -> RgbImage:
    """Replicate a grayscale cover into three identical colour layers."""
    return RgbImage(cover, RasterImage(cover.pixels), RasterImage(cover.pixels))
