"""Embedding and non-oblivious extraction.

Layout of the hidden data (logo spreading, one slot per layer/band)::

    layer   LL      HH
    R       text    image
    G       image   audio
    B       audio   text

Per slot the payload canvas is padded to a multiple of 8 with the neutral
level 128, scrambled with the slot key, and mapped to zero-mean watermark
samples ``w = (p - 128) / 128``. Canvas 8x8 block ``j`` (raster order) is
written, pixel for coefficient, onto the ``j``-th most homogeneous
coefficient block of the band:

* non-adaptive: ``c' = c + alpha * amplitude * w``
* adaptive:     ``c' = c * (1 + alpha * w)``

``amplitude`` defaults to 510, the span of LL coefficients of an 8-bit
image (the orthonormal 2D lowpass has DC gain 2), so ``alpha`` reads as a
fraction of the coefficient range. The homogeneous blocks left over after
the payload are contrast-enhanced around their mean with gain ``g``.

Extraction needs the original cover, the sidecar and the keys: it
re-derives the cover coefficients, differences them against the stego
coefficients, undoes the mapping and the scrambling, and fuses the LL and HH
copies of each payload.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np

from .blockengine import (
    BLOCK,
    block_stats,
    enhance_block,
    partition_blocks,
    rank_homogeneous,
    select_blocks,
)
from .carriers import CARRIERS, get_carrier
from .imagecore import LAYER_NAMES, PcmAudio, RasterImage, RgbImage
from .payload import (
    PayloadDescriptor,
    PayloadKind,
    StegoKey,
    audio_to_canvas,
    canvas_to_audio,
    canvas_to_text,
    image_to_canvas,
    scramble,
    text_to_canvas,
    unscramble,
)
from .transforms import to_blocks

__all__ = [
    "CapacityError",
    "SidecarError",
    "Mode",
    "SPREADING",
    "SlotPlan",
    "EmbeddingPlan",
    "StegoSidecar",
    "EmbedResult",
    "Extraction",
    "make_payloads",
    "plan_embedding",
    "embed",
    "extract",
    "fuse_copies",
    "quantize",
    "to_watermark",
    "from_watermark",
    "rendered",
]

DEFAULT_ALPHA = 0.10
DEFAULT_GAIN = 1.2
DEFAULT_AMPLITUDE = 510.0
RELIABILITY_THRESHOLD = 1e-3
NEUTRAL = 128
SIDECAR_VERSION = 1

SPREADING = (
    ("R", "LL", PayloadKind.TEXT),
    ("R", "HH", PayloadKind.IMAGE),
    ("G", "LL", PayloadKind.IMAGE),
    ("G", "HH", PayloadKind.AUDIO),
    ("B", "LL", PayloadKind.AUDIO),
    ("B", "HH", PayloadKind.TEXT),
)


class CapacityError(ValueError):
    """A payload needs more blocks than its band offers."""


class SidecarError(ValueError):
    """A sidecar file is malformed or inconsistent."""


class Mode(str, enum.Enum):
    NONADAPTIVE = "nonadaptive"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class SlotPlan:
    layer: str
    band: str
    kind: PayloadKind
    canvas_shape: tuple[int, int]  # (height, width)
    padded_shape: tuple[int, int]
    blocks: tuple[tuple[int, int], ...]
    enhanced: tuple[tuple[int, int], ...] = ()

    @property
    def slot_index(self) -> int:
        return [(l, b) for l, b, _ in SPREADING].index((self.layer, self.band))


@dataclass(frozen=True)
class EmbeddingPlan:
    transform: str
    mode: Mode
    alpha: float
    gain: float
    amplitude: float
    cover_shape: tuple[int, int]
    slots: tuple[SlotPlan, ...]

    def slot(self, layer: str, band: str) -> SlotPlan:
        for s in self.slots:
            if s.layer == layer and s.band == band:
                return s
        raise KeyError((layer, band))


def make_payloads(text: str, image: RasterImage, audio: PcmAudio, cover_dim: int = 256) -> dict:
    """Render the three payloads as canvases keyed by PayloadKind."""
    return {
        PayloadKind.TEXT: text_to_canvas(text),
        PayloadKind.IMAGE: image_to_canvas(image, cover_dim),
        PayloadKind.AUDIO: audio_to_canvas(audio),
    }


def _padded(shape: tuple[int, int]) -> tuple[int, int]:
    return tuple(-(-d // BLOCK) * BLOCK for d in shape)


def pad_canvas(pixels: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    out = np.full(shape, NEUTRAL, dtype=np.uint8)
    out[: pixels.shape[0], : pixels.shape[1]] = pixels
    return out


def to_watermark(pixels) -> np.ndarray:
    return (np.asarray(pixels, dtype=np.float64) - 128.0) / 128.0


def from_watermark(w) -> np.ndarray:
    return np.clip(np.floor(128.0 * np.asarray(w) + 128.0 + 0.5), 0, 255).astype(np.uint8)


def quantize(planes) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to uint8."""
    return np.floor(np.clip(np.asarray(planes, dtype=np.float64), 0.0, 255.0) + 0.5).astype(np.uint8)


def _as_planes(image) -> np.ndarray:
    if isinstance(image, RgbImage):
        return image.to_array().astype(np.float64)
    if isinstance(image, RasterImage):
        return np.stack([image.pixels] * 3).astype(np.float64)
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        return np.stack([arr] * 3)
    if arr.ndim != 3 or arr.shape[0] != 3:
        raise ValueError(f"expected (3, H, W) planes, got shape {arr.shape}")
    return arr


def _check_cover(cover_shape: tuple[int, int]) -> None:
    h, w = cover_shape
    if h % (2 * BLOCK) or w % (2 * BLOCK):
        raise ValueError(f"cover dimensions must be multiples of {2 * BLOCK}, got {w}x{h}")


def plan_embedding(
    cover,
    payloads: dict,
    alpha: float = DEFAULT_ALPHA,
    mode: Mode | str = Mode.NONADAPTIVE,
    gain: float = DEFAULT_GAIN,
    *,
    amplitude: float = DEFAULT_AMPLITUDE,
    transform: str = "dwt",
    homogeneous_fraction: float = 0.5,
    n_enhance: int | None = None,
) -> EmbeddingPlan:
    """Rank the cover's blocks and decide where each payload block goes.

    Only the cover is consulted, so the same plan can be rebuilt at
    extraction time from the original cover.
    """
    mode = Mode(mode)
    if not alpha >= 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if not gain >= 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    planes = _as_planes(cover)
    _check_cover(planes.shape[1:])
    carrier = get_carrier(transform)
    slots = []
    for li, layer in enumerate(LAYER_NAMES):
        bands, _ = carrier.split(planes[li])
        for lay, band, kind in SPREADING:
            if lay != layer:
                continue
            canvas = payloads[kind].canvas
            shape = (canvas.height, canvas.width)
            padded = _padded(shape)
            n_payload = padded[0] * padded[1] // (BLOCK * BLOCK)
            ranked = rank_homogeneous(block_stats(bands[band], band, layer))
            if n_payload > len(ranked):
                raise CapacityError(
                    f"{kind.value} payload needs {n_payload} blocks but {layer}/{band} "
                    f"has only {len(ranked)}"
                )
            chosen, extra = select_blocks(ranked, n_payload, n_enhance, homogeneous_fraction)
            slots.append(
                SlotPlan(
                    layer,
                    band,
                    kind,
                    shape,
                    padded,
                    tuple((b.row, b.col) for b in chosen),
                    tuple((b.row, b.col) for b in extra),
                )
            )
    return EmbeddingPlan(
        carrier.name, mode, float(alpha), float(gain), float(amplitude),
        tuple(planes.shape[1:]), tuple(slots),
    )


@dataclass(frozen=True, eq=False)
class StegoSidecar:
    """Everything extraction needs besides the cover and the keys."""

    plan: EmbeddingPlan
    metas: dict
    version: int = SIDECAR_VERSION

    def dumps(self) -> str:
        p = self.plan
        h, w = p.cover_shape
        lines = [
            f"wavestego-sidecar: {self.version}",
            f"transform: {p.transform}",
            f"mode: {p.mode.value}",
            f"alpha: {p.alpha!r}",
            f"gain: {p.gain!r}",
            f"amplitude: {p.amplitude!r}",
            f"cover: {w}x{h}",
            f"meta.text.count: {int(self.metas['text']['count'])}",
            f"meta.image.width: {int(self.metas['image']['width'])}",
            f"meta.image.height: {int(self.metas['image']['height'])}",
            f"meta.audio.samples: {int(self.metas['audio']['samples'])}",
            f"meta.audio.rate: {int(self.metas['audio']['rate'])}",
            f"meta.audio.bias: {int(self.metas['audio']['bias'])}",
        ]
        for s in p.slots:
            prefix = f"slot.{s.layer}.{s.band}"
            lines += [
                f"{prefix}.kind: {s.kind.value}",
                f"{prefix}.canvas: {s.canvas_shape[1]}x{s.canvas_shape[0]}",
                f"{prefix}.padded: {s.padded_shape[1]}x{s.padded_shape[0]}",
                _kv(f"{prefix}.blocks", " ".join(f"{s.band},{r},{c}" for r, c in s.blocks)),
                _kv(f"{prefix}.enhanced", " ".join(f"{s.band},{r},{c}" for r, c in s.enhanced)),
            ]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> StegoSidecar:
        fields: dict[str, str] = {}
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            key, sep, value = line.partition(":")
            key = key.strip()
            if not sep:
                raise SidecarError(f"line {n}: expected 'key: value'")
            if key in fields:
                raise SidecarError(f"line {n}: duplicate key {key!r}")
            fields[key] = value.strip()
        try:
            return cls._from_fields(fields)
        except KeyError as exc:
            raise SidecarError(f"missing sidecar field {exc.args[0]!r}") from None
        except ValueError as exc:
            if isinstance(exc, SidecarError):
                raise
            raise SidecarError(f"invalid sidecar value: {exc}") from None

    @classmethod
    def _from_fields(cls, f: dict) -> StegoSidecar:
        version = int(f.pop("wavestego-sidecar"))
        if version != SIDECAR_VERSION:
            raise SidecarError(f"unsupported sidecar version {version}")
        cw, ch = _dims(f.pop("cover"))
        metas = {
            "text": {"count": int(f.pop("meta.text.count"))},
            "image": {
                "width": int(f.pop("meta.image.width")),
                "height": int(f.pop("meta.image.height")),
            },
            "audio": {
                "samples": int(f.pop("meta.audio.samples")),
                "rate": int(f.pop("meta.audio.rate")),
                "bias": int(f.pop("meta.audio.bias")),
            },
        }
        slots = []
        for layer, band, expected in SPREADING:
            prefix = f"slot.{layer}.{band}"
            kind = PayloadKind(f.pop(f"{prefix}.kind"))
            if kind is not expected:
                raise SidecarError(f"{prefix} carries {kind.value}, expected {expected.value}")
            w, h = _dims(f.pop(f"{prefix}.canvas"))
            pw, ph = _dims(f.pop(f"{prefix}.padded"))
            blocks = _blocks(f.pop(f"{prefix}.blocks"), band)
            enhanced = _blocks(f.pop(f"{prefix}.enhanced"), band)
            if len(blocks) * BLOCK * BLOCK != pw * ph:
                raise SidecarError(f"{prefix}: {len(blocks)} blocks cannot hold a {pw}x{ph} canvas")
            slots.append(SlotPlan(layer, band, kind, (h, w), (ph, pw), blocks, enhanced))
        transform = f.pop("transform")
        if transform not in CARRIERS:
            raise SidecarError(f"unknown transform {transform!r}")
        plan = EmbeddingPlan(
            transform=transform,
            mode=Mode(f.pop("mode")),
            alpha=float(f.pop("alpha")),
            gain=float(f.pop("gain")),
            amplitude=float(f.pop("amplitude")),
            cover_shape=(ch, cw),
            slots=tuple(slots),
        )
        if f:
            raise SidecarError(f"unknown sidecar fields: {sorted(f)}")
        return cls(plan, metas, version)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path: str | os.PathLike) -> StegoSidecar:
        with open(path, encoding="ascii") as fh:
            return cls.loads(fh.read())

    def __eq__(self, other):
        if not isinstance(other, StegoSidecar):
            return NotImplemented
        return self.dumps() == other.dumps()


def _kv(key: str, value: str) -> str:
    return f"{key}: {value}" if value else f"{key}:"


def _dims(text: str) -> tuple[int, int]:
    w, _, h = text.partition("x")
    return int(w), int(h)


def _blocks(text: str, band: str) -> tuple[tuple[int, int], ...]:
    out = []
    for token in text.split():
        b, r, c = token.split(",")
        if b != band:
            raise SidecarError(f"block {token} listed under band {band}")
        out.append((int(r), int(c)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class EmbedResult:
    stego: RgbImage
    planes: np.ndarray  # real-valued (3, H, W) stego before quantisation
    sidecar: StegoSidecar


def _payload_metas(payloads: dict) -> dict:
    return {kind.value: dict(payloads[kind].meta) for kind in PayloadKind}


def embed(
    cover,
    payloads: dict,
    keys,
    alpha: float = DEFAULT_ALPHA,
    mode: Mode | str = Mode.NONADAPTIVE,
    gain: float = DEFAULT_GAIN,
    **options,
) -> EmbedResult:
    """Hide the three payloads in every colour layer of ``cover``.

    ``keys`` holds six StegoKeys in SPREADING order. Extra keyword options
    (``amplitude``, ``transform``, ``homogeneous_fraction``, ``n_enhance``)
    are forwarded to :func:`plan_embedding`.
    """
    keys = list(keys)
    if len(keys) != len(SPREADING):
        raise ValueError(f"expected {len(SPREADING)} slot keys, got {len(keys)}")
    plan = plan_embedding(cover, payloads, alpha, mode, gain, **options)
    planes = _as_planes(cover)
    carrier = get_carrier(plan.transform)
    out = np.empty_like(planes)
    for li, layer in enumerate(LAYER_NAMES):
        bands, state = carrier.split(planes[li])
        for slot in plan.slots:
            if slot.layer != layer:
                continue
            canvas = payloads[slot.kind].canvas.pixels
            noise = scramble(pad_canvas(canvas, slot.padded_shape), keys[slot.slot_index].seed)
            _write_slot(bands[slot.band], to_watermark(noise), slot, plan)
        out[li] = carrier.merge(state, bands)
    stego = RgbImage.from_array(quantize(out))
    return EmbedResult(stego, out, StegoSidecar(plan, _payload_metas(payloads)))


def _write_slot(band: np.ndarray, watermark: np.ndarray, slot: SlotPlan, plan: EmbeddingPlan) -> None:
    tiles = to_blocks(band)  # view: writes land in ``band``
    wblocks = partition_blocks(watermark)
    for (r, c), wb in zip(slot.blocks, wblocks):
        if plan.mode is Mode.NONADAPTIVE:
            tiles[r, c] = tiles[r, c] + plan.alpha * plan.amplitude * wb
        else:
            tiles[r, c] = tiles[r, c] * (1.0 + plan.alpha * wb)
    if plan.gain != 1:
        for r, c in slot.enhanced:
            tiles[r, c] = enhance_block(tiles[r, c], plan.gain)


@dataclass(frozen=True, eq=False)
class Extraction:
    """Recovered canvases: six raw copies, their reliability, three fused logos."""

    copies: dict  # (layer, band) -> RasterImage
    reliable: dict  # (layer, band) -> bool array
    fused: dict  # PayloadKind -> RasterImage
    metas: dict

    def copy(self, kind: PayloadKind, band: str) -> RasterImage:
        for layer, b, k in SPREADING:
            if k is kind and b == band:
                return self.copies[(layer, b)]
        raise KeyError((kind, band))

    def descriptor(self, kind: PayloadKind, band: str | None = None) -> PayloadDescriptor:
        canvas = self.fused[kind] if band is None else self.copy(kind, band)
        return PayloadDescriptor(kind, canvas, self.metas[kind.value])

    @property
    def text(self) -> str:
        return canvas_to_text(self.descriptor(PayloadKind.TEXT))

    @property
    def image(self) -> RasterImage:
        return self.fused[PayloadKind.IMAGE]

    @property
    def audio(self) -> PcmAudio:
        return canvas_to_audio(self.descriptor(PayloadKind.AUDIO))


def extract(stego, cover, sidecar: StegoSidecar, keys) -> Extraction:
    """Recover every slot; ``stego`` may be an RgbImage or real (3, H, W) planes."""
    plan = sidecar.plan
    keys = list(keys)
    if len(keys) != len(SPREADING):
        raise ValueError(f"expected {len(SPREADING)} slot keys, got {len(keys)}")
    if plan.alpha == 0:
        raise ValueError("alpha = 0 carries no payload; nothing to extract")
    cover_planes = _as_planes(cover)
    stego_planes = _as_planes(stego)
    if cover_planes.shape != stego_planes.shape:
        raise ValueError(
            f"stego {stego_planes.shape[1:]} and cover {cover_planes.shape[1:]} differ in size"
        )
    if tuple(cover_planes.shape[1:]) != tuple(plan.cover_shape):
        raise ValueError(f"cover does not match the sidecar's {plan.cover_shape} dimensions")
    carrier = get_carrier(plan.transform)
    copies, reliable = {}, {}
    for li, layer in enumerate(LAYER_NAMES):
        cover_bands, cstate = carrier.split(cover_planes[li])
        stego_bands, _ = carrier.split(stego_planes[li], reference=cstate)
        for slot in plan.slots:
            if slot.layer != layer:
                continue
            _check_blocks(slot, cover_bands[slot.band].shape)
            w, ok = _read_slot(cover_bands[slot.band], stego_bands[slot.band], slot, plan)
            seed = keys[slot.slot_index].seed
            pixels = unscramble(from_watermark(w), seed)
            mask = unscramble(ok, seed)
            h, wd = slot.canvas_shape
            copies[(layer, slot.band)] = RasterImage(pixels[:h, :wd])
            reliable[(layer, slot.band)] = mask[:h, :wd]
    fused = {}
    for kind in PayloadKind:
        (l1, b1), (l2, b2) = [(l, b) for l, b, k in SPREADING if k is kind]
        fused[kind] = fuse_copies(
            copies[(l1, b1)], copies[(l2, b2)], reliable[(l1, b1)], reliable[(l2, b2)]
        )
    return Extraction(copies, reliable, fused, sidecar.metas)


def _check_blocks(slot: SlotPlan, band_shape) -> None:
    nr, nc = band_shape[0] // BLOCK, band_shape[1] // BLOCK
    used = slot.blocks + slot.enhanced
    if any(not (0 <= r < nr and 0 <= c < nc) for r, c in used):
        raise SidecarError(f"{slot.layer}/{slot.band}: block outside the {nr}x{nc} block grid")
    if len(set(used)) != len(used):
        raise SidecarError(f"{slot.layer}/{slot.band}: block listed twice")


def _read_slot(cover_band, stego_band, slot: SlotPlan, plan: EmbeddingPlan):
    ctiles = to_blocks(cover_band)
    stiles = to_blocks(stego_band)
    n = len(slot.blocks)
    w = np.zeros((n, BLOCK, BLOCK))
    ok = np.ones((n, BLOCK, BLOCK), dtype=bool)
    for j, (r, c) in enumerate(slot.blocks):
        diff = stiles[r, c] - ctiles[r, c]
        if plan.mode is Mode.NONADAPTIVE:
            w[j] = diff / (plan.alpha * plan.amplitude)
        else:
            base = ctiles[r, c]
            good = np.abs(base) >= RELIABILITY_THRESHOLD
            w[j] = np.where(good, diff / (plan.alpha * np.where(good, base, 1.0)), 0.0)
            ok[j] = good
    ph, pw = slot.padded_shape
    grid = (ph // BLOCK, pw // BLOCK, BLOCK, BLOCK)
    w_plane = w.reshape(grid).swapaxes(1, 2).reshape(ph, pw)
    ok_plane = ok.reshape(grid).swapaxes(1, 2).reshape(ph, pw)
    return w_plane, ok_plane


def fuse_copies(copy_ll, copy_hh, reliable_ll=None, reliable_hh=None) -> RasterImage:
    """Average two recovered copies pixel-wise, rounding half up.

    Where only one copy is reliable it is used alone; where neither is, the
    result is the neutral level 128.
    """
    a = np.asarray(getattr(copy_ll, "pixels", copy_ll), dtype=np.int32)
    b = np.asarray(getattr(copy_hh, "pixels", copy_hh), dtype=np.int32)
    if a.shape != b.shape:
        raise ValueError(f"copies differ in shape: {a.shape} vs {b.shape}")
    out = (a + b + 1) // 2
    if reliable_ll is not None or reliable_hh is not None:
        ra = np.ones(a.shape, bool) if reliable_ll is None else np.asarray(reliable_ll, bool)
        rb = np.ones(b.shape, bool) if reliable_hh is None else np.asarray(reliable_hh, bool)
        out = np.where(ra & rb, out, np.where(ra, a, np.where(rb, b, NEUTRAL)))
    return RasterImage(out.astype(np.uint8))


def rendered(kind: PayloadKind, canvas) -> RasterImage:
    """The canvas as the decoder sees it: text canvases are thresholded."""
    pixels = np.asarray(getattr(canvas, "pixels", canvas))
    if kind is PayloadKind.TEXT:
        pixels = np.where(pixels >= 128, 255, 0)
    return RasterImage(pixels.astype(np.uint8))
