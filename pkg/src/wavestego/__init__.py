"""Block-based wavelet-domain steganography for text, image and audio payloads."""

__version__ = "0.1.0"

from .imagecore import PcmAudio, RasterImage, RgbImage, gray_to_rgb
from .payload import PayloadKind, StegoKey, derive_slot_keys
from .stego import Mode, StegoSidecar, embed, extract, make_payloads

__all__ = [
    "PcmAudio",
    "RasterImage",
    "RgbImage",
    "gray_to_rgb",
    "PayloadKind",
    "StegoKey",
    "derive_slot_keys",
    "Mode",
    "StegoSidecar",
    "embed",
    "extract",
    "make_payloads",
]
