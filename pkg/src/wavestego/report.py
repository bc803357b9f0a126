"""Assemble QualityReports from an embed/extract run."""

from __future__ import annotations

import math

import numpy as np

from .imagecore import LAYER_NAMES, RasterImage, RgbImage
from .metrics import QualityReport, ber, epsilon_security, mutual_information, psnr, ssim
from .payload import PayloadKind
from .stego import Extraction, rendered

__all__ = ["BER_TOLERANCE", "imperceptibility", "recovery", "copy_agreement", "quality_report"]

# pixel tolerance of the "tolerant" BER for image and audio logos
BER_TOLERANCE = 8


def _safe_ssim(a, b) -> float:
    try:
        return ssim(a, b)
    except ValueError:
        return math.nan


def _layers(image):
    if isinstance(image, RgbImage):
        return image.layers
    if isinstance(image, RasterImage):
        return (image,) * 3
    return tuple(RasterImage(layer) for layer in np.asarray(image))


def imperceptibility(cover, stego, report: QualityReport | None = None) -> QualityReport:
    """Per-layer PSNR, SSIM and epsilon-security of stego against cover."""
    report = report or QualityReport()
    for name, c, s in zip(LAYER_NAMES, _layers(cover), _layers(stego)):
        report.psnr[name] = psnr(c, s)
        report.ssim[name] = ssim(c, s)
        report.epsilon[name] = epsilon_security(c, s)
    return report


def recovery(payloads: dict, extraction: Extraction, report: QualityReport | None = None) -> QualityReport:
    """Compare recovered logos with the embedded canvases."""
    report = report or QualityReport()
    for kind in PayloadKind:
        original = rendered(kind, payloads[kind].canvas)
        for band in ("LL", "HH"):
            got = rendered(kind, extraction.copy(kind, band))
            report.recovery_ssim[(kind.value, band)] = _safe_ssim(original, got)
        fused = rendered(kind, extraction.fused[kind])
        report.recovery_ssim[(kind.value, "fused")] = _safe_ssim(original, fused)
        report.ber[kind.value] = ber(original, fused, kind)
        report.ber_tolerant[kind.value] = ber(
            original, fused, kind, tolerance=0 if kind is PayloadKind.TEXT else BER_TOLERANCE
        )
        report.mi[kind.value] = mutual_information(original, fused, binary=kind is PayloadKind.TEXT)
    return report


def copy_agreement(extraction: Extraction, report: QualityReport | None = None) -> QualityReport:
    """Without the originals: how well the LL and HH copies agree.

    Both copies are decoded with different slot keys, so a wrong key makes
    them disagree and the agreement SSIM collapses.
    """
    report = report or QualityReport()
    for kind in PayloadKind:
        a = rendered(kind, extraction.copy(kind, "LL"))
        b = rendered(kind, extraction.copy(kind, "HH"))
        report.recovery_ssim[(kind.value, "LL~HH")] = _safe_ssim(a, b)
        report.ber[kind.value] = ber(a, b, kind)
        report.ber_tolerant[kind.value] = ber(
            a, b, kind, tolerance=0 if kind is PayloadKind.TEXT else BER_TOLERANCE
        )
        report.mi[kind.value] = mutual_information(a, b, binary=kind is PayloadKind.TEXT)
    return report


def quality_report(cover, stego, payloads=None, extraction=None) -> QualityReport:
    report = imperceptibility(cover, stego)
    if extraction is not None:
        if payloads is not None:
            recovery(payloads, extraction, report)
        else:
            copy_agreement(extraction, report)
    return report
