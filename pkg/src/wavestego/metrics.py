"""Image-quality, security and recovery metrics.

PSNR uses the usual definition ``10 log10(255^2 N / sum (a - b)^2)``;
identical inputs give ``math.inf``. SSIM is the mean of the local index over
every 8x8 window (stride 1, uniform weights, population statistics), with
C1 = (0.01*255)^2, C2 = (0.03*255)^2 and C3 = C2/2 and unit exponents.
The epsilon-security value is the Kullback-Leibler divergence in bits
between the 256-bin pixel histograms of cover and stego, each smoothed by
adding 1e-9 to every bin before normalising.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "C1",
    "C2",
    "C3",
    "KL_DELTA",
    "psnr",
    "ssim",
    "epsilon_security",
    "ber",
    "mutual_information",
    "entropy",
    "QualityReport",
    "CSV_COLUMNS",
]

PEAK = 255.0
C1 = (0.01 * PEAK) ** 2
C2 = (0.03 * PEAK) ** 2
C3 = C2 / 2
KL_DELTA = 1e-9
SSIM_WINDOW = 8


def _pixels(img) -> np.ndarray:
    return np.asarray(getattr(img, "pixels", img))


def _pair(a, b):
    x, y = _pixels(a), _pixels(b)
    if x.shape != y.shape:
        raise ValueError(f"images differ in shape: {x.shape} vs {y.shape}")
    return x, y


def psnr(a, b) -> float:
    x, y = _pair(a, b)
    if np.issubdtype(x.dtype, np.integer) and np.issubdtype(y.dtype, np.integer):
        d = x.astype(np.int64) - y.astype(np.int64)
        sse = float(np.sum(d * d))
    else:
        d = x.astype(np.float64) - y.astype(np.float64)
        sse = float(np.sum(d * d))
    if sse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK * x.size / sse)


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    ax = np.arange(size) - (size - 1) / 2
    g = np.exp(-(ax ** 2) / (2 * sigma ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def _window_sum(x: np.ndarray, k: int) -> np.ndarray:
    """Sum over every k x k window (valid positions) via an integral image."""
    c = np.zeros((x.shape[0] + 1, x.shape[1] + 1), dtype=x.dtype)
    c[1:, 1:] = x.cumsum(axis=0).cumsum(axis=1)
    return c[k:, k:] - c[:-k, k:] - c[k:, :-k] + c[:-k, :-k]


def ssim(a, b, *, window: int = SSIM_WINDOW, gaussian: bool = False) -> float:
    """Mean structural similarity over sliding windows.

    ``gaussian=True`` switches to an 11x11 Gaussian window (sigma 1.5); the
    default uniform 8x8 window is the reference setting.
    """
    x, y = _pair(a, b)
    integral = np.issubdtype(x.dtype, np.integer) and np.issubdtype(y.dtype, np.integer)
    xi = x.astype(np.int64 if integral else np.float64)
    yi = y.astype(np.int64 if integral else np.float64)
    x = x.astype(np.float64)
    y = y.astype(np.float64)
    if gaussian:
        weights = _gaussian_window()
        window = weights.shape[0]
    if x.ndim != 2 or min(x.shape) < window:
        raise ValueError(f"SSIM needs 2D images of at least {window}x{window}, got {x.shape}")
    if gaussian:
        wx = sliding_window_view(x, (window, window))
        wy = sliding_window_view(y, (window, window))
        mx = np.einsum("ijkl,kl->ij", wx, weights)
        my = np.einsum("ijkl,kl->ij", wy, weights)
        dx = wx - mx[..., None, None]
        dy = wy - my[..., None, None]
        vx = np.einsum("ijkl,kl->ij", dx * dx, weights)
        vy = np.einsum("ijkl,kl->ij", dy * dy, weights)
        cxy = np.einsum("ijkl,kl->ij", dx * dy, weights)
    else:
        n = window * window
        # integer inputs give exact window sums, so the statistics are exact too
        sx, sy = _window_sum(xi, window), _window_sum(yi, window)
        sxx, syy, sxy = (_window_sum(p, window) for p in (xi * xi, yi * yi, xi * yi))
        mx, my = sx / n, sy / n
        vx = (n * sxx - sx * sx) / (n * n)
        vy = (n * syy - sy * sy) / (n * n)
        cxy = (n * sxy - sx * sy) / (n * n)
    # with C3 = C2/2 the contrast and structure terms collapse into one
    num = (2 * mx * my + C1) * (2 * cxy + C2)
    den = (mx * mx + my * my + C1) * (vx + vy + C2)
    return float(np.mean(num / den))


def _histogram(x: np.ndarray, levels: int = 256) -> np.ndarray:
    return np.bincount(x.reshape(-1).astype(np.int64), minlength=levels).astype(np.float64)


def epsilon_security(cover, stego, delta: float = KL_DELTA) -> float:
    """D(P_cover || P_stego) in bits over 256-bin pixel histograms."""
    x, y = _pixels(cover), _pixels(stego)
    for arr in (x, y):
        if arr.dtype != np.uint8:
            raise ValueError("epsilon_security expects 8-bit images")
    p = _histogram(x) + delta
    q = _histogram(y) + delta
    p /= p.sum()
    q /= q.sum()
    return max(0.0, float(np.sum(p * np.log2(p / q))))


def _bits(x: np.ndarray) -> np.ndarray:
    return (x >= 128).astype(np.int64)


def ber(original, recovered, kind="image", tolerance: int = 0) -> float:
    """Error rate between canvases.

    For text, bits are compared after thresholding both canvases at 128. For
    image and audio it is the fraction of pixels differing by more than
    ``tolerance``.
    """
    x, y = _pair(original, recovered)
    if getattr(kind, "value", kind) == "text":
        return float(np.mean(_bits(x) != _bits(y)))
    d = np.abs(x.astype(np.int64) - y.astype(np.int64))
    return float(np.mean(d > tolerance))


def entropy(x, binary: bool = False) -> float:
    """Shannon entropy of the pixel histogram, in bits."""
    v = _pixels(x)
    v = _bits(v) if binary else v.astype(np.int64)
    p = np.bincount(v.reshape(-1)).astype(np.float64)
    p = p[p > 0] / v.size
    return float(-np.sum(p * np.log2(p)))


def mutual_information(a, b, binary: bool = False) -> float:
    """I(X;Y) in bits from the joint pixel histogram (2x2 if ``binary``).

    Empty joint cells contribute nothing (0 log 0 = 0); every non-empty cell
    has non-empty marginals, so no smoothing is needed.
    """
    x, y = _pair(a, b)
    levels = 2 if binary else 256
    if binary:
        x, y = _bits(x), _bits(y)
    else:
        x, y = x.astype(np.int64), y.astype(np.int64)
    joint = np.bincount((x * levels + y).reshape(-1), minlength=levels * levels)
    pxy = joint.reshape(levels, levels).astype(np.float64) / x.size
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    nz = pxy > 0
    outer = np.outer(px, py)
    mi = float(np.sum(pxy[nz] * np.log2(pxy[nz] / outer[nz])))
    return max(0.0, mi)


CSV_COLUMNS = ("schema", "scope", "item", "band", "metric", "value")
CSV_SCHEMA = 1


def _fmt(v: float) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return repr(float(v))


@dataclass
class QualityReport:
    """Imperceptibility, security and recovery numbers for one run.

    ``recovery_ssim`` is keyed by (logo, band) with band "LL", "HH" or
    "fused"; ``ber``, ``ber_tolerant`` and ``mi`` are keyed by logo.
    """

    psnr: dict = field(default_factory=dict)
    ssim: dict = field(default_factory=dict)
    epsilon: dict = field(default_factory=dict)
    recovery_ssim: dict = field(default_factory=dict)
    ber: dict = field(default_factory=dict)
    ber_tolerant: dict = field(default_factory=dict)
    mi: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[str, str, str, str, str]]:
        out = []
        for layer in sorted(self.psnr, key="RGB".index):
            out.append(("layer", layer, "", "psnr", _fmt(self.psnr[layer])))
            out.append(("layer", layer, "", "ssim", _fmt(self.ssim[layer])))
            out.append(("layer", layer, "", "epsilon", _fmt(self.epsilon[layer])))
        for (logo, band), value in self.recovery_ssim.items():
            out.append(("logo", logo, band, "ssim", _fmt(value)))
        for name, table in (("ber", self.ber), ("ber_tolerant", self.ber_tolerant), ("mi", self.mi)):
            for logo, value in table.items():
                out.append(("logo", logo, "fused", name, _fmt(value)))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows():
            writer.writerow((CSV_SCHEMA,) + row)
        return buf.getvalue()

    def summary(self) -> str:
        lines = []
        if self.psnr:
            lines.append("layer   PSNR(dB)   SSIM     epsilon")
            for layer in sorted(self.psnr, key="RGB".index):
                lines.append(
                    f"{layer:<7} {self.psnr[layer]:>8.4f}   {self.ssim[layer]:.4f}   "
                    f"{self.epsilon[layer]:.4f}"
                )
        if self.recovery_ssim:
            lines.append("logo    band    SSIM")
            for (logo, band), value in self.recovery_ssim.items():
                lines.append(f"{logo:<7} {band:<7} {value:.4f}")
        for logo in self.ber:
            lines.append(
                f"{logo}: BER {self.ber[logo]:.4f}  BER(tol) {self.ber_tolerant[logo]:.4f}  "
                f"MI {self.mi[logo]:.4f} bits"
            )
        return "\n".join(lines)
