"""Image quality metrics for real-valued (magnitude) images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d


def psnr(x: np.ndarray, ref: np.ndarray, peak: float | None = None) -> float:
    """Peak signal-to-noise ratio in dB.

    ``peak`` defaults to ``ref.max()``.  Identical inputs give ``inf``.
    """
    x = np.asarray(x, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if x.shape != ref.shape:
        raise ValueError("shapes must match")
    if peak is None:
        peak = float(ref.max())
    if peak <= 0:
        raise ValueError("peak must be positive")
    mse = float(np.mean((x - ref) ** 2))
    if mse == 0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


def _gaussian_kernel(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim(
    x: np.ndarray,
    ref: np.ndarray,
    dynamic_range: float | None = None,
    k1: float = 0.01,
    k2: float = 0.03,
) -> float:
    """Mean structural similarity with an 11 x 11 Gaussian window (sigma 1.5).

    ``dynamic_range`` defaults to ``ref.max() - ref.min()``; a flat reference
    falls back to 1 so the stabilizers stay positive.  Windows are evaluated
    where they fit entirely inside the image (no padding).
    """
    x = np.asarray(x, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if x.shape != ref.shape:
        raise ValueError("shapes must match")
    if min(x.shape) < 11:
        raise ValueError("image too small for the 11 x 11 window")
    if dynamic_range is None:
        dynamic_range = float(ref.max() - ref.min())
    if dynamic_range <= 0:
        dynamic_range = 1.0

    kernel = _gaussian_kernel()
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2

    mu_x = convolve2d(x, kernel, mode="valid")
    mu_r = convolve2d(ref, kernel, mode="valid")
    xx = convolve2d(x * x, kernel, mode="valid")
    rr = convolve2d(ref * ref, kernel, mode="valid")
    xr = convolve2d(x * ref, kernel, mode="valid")

    var_x = xx - mu_x**2
    var_r = rr - mu_r**2
    cov = xr - mu_x * mu_r

    num = (2.0 * mu_x * mu_r + c1) * (2.0 * cov + c2)
    den = (mu_x**2 + mu_r**2 + c1) * (var_x + var_r + c2)
    return float(np.mean(num / den))


@dataclass
class QualityReport:
    psnr_db: float
    ssim: float


def quality_report(x: np.ndarray, ref: np.ndarray) -> QualityReport:
    """PSNR and SSIM of ``|x|`` against ``|ref|`` after peak matching.

    Reconstructions from magnitude-blind models carry an arbitrary global
    scale, so ``|x|`` is rescaled to share the reference peak before either
    metric is computed.
    """
    xm = np.abs(np.asarray(x))
    rm = np.abs(np.asarray(ref))
    peak = float(rm.max())
    if peak <= 0:
        raise ValueError("reference image is identically zero")
    xpeak = float(xm.max())
    if xpeak > 0:
        xm = xm * (peak / xpeak)
    return QualityReport(
        psnr_db=psnr(xm, rm, peak=peak),
        ssim=ssim(xm, rm, dynamic_range=float(rm.max() - rm.min()) or 1.0),
    )
