"""Reconstruction quality metrics: PSNR, SSIM and the spectral angle."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from ._validation import check_cube, check_positive, check_same_shape

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


@dataclass(frozen=True)
class MetricReport:
    ssim: float
    psnr: float
    sam: float


def _pair(test, ref):
    test = check_cube(test, "test")
    ref = check_cube(ref, "ref")
    check_same_shape(test, ref)
    return test.astype(np.float64), ref.astype(np.float64)


def psnr(test, ref, peak=1.0):
    """``10 log10(peak^2 / MSE)`` in dB; ``inf`` for identical cubes."""
    test, ref = _pair(test, ref)
    peak = check_positive(peak, "peak")
    mse = np.mean((test - ref) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(peak * peak / mse))


def gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    """Normalised 1-D Gaussian taps; the 2-D window is their outer product."""
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-0.5 * (x / sigma) ** 2)
    return g / g.sum()


def _filter_valid(img, taps):
    r = taps.size // 2
    out = correlate1d(correlate1d(img, taps, axis=0, mode="nearest"), taps, axis=1, mode="nearest")
    return out[r:-r or None, r:-r or None]


def ssim(test, ref, peak=1.0):
    """Mean over bands of single-scale SSIM with an 11x11 Gaussian window
    (sigma 1.5), K1=0.01, K2=0.03, averaged over the valid region."""
    test, ref = _pair(test, ref)
    peak = check_positive(peak, "peak")
    if test.shape[0] < SSIM_WINDOW or test.shape[1] < SSIM_WINDOW:
        raise ValueError(f"bands must be at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {test.shape[:2]}")
    c1, c2 = (0.01 * peak) ** 2, (0.03 * peak) ** 2
    taps = gaussian_window()
    scores = []
    for band in range(test.shape[2]):
        a, b = test[:, :, band], ref[:, :, band]
        mu_a, mu_b = _filter_valid(a, taps), _filter_valid(b, taps)
        var_a = _filter_valid(a * a, taps) - mu_a ** 2
        var_b = _filter_valid(b * b, taps) - mu_b ** 2
        cov = _filter_valid(a * b, taps) - mu_a * mu_b
        num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
        den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
        scores.append(np.mean(num / den))
    return float(np.mean(scores))


def sam(test, ref, eps=1e-12):
    """Mean spectral angle in radians; pixels with a near-zero spectrum count as 0.

    The angle between unit spectra ``u`` and ``v`` is taken as
    ``2 atan2(|u - v|, |u + v|)``, which equals the arccos of their dot
    product but stays accurate for nearly parallel spectra.
    """
    test, ref = _pair(test, ref)
    nt = np.linalg.norm(test, axis=2, keepdims=True)
    nr = np.linalg.norm(ref, axis=2, keepdims=True)
    valid = (nt[..., 0] >= eps) & (nr[..., 0] >= eps)
    u = np.divide(test, nt, out=np.zeros_like(test), where=nt >= eps)
    v = np.divide(ref, nr, out=np.zeros_like(ref), where=nr >= eps)
    angle = 2 * np.arctan2(np.linalg.norm(u - v, axis=2), np.linalg.norm(u + v, axis=2))
    return float(np.mean(np.where(valid, angle, 0.0)))


def evaluate(test, ref, peak=1.0):
    return MetricReport(ssim=ssim(test, ref, peak), psnr=psnr(test, ref, peak), sam=sam(test, ref))
