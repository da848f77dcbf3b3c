"""Full-reference plane metrics: PSNR, SSIM, MS-SSIM and pixel-domain VIF.

All kernels take 2-D sample arrays (any real dtype) and work in float64.
Local statistics use separable Gaussian windows evaluated in "valid" mode,
so no padding convention leaks into the scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatch, PlaneTooSmall

MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


@dataclass(frozen=True)
class SsimParams:
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    window_size: int = 11
    window_sigma: float = 1.5

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be positive")
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


@dataclass(frozen=True)
class VifParams:
    scales: int = 4
    noise_variance: float = 2.0
    epsilon: float = 1e-10

    def __post_init__(self):
        if self.scales < 1:
            raise ValueError("scales must be >= 1")
        if self.noise_variance <= 0 or self.epsilon <= 0:
            raise ValueError("noise_variance and epsilon must be positive")


def _pair(ref, dist) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(ref, dtype=np.float64)
    b = np.asarray(dist, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def gaussian_window_1d(size: int, sigma: float) -> np.ndarray:
    """Normalized 1-D taps; the outer product equals MATLAB's fspecial('gaussian')."""
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def filter_valid(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Separable correlation over the last two axes, valid positions only."""
    n = len(taps)
    x = sliding_window_view(x, n, axis=-1) @ taps
    x = sliding_window_view(x, n, axis=-2) @ taps
    return x


def psnr(ref, dist, peak: float = 255.0) -> float:
    """PSNR in dB; ``math.inf`` when the planes are identical."""
    a, b = _pair(ref, dist)
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return math.inf
    return float(10.0 * np.log10(peak * peak / mse))


def _ssim_maps(a, b, params: SsimParams, taps):
    mu1 = filter_valid(a, taps)
    mu2 = filter_valid(b, taps)
    mu11 = mu1 * mu1
    mu22 = mu2 * mu2
    mu12 = mu1 * mu2
    s11 = filter_valid(a * a, taps) - mu11
    s22 = filter_valid(b * b, taps) - mu22
    s12 = filter_valid(a * b, taps) - mu12
    lum = (2.0 * mu12 + params.c1) / (mu11 + mu22 + params.c1)
    cs = (2.0 * s12 + params.c2) / (s11 + s22 + params.c2)
    return lum, cs


def ssim(ref, dist, params: SsimParams = SsimParams()) -> float:
    """Mean SSIM over every valid window position."""
    a, b = _pair(ref, dist)
    if min(a.shape) < params.window_size:
        raise PlaneTooSmall(f"plane {a.shape} smaller than the {params.window_size}-tap window")
    taps = gaussian_window_1d(params.window_size, params.window_sigma)
    lum, cs = _ssim_maps(a, b, params, taps)
    return float(np.mean(lum * cs))


def block_ssim(ref_blocks, dist_blocks, params: SsimParams = SsimParams()) -> np.ndarray:
    """SSIM of each block in a (n, h, w) stack against its counterpart.

    The window shrinks (with proportionally reduced sigma) when a block is
    smaller than ``params.window_size``.
    """
    a, b = _pair(ref_blocks, dist_blocks)
    if a.ndim != 3:
        raise DimensionMismatch(f"expected a (n, h, w) block stack, got {a.shape}")
    size = min(params.window_size, a.shape[1], a.shape[2])
    sigma = params.window_sigma * size / params.window_size
    taps = gaussian_window_1d(size, sigma)
    lum, cs = _ssim_maps(a, b, params, taps)
    return np.mean(lum * cs, axis=(1, 2))


def _downsample2(x: np.ndarray) -> np.ndarray:
    h, w = (x.shape[0] // 2) * 2, (x.shape[1] // 2) * 2
    x = x[:h, :w]
    return 0.25 * (x[0::2, 0::2] + x[1::2, 0::2] + x[0::2, 1::2] + x[1::2, 1::2])


def ms_ssim(ref, dist, params: SsimParams = SsimParams(), weights=MS_SSIM_WEIGHTS) -> float:
    """Five-scale MS-SSIM: contrast-structure at every scale, luminance at the coarsest."""
    a, b = _pair(ref, dist)
    levels = len(weights)
    if min(a.shape) >> (levels - 1) < params.window_size:
        raise PlaneTooSmall(
            f"plane {a.shape} cannot be downsampled {levels - 1} times and still hold a "
            f"{params.window_size}-tap window"
        )
    taps = gaussian_window_1d(params.window_size, params.window_sigma)
    result = 1.0
    for level, weight in enumerate(weights):
        lum, cs = _ssim_maps(a, b, params, taps)
        if level == levels - 1:
            term = float(np.mean(lum * cs))
        else:
            term = float(np.mean(cs))
            a, b = _downsample2(a), _downsample2(b)
        # fractional powers of negative terms are undefined
        result *= max(term, 0.0) ** weight
    return result


def _vif_windows(scales: int) -> list[int]:
    return [2 ** (scales - s + 1) + 1 for s in range(1, scales + 1)]


def vif(ref, dist, params: VifParams = VifParams()) -> float:
    """Pixel-domain, multi-scale visual information fidelity.

    Returns exactly 1.0 for identical inputs. When the reference carries no
    information (flat planes) the score is 0.0 unless the inputs match.
    The value is not clipped; contrast enhancement can push it above 1.
    """
    a, b = _pair(ref, dist)
    windows = _vif_windows(params.scales)
    h, w = a.shape
    for s, n in enumerate(windows):
        if s:
            h, w = (h - n + 1 + 1) // 2, (w - n + 1 + 1) // 2
        if min(h, w) < n:
            raise PlaneTooSmall(f"plane {a.shape} too small for {params.scales} VIF scales")
    if np.array_equal(a, b):
        return 1.0

    eps = params.epsilon
    num = 0.0
    den = 0.0
    for s, n in enumerate(windows):
        taps = gaussian_window_1d(n, n / 5.0)
        if s:
            a = filter_valid(a, taps)[::2, ::2]
            b = filter_valid(b, taps)[::2, ::2]
        mu1 = filter_valid(a, taps)
        mu2 = filter_valid(b, taps)
        s11 = np.maximum(filter_valid(a * a, taps) - mu1 * mu1, 0.0)
        s22 = np.maximum(filter_valid(b * b, taps) - mu2 * mu2, 0.0)
        s12 = filter_valid(a * b, taps) - mu1 * mu2

        g = s12 / (s11 + eps)
        sv = s22 - g * s12
        flat_ref = s11 < eps
        g[flat_ref] = 0.0
        sv[flat_ref] = s22[flat_ref]
        s11 = np.where(flat_ref, 0.0, s11)
        flat_dist = s22 < eps
        g[flat_dist] = 0.0
        sv[flat_dist] = 0.0
        neg = g < 0
        sv[neg] = s22[neg]
        g[neg] = 0.0
        sv = np.maximum(sv, eps)

        num += float(np.sum(np.log10(1.0 + g * g * s11 / (sv + params.noise_variance))))
        den += float(np.sum(np.log10(1.0 + s11 / params.noise_variance)))

    if den < eps:
        return 0.0
    return num / den


def vif_clamped(ref, dist, params: VifParams = VifParams()) -> float:
    """VIF limited to [0, 1], the form that enters the HV3D terms."""
    return min(max(vif(ref, dist, params), 0.0), 1.0)
