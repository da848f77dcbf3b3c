"""Cyclopean-view model: stereo block matching, 3D-DCT fusion and CSF masking.

Matched 16x16 luma blocks from the two views are stacked into a 16x16x2
volume and transformed with an orthonormal 3D-DCT. Only the plane at the
lowest frequency along the view axis is kept; it is weighted by a 16x16
contrast-sensitivity mask, inverse-transformed, and compared between the
reference and distorted pairs with block-level SSIM.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.fft import dctn, idctn

from .errors import DimensionMismatch
from .metrics import SsimParams, block_ssim
from .video_io import tile_plane

BLOCK = 16
DEFAULT_SEARCH_RANGE = 64

# Standard JPEG luminance quantization table (ITU-T T.81, Annex K.1).
JPEG_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


@dataclass(frozen=True)
class DisparityField:
    """Per-block horizontal disparity: left block at column x matches right at x + d."""

    block_size: int
    cols: int
    rows: int
    disparity: np.ndarray = field(repr=False)  # (rows*cols,) int
    cost: np.ndarray = field(repr=False)  # (rows*cols,) SAD of the chosen candidate
    search_range: int = DEFAULT_SEARCH_RANGE


def _candidate_order(search_range: int) -> list[int]:
    # smallest |d| first, negative before positive: argmin then implements the tie-break
    order = [0]
    for k in range(1, search_range + 1):
        order += [-k, k]
    return order


def match_blocks(left_y, right_y, search_range: int = DEFAULT_SEARCH_RANGE) -> DisparityField:
    """Exhaustive horizontal SAD search for every 16x16 block of the left view.

    Candidates whose block would leave the right view are excluded. Ties go
    to the smallest |d|, then to the negative shift.
    """
    left = np.asarray(left_y, dtype=np.int64)
    right = np.asarray(right_y, dtype=np.int64)
    if left.shape != right.shape:
        raise DimensionMismatch(f"shape mismatch: {left.shape} vs {right.shape}")
    if search_range < 0:
        raise ValueError("search_range must be >= 0")
    h, w = left.shape
    rows, cols = h // BLOCK, w // BLOCK
    if rows == 0 or cols == 0:
        raise DimensionMismatch(f"plane {left.shape} holds no {BLOCK}x{BLOCK} block")
    left = left[:rows * BLOCK]
    right = right[:rows * BLOCK]
    x0 = np.arange(cols) * BLOCK

    order = _candidate_order(search_range)
    costs = np.full((len(order), rows, cols), np.iinfo(np.int64).max, dtype=np.int64)
    lw = left[:, :cols * BLOCK]
    for k, d in enumerate(order):
        ok = (x0 + d >= 0) & (x0 + d + BLOCK <= w)
        if not ok.any():
            continue
        # right view shifted so that column x holds right[:, x + d]
        lo, hi = max(0, -d), min(cols * BLOCK, w - d)
        shifted = np.zeros_like(lw)
        shifted[:, lo:hi] = right[:, lo + d:hi + d]
        sad = np.abs(lw - shifted).reshape(rows, BLOCK, cols, BLOCK).sum(axis=(1, 3))
        costs[k][:, ok] = sad[:, ok]
    best = np.argmin(costs, axis=0)
    disparity = np.asarray(order, dtype=np.int64)[best].reshape(-1)
    cost = np.take_along_axis(costs, best[None], axis=0)[0].reshape(-1)
    return DisparityField(BLOCK, cols, rows, disparity, cost, search_range)


def dct2(block) -> np.ndarray:
    return dctn(np.asarray(block, dtype=np.float64), axes=(-2, -1), norm="ortho")


def idct2(coeffs) -> np.ndarray:
    return idctn(np.asarray(coeffs, dtype=np.float64), axes=(-2, -1), norm="ortho")


def dct3_pair(block_l, block_r) -> np.ndarray:
    """Orthonormal 3D-DCT of the (2, 16, 16) stack [left, right]; both view-axis planes.

    Leading batch dimensions are allowed: inputs (..., 16, 16) give (..., 2, 16, 16).
    """
    stack = np.stack([np.asarray(block_l, np.float64), np.asarray(block_r, np.float64)], axis=-3)
    if stack.shape[-2:] != (BLOCK, BLOCK):
        raise DimensionMismatch(f"blocks must be {BLOCK}x{BLOCK}, got {stack.shape[-2:]}")
    return dctn(stack, axes=(-3, -2, -1), norm="ortho")


def fuse_blocks_3d_dct(block_l, block_r) -> np.ndarray:
    """Low-frequency (view-axis index 0) plane of the fused 3D-DCT block."""
    return dct3_pair(block_l, block_r)[..., 0, :, :]


def _upsample_bilinear(table: np.ndarray, factor: int) -> np.ndarray:
    # half-pixel-centre sampling with edge clamping
    n = table.shape[0]
    pos = np.clip((np.arange(n * factor) + 0.5) / factor - 0.5, 0, n - 1)
    i0 = np.floor(pos).astype(int)
    i1 = np.minimum(i0 + 1, n - 1)
    t = pos - i0
    interp = np.zeros((n * factor, n))
    interp[np.arange(n * factor), i0] += 1 - t
    interp[np.arange(n * factor), i1] += t
    return interp @ table @ interp.T


@lru_cache(maxsize=1)
def _csf_mask() -> np.ndarray:
    q = _upsample_bilinear(JPEG_LUMA_TABLE, 2)
    mask = q.min() / q
    mask.flags.writeable = False
    return mask


def build_csf_mask() -> np.ndarray:
    """16x16 contrast-sensitivity weights from the JPEG luminance table.

    The 8x8 table is bilinearly upsampled to 16x16 and inverted so that the
    finest-quantized (most visible) frequency gets weight 1.
    """
    return _csf_mask().copy()


def apply_csf(coeffs, mask=None) -> np.ndarray:
    if mask is None:
        mask = _csf_mask()
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[-2:] != np.shape(mask):
        raise DimensionMismatch(f"coefficient shape {coeffs.shape} does not fit mask {np.shape(mask)}")
    return coeffs * mask


def cyclopean_blocks(left_y, right_y, field: DisparityField, mask=None) -> np.ndarray:
    """Masked low-frequency cyclopean coefficients for every left-view block, (N, 16, 16)."""
    left_y = np.asarray(left_y)
    right_y = np.asarray(right_y)
    grid = tile_plane(left_y, BLOCK)
    if (grid.rows, grid.cols) != (field.rows, field.cols):
        raise DimensionMismatch("disparity field does not match the plane's block grid")
    right_blocks = np.empty_like(grid.blocks)
    for i, d in enumerate(field.disparity):
        r, c = divmod(i, field.cols)
        y0, x0 = r * BLOCK, c * BLOCK + int(d)
        right_blocks[i] = right_y[y0:y0 + BLOCK, x0:x0 + BLOCK]
    return apply_csf(fuse_blocks_3d_dct(grid.blocks, right_blocks), mask)


def cyclopean_quality(block_scores, depth_fidelity: float, beta: float) -> float:
    """Combine per-block SSIM scores with the depth fidelity term.

    ``depth_fidelity`` is VIF(D, D') in [0, 1]; the block average is clipped
    to [0, 1] so the product stays a normalized score.
    """
    mean = float(np.mean(block_scores))
    mean = min(max(mean, 0.0), 1.0)
    return depth_fidelity ** beta * mean


def cyclopean_block_scores(ref_left_y, ref_right_y, dist_left_y, dist_right_y,
                           search_range: int = DEFAULT_SEARCH_RANGE,
                           ssim_params: SsimParams = SsimParams(),
                           field: DisparityField | None = None) -> np.ndarray:
    """Per-block SSIM between reference and distorted cyclopean reconstructions.

    Block correspondence always comes from the reference pair, so both
    cyclopean views are built from the same pixel locations.
    """
    if field is None:
        field = match_blocks(ref_left_y, ref_right_y, search_range)
    mask = _csf_mask()
    xc_ref = cyclopean_blocks(ref_left_y, ref_right_y, field, mask)
    xc_dist = cyclopean_blocks(dist_left_y, dist_right_y, field, mask)
    return block_ssim(idct2(xc_ref), idct2(xc_dist), ssim_params)


def q_cyclopean(ref_left_y, ref_right_y, dist_left_y, dist_right_y, depth_fidelity: float,
                beta: float = 0.7, search_range: int = DEFAULT_SEARCH_RANGE,
                ssim_params: SsimParams = SsimParams()) -> float:
    scores = cyclopean_block_scores(ref_left_y, ref_right_y, dist_left_y, dist_right_y,
                                    search_range, ssim_params)
    return cyclopean_quality(scores, depth_fidelity, beta)
