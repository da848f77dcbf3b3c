"""Depth-information quality: VIF of the depth maps weighted by 64x64 depth variance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .metrics import VifParams, vif_clamped
from .video_io import tile_plane

DEPTH_BLOCK = 64


@dataclass(frozen=True)
class VarianceWeights:
    sigma2: np.ndarray = field(repr=False)

    @property
    def n_blocks(self) -> int:
        return len(self.sigma2)

    def factor(self) -> float:
        """Sum of block variances over N times the largest; 1.0 for a flat map."""
        peak = float(np.max(self.sigma2))
        if peak == 0.0:
            return 1.0
        return float(np.sum(self.sigma2) / (self.n_blocks * peak))


def local_variance_weights(depth_ref) -> VarianceWeights:
    """Population variance of each 64x64 tile of the reference depth map."""
    d = getattr(depth_ref, "d", depth_ref)
    blocks = tile_plane(np.asarray(d), DEPTH_BLOCK).blocks.astype(np.float64)
    return VarianceWeights(blocks.var(axis=(1, 2)))


def depth_weight_factor(depth_ref) -> float:
    return local_variance_weights(depth_ref).factor()


def q_depth(depth_ref, depth_dist, beta: float = 0.7, vif_params: VifParams = VifParams()) -> float:
    ref = np.asarray(getattr(depth_ref, "d", depth_ref))
    dist = np.asarray(getattr(depth_dist, "d", depth_dist))
    if ref.shape != dist.shape:
        raise DimensionMismatch(f"depth shapes differ: {ref.shape} vs {dist.shape}")
    factor = depth_weight_factor(ref)
    return vif_clamped(ref, dist, vif_params) ** beta * factor
