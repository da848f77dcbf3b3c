"""HV3D: full-reference stereoscopic video quality assessment."""

__version__ = "0.1.0"

from .calibration import (
    FeatureRow, LogisticFit, extract_features, fit_weights, logistic_fit, pearson, spearman,
)
from .core import DEFAULT_WEIGHTS, MetricReport, ScoreParams, WeightVector, hv3d_max, hv3d_score, view_quality
from .cyclopean import apply_csf, build_csf_mask, fuse_blocks_3d_dct, match_blocks, q_cyclopean
from .depth import local_variance_weights, q_depth
from .distort import DistortionSpec, apply_distortion
from .metrics import SsimParams, VifParams, ms_ssim, psnr, ssim, vif
from .video_io import (
    DepthMap, Frame, StereoSequence, read_depth_sequence, read_stereo_sequence, read_yuv_sequence, tile_plane,
)

__all__ = [
    "__version__",
    "FeatureRow",
    "LogisticFit",
    "extract_features",
    "fit_weights",
    "logistic_fit",
    "pearson",
    "spearman",
    "DEFAULT_WEIGHTS",
    "MetricReport",
    "ScoreParams",
    "WeightVector",
    "hv3d_max",
    "hv3d_score",
    "view_quality",
    "apply_csf",
    "build_csf_mask",
    "fuse_blocks_3d_dct",
    "match_blocks",
    "q_cyclopean",
    "local_variance_weights",
    "q_depth",
    "DistortionSpec",
    "apply_distortion",
    "SsimParams",
    "VifParams",
    "ms_ssim",
    "psnr",
    "ssim",
    "vif",
    "DepthMap",
    "Frame",
    "StereoSequence",
    "read_depth_sequence",
    "read_stereo_sequence",
    "read_yuv_sequence",
    "tile_plane",
]
