"""Seeded synthetic degradations standing in for a real 3D video codec.

``dct_quantize`` is the compression surrogate: 8x8 block DCT coefficients
are quantized with a level-scaled JPEG table, which gives blocking and
ringing that grow monotonically with the level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import gaussian_filter

from .cyclopean import JPEG_LUMA_TABLE
from .errors import UnknownKind
from .video_io import DepthMap, Frame, StereoSequence

KINDS = ("gaussian_noise", "gaussian_blur", "dct_quantize", "depth_noise")

JPEG_CHROMA_TABLE = np.array(
    [
        [17, 18, 24, 47, 99, 99, 99, 99],
        [18, 21, 26, 66, 99, 99, 99, 99],
        [24, 26, 56, 99, 99, 99, 99, 99],
        [47, 66, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
    ],
    dtype=np.float64,
)

# stream ids used to derive independent per-plane seeds
_STREAMS = {"left": 0, "right": 1, "depth_left": 2, "depth_right": 3}


@dataclass(frozen=True)
class DistortionSpec:
    kind: str
    level: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownKind(f"unknown distortion {self.kind!r}; expected one of {KINDS}")
        if not self.level > 0:
            raise ValueError(f"level must be > 0, got {self.level}")


def qp_to_level(qp: float, base: float = 0.25) -> float:
    """Quantizer scale mimicking codec QP: +6 QP doubles the step size."""
    return base * 2.0 ** ((qp - 25) / 6.0)


def _to_u8(x: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def _rng(seed: int, frame: int, stream: str, plane: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(frame, _STREAMS[stream], plane)))


def add_noise(plane, sigma: float, rng: np.random.Generator) -> np.ndarray:
    return _to_u8(np.asarray(plane, np.float64) + rng.normal(0.0, sigma, np.shape(plane)))


def blur(plane, sigma: float) -> np.ndarray:
    return _to_u8(gaussian_filter(np.asarray(plane, np.float64), sigma, mode="nearest"))


def dct_quantize(plane, level: float, table: np.ndarray = JPEG_LUMA_TABLE) -> np.ndarray:
    """JPEG-style 8x8 DCT quantization with step ``level * table``."""
    x = np.asarray(plane, np.float64) - 128.0
    h, w = x.shape
    ph, pw = -h % 8, -w % 8
    x = np.pad(x, ((0, ph), (0, pw)), mode="edge")
    rows, cols = x.shape[0] // 8, x.shape[1] // 8
    blocks = x.reshape(rows, 8, cols, 8).swapaxes(1, 2)
    step = table * level
    coeffs = dctn(blocks, axes=(-2, -1), norm="ortho")
    coeffs = np.rint(coeffs / step) * step
    blocks = idctn(coeffs, axes=(-2, -1), norm="ortho")
    out = blocks.swapaxes(1, 2).reshape(rows * 8, cols * 8)[:h, :w] + 128.0
    return _to_u8(out)


def _distort_frame(fr: Frame, spec: DistortionSpec, k: int, stream: str) -> Frame:
    if spec.kind == "gaussian_noise":
        planes = [add_noise(p, spec.level, _rng(spec.seed, k, stream, i)) for i, p in enumerate((fr.y, fr.u, fr.v))]
    elif spec.kind == "gaussian_blur":
        planes = [blur(p, spec.level) for p in (fr.y, fr.u, fr.v)]
    elif spec.kind == "dct_quantize":
        planes = [
            dct_quantize(fr.y, spec.level, JPEG_LUMA_TABLE),
            dct_quantize(fr.u, spec.level, JPEG_CHROMA_TABLE),
            dct_quantize(fr.v, spec.level, JPEG_CHROMA_TABLE),
        ]
    else:
        return fr
    return Frame(*planes)


def _distort_depth(dm: DepthMap, spec: DistortionSpec, k: int, stream: str) -> DepthMap:
    if spec.kind == "depth_noise":
        return DepthMap(add_noise(dm.d, spec.level, _rng(spec.seed, k, stream, 0)))
    if spec.kind == "dct_quantize":
        return DepthMap(dct_quantize(dm.d, spec.level, JPEG_LUMA_TABLE))
    return dm


def apply_distortion(seq: StereoSequence, spec: DistortionSpec) -> StereoSequence:
    """Return a degraded copy of ``seq``.

    Noise and blur touch only the views, ``depth_noise`` only the depth maps,
    and ``dct_quantize`` both (views and depth are coded together).
    """
    n = seq.frame_count
    return StereoSequence(
        left=[_distort_frame(seq.left[k], spec, k, "left") for k in range(n)],
        right=[_distort_frame(seq.right[k], spec, k, "right") for k in range(n)],
        depth_left=[_distort_depth(seq.depth_left[k], spec, k, "depth_left") for k in range(n)],
        depth_right=[_distort_depth(seq.depth_right[k], spec, k, "depth_right") for k in range(n)],
    )


def apply_distortions(seq: StereoSequence, specs) -> StereoSequence:
    for spec in specs:
        seq = apply_distortion(seq, spec)
    return seq
