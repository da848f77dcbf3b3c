"""Deterministic synthetic stereo content for tests and demos.

A wide textured canvas pans slowly over time. Each view is a crop of the
canvas; the right view samples it at a horizontal offset that depends on a
layered depth map, which gives block matching real disparities to find.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .video_io import DepthMap, Frame, StereoSequence


def _texture(rng, shape, scales, contrast) -> np.ndarray:
    out = np.zeros(shape)
    for s, c in zip(scales, contrast):
        layer = gaussian_filter(rng.standard_normal(shape), s, mode="wrap")
        out += c * layer / (layer.std() + 1e-12)
    return out


def _depth_layers(rng, shape, n_objects: int) -> np.ndarray:
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    depth = 40.0 + 60.0 * yy / h  # receding floor
    for _ in range(n_objects):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        ry, rx = rng.uniform(h / 10, h / 4), rng.uniform(w / 20, w / 8)
        inside = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 < 1
        depth[inside] = rng.uniform(120, 230) + 10 * (yy[inside] - cy) / ry
    return gaussian_filter(depth, 1.5)


def make_stereo_sequence(width: int = 320, height: int = 192, frames: int = 8, seed: int = 0,
                         detail: float = 1.0, max_disparity: int = 12, pan: int = 2,
                         n_objects: int = 4) -> StereoSequence:
    """Build a StereoSequence; ``detail`` scales the fine-texture contrast."""
    rng = np.random.default_rng(seed)
    margin = max_disparity + pan * frames + 2
    cw = width + 2 * margin
    shape = (height, cw)
    luma = 128 + _texture(rng, shape, (1.0, 3.0, 10.0), (14 * detail, 18, 26))
    yy, xx = np.mgrid[0:height, 0:cw]
    luma += 20 * np.sin(2 * np.pi * xx / (cw / 3)) * np.cos(2 * np.pi * yy / height)
    cu = 128 + _texture(rng, shape, (2.0, 8.0), (6 * detail, 14))
    cv = 128 + _texture(rng, shape, (2.0, 8.0), (6 * detail, 14))
    depth = _depth_layers(rng, shape, n_objects)
    disparity = np.rint(depth / 255.0 * max_disparity).astype(int)

    def crop(plane, k, shift=None):
        x0 = margin + pan * k
        if shift is None:
            return plane[:, x0:x0 + width]
        cols = np.arange(width)[None, :] + x0 + shift
        return np.take_along_axis(plane, cols, axis=1)

    left, right, dl, dr = [], [], [], []
    rows = np.arange(height)[:, None]
    for k in range(frames):
        x0 = margin + pan * k
        shift = -disparity[rows, x0 + np.arange(width)[None, :]]
        ly, lu, lv = crop(luma, k), crop(cu, k), crop(cv, k)
        ry, ru, rv = crop(luma, k, shift), crop(cu, k, shift), crop(cv, k, shift)
        left.append(_frame(ly, lu, lv))
        right.append(_frame(ry, ru, rv))
        dl.append(DepthMap(_u8(crop(depth, k))))
        dr.append(DepthMap(_u8(crop(depth, k, shift))))
    return StereoSequence(left, right, dl, dr)


def _u8(x) -> np.ndarray:
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def _frame(y, u, v) -> Frame:
    # chroma subsampled by 2x2 averaging
    def sub(p):
        return 0.25 * (p[0::2, 0::2] + p[1::2, 0::2] + p[0::2, 1::2] + p[1::2, 1::2])
    return Frame(_u8(y), _u8(sub(u)), _u8(sub(v)))


def textured_plane(height: int = 192, width: int = 320, seed: int = 0) -> np.ndarray:
    """A single natural-looking 8-bit test plane."""
    rng = np.random.default_rng(seed)
    x = 128 + _texture(rng, (height, width), (1.0, 3.0, 10.0), (14, 18, 26))
    return _u8(x)
