"""Depth-map variance weighting: busy depth counts for more than flat depth.

Run: python demos/04_depth.py
"""
import numpy as np

from hv3d.depth import depth_weight_factor, local_variance_weights, q_depth
from hv3d.synthetic import make_stereo_sequence

yy, xx = np.mgrid[0:64, 0:64]
checker = np.where((yy + xx) % 2, 1, -1)
two_tiles = np.hstack([100 + checker, 100 + 2 * checker]).astype(np.uint8)
w = local_variance_weights(two_tiles)
print("tile variances:", w.sigma2.tolist(), "-> factor", w.factor())
print("q_depth of an undistorted map equals the factor:", q_depth(two_tiles, two_tiles))

flat = np.full((128, 128), 50, np.uint8)
print("flat map factor:", depth_weight_factor(flat))

seq = make_stereo_sequence(320, 192, frames=1, seed=2)
ref = seq.depth_left[0].d
# Layered depth is mostly flat, so its VIF drops fast under noise; the
# variance factor caps the term from above.
print(f"synthetic depth factor: {depth_weight_factor(ref):.4f}")
rng = np.random.default_rng(0)
for sigma in (1, 4, 16):
    noisy = np.clip(ref + rng.normal(0, sigma, ref.shape), 0, 255).astype(np.uint8)
    print(f"depth noise sigma {sigma:2d}: q_depth = {q_depth(ref, noisy):.4f}")
