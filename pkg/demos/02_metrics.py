"""Single-image fidelity kernels (PSNR, SSIM, MS-SSIM, pixel VIF) under growing noise.

Run: python demos/02_metrics.py
"""
import numpy as np

from hv3d.metrics import ms_ssim, psnr, ssim, vif
from hv3d.synthetic import textured_plane

ref = textured_plane(192, 320, seed=1).astype(np.float64)
rng = np.random.default_rng(0)

print(f"{'sigma':>6} {'PSNR':>8} {'SSIM':>7} {'MS-SSIM':>8} {'VIFp':>7}")
for sigma in (0, 2, 5, 10, 20, 40):
    dist = np.clip(ref + rng.normal(0, sigma, ref.shape), 0, 255) if sigma else ref
    print(f"{sigma:6d} {psnr(ref, dist):8.2f} {ssim(ref, dist):7.4f} {ms_ssim(ref, dist):8.4f} {vif(ref, dist):7.4f}")

# VIF can exceed 1 when the distortion boosts contrast.
stretched = (ref - ref.mean()) * 1.3 + ref.mean()
print(f"contrast stretch: VIFp = {vif(ref, stretched):.4f}")
