"""Block matching, 3D-DCT binocular fusion and CSF weighting for the cyclopean term.

Run: python demos/03_cyclopean.py
"""
import numpy as np

from hv3d.cyclopean import build_csf_mask, dct2, dct3_pair, match_blocks, q_cyclopean
from hv3d.distort import DistortionSpec, apply_distortion
from hv3d.synthetic import make_stereo_sequence

seq = make_stereo_sequence(320, 192, frames=1, seed=4, max_disparity=12)
left, right = seq.left[0].y, seq.right[0].y

field = match_blocks(left, right, search_range=64)
d = field.disparity.reshape(field.rows, field.cols)
print(f"disparity field {field.cols}x{field.rows}, range {d.min()}..{d.max()} px")
print("row 6 of the field:", d[6].tolist())

# Fusing two identical blocks puts all energy in the first view-axis plane.
b = left[:16, :16].astype(float)
planes = dct3_pair(b, b)
print("identical pair: kept plane / dct2 =", round(float(planes[0, 0, 0] / dct2(b)[0, 0]), 6),
      "| discarded plane max =", float(np.abs(planes[1]).max()))

mask = build_csf_mask()
np.set_printoptions(precision=2, suppress=True, linewidth=120)
print("CSF mask, top-left 4x4:\n", mask[:4, :4])

for level in (0.5, 2.0, 8.0):
    dist = apply_distortion(seq, DistortionSpec("dct_quantize", level))
    q = q_cyclopean(left, right, dist.left[0].y, dist.right[0].y, depth_fidelity=1.0)
    print(f"dct_quantize level {level:>4}: cyclopean quality {q:.4f}")
