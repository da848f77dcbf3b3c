"""Full HV3D scoring of a stereo sequence at four compression levels.

Run: python demos/05_scoring.py
"""
from hv3d.core import DEFAULT_WEIGHTS, WeightVector, hv3d_score
from hv3d.distort import DistortionSpec, apply_distortion, qp_to_level
from hv3d.synthetic import make_stereo_sequence

ref = make_stereo_sequence(320, 192, frames=4, seed=7)
print("identity score:", round(hv3d_score(ref, ref, baselines=False).hv3d, 9))

print(f"{'QP':>3} {'HV3D':>7} {'Q_RL':>7} {'Q_D':>7} {'PSNR':>7}")
for qp in (25, 30, 35, 40):
    dist = apply_distortion(ref, DistortionSpec("dct_quantize", qp_to_level(qp)))
    r = hv3d_score(ref, dist, DEFAULT_WEIGHTS)
    p = r.pooled
    print(f"{qp:3d} {p.hv3d:7.4f} {p.q_rl:7.4f} {p.q_d:7.4f} {(p.psnr_l + p.psnr_r) / 2:7.2f}")

# Changing the weights changes how terms trade off, never the identity score.
luma_only = WeightVector(w1=1.0, w2=0.0, w3=0.0, w4=0.0)
dist = apply_distortion(ref, DistortionSpec("dct_quantize", qp_to_level(35)))
print("luma-only weights at QP 35:", round(hv3d_score(ref, dist, luma_only, baselines=False).hv3d, 4))

print("\nper-frame report (CSV):")
print(hv3d_score(ref, dist).to_csv())
