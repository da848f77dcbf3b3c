"""Fit weights to opinion scores and tabulate rank/linear correlation per metric.

The opinion scores here are synthetic: a seeded decreasing function of the
compression level with bounded noise.

Run: python demos/06_calibration.py
"""
from dataclasses import replace

import numpy as np

from hv3d.calibration import calibrated_scores, features_from_components, fit_weights, normalize_mos
from hv3d.cli import TABLE_COLUMNS, evaluate_table
from hv3d.core import DEFAULT_WEIGHTS, hv3d_from_components, report_csv, sequence_components
from hv3d.distort import DistortionSpec, apply_distortion, qp_to_level
from hv3d.synthetic import make_stereo_sequence

rng = np.random.default_rng(1)
rows, psnrs, ssims = [], [], []
raw_mos = []
for seed, detail in ((31, 0.6), (32, 1.0), (33, 1.6)):
    ref = make_stereo_sequence(320, 192, frames=2, seed=seed, detail=detail)
    for level, qp in enumerate((25, 30, 35, 40)):
        dist = apply_distortion(ref, DistortionSpec("dct_quantize", qp_to_level(qp)))
        comps = sequence_components(ref, dist)
        raw_mos.append(8.5 - 1.1 * level + rng.uniform(-0.4, 0.4))
        rows.append(features_from_components(comps, sequence=f"s{seed}-qp{qp}"))
        p = hv3d_from_components(comps, DEFAULT_WEIGHTS).pooled
        psnrs.append((p.psnr_l + p.psnr_r) / 2)
        ssims.append((p.ssim_l + p.ssim_r) / 2)

mos = normalize_mos(raw_mos)  # ratings on 1-10 mapped to [0, 1]
rows = [replace(r, mos=float(m)) for r, m in zip(rows, mos)]
w = fit_weights(rows)
print(f"fitted weights: w1={w.w1:.4f} w2={w.w2:.4f} w3={w.w3:.4f} w4={w.w4:.4f}")

# A NonConvergence warning means the best curve has no finite midpoint
# (the fit keeps sliding toward an exponential); its row is still usable.
table, _ = evaluate_table({"PSNR": psnrs, "SSIM": ssims, "HV3D": calibrated_scores(rows, w)}, mos)
print(report_csv(table, TABLE_COLUMNS))
