"""Command-line batch runs: score, baselines, calibrate, evaluate, distort.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 computation
error. Nothing is written to ``--out`` unless the command succeeds.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import (
    FEATURE_COLUMNS, FeatureRow, extract_features, fit_residual, fit_weights, logistic_fit,
    normalize_mos, pearson, spearman,
)
from .core import DEFAULT_WEIGHTS, ScoreParams, WeightVector, hv3d_score, report_csv
from .cyclopean import DEFAULT_SEARCH_RANGE
from .distort import KINDS, DistortionSpec, apply_distortion
from .errors import (
    BadGeometry, DegenerateWeights, HV3DError, LengthMismatch, MissingFile, RankDeficient,
    PlaneTooSmall, TooFewRows, TruncatedFrame, UnknownKind, ZeroVariance,
)
from .metrics import SsimParams, VifParams, ms_ssim, psnr, ssim, vif
from .video_io import load_manifest, read_stereo_sequence, write_stereo_sequence

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_COMPUTE = 0, 2, 3, 4

BASELINE_COLUMNS = ("frame", "psnr_l", "psnr_r", "ssim_l", "ssim_r", "msssim_l", "msssim_r", "vifp_l", "vifp_r")

# Row order of the correlation table; VQM only appears when supplied.
METRIC_ORDER = ("PSNR", "SSIM", "VQM", "VIFp", "MS-SSIM", "HV3D")
_METRIC_ALIASES = {
    "psnr": "PSNR", "ssim": "SSIM", "vqm": "VQM", "vifp": "VIFp",
    "ms_ssim": "MS-SSIM", "msssim": "MS-SSIM", "ms-ssim": "MS-SSIM", "hv3d": "HV3D",
}


class ConfigError(Exception):
    pass


def _write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _write_atomic(out, text)


def _load_pair(args):
    ref_m = load_manifest(args.manifest_ref)
    dist_m = load_manifest(args.manifest_dist)
    if (ref_m.width, ref_m.height, ref_m.frame_count) != (dist_m.width, dist_m.height, dist_m.frame_count):
        raise ConfigError(
            f"reference is {ref_m.width}x{ref_m.height}x{ref_m.frame_count}, "
            f"distorted is {dist_m.width}x{dist_m.height}x{dist_m.frame_count}"
        )
    return ref_m, dist_m


def _weights(args) -> WeightVector:
    try:
        w = WeightVector.load(args.weights) if args.weights else DEFAULT_WEIGHTS
    except ValueError as exc:  # JSON syntax errors included
        raise ConfigError(f"{args.weights}: {exc}") from exc
    if args.beta is not None:
        w = replace(w, beta=args.beta)
    return w


def _params(args) -> ScoreParams:
    if args.search_range < 0:
        raise ConfigError("--search-range must be >= 0")
    return ScoreParams(search_range=args.search_range)


def cmd_score(args) -> int:
    w = _weights(args)
    params = _params(args)
    ref_m, dist_m = _load_pair(args)
    ref, dist = read_stereo_sequence(ref_m), read_stereo_sequence(dist_m)
    report = hv3d_score(ref, dist, w, params)
    if not w.calibrated:
        print("hv3d: note: scoring with uncalibrated default weights", file=sys.stderr)
    _emit(report.to_csv(), args.out)
    return EXIT_OK


def _baseline_row(rf, df, label, sp: SsimParams, vp: VifParams) -> dict:
    def msssim(a, b):
        try:
            return ms_ssim(a, b, sp)
        except PlaneTooSmall:
            return math.nan
    return {
        "frame": label,
        "psnr_l": psnr(rf[0].y, df[0].y), "psnr_r": psnr(rf[1].y, df[1].y),
        "ssim_l": ssim(rf[0].y, df[0].y, sp), "ssim_r": ssim(rf[1].y, df[1].y, sp),
        "msssim_l": msssim(rf[0].y, df[0].y), "msssim_r": msssim(rf[1].y, df[1].y),
        "vifp_l": vif(rf[0].y, df[0].y, vp), "vifp_r": vif(rf[1].y, df[1].y, vp),
    }


def cmd_baselines(args) -> int:
    ref_m, dist_m = _load_pair(args)
    ref, dist = read_stereo_sequence(ref_m), read_stereo_sequence(dist_m)
    sp, vp = SsimParams(), VifParams()
    rows = [
        _baseline_row((ref.left[k], ref.right[k]), (dist.left[k], dist.right[k]), k, sp, vp)
        for k in range(ref.frame_count)
    ]
    pooled = {"frame": "mean"}
    for c in BASELINE_COLUMNS[1:]:
        pooled[c] = float(np.mean([r[c] for r in rows]))
    _emit(report_csv(rows + [pooled], BASELINE_COLUMNS), args.out)
    return EXIT_OK


def _read_csv(path) -> tuple[list[str], list[dict]]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such file: {path}")
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if not reader.fieldnames:
            raise ConfigError(f"{path}: empty CSV")
        header = [h.strip() for h in reader.fieldnames]
        rows = [{k.strip(): (v or "").strip() for k, v in r.items() if k is not None} for r in reader]
    return header, rows


def _float(row: dict, key: str, where: str) -> float:
    try:
        x = float(row[key])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{where}: column {key!r} is missing or not a number") from exc
    if not math.isfinite(x):
        raise ConfigError(f"{where}: column {key!r} is not finite")
    return x


def _calibration_rows(args) -> list[FeatureRow]:
    header, rows = _read_csv(args.mos_csv)
    if "mos" not in header:
        raise ConfigError("calibration CSV needs a 'mos' column")
    mos = np.array([_float(r, "mos", f"row {i + 1}") for i, r in enumerate(rows)])
    if args.mos_scale == "1-10":
        mos = normalize_mos(mos)
    if len(mos) and (mos.min() < 0 or mos.max() > 1):
        raise ConfigError("MOS values fall outside [0, 1]; pass --mos-scale 1-10 for raw ratings")

    out = []
    if all(c in header for c in FEATURE_COLUMNS):
        for i, r in enumerate(rows):
            f = [_float(r, c, f"row {i + 1}") for c in FEATURE_COLUMNS]
            factor = _float(r, "depth_factor", f"row {i + 1}") if "depth_factor" in header else 1.0
            out.append(FeatureRow(*f, mos=float(mos[i]), depth_factor=factor, sequence=r.get("sequence", "")))
    elif "manifest_ref" in header and "manifest_dist" in header:
        params = _params(args)
        base = Path(args.mos_csv).parent
        beta = args.beta if args.beta is not None else DEFAULT_WEIGHTS.beta
        for i, r in enumerate(rows):
            ref = read_stereo_sequence(base / r["manifest_ref"])
            dist = read_stereo_sequence(base / r["manifest_dist"])
            feats = extract_features(ref, dist, beta, params)
            out.append(replace(feats, mos=float(mos[i]), sequence=r.get("sequence", "")))
    else:
        raise ConfigError(
            "calibration CSV needs either columns " + ",".join(FEATURE_COLUMNS)
            + " or manifest_ref,manifest_dist"
        )
    return out


def cmd_calibrate(args) -> int:
    beta = args.beta if args.beta is not None else DEFAULT_WEIGHTS.beta
    if not 0 < beta <= 1:
        raise ConfigError("--beta must lie in (0, 1]")
    rows = _calibration_rows(args)
    w = fit_weights(rows, beta=beta)
    summary = (
        f"w1={w.w1:.6f} w2={w.w2:.6f} w3={w.w3:.6f} w4={w.w4:.6f} beta={w.beta:.6f} "
        f"residual_rms={fit_residual(rows, w):.6e}\n"
    )
    if args.out is None:
        sys.stdout.write(w.to_json())
        sys.stderr.write(summary)
    else:
        _write_atomic(args.out, w.to_json())
        sys.stdout.write(summary)
    return EXIT_OK


def _metric_columns(header) -> list[tuple[str, str]]:
    found = {}
    extras = []
    for col in header:
        name = _METRIC_ALIASES.get(col.lower())
        if name:
            found[name] = col
        elif col.lower() not in ("sequence", "mos"):
            extras.append((col, col))
    return [(n, found[n]) for n in METRIC_ORDER if n in found] + extras


def evaluate_table(metrics: dict, mos) -> tuple[list[dict], list[dict]]:
    """Correlation rows and fitted-curve point series for each metric column."""
    table, curves = [], []
    mos = np.asarray(mos, dtype=np.float64)
    for name, values in metrics.items():
        values = np.asarray(values, dtype=np.float64)
        fit = logistic_fit(values, mos)
        fitted = fit.predict(values)
        try:
            pcc_fit = pearson(fitted, mos)
        except ZeroVariance:
            pcc_fit = math.nan
        table.append({
            "metric": name, "scc": spearman(values, mos), "pcc": pearson(values, mos),
            "pcc_logistic": pcc_fit, "b1": fit.b1, "b2": fit.b2, "b3": fit.b3, "b4": fit.b4,
            "residual_rms": fit.residual_rms,
        })
        for k in np.argsort(values, kind="stable"):
            curves.append({"metric": name, "value": values[k], "mos": mos[k], "fitted_mos": fitted[k]})
    return table, curves


TABLE_COLUMNS = ("metric", "scc", "pcc", "pcc_logistic", "b1", "b2", "b3", "b4", "residual_rms")
CURVE_COLUMNS = ("metric", "value", "mos", "fitted_mos")


def cmd_evaluate(args) -> int:
    header, rows = _read_csv(args.mos_csv)
    if "mos" not in header:
        raise ConfigError("evaluation CSV needs a 'mos' column")
    cols = _metric_columns(header)
    if not cols:
        raise ConfigError("evaluation CSV has no metric columns")
    mos = [_float(r, "mos", f"row {i + 1}") for i, r in enumerate(rows)]
    metrics = {name: [_float(r, col, f"row {i + 1}") for i, r in enumerate(rows)] for name, col in cols}
    try:
        table, curves = evaluate_table(metrics, mos)
    except (LengthMismatch, ZeroVariance) as exc:
        raise ConfigError(str(exc)) from exc
    table_text = report_csv(table, TABLE_COLUMNS)
    curve_text = report_csv(curves, CURVE_COLUMNS)
    curves_path = args.curves
    if curves_path is None and args.out is not None:
        out = Path(args.out)
        curves_path = out.with_name(out.stem + "_curves.csv")
    _emit(table_text, args.out)
    if curves_path is not None:
        _write_atomic(curves_path, curve_text)
    return EXIT_OK


def cmd_distort(args) -> int:
    try:
        spec = DistortionSpec(args.kind, args.level, args.seed)
    except (UnknownKind, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if args.out is None:
        raise ConfigError("distort needs --out (path of the manifest to write)")
    seq = read_stereo_sequence(args.manifest_ref)
    out = apply_distortion(seq, spec)
    target = Path(args.out)
    written = write_stereo_sequence(target.parent, out, target.stem)
    if written != target:
        os.replace(written, target)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hv3d", description="Full-reference stereoscopic video quality (HV3D).")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def pair(sp):
        sp.add_argument("--manifest-ref", required=True, help="reference sequence manifest (JSON)")
        sp.add_argument("--manifest-dist", required=True, help="distorted sequence manifest (JSON)")

    def common(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--beta", type=float, help="depth-fidelity exponent (default 0.7)")
        sp.add_argument("--search-range", type=int, default=DEFAULT_SEARCH_RANGE,
                        help="horizontal block-matching range in pixels")

    sp = sub.add_parser("score", help="per-frame and pooled HV3D report (CSV)")
    pair(sp)
    common(sp)
    sp.add_argument("--weights", help="weights JSON (w1, w2, w3, w4, beta)")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("baselines", help="PSNR / SSIM / MS-SSIM / VIFp per view (CSV)")
    pair(sp)
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.set_defaults(func=cmd_baselines)

    sp = sub.add_parser("calibrate", help="fit weights to MOS")
    sp.add_argument("--mos-csv", required=True,
                    help="CSV with sequence,f_luma,f_chroma,f_cyclopean,f_depth,mos "
                         "or sequence,manifest_ref,manifest_dist,mos")
    sp.add_argument("--mos-scale", choices=("unit", "1-10"), default="unit",
                    help="scale of the mos column (1-10 ratings are mapped to [0, 1])")
    common(sp)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("evaluate", help="SCC/PCC table and logistic-fit curves against MOS")
    sp.add_argument("--mos-csv", required=True, help="CSV with sequence, mos and one column per metric")
    sp.add_argument("--out", help="correlation table (default: stdout)")
    sp.add_argument("--curves", help="fitted point series (default: <out>_curves.csv next to --out)")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("distort", help="write a synthetically degraded copy of a sequence")
    sp.add_argument("--manifest-ref", required=True)
    sp.add_argument("--kind", required=True, choices=KINDS)
    sp.add_argument("--level", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="manifest path to write; streams go next to it")
    sp.set_defaults(func=cmd_distort)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, DegenerateWeights, BadGeometry, RankDeficient, TooFewRows, UnknownKind) as exc:
        code, err = EXIT_CONFIG, exc
    except (MissingFile, TruncatedFrame, OSError) as exc:
        code, err = EXIT_IO, exc
    except (HV3DError, ValueError, ArithmeticError) as exc:
        code, err = EXIT_COMPUTE, exc
    print(f"hv3d: error: {type(err).__name__}: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
