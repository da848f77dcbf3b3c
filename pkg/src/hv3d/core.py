"""HV3D aggregation: view, cyclopean and depth terms normalized to [0, 1]."""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .cyclopean import DEFAULT_SEARCH_RANGE, cyclopean_block_scores, cyclopean_quality
from .depth import depth_weight_factor
from .errors import DegenerateWeights, DimensionMismatch, PlaneTooSmall
from .metrics import SsimParams, VifParams, ms_ssim, psnr, ssim, vif, vif_clamped
from .video_io import Frame, StereoSequence

DEFAULT_BETA = 0.7


@dataclass(frozen=True)
class WeightVector:
    """Linear weights of the HV3D terms plus the depth-fidelity exponent.

    w1 luma VIF (both views), w4 each chroma VIF, w2 cyclopean term,
    w3 depth term. ``calibrated`` is False for the shipped placeholder values.
    """

    w1: float = 0.25
    w2: float = 0.30
    w3: float = 0.10
    w4: float = 0.05
    beta: float = DEFAULT_BETA
    calibrated: bool = False

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3, self.w4)
        if not all(math.isfinite(w) for w in ws) or min(ws) < 0:
            raise DegenerateWeights(f"weights must be finite and >= 0, got {ws}")
        if max(ws) == 0:
            raise DegenerateWeights("all weights are zero")
        if not 0 < self.beta <= 1:
            raise DegenerateWeights(f"beta must lie in (0, 1], got {self.beta}")

    def to_json(self) -> str:
        d = {k: getattr(self, k) for k in ("w1", "w2", "w3", "w4", "beta", "calibrated")}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "WeightVector":
        """Parse a weights document; files are taken as calibrated unless they say otherwise."""
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise DegenerateWeights("weights file must hold a JSON object")
        try:
            return cls(
                w1=float(doc["w1"]), w2=float(doc["w2"]), w3=float(doc["w3"]), w4=float(doc["w4"]),
                beta=float(doc.get("beta", DEFAULT_BETA)),
                calibrated=bool(doc.get("calibrated", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DegenerateWeights(f"malformed weights file: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "WeightVector":
        return cls.from_json(Path(path).read_text())


DEFAULT_WEIGHTS = WeightVector()


@dataclass(frozen=True)
class ScoreParams:
    search_range: int = DEFAULT_SEARCH_RANGE
    ssim: SsimParams = SsimParams()
    vif: VifParams = VifParams()


def view_vifs(ref: Frame, dist: Frame, params: VifParams = VifParams()) -> tuple[float, float, float]:
    """Clamped VIF of the Y, U and V planes; chroma stays at quarter resolution."""
    if ref.y.shape != dist.y.shape:
        raise DimensionMismatch(f"frame geometry differs: {ref.y.shape} vs {dist.y.shape}")
    return (
        vif_clamped(ref.y, dist.y, params),
        vif_clamped(ref.u, dist.u, params),
        vif_clamped(ref.v, dist.v, params),
    )


def view_quality(ref: Frame, dist: Frame, w: WeightVector, params: VifParams = VifParams()) -> float:
    return weighted_view_quality(view_vifs(ref, dist, params), w)


def weighted_view_quality(vifs, w: WeightVector) -> float:
    y, u, v = vifs
    return w.w1 * y + w.w4 * u + w.w4 * v


def hv3d_max(w: WeightVector, depth_weight_factor: float) -> float:
    m = 2 * w.w1 + 4 * w.w4 + w.w2 + w.w3 * depth_weight_factor
    if not m > 0:
        raise DegenerateWeights(f"normalizer is {m}; weights cannot score anything")
    return m


@dataclass(frozen=True)
class FrameComponents:
    """Weight-independent ingredients of one frame's score."""

    vif_left: tuple
    vif_right: tuple
    q_rl: float
    q_d: float
    depth_factor: float
    psnr_l: float = math.nan
    psnr_r: float = math.nan
    ssim_l: float = math.nan
    ssim_r: float = math.nan
    msssim_l: float = math.nan
    msssim_r: float = math.nan
    vifp_l: float = math.nan
    vifp_r: float = math.nan


def _ms_ssim_or_nan(a, b, params):
    try:
        return ms_ssim(a, b, params)
    except PlaneTooSmall:
        return math.nan


def frame_components(ref: StereoSequence, dist: StereoSequence, k: int, beta: float = DEFAULT_BETA,
                     params: ScoreParams = ScoreParams(), baselines: bool = True) -> FrameComponents:
    rl, rr, dl, dr = ref.left[k], ref.right[k], dist.left[k], dist.right[k]
    vl = view_vifs(rl, dl, params.vif)
    vr = view_vifs(rr, dr, params.vif)

    # D is taken per view; the two views' terms are averaged
    depth_vif = [
        vif_clamped(ref.depth_left[k].d, dist.depth_left[k].d, params.vif),
        vif_clamped(ref.depth_right[k].d, dist.depth_right[k].d, params.vif),
    ]
    factors = [depth_weight_factor(ref.depth_left[k]), depth_weight_factor(ref.depth_right[k])]
    fidelity = [v ** beta for v in depth_vif]
    q_d = 0.5 * (fidelity[0] * factors[0] + fidelity[1] * factors[1])
    scores = cyclopean_block_scores(rl.y, rr.y, dl.y, dr.y, params.search_range, params.ssim)
    q_rl = 0.5 * (cyclopean_quality(scores, depth_vif[0], beta) + cyclopean_quality(scores, depth_vif[1], beta))

    extra = {}
    if baselines:
        extra = dict(
            psnr_l=psnr(rl.y, dl.y), psnr_r=psnr(rr.y, dr.y),
            ssim_l=ssim(rl.y, dl.y, params.ssim), ssim_r=ssim(rr.y, dr.y, params.ssim),
            msssim_l=_ms_ssim_or_nan(rl.y, dl.y, params.ssim), msssim_r=_ms_ssim_or_nan(rr.y, dr.y, params.ssim),
            vifp_l=vif(rl.y, dl.y, params.vif), vifp_r=vif(rr.y, dr.y, params.vif),
        )
    return FrameComponents(vl, vr, q_rl, q_d, 0.5 * (factors[0] + factors[1]), **extra)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("HV3D_THREADS", "1")))
    except ValueError:
        return 1


def _check_aligned(ref: StereoSequence, dist: StereoSequence) -> None:
    if ref.frame_count != dist.frame_count:
        raise DimensionMismatch(f"frame counts differ: {ref.frame_count} vs {dist.frame_count}")
    if (ref.width, ref.height) != (dist.width, dist.height):
        raise DimensionMismatch(
            f"geometry differs: {ref.width}x{ref.height} vs {dist.width}x{dist.height}"
        )


def sequence_components(ref: StereoSequence, dist: StereoSequence, beta: float = DEFAULT_BETA,
                        params: ScoreParams = ScoreParams(), baselines: bool = True,
                        workers: int | None = None) -> list[FrameComponents]:
    """Per-frame components in frame order, computed on up to ``workers`` threads."""
    _check_aligned(ref, dist)
    workers = default_workers() if workers is None else max(1, workers)
    job = lambda k: frame_components(ref, dist, k, beta, params, baselines)  # noqa: E731
    if workers == 1 or ref.frame_count == 1:
        return [job(k) for k in range(ref.frame_count)]
    with ThreadPoolExecutor(max_workers=min(workers, ref.frame_count)) as pool:
        return list(pool.map(job, range(ref.frame_count)))


REPORT_COLUMNS = (
    "frame", "q_left", "q_right", "q_rl", "q_d", "hv3d_max", "hv3d",
    "psnr_l", "psnr_r", "ssim_l", "ssim_r", "msssim_l", "msssim_r", "vifp_l", "vifp_r",
)


@dataclass(frozen=True)
class FrameScore:
    frame: int | str
    q_left: float
    q_right: float
    q_rl: float
    q_d: float
    hv3d_max: float
    hv3d: float
    psnr_l: float
    psnr_r: float
    ssim_l: float
    ssim_r: float
    msssim_l: float
    msssim_r: float
    vifp_l: float
    vifp_r: float

    @property
    def numerator(self) -> float:
        return self.q_left + self.q_right + self.q_rl_weighted + self.q_d_weighted

    # filled in by score_frame; kept out of the CSV
    q_rl_weighted: float = field(default=0.0, repr=False)
    q_d_weighted: float = field(default=0.0, repr=False)


def score_frame(c: FrameComponents, w: WeightVector, index) -> FrameScore:
    q_left = weighted_view_quality(c.vif_left, w)
    q_right = weighted_view_quality(c.vif_right, w)
    norm = hv3d_max(w, c.depth_factor)
    num = q_left + q_right + w.w2 * c.q_rl + w.w3 * c.q_d
    return FrameScore(
        frame=index, q_left=q_left, q_right=q_right, q_rl=c.q_rl, q_d=c.q_d,
        hv3d_max=norm, hv3d=num / norm,
        psnr_l=c.psnr_l, psnr_r=c.psnr_r, ssim_l=c.ssim_l, ssim_r=c.ssim_r,
        msssim_l=c.msssim_l, msssim_r=c.msssim_r, vifp_l=c.vifp_l, vifp_r=c.vifp_r,
        q_rl_weighted=w.w2 * c.q_rl, q_d_weighted=w.w3 * c.q_d,
    )


@dataclass(frozen=True)
class MetricReport:
    frames: tuple
    pooled: FrameScore
    weights: WeightVector
    components: tuple = field(repr=False, default=())

    @property
    def hv3d(self) -> float:
        return self.pooled.hv3d

    @property
    def hv3d_max(self) -> float:
        return self.pooled.hv3d_max

    @property
    def calibrated(self) -> bool:
        return self.weights.calibrated

    def to_csv(self) -> str:
        return report_csv(list(self.frames) + [self.pooled], REPORT_COLUMNS)


def pool_scores(frames: list[FrameScore]) -> FrameScore:
    """Arithmetic mean of every column over frames, in frame order."""
    names = [f.name for f in fields(FrameScore) if f.name != "frame"]
    means = {n: float(np.mean([getattr(fr, n) for fr in frames])) for n in names}
    return FrameScore(frame="mean", **means)


def hv3d_from_components(components, w: WeightVector) -> MetricReport:
    frames = tuple(score_frame(c, w, k) for k, c in enumerate(components))
    return MetricReport(frames, pool_scores(list(frames)), w, tuple(components))


def hv3d_score(ref: StereoSequence, dist: StereoSequence, w: WeightVector = DEFAULT_WEIGHTS,
               params: ScoreParams = ScoreParams(), baselines: bool = True,
               workers: int | None = None) -> MetricReport:
    """Score a distorted stereo sequence against its reference.

    Each frame's HV3D is its weighted term sum divided by that frame's
    maximum attainable sum; the report pools every column by arithmetic mean.
    """
    comps = sequence_components(ref, dist, w.beta, params, baselines, workers)
    return hv3d_from_components(comps, w)


def format_value(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.6f}"


def report_csv(rows, columns) -> str:
    """CSV text with fixed 6-decimal formatting; rows are objects or dicts."""
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        get = row.get if isinstance(row, dict) else (lambda n, r=row: getattr(r, n))
        out.write(",".join(format_value(get(c)) for c in columns) + "\n")
    return out.getvalue()


def with_beta(w: WeightVector, beta: float) -> WeightVector:
    return replace(w, beta=beta)

