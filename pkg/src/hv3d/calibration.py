"""Weight fitting against MOS and the correlation statistics used to evaluate metrics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls
from scipy.stats import rankdata

from .core import (
    DEFAULT_BETA, FrameComponents, ScoreParams, WeightVector, sequence_components,
)
from .errors import LengthMismatch, NonConvergence, RankDeficient, TooFewRows, ZeroVariance
from .video_io import StereoSequence

FEATURE_COLUMNS = ("f_luma", "f_chroma", "f_cyclopean", "f_depth")


@dataclass(frozen=True)
class FeatureRow:
    """Pooled, weight-free HV3D terms of one sequence.

    Dotting (f_luma, f_chroma, f_cyclopean, f_depth) with (w1, w4, w2, w3)
    gives the unnormalized score. ``depth_factor`` is the mean depth
    weighting factor, needed to normalize with fitted weights.
    """

    f_luma: float
    f_chroma: float
    f_cyclopean: float
    f_depth: float
    mos: float | None = None
    depth_factor: float = 1.0
    sequence: str = ""

    def vector(self) -> np.ndarray:
        return np.array([self.f_luma, self.f_chroma, self.f_cyclopean, self.f_depth])


def features_from_components(components: list[FrameComponents], mos=None, sequence: str = "") -> FeatureRow:
    rows = np.array([
        [c.vif_left[0] + c.vif_right[0],
         c.vif_left[1] + c.vif_left[2] + c.vif_right[1] + c.vif_right[2],
         c.q_rl, c.q_d, c.depth_factor]
        for c in components
    ])
    m = rows.mean(axis=0)
    return FeatureRow(float(m[0]), float(m[1]), float(m[2]), float(m[3]), mos, float(m[4]), sequence)


def extract_features(ref: StereoSequence, dist: StereoSequence, beta: float = DEFAULT_BETA,
                     params: ScoreParams = ScoreParams(), workers: int | None = None) -> FeatureRow:
    comps = sequence_components(ref, dist, beta, params, baselines=False, workers=workers)
    return features_from_components(comps)


def normalize_mos(mos, low: float = 1.0, high: float = 10.0) -> np.ndarray:
    """Map scores on a [low, high] rating scale to [0, 1]; 1-10 maps as (MOS - 1) / 9."""
    return (np.asarray(mos, dtype=np.float64) - low) / (high - low)


def _design(rows) -> tuple[np.ndarray, np.ndarray]:
    rows = list(rows)
    if len(rows) < 4:
        raise TooFewRows(f"need at least 4 rows to fit 4 weights, got {len(rows)}")
    if any(r.mos is None for r in rows):
        raise ValueError("every row needs a MOS value")
    x = np.array([r.vector() for r in rows])
    y = np.array([r.mos for r in rows], dtype=np.float64)
    return x, y


def fit_weights(rows, beta: float = DEFAULT_BETA) -> WeightVector:
    """Nonnegative least-squares fit of MOS on the four feature columns (no intercept)."""
    x, y = _design(rows)
    if np.linalg.matrix_rank(x) < x.shape[1]:
        raise RankDeficient("feature columns are linearly dependent; weights are not identifiable")
    coef, _ = nnls(x, y)
    w1, w4, w2, w3 = (float(c) for c in coef)
    return WeightVector(w1=w1, w2=w2, w3=w3, w4=w4, beta=beta, calibrated=True)


def fit_residual(rows, w: WeightVector) -> float:
    """Root-mean-square error of the unnormalized linear model on ``rows``."""
    x, y = _design(rows)
    pred = x @ np.array([w.w1, w.w4, w.w2, w.w3])
    return float(np.sqrt(np.mean((pred - y) ** 2)))


def calibrated_scores(rows, w: WeightVector) -> np.ndarray:
    """Normalized HV3D of each row under ``w``."""
    out = []
    for r in rows:
        num = r.vector() @ np.array([w.w1, w.w4, w.w2, w.w3])
        out.append(num / (2 * w.w1 + 4 * w.w4 + w.w2 + w.w3 * r.depth_factor))
    return np.array(out)


# -- correlation -------------------------------------------------------------

def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} values")
    if len(x) < 3:
        raise LengthMismatch(f"need at least 3 pairs, got {len(x)}")
    return x, y


def pearson(x, y) -> float:
    x, y = _pair(x, y)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = xc @ xc
    syy = yc @ yc
    if sxx == 0 or syy == 0:
        raise ZeroVariance("correlation undefined for a constant series")
    r = (xc @ yc) / math.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def spearman(x, y) -> float:
    """Pearson correlation of average ranks."""
    x, y = _pair(x, y)
    return pearson(rankdata(x), rankdata(y))


# -- logistic mapping ----------------------------------------------------------

def _phi(u):
    # tanh(u)/u, continued smoothly through 0
    small = np.abs(u) < 1e-4
    us = np.where(small, 1.0, u)
    return np.where(small, 1 - u * u / 3 + 2 * u ** 4 / 15, np.tanh(us) / us)


def _dphi(u):
    small = np.abs(u) < 1e-4
    us = np.where(small, 1.0, u)
    th = np.tanh(us)
    return np.where(small, -2 * u / 3 + 8 * u ** 3 / 15, ((1 - th * th) * us - th) / (us * us))


def _model(p, m):
    s, b2, b3, b4 = p
    t = m - b3
    return b4 + s * t * _phi(b2 * t / 2)


def _jacobian(p, m):
    s, b2, b3, b4 = p
    t = m - b3
    u = b2 * t / 2
    j = np.empty((len(m), 4))
    j[:, 0] = t * _phi(u)
    j[:, 1] = s * t * t / 2 * _dphi(u)
    j[:, 2] = -s * (1 - np.tanh(u) ** 2)
    j[:, 3] = 1.0
    return j


@dataclass(frozen=True)
class LogisticFit:
    """mos ~ b1 * (0.5 - 1 / (1 + exp(b2 * (m - b3)))) + b4.

    ``slope`` = b1 * b2 / 4 is carried separately so the curve stays
    well-defined in its linear limit (b2 -> 0, b1 -> inf).
    """

    b1: float
    b2: float
    b3: float
    b4: float
    residual_rms: float
    converged: bool = True
    iterations: int = 0
    slope: float = 0.0

    def predict(self, metric) -> np.ndarray:
        return _model((self.slope, self.b2, self.b3, self.b4), np.asarray(metric, dtype=np.float64))


def logistic_fit(metric, mos, max_iter: int = 500, tol: float = 1e-10) -> LogisticFit:
    """Fit the 4-parameter monotone logistic by damped Gauss-Newton (Levenberg-Marquardt).

    Starts from b3 = median metric, |b2| = 4 / metric range (sign of the
    correlation), b1 = MOS range, b4 = mean MOS. A constant MOS yields the
    flat fit b1 = 0. Hitting ``max_iter`` returns the best point found with
    ``converged=False`` and a NonConvergence warning.
    """
    m, y = _pair(metric, mos)
    if len(m) < 5:
        raise LengthMismatch(f"need at least 5 points, got {len(m)}")
    m_range = float(np.ptp(m))
    if m_range == 0:
        raise ZeroVariance("metric has no spread")
    if np.ptp(y) == 0:
        return LogisticFit(0.0, 4.0 / m_range, float(np.median(m)), float(y[0]), 0.0, True, 0, 0.0)

    sign = 1.0 if np.dot(m - m.mean(), y - y.mean()) >= 0 else -1.0
    b1, b2 = float(np.ptp(y)), sign * 4.0 / m_range
    p = np.array([b1 * b2 / 4, b2, float(np.median(m)), float(y.mean())])
    res = y - _model(p, m)
    sse = res @ res
    lam = 1e-3
    scale = float(y @ y)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        j = _jacobian(p, m)
        a = j.T @ j
        g = j.T @ res
        damp = np.diag(np.diag(a)) + 1e-12 * np.eye(4)
        while True:
            step = np.linalg.solve(a + lam * damp, g)
            trial = p + step
            tres = y - _model(trial, m)
            tsse = tres @ tres
            if tsse <= sse:
                gain = sse - tsse
                p, res, sse = trial, tres, tsse
                lam = max(lam / 10, 1e-15)
                break
            lam *= 10
            if lam > 1e15:
                step, gain = np.zeros(4), 0.0
                break
        # stop on a small relative step, or when both the actual and the
        # linearized reduction are negligible (optimum at an asymptote,
        # e.g. data best fitted by a straight line)
        predicted = float(step @ (2 * g - a @ step))
        floor = 1e-12 * sse + 1e-28 * scale
        flat = gain <= floor and predicted <= floor
        if np.linalg.norm(step) <= tol * (np.linalg.norm(p) + tol) or flat:
            converged = True
            break
    if not converged:
        warnings.warn(f"logistic fit stopped after {max_iter} iterations", NonConvergence, stacklevel=2)
    s, b2, b3, b4 = (float(v) for v in p)
    b1 = 4 * s / b2 if b2 != 0 else math.copysign(math.inf, s)
    return LogisticFit(b1, b2, b3, b4, float(np.sqrt(sse / len(m))), converged, it, s)
