"""Distribution metrics for panoramas evaluated per tangent view.

Whole-panorama feature statistics hide distortion-localized failures,
so the per-view metrics here score each tangent plane separately and
aggregate the 18 values with a normal-approximation confidence bound:
a lower bound for scores where higher is better, an upper bound where
lower is better.  The seam metric scores the wrap-around column of an
equirectangular raster directly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CountError,
    DimensionError,
    EmptyInput,
    InsufficientSamples,
    RangeError,
)
from .raster import ErpImage

LOGIT_ROW_SUM_TOL = 1e-6


def as_features(x) -> np.ndarray:
    """Coerce to an (n, d) float64 feature matrix."""
    if isinstance(x, FeatureSet):
        return x.data
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"features must be (n, d), got shape {x.shape}")
    if x.shape[0] == 0:
        raise EmptyInput("feature set has no rows")
    if not np.all(np.isfinite(x)):
        raise RangeError("features contain non-finite values")
    return x


def as_logits(x) -> np.ndarray:
    """Coerce to an (n, k) matrix of class probabilities (rows sum to 1)."""
    if isinstance(x, LogitSet):
        return x.data
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"logits must be (n, k), got shape {x.shape}")
    if x.shape[0] == 0:
        raise EmptyInput("logit set has no rows")
    if not np.all(np.isfinite(x)):
        raise RangeError("logits contain non-finite values")
    if np.any(x < 0.0):
        raise RangeError("logits contain negative probabilities")
    sums = x.sum(axis=1)
    bad = np.abs(sums - 1.0) > LOGIT_ROW_SUM_TOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise RangeError(f"logit row {i} sums to {sums[i]:.8f}, not 1")
    return x


@dataclass(frozen=True)
class FeatureSet:
    """Validated (n, d) feature matrix."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", as_features(np.asarray(self.data)))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class LogitSet:
    """Validated (n, k) class-probability matrix."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", as_logits(np.asarray(self.data)))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def classes(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class GaussianStats:
    """Sample mean and unbiased covariance of a feature set."""

    mean: np.ndarray
    cov: np.ndarray
    n: int
    maybe_singular: bool = False


@dataclass
class MetricReport:
    """A metric value with its per-view breakdown and provenance.

    The aggregate is always recomputable from the breakdown: the mean
    for plain averages, or a confidence bound (see confidence_bound)
    for the per-tangent metrics.
    """

    metric: str
    aggregate: float
    breakdown: list[float] | None
    config: dict = field(default_factory=dict)
    n_real: int = 0
    n_gen: int = 0

    def to_json_dict(self) -> dict:
        return {
            "metric": self.metric,
            "aggregate": self.aggregate,
            "breakdown": self.breakdown,
            "config": self.config,
            "n_real": self.n_real,
            "n_gen": self.n_gen,
        }

    def to_csv(self) -> str:
        lines = ["metric,index,value"]
        if self.breakdown is not None:
            for i, v in enumerate(self.breakdown):
                lines.append(f"{self.metric},{i},{v!r}")
        lines.append(f"{self.metric},aggregate,{self.aggregate!r}")
        return "\n".join(lines) + "\n"


def gaussian_stats(features) -> GaussianStats:
    """Fit mean and unbiased (n-1) covariance to an (n, d) feature set.

    Warns (and flags the result) when n <= d, where the sample
    covariance is singular or nearly so.
    """
    x = as_features(features)
    n, d = x.shape
    if n < 2:
        raise InsufficientSamples(f"need at least 2 samples for covariance, got {n}")
    maybe_singular = n <= d
    if maybe_singular:
        warnings.warn(
            f"covariance from {n} samples in {d} dimensions is rank-deficient",
            RuntimeWarning,
            stacklevel=2,
        )
    mu = x.mean(axis=0)
    xc = x - mu
    cov = xc.T @ xc / (n - 1)
    return GaussianStats(mean=mu, cov=cov, n=n, maybe_singular=maybe_singular)


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    """Symmetric square root via eigendecomposition, eigenvalues clamped at 0."""
    w, v = np.linalg.eigh((m + m.T) / 2.0)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T

# Eigenvalues of the product term more negative than this (relative to
# the largest) indicate genuinely broken inputs rather than roundoff.
_EIG_CLAMP_TOL = -1e-8
_RESULT_CLAMP_TOL = -1e-6


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """Frechet distance between two Gaussians fitted to feature sets.

    ||mu_a - mu_b||^2 + tr(cov_a + cov_b - 2*(cov_a cov_b)^(1/2)),
    computed through the symmetric eigendecomposition of
    sqrt(cov_a) cov_b sqrt(cov_a); small negative eigenvalues from
    roundoff are clamped to zero, and a result within 1e-6 of zero is
    clamped to exactly zero.
    """
    if a.mean.shape != b.mean.shape:
        raise DimensionError(f"feature dimensions differ: {a.mean.shape} vs {b.mean.shape}")
    root_a = _sqrtm_psd(a.cov)
    m = root_a @ b.cov @ root_a
    w = np.linalg.eigh((m + m.T) / 2.0)[0]
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    if float(w.min(initial=0.0)) < _EIG_CLAMP_TOL * scale:
        warnings.warn("covariance product has significantly negative eigenvalues", RuntimeWarning,
                      stacklevel=2)
    w = np.clip(w, 0.0, None)
    diff = a.mean - b.mean
    fd = float(diff @ diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * np.sum(np.sqrt(w)))
    if abs(fd) < -_RESULT_CLAMP_TOL:
        fd = 0.0
    return fd


def _ridged_stats(features, shrinkage: float) -> GaussianStats:
    """Fit Gaussian stats, optionally adding a lambda*I covariance ridge.

    A positive ridge regularizes the n <= d case, so the rank
    deficiency warning is suppressed for the raw fit.
    """
    if not math.isfinite(shrinkage) or shrinkage < 0.0:
        raise RangeError(f"shrinkage {shrinkage} must be a finite value >= 0")
    if shrinkage == 0.0:
        return gaussian_stats(features)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = gaussian_stats(features)
    cov = g.cov + shrinkage * np.eye(g.cov.shape[0])
    return GaussianStats(mean=g.mean, cov=cov, n=g.n, maybe_singular=False)


def fid(real_features, gen_features, shrinkage: float = 0.0) -> float:
    """Frechet distance between Gaussians fitted to two feature sets.

    shrinkage adds lambda*I to both covariances; the default 0 keeps
    the classic unregularized behavior.
    """
    return frechet_distance(_ridged_stats(real_features, shrinkage),
                            _ridged_stats(gen_features, shrinkage))


def inception_score(logits, splits: int = 1) -> tuple[float, float]:
    """Mean and spread of exp(E[KL(p(y|x) || p(y))]) over data splits.

    Rows are split contiguously into the requested number of parts
    (the remainder folds into the last split).  Returns (mean, std)
    over split scores, std taken over the splits (population form), so
    splits=1 gives spread 0.
    """
    p = as_logits(logits)
    n = p.shape[0]
    if splits < 1:
        raise RangeError(f"splits {splits} must be >= 1")
    if splits > n:
        raise RangeError(f"cannot split {n} rows into {splits} parts")
    size = n // splits
    scores = []
    for s in range(splits):
        lo = s * size
        hi = (s + 1) * size if s < splits - 1 else n
        block = p[lo:hi]
        marginal = block.mean(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(block > 0.0, block * (np.log(block) - np.log(marginal)), 0.0)
        scores.append(math.exp(float(terms.sum(axis=1).mean())))
    arr = np.asarray(scores)
    return float(arr.mean()), float(arr.std())


def confidence_bound(values, side: str, z: float = 1.96) -> float:
    """Normal-approximation confidence bound of the mean of a breakdown.

    Returns mean - z*s/sqrt(n) for side "lower" or mean + z*s/sqrt(n)
    for side "upper", with s the sample (n-1) standard deviation.  A
    single value has no spread estimate and returns the mean.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"breakdown must be a non-empty vector, got shape {v.shape}")
    if side not in ("lower", "upper"):
        raise RangeError(f"side must be 'lower' or 'upper', got {side!r}")
    mean = float(v.mean())
    if v.size == 1:
        return mean
    half = z * float(v.std(ddof=1)) / math.sqrt(v.size)
    return mean - half if side == "lower" else mean + half


def _check_set_count(sets, expected: int, what: str) -> None:
    if len(sets) != expected:
        raise CountError(f"expected {expected} {what}, got {len(sets)}")


def tangent_is(logit_sets, expected_count: int = 18, splits: int = 1,
               config: dict | None = None) -> MetricReport:
    """Per-tangent inception score with a conservative lower-bound aggregate.

    logit_sets holds one LogitSet per tangent view of the same
    generated panoramas.  The breakdown is the per-view score mean;
    the aggregate is the 95% lower confidence bound of the breakdown,
    so a model is only rewarded for quality it sustains across views.
    """
    _check_set_count(logit_sets, expected_count, "logit sets")
    mats = [as_logits(s) for s in logit_sets]
    n = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != n:
            raise CountError(f"logit set {i} has {m.shape[0]} rows, expected {n}")
    breakdown = [inception_score(m, splits=splits)[0] for m in mats]
    report_config = {"splits": splits, "z": 1.96, "count": expected_count}
    if config:
        report_config.update(config)
    return MetricReport(
        metric="tangent_is",
        aggregate=confidence_bound(breakdown, "lower"),
        breakdown=breakdown,
        config=report_config,
        n_real=0,
        n_gen=n,
    )


def tangent_fid(real_sets, gen_sets, expected_count: int = 18,
                shrinkage: float = 0.0, config: dict | None = None) -> MetricReport:
    """Per-tangent Frechet distance with an upper-bound aggregate.

    real_sets and gen_sets hold one FeatureSet per tangent view,
    index-aligned.  Lower is better, so the aggregate is the 95% upper
    confidence bound over the 18 per-view distances.
    """
    _check_set_count(real_sets, expected_count, "real feature sets")
    _check_set_count(gen_sets, expected_count, "generated feature sets")
    real = [as_features(s) for s in real_sets]
    gen = [as_features(s) for s in gen_sets]
    breakdown = [
        frechet_distance(_ridged_stats(r, shrinkage), _ridged_stats(g, shrinkage))
        for r, g in zip(real, gen)
    ]
    report_config = {"z": 1.96, "count": expected_count}
    if config:
        report_config.update(config)
    return MetricReport(
        metric="tangent_fid",
        aggregate=confidence_bound(breakdown, "upper"),
        breakdown=breakdown,
        config=report_config,
        n_real=real[0].shape[0],
        n_gen=gen[0].shape[0],
    )


@dataclass(frozen=True)
class CubemapFeatures:
    """Per-image cube-face features: top (n, d), bottom (n, d), sides (n, 4, d)."""

    top: np.ndarray
    bottom: np.ndarray
    sides: np.ndarray

    def __post_init__(self):
        top = as_features(np.asarray(self.top))
        bottom = as_features(np.asarray(self.bottom))
        sides = np.asarray(self.sides, dtype=np.float64)
        if sides.ndim != 3 or sides.shape[1] != 4:
            raise DimensionError(f"sides must be (n, 4, d), got shape {sides.shape}")
        if not (top.shape[0] == bottom.shape[0] == sides.shape[0]):
            raise CountError("top, bottom, and sides must describe the same images")
        if not (top.shape[1] == bottom.shape[1] == sides.shape[2]):
            raise DimensionError("top, bottom, and sides must share the feature dimension")
        if not np.all(np.isfinite(sides)):
            raise RangeError("side features contain non-finite values")
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)
        object.__setattr__(self, "sides", sides)


def omnifid(real: CubemapFeatures, gen: CubemapFeatures,
            shrinkage: float = 0.0, config: dict | None = None) -> MetricReport:
    """Mean of three Frechet distances: top faces, bottom faces, and the
    per-image average of the four side faces."""
    breakdown = [
        fid(real.top, gen.top, shrinkage),
        fid(real.bottom, gen.bottom, shrinkage),
        fid(real.sides.mean(axis=1), gen.sides.mean(axis=1), shrinkage),
    ]
    return MetricReport(
        metric="omnifid",
        aggregate=float(np.mean(breakdown)),
        breakdown=breakdown,
        config=dict(config or {}),
        n_real=real.top.shape[0],
        n_gen=gen.top.shape[0],
    )


_SCHARR_X = np.array([[-3.0, 0.0, 3.0], [-10.0, 0.0, 10.0], [-3.0, 0.0, 3.0]]) / 16.0

DS_EPS = 1e-8


def _scharr_x_response(data: np.ndarray) -> np.ndarray:
    """Horizontal Scharr response with circular columns, clamped rows."""
    padded = np.pad(data, ((1, 1), (0, 0), (0, 0)), mode="edge")
    padded = np.pad(padded, ((0, 0), (1, 1), (0, 0)), mode="wrap")
    resp = np.zeros(data.shape, dtype=np.float64)
    for dr in range(3):
        for dc in (0, 2):
            kval = _SCHARR_X[dr, dc]
            resp += kval * padded[dr:dr + data.shape[0], dc:dc + data.shape[1]]
    return np.sqrt((resp ** 2).sum(axis=2))


def discontinuity_score(img, reference: str = "adjacent") -> float:
    """Seam severity of a wrap-around raster.

    Applies the 3x3 horizontal Scharr kernel with a circular column
    boundary, so the response at columns 0 and W-1 measures the jump
    across the wrap seam.  The score is the mean response at those two
    junction columns divided by a reference level: the response of the
    immediately adjacent interior columns (reference="adjacent",
    default, which scores smooth wrap-consistent content near 1) or
    the mean response over all columns (reference="global").  A small
    floor (1e-8) keeps constant images at exactly 0.
    """
    data = img.data if isinstance(img, ErpImage) else np.asarray(img, dtype=np.float64)
    if data.ndim == 2:
        data = data[..., None]
    if data.ndim != 3:
        raise DimensionError(f"image must be (H, W) or (H, W, C), got shape {data.shape}")
    w = data.shape[1]
    if w < 4:
        raise DimensionError(f"image width {w} too small for a seam measurement")
    if reference not in ("adjacent", "global"):
        raise RangeError(f"reference must be 'adjacent' or 'global', got {reference!r}")
    mag = _scharr_x_response(data.astype(np.float64))
    seam = float(mag[:, [0, w - 1]].mean())
    if reference == "adjacent":
        ref = float(mag[:, [1, w - 2]].mean())
    else:
        ref = float(mag.mean())
    return seam / (ref + DS_EPS)
