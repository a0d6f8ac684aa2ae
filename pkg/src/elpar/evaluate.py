"""Diagnostics for a fitted model: residual shape and probability calibration.

Residuals compare each match's expected goal difference (lambda1 - lambda2)
with the observed one; a healthy fit leaves them centered on zero with a
roughly normal shape whose spread matches sqrt(lambda1 + lambda2).  The
calibration curve checks that predicted win/draw/loss probabilities mean
what they say across probability bins.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from pathlib import Path

import numpy as np

from .errors import DomainError
from .glm import SkellamGlmModel, predict_lambdas_batch
from .skellam import OutcomeProbs

__all__ = [
    "ResidualSummary",
    "CalibrationBin",
    "residual_summary",
    "calibration_curve",
    "outcome_label",
    "chi_squared_critical_5pct",
    "write_evaluation_report",
]

OUTCOME_CLASSES = ("win", "draw", "loss")


@dataclasses.dataclass(frozen=True)
class ResidualSummary:
    """Moments, unit-bucket histogram, and a normality statistic."""

    mean: float
    std_dev: float
    histogram: dict[int, int]
    chi_sq_stat: float
    chi_sq_df: int


@dataclasses.dataclass(frozen=True)
class CalibrationBin:
    """One predicted-probability bin; frequencies undefined when empty."""

    lower: float
    upper: float
    n: int
    mean_predicted: float | None
    observed_frequency: float | None

    def __post_init__(self) -> None:
        if self.n == 0:
            if self.mean_predicted is not None or self.observed_frequency is not None:
                raise DomainError("empty bins must leave their frequencies undefined")
        else:
            if not (0.0 <= self.observed_frequency <= 1.0):
                raise DomainError("observed frequency must lie in [0, 1]")


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def chi_squared_critical_5pct(df: int) -> float:
    """5% critical value via the Wilson-Hilferty cube approximation.

    Accurate to a few parts in a thousand for df >= 3, which is all a
    reject/accept report needs.
    """
    if df < 1:
        raise DomainError("degrees of freedom must be positive")
    z95 = 1.6448536269514722
    return df * (1.0 - 2.0 / (9.0 * df) + z95 * math.sqrt(2.0 / (9.0 * df))) ** 3


def _chi_squared_vs_normal(
    histogram: dict[int, int], sigma: float, n: int
) -> tuple[float, int]:
    # expected counts under N(0, sigma) per unit bucket, outermost buckets
    # swallowing their tails; buckets merge rightward until each merged bin
    # expects at least 5
    keys = sorted(histogram)
    expected = []
    for i, k in enumerate(keys):
        lo = -math.inf if i == 0 else (k - 0.5) / sigma
        hi = math.inf if i == len(keys) - 1 else (k + 0.5) / sigma
        expected.append(n * (_normal_cdf(hi) - _normal_cdf(lo)))
    merged: list[tuple[float, float]] = []
    acc_obs, acc_exp = 0.0, 0.0
    for k, exp in zip(keys, expected):
        acc_obs += histogram[k]
        acc_exp += exp
        if acc_exp >= 5.0:
            merged.append((acc_obs, acc_exp))
            acc_obs, acc_exp = 0.0, 0.0
    if acc_exp > 0.0:
        if merged:
            last_obs, last_exp = merged.pop()
            merged.append((last_obs + acc_obs, last_exp + acc_exp))
        else:
            merged.append((acc_obs, acc_exp))
    stat = sum((obs - exp) ** 2 / exp for obs, exp in merged)
    df = max(len(merged) - 2, 1)  # sigma estimated from the same residuals
    return stat, df


def residual_summary(model: SkellamGlmModel, data) -> ResidualSummary:
    """Residual diagnostics for (features, goal diff) observations."""
    if len(data) < 2:
        raise DomainError("need at least two observations for residual diagnostics")
    rows = np.vstack([features.as_array() for features, _ in data])
    diffs = np.array([int(goal_diff) for _, goal_diff in data], dtype=float)
    l1, l2 = predict_lambdas_batch(model, rows)
    residuals = (l1 - l2) - diffs
    mean = float(residuals.mean())
    std_dev = float(residuals.std(ddof=1))
    buckets = np.rint(residuals).astype(int)
    histogram: dict[int, int] = {}
    for b in buckets:
        histogram[int(b)] = histogram.get(int(b), 0) + 1
    if std_dev == 0.0:
        raise DomainError("residuals are constant; chi-squared shape test undefined")
    stat, df = _chi_squared_vs_normal(histogram, std_dev, len(data))
    return ResidualSummary(
        mean=mean, std_dev=std_dev, histogram=histogram, chi_sq_stat=stat, chi_sq_df=df
    )


def outcome_label(goal_diff: int) -> str:
    if goal_diff > 0:
        return "win"
    if goal_diff < 0:
        return "loss"
    return "draw"


def calibration_curve(
    predictions: list[OutcomeProbs],
    outcomes: list[str],
    bin_width: float = 0.05,
) -> dict[str, list[CalibrationBin]]:
    """Reliability table per outcome class.

    Bins are half-open [k*w, (k+1)*w) with the final bin closed at 1.0.
    Empty bins are emitted rather than dropped: absence of games in a
    probability range is itself informative.
    """
    if len(predictions) != len(outcomes):
        raise DomainError("predictions and outcomes must align")
    if not predictions:
        raise DomainError("need at least one prediction")
    bad = set(outcomes) - set(OUTCOME_CLASSES)
    if bad:
        raise DomainError(f"unknown outcome labels: {sorted(bad)}")
    if not (0.0 < bin_width <= 0.5):
        raise DomainError("bin width must lie in (0, 0.5]")
    n_bins = round(1.0 / bin_width)
    if abs(n_bins * bin_width - 1.0) > 1e-9:
        raise DomainError(f"bin width {bin_width} does not divide 1 evenly")

    curves: dict[str, list[CalibrationBin]] = {}
    for label in OUTCOME_CLASSES:
        probs = np.array([getattr(p, f"p_{label}") for p in predictions])
        hits = np.array([1.0 if o == label else 0.0 for o in outcomes])
        indices = np.minimum((probs / bin_width).astype(int), n_bins - 1)
        bins = []
        for k in range(n_bins):
            mask = indices == k
            count = int(mask.sum())
            if count == 0:
                bins.append(
                    CalibrationBin(k * bin_width, (k + 1) * bin_width, 0, None, None)
                )
            else:
                bins.append(
                    CalibrationBin(
                        k * bin_width,
                        (k + 1) * bin_width,
                        count,
                        float(probs[mask].mean()),
                        float(hits[mask].mean()),
                    )
                )
        curves[label] = bins
    return curves


def write_evaluation_report(
    out_dir: str | Path,
    summary: ResidualSummary,
    curves: dict[str, list[CalibrationBin]],
) -> None:
    """Write report.txt plus residual_histogram.csv and calibration.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    critical = chi_squared_critical_5pct(summary.chi_sq_df)
    verdict = "not rejected" if summary.chi_sq_stat <= critical else "rejected"
    lines = [
        f"residual_mean = {summary.mean!r}",
        f"residual_std_dev = {summary.std_dev!r}",
        f"chi_sq_stat = {summary.chi_sq_stat!r}",
        f"chi_sq_df = {summary.chi_sq_df}",
        f"chi_sq_critical_5pct = {critical!r}",
        f"normal_shape = {verdict}",
    ]
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n")

    with (out_dir / "residual_histogram.csv").open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bucket", "count"])
        for bucket in sorted(summary.histogram):
            writer.writerow([bucket, summary.histogram[bucket]])

    with (out_dir / "calibration.csv").open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["outcome", "lower", "upper", "n", "mean_predicted", "observed_frequency"]
        )
        for label in OUTCOME_CLASSES:
            for b in curves[label]:
                writer.writerow(
                    [
                        label,
                        f"{b.lower:.6g}",
                        f"{b.upper:.6g}",
                        b.n,
                        "" if b.mean_predicted is None else repr(b.mean_predicted),
                        "" if b.observed_frequency is None else repr(b.observed_frequency),
                    ]
                )
