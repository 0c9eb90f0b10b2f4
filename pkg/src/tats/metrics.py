"""Forecast evaluation metrics: trend-direction accuracy, MSE, MAE, MAPE,
pairwise improvement (Diff, R-Diff), and a trend-aware penalty loss."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConfigError, DataError, NumericError

if TYPE_CHECKING:
    from .engine import ForecastTrace

__all__ = [
    "EvalReport",
    "TrendAwareLossConfig",
    "diff_rdiff",
    "evaluate_trace",
    "mae",
    "mape",
    "mse",
    "td_accuracy",
    "trend_aware_loss",
]


def _aligned(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(y_true, dtype=float)
    p = np.asarray(y_pred, dtype=float)
    if t.shape != p.shape or t.ndim != 1:
        raise ConfigError(f"actuals and forecasts must be 1-D and aligned, got {t.shape} vs {p.shape}")
    if t.size == 0:
        raise ConfigError("metrics need at least one step")
    return t, p


def td_accuracy(y_prev, y_true, y_pred) -> float:
    """Fraction of steps whose forecast moves the same way as the actual.

    A step counts as correct only when (y_pred - y_prev)(y_true - y_prev)
    is strictly positive; flat moves on either side count as incorrect.
    The denominator is the total number of steps.
    """
    t, p = _aligned(y_true, y_pred)
    prev = np.asarray(y_prev, dtype=float)
    if prev.shape != t.shape:
        raise ConfigError(f"y_prev must align with actuals, got {prev.shape} vs {t.shape}")
    hits = (p - prev) * (t - prev) > 0
    return float(np.count_nonzero(hits) / t.size)


def mse(y_true, y_pred) -> float:
    """Mean squared error."""
    t, p = _aligned(y_true, y_pred)
    return float(np.mean((t - p) ** 2))


def mae(y_true, y_pred) -> float:
    """Mean absolute error."""
    t, p = _aligned(y_true, y_pred)
    return float(np.mean(np.abs(t - p)))


def mape(y_true, y_pred) -> float:
    """Mean absolute percentage error, in percent.

    Undefined when any actual is zero; that raises instead of returning inf.
    """
    t, p = _aligned(y_true, y_pred)
    if np.any(t == 0.0):
        bad = int(np.flatnonzero(t == 0.0)[0])
        raise DataError(f"MAPE undefined: actual value at step {bad} is zero")
    return float(100.0 * np.mean(np.abs((t - p) / t)))


@dataclass(frozen=True)
class TrendAwareLossConfig:
    """Weight for the wrong-direction penalty; gamma >= 0."""

    gamma: float

    def __post_init__(self) -> None:
        if not self.gamma >= 0.0:
            raise ConfigError(f"gamma must be non-negative, got {self.gamma}")


def trend_aware_loss(y_true, y_pred, config: TrendAwareLossConfig | float, y_prev=None) -> float:
    """Sum of squared errors plus gamma per wrong-direction step.

    A step is penalized when (y_pred - y_prev)(y_true - y_prev) < 0.
    When ``y_prev`` is omitted it is taken from the actuals themselves,
    in which case the first step has no previous value and is exempt
    from the penalty (but still contributes its squared error).
    """
    if not isinstance(config, TrendAwareLossConfig):
        config = TrendAwareLossConfig(float(config))
    t, p = _aligned(y_true, y_pred)
    sse = float(np.sum((t - p) ** 2))
    if y_prev is None:
        if t.size < 2:
            return sse
        prev, tt, pp = t[:-1], t[1:], p[1:]
    else:
        prev = np.asarray(y_prev, dtype=float)
        if prev.shape != t.shape:
            raise ConfigError(f"y_prev must align with actuals, got {prev.shape} vs {t.shape}")
        tt, pp = t, p
    wrong = int(np.count_nonzero((pp - prev) * (tt - prev) < 0))
    return sse + config.gamma * wrong


@dataclass(frozen=True)
class EvalReport:
    """Metric bundle for one forecast trace.

    diff and r_diff compare against a baseline report and are either
    both present or both absent.
    """

    tda: float
    mse: float
    mae: float
    mape: float
    n_steps: int
    diff: float | None = None
    r_diff: float | None = None

    def __post_init__(self) -> None:
        if (self.diff is None) != (self.r_diff is None):
            raise ConfigError("diff and r_diff must be set together")
        if self.n_steps < 1:
            raise ConfigError("a report must cover at least one step")

    def to_dict(self) -> dict:
        out = {
            "tda": self.tda,
            "mse": self.mse,
            "mae": self.mae,
            "mape": self.mape,
            "n_steps": self.n_steps,
        }
        if self.diff is not None:
            out["diff"] = self.diff
            out["r_diff"] = self.r_diff
        return out


def diff_rdiff(base: EvalReport, candidate: EvalReport) -> tuple[float, float]:
    """Absolute and relative MSE improvement of candidate over base.

    Diff = base.mse - candidate.mse; R-Diff = Diff / base.mse.
    Positive values mean the candidate is better.
    """
    if base.n_steps != candidate.n_steps:
        raise DataError(
            f"reports cover different step counts: {base.n_steps} vs {candidate.n_steps}"
        )
    if base.mse == 0.0:
        raise NumericError("relative improvement undefined: base MSE is zero")
    d = base.mse - candidate.mse
    return d, d / base.mse


def evaluate_trace(trace: "ForecastTrace", base: EvalReport | None = None) -> EvalReport:
    """Build an EvalReport from a trace's final forecasts.

    With ``base`` given, Diff/R-Diff against it are filled in.
    """
    report = EvalReport(
        tda=td_accuracy(trace.y_prev, trace.y_true, trace.y_adj),
        mse=mse(trace.y_true, trace.y_adj),
        mae=mae(trace.y_true, trace.y_adj),
        mape=mape(trace.y_true, trace.y_adj),
        n_steps=len(trace),
    )
    if base is not None:
        d, r = diff_rdiff(base, report)
        report = EvalReport(
            tda=report.tda, mse=report.mse, mae=report.mae, mape=report.mape,
            n_steps=report.n_steps, diff=d, r_diff=r,
        )
    return report
