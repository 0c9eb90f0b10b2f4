"""One-step-ahead value forecasters with a frozen-parameter walk-forward.

Parameters are fit once on the training split and never touched again;
walking forward only appends realized values to the history each model
conditions on. Forecasting is a pure function of (model, history), so
traces are reproducible and models can be shared across runs. A config
flag allows refitting at every step for callers who want it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import TimeSeries, concat
from .errors import ConfigError, DataError, NumericError
from .ingest import ExternalForecasts, load_external_forecasts

__all__ = [
    "ARModel",
    "DriftForecaster",
    "ExternalForecaster",
    "ForecasterKind",
    "NaiveForecaster",
    "SESForecaster",
    "ValueForecasterSpec",
    "fit_ar",
    "fit_forecaster",
    "forecast_one",
    "walk_forward_forecasts",
]

AR_RIDGE_PENALTY = 1e-8


class ForecasterKind(enum.Enum):
    NAIVE = "naive"
    DRIFT = "drift"
    AR = "ar"
    SES = "ses"
    EXTERNAL = "external"


@dataclass(frozen=True)
class ValueForecasterSpec:
    """Declarative forecaster choice; parameters must match the kind.

    order: AR lag count (AR only).
    smoothing: exponential smoothing weight in (0, 1] (SES only).
    source: path to a time_index,forecast CSV or a preloaded
        ExternalForecasts table (EXTERNAL only).
    """

    kind: ForecasterKind
    order: int | None = None
    smoothing: float | None = None
    source: str | Path | ExternalForecasts | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ForecasterKind):
            try:
                object.__setattr__(self, "kind", ForecasterKind(self.kind))
            except ValueError:
                raise ConfigError(f"unknown forecaster kind: {self.kind!r}") from None

        def forbid(name: str, value) -> None:
            if value is not None:
                raise ConfigError(f"{name} is not a parameter of the {self.kind.value} forecaster")

        if self.kind is ForecasterKind.AR:
            if self.order is None or self.order < 1:
                raise ConfigError(f"AR forecaster needs order >= 1, got {self.order}")
            forbid("smoothing", self.smoothing)
            forbid("source", self.source)
        elif self.kind is ForecasterKind.SES:
            if self.smoothing is None or not 0.0 < self.smoothing <= 1.0:
                raise ConfigError(f"SES smoothing must lie in (0, 1], got {self.smoothing}")
            forbid("order", self.order)
            forbid("source", self.source)
        elif self.kind is ForecasterKind.EXTERNAL:
            if self.source is None:
                raise ConfigError("external forecaster needs a source file or table")
            forbid("order", self.order)
            forbid("smoothing", self.smoothing)
        else:
            forbid("order", self.order)
            forbid("smoothing", self.smoothing)
            forbid("source", self.source)

    @classmethod
    def naive(cls) -> "ValueForecasterSpec":
        return cls(ForecasterKind.NAIVE)

    @classmethod
    def drift(cls) -> "ValueForecasterSpec":
        return cls(ForecasterKind.DRIFT)

    @classmethod
    def ar(cls, order: int = 2) -> "ValueForecasterSpec":
        return cls(ForecasterKind.AR, order=order)

    @classmethod
    def ses(cls, smoothing: float) -> "ValueForecasterSpec":
        return cls(ForecasterKind.SES, smoothing=smoothing)

    @classmethod
    def external(cls, source: str | Path | ExternalForecasts) -> "ValueForecasterSpec":
        return cls(ForecasterKind.EXTERNAL, source=source)


@dataclass(frozen=True)
class NaiveForecaster:
    """Forecasts the last observed value."""

    required_history: int = 1

    def forecast_one(self, history: np.ndarray) -> float:
        return float(history[-1])


@dataclass(frozen=True)
class DriftForecaster:
    """Forecasts the last value plus the mean training step."""

    mean_step: float
    required_history: int = 1

    def forecast_one(self, history: np.ndarray) -> float:
        return float(history[-1] + self.mean_step)


@dataclass(frozen=True)
class ARModel:
    """Autoregression y_t = intercept + sum_i coefficients[i-1] * y_{t-i}.

    degenerate is True when the least-squares system was rank deficient
    and a small ridge penalty was used instead.
    """

    intercept: float
    coefficients: np.ndarray
    degenerate: bool = False

    @property
    def order(self) -> int:
        return int(self.coefficients.size)

    @property
    def required_history(self) -> int:
        return self.order

    def forecast_one(self, history: np.ndarray) -> float:
        lags = history[-1 : -self.order - 1 : -1]
        return float(self.intercept + float(np.dot(self.coefficients, lags)))


@dataclass(frozen=True)
class SESForecaster:
    """Exponential smoothing: level = smoothing*y + (1-smoothing)*level.

    The level is recomputed from the given history on every call, which
    keeps forecasting a pure function; smoothing is the only parameter.
    """

    smoothing: float
    required_history: int = 1

    def forecast_one(self, history: np.ndarray) -> float:
        level = float(history[0])
        lam = self.smoothing
        for value in history[1:]:
            level = lam * float(value) + (1.0 - lam) * level
        return level


@dataclass(frozen=True)
class ExternalForecaster:
    """Replays forecasts from a table keyed by series position.

    Relies on histories being full series prefixes, so the next time
    index equals len(history).
    """

    forecasts: ExternalForecasts
    required_history: int = 1

    def forecast_one(self, history: np.ndarray) -> float:
        return self.forecasts.value_at(int(len(history)))


def fit_ar(series: TimeSeries, order: int) -> ARModel:
    """Least-squares autoregression of the given order.

    Minimizes the sum of squared one-step residuals. A rank-deficient
    design (constant series, too few rows) falls back to a ridge solve
    with penalty 1e-8 and is flagged degenerate.
    """
    if order < 1:
        raise ConfigError(f"AR order must be at least 1, got {order}")
    y = series.values
    if y.size < order + 1:
        raise DataError(
            f"series too short for AR({order}): need at least {order + 1} values, got {y.size}"
        )
    targets = y[order:]
    design = np.column_stack(
        [np.ones(targets.size)] + [y[order - k : y.size - k] for k in range(1, order + 1)]
    )
    solution, _, rank, _ = np.linalg.lstsq(design, targets, rcond=None)
    degenerate = rank < design.shape[1]
    if degenerate:
        gram = design.T @ design + AR_RIDGE_PENALTY * np.eye(design.shape[1])
        try:
            solution = np.linalg.solve(gram, design.T @ targets)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"AR({order}) fit failed even with ridge fallback: {exc}") from exc
    if not np.all(np.isfinite(solution)):
        raise NumericError(f"AR({order}) fit produced non-finite coefficients")
    coeffs = solution[1:].copy()
    coeffs.flags.writeable = False
    return ARModel(intercept=float(solution[0]), coefficients=coeffs, degenerate=degenerate)


def fit_forecaster(spec: ValueForecasterSpec, train: TimeSeries):
    """Fit the forecaster described by ``spec`` on the training split."""
    if spec.kind is ForecasterKind.NAIVE:
        return NaiveForecaster()
    if spec.kind is ForecasterKind.DRIFT:
        if len(train) < 2:
            raise DataError("drift forecaster needs at least 2 training values")
        return DriftForecaster(mean_step=float(np.mean(np.diff(train.values))))
    if spec.kind is ForecasterKind.AR:
        return fit_ar(train, spec.order)
    if spec.kind is ForecasterKind.SES:
        return SESForecaster(smoothing=spec.smoothing)
    if spec.kind is ForecasterKind.EXTERNAL:
        source = spec.source
        if not isinstance(source, ExternalForecasts):
            source = load_external_forecasts(source, series=None)
        return ExternalForecaster(forecasts=source)
    raise ConfigError(f"unknown forecaster kind: {spec.kind}")


def forecast_one(model, history) -> float:
    """One-step-ahead forecast given everything observed so far."""
    hist = np.asarray(history, dtype=float)
    if hist.ndim != 1 or hist.size < 1:
        raise DataError("history must be a non-empty 1-D sequence")
    if hist.size < model.required_history:
        raise DataError(
            f"history of length {hist.size} too short: model needs {model.required_history}"
        )
    return model.forecast_one(hist)


def walk_forward_forecasts(
    spec: ValueForecasterSpec,
    train: TimeSeries,
    test: TimeSeries,
    refit_each_step: bool = False,
) -> np.ndarray:
    """Forecast each test value from all values before it.

    The model is fit on the train split once (or refit on the growing
    history when refit_each_step is set) and then fed true values as
    they are revealed.
    """
    if len(test) < 1:
        raise DataError("test split is empty")
    values = concat(train, test).values
    n_train = len(train)
    if n_train < 1:
        raise DataError("train split is empty")
    fitted = fit_forecaster(spec, train)
    out = np.empty(len(test), dtype=float)
    for i in range(len(test)):
        t = n_train + i
        if refit_each_step and i > 0:
            fitted = fit_forecaster(spec, TimeSeries(values[:t]))
        out[i] = forecast_one(fitted, values[:t])
    return out
