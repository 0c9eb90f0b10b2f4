"""Direction-gated forecast adjustment.

Each step t has a base forecast y_hat and a predicted direction c for
the move from the previous value y_prev. The indicator checks whether
the forecast already moves the predicted way:

    indicator = 1  if (y_hat - y_prev) * c >= 0  else 0

(a forecast exactly at y_prev counts as agreeing with either direction).
When they agree the forecast is kept; when they disagree the forecast is
replaced by a minimal step of size alpha in the predicted direction:

    y_adj = indicator * y_hat + (1 - indicator) * (y_prev + c * alpha)

alpha is in absolute value units and must be positive. Each evaluated
step is also tagged with the direction outcome scenario:

    S1 forecast right, classifier right    S2 forecast right, classifier wrong
    S3 forecast wrong, classifier wrong    S4 forecast wrong, classifier right

measured against the realized direction; steps where either move is flat
are tagged UNDEFINED and excluded from scenario-conditional statistics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .classifiers import (
    ClassifierKind,
    DirectionTable,
    OracleTrendPredictor,
    TrendPredictorSpec,
    fit_classifier,
)
from .core import FLAT, TimeSeries, TrendDirection, concat, direction_of
from .errors import ConfigError, DataError
from .forecasters import ValueForecasterSpec, fit_forecaster, forecast_one
from .ingest import Dataset, FeatureTable, build_feature_table
from .metrics import EvalReport, evaluate_trace

__all__ = [
    "ForecastStep",
    "ForecastTrace",
    "Scenario",
    "ScenarioTally",
    "SweepEntry",
    "SweepResult",
    "TatsConfig",
    "TatsRun",
    "adjust",
    "classify_scenario",
    "evaluate_forecasts",
    "indicator",
    "run_tats",
    "sweep_alpha",
]


class Scenario(enum.IntEnum):
    UNDEFINED = 0
    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4


def indicator(y_hat: float, y_prev: float, direction: TrendDirection) -> int:
    """1 when the forecast's implied move agrees with the predicted direction.

    Agreement is (y_hat - y_prev) * direction >= 0, so a forecast equal
    to the previous value never triggers an adjustment.
    """
    return 1 if (y_hat - y_prev) * int(direction) >= 0.0 else 0


def adjust(y_hat: float, direction: TrendDirection, y_prev: float, alpha: float) -> float:
    """Direction-gated forecast: keep y_hat or step alpha the predicted way."""
    if not alpha > 0.0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    if indicator(y_hat, y_prev, direction):
        return y_hat
    return y_prev + int(direction) * alpha


def classify_scenario(
    y_prev: float, y_true: float, y_hat: float, direction: TrendDirection
) -> Scenario:
    """Tag a step by whether forecast and classifier called the move right."""
    actual = direction_of(y_true - y_prev)
    implied = direction_of(y_hat - y_prev)
    if actual is FLAT or implied is FLAT:
        return Scenario.UNDEFINED
    if implied is actual:
        return Scenario.S1 if direction is actual else Scenario.S2
    return Scenario.S4 if direction is actual else Scenario.S3


@dataclass(frozen=True)
class ForecastStep:
    """One evaluated step of a trace."""

    t: int
    y_prev: float
    y_true: float
    y_hat: float
    direction: TrendDirection
    indicator: int
    y_adj: float
    loss_base: float
    loss_adj: float
    scenario: Scenario


@dataclass(frozen=True, eq=False)
class ForecastTrace:
    """Aligned per-step arrays for one evaluated forecast sequence.

    y_adj holds the trace's final forecasts; for an unadjusted base
    trace it simply equals y_hat and loss_adj equals loss_base.
    """

    t: np.ndarray
    y_prev: np.ndarray
    y_true: np.ndarray
    y_hat: np.ndarray
    direction: np.ndarray
    indicator: np.ndarray
    y_adj: np.ndarray
    loss_base: np.ndarray
    loss_adj: np.ndarray
    scenario: np.ndarray

    def __post_init__(self) -> None:
        n = self.t.size
        for name in ("y_prev", "y_true", "y_hat", "direction", "indicator",
                     "y_adj", "loss_base", "loss_adj", "scenario"):
            if getattr(self, name).size != n:
                raise ConfigError(f"trace field {name} does not align with t")
        if n == 0:
            raise ConfigError("a trace must contain at least one step")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise ConfigError("trace time indices must be strictly increasing")

    def __len__(self) -> int:
        return int(self.t.size)

    def step_at(self, i: int) -> ForecastStep:
        return ForecastStep(
            t=int(self.t[i]),
            y_prev=float(self.y_prev[i]),
            y_true=float(self.y_true[i]),
            y_hat=float(self.y_hat[i]),
            direction=TrendDirection(int(self.direction[i])),
            indicator=int(self.indicator[i]),
            y_adj=float(self.y_adj[i]),
            loss_base=float(self.loss_base[i]),
            loss_adj=float(self.loss_adj[i]),
            scenario=Scenario(int(self.scenario[i])),
        )

    def steps(self) -> Iterator[ForecastStep]:
        for i in range(len(self)):
            yield self.step_at(i)


@dataclass(frozen=True)
class ScenarioTally:
    """Scenario counts over a trace; undefined steps are kept separate."""

    s1: int
    s2: int
    s3: int
    s4: int
    undefined: int

    @classmethod
    def from_trace(cls, trace: ForecastTrace) -> "ScenarioTally":
        counts = np.bincount(trace.scenario, minlength=5)
        return cls(
            s1=int(counts[Scenario.S1]),
            s2=int(counts[Scenario.S2]),
            s3=int(counts[Scenario.S3]),
            s4=int(counts[Scenario.S4]),
            undefined=int(counts[Scenario.UNDEFINED]),
        )

    @property
    def total(self) -> int:
        return self.s1 + self.s2 + self.s3 + self.s4 + self.undefined

    def to_dict(self) -> dict:
        return {
            "S1": self.s1, "S2": self.s2, "S3": self.s3, "S4": self.s4,
            "undefined": self.undefined,
        }


@dataclass(frozen=True)
class TatsRun:
    """Adjusted trace plus the unadjusted base trace over the same steps."""

    tats: ForecastTrace
    base: ForecastTrace

    @property
    def scenario_tally(self) -> ScenarioTally:
        return ScenarioTally.from_trace(self.tats)


@dataclass(frozen=True)
class TatsConfig:
    """Everything one adjusted run needs besides the data itself."""

    alpha: float
    value_forecaster: ValueForecasterSpec
    trend_predictor: TrendPredictorSpec
    n_lags: int = 2
    include_exogenous: bool = True
    exog_lag: int = 0
    refit_each_step: bool = False

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.n_lags < 1:
            raise ConfigError(f"n_lags must be at least 1, got {self.n_lags}")


def evaluate_forecasts(
    values: np.ndarray,
    start: int,
    forecasts: np.ndarray,
    directions: np.ndarray,
    alpha: float,
) -> TatsRun:
    """Apply the adjustment to precomputed forecasts and directions.

    values is the full series; forecasts[i] and directions[i] describe
    step start + i. This is the vectorized equivalent of calling
    :func:`indicator`, :func:`adjust`, and :func:`classify_scenario`
    once per step.
    """
    if not alpha > 0.0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    values = np.asarray(values, dtype=float)
    forecasts = np.asarray(forecasts, dtype=float)
    directions = np.asarray(directions, dtype=int)
    m = forecasts.size
    if m == 0:
        raise ConfigError("no steps to evaluate")
    if directions.size != m:
        raise ConfigError(f"{m} forecasts but {directions.size} directions")
    if not np.all(np.isin(directions, (1, -1))):
        raise DataError("directions must be +1 or -1")
    if start < 1 or start + m > values.size:
        raise ConfigError(
            f"evaluation range [{start}, {start + m}) outside series of length {values.size}"
        )
    t = np.arange(start, start + m)
    y_prev = values[t - 1]
    y_true = values[t]
    fdelta = forecasts - y_prev
    ind = (fdelta * directions >= 0.0).astype(int)
    y_adj = np.where(ind == 1, forecasts, y_prev + directions * alpha)
    loss_base = (forecasts - y_true) ** 2
    loss_adj = (y_adj - y_true) ** 2
    actual_sign = np.sign(y_true - y_prev).astype(int)
    implied_sign = np.sign(fdelta).astype(int)
    undefined = (actual_sign == 0) | (implied_sign == 0)
    scenario = np.where(
        undefined,
        int(Scenario.UNDEFINED),
        np.where(
            implied_sign == actual_sign,
            np.where(directions == actual_sign, int(Scenario.S1), int(Scenario.S2)),
            np.where(directions == actual_sign, int(Scenario.S4), int(Scenario.S3)),
        ),
    )
    tats = ForecastTrace(
        t=t, y_prev=y_prev, y_true=y_true, y_hat=forecasts, direction=directions,
        indicator=ind, y_adj=y_adj, loss_base=loss_base, loss_adj=loss_adj,
        scenario=scenario,
    )
    base = ForecastTrace(
        t=t, y_prev=y_prev, y_true=y_true, y_hat=forecasts, direction=directions,
        indicator=ind, y_adj=forecasts, loss_base=loss_base, loss_adj=loss_base,
        scenario=scenario,
    )
    return TatsRun(tats=tats, base=base)


def _prepare_run(
    config: TatsConfig,
    train: TimeSeries,
    test: TimeSeries,
    features: FeatureTable | None,
    eval_split: str,
) -> tuple[np.ndarray, int, np.ndarray, np.ndarray]:
    """Fit sub-models once and produce (values, start, forecasts, directions)."""
    if eval_split not in ("train", "test"):
        raise ConfigError(f"eval_split must be 'train' or 'test', got {eval_split!r}")
    full = concat(train, test)
    values = full.values
    n_train = len(train)
    fitted = fit_forecaster(config.value_forecaster, train)

    clf_spec = config.trend_predictor
    feature_based = clf_spec.kind not in (ClassifierKind.ORACLE, ClassifierKind.EXTERNAL)
    table = None
    classifier = None
    if feature_based:
        if features is None:
            features = build_feature_table(
                Dataset(target=full, exogenous={}), config.n_lags,
                config.include_exogenous, config.exog_lag,
            )
        table = features
        if n_train < 2:
            raise DataError("train split too short to label classifier rows")
        classifier = fit_classifier(clf_spec, table.training_matrix(n_train - 2))
    else:
        classifier = fit_classifier(clf_spec)

    if eval_split == "test":
        start = n_train
        stop = values.size
    else:
        start = max(1, int(fitted.required_history))
        if feature_based:
            start = max(start, int(table.row_time_index[0]) + 1)
        stop = n_train
        if start >= stop:
            raise DataError(
                f"train split of length {n_train} leaves no in-sample steps "
                f"(first evaluable index {start})"
            )
    eval_t = np.arange(start, stop)
    if eval_t.size == 0:
        raise DataError("no steps to evaluate")
    if start < int(fitted.required_history):
        raise DataError(
            f"history at index {start} shorter than the forecaster needs "
            f"({fitted.required_history})"
        )

    forecasts = np.empty(eval_t.size, dtype=float)
    current = fitted
    for i, t in enumerate(eval_t):
        if config.refit_each_step and t > start:
            current = fit_forecaster(config.value_forecaster, TimeSeries(values[:t]))
        forecasts[i] = forecast_one(current, values[:t])

    if isinstance(classifier, OracleTrendPredictor):
        truths = np.sign(values[eval_t] - values[eval_t - 1]).astype(int)
        directions = classifier.draw_many(truths)
    elif isinstance(classifier, DirectionTable):
        directions = np.array(
            [int(classifier.direction_at(int(t))) for t in eval_t], dtype=int
        )
    else:
        rows = np.vstack([table.row_at(int(t) - 1) for t in eval_t])
        directions = classifier.predict_matrix(rows)
    return values, start, forecasts, directions


def run_tats(
    config: TatsConfig,
    train: TimeSeries,
    test: TimeSeries,
    features: FeatureTable | None = None,
    eval_split: str = "test",
) -> TatsRun:
    """Fit on the train split and evaluate the adjustment walk-forward.

    By default evaluation covers the test split, with true values
    appended to the history as they are revealed. eval_split="train"
    instead evaluates in-sample over the train split (used for plug-in
    theory estimates); sub-model parameters are fit on the full train
    split either way.

    ``features`` supplies classifier rows built from a richer dataset
    (exogenous columns); without it, rows are built from target lags.
    """
    values, start, forecasts, directions = _prepare_run(config, train, test, features, eval_split)
    return evaluate_forecasts(values, start, forecasts, directions, config.alpha)


@dataclass(frozen=True)
class SweepEntry:
    alpha: float
    report: EvalReport
    tally: ScenarioTally


@dataclass(frozen=True)
class SweepResult:
    base_report: EvalReport
    entries: tuple[SweepEntry, ...]


def sweep_alpha(
    config: TatsConfig,
    alphas,
    train: TimeSeries,
    test: TimeSeries,
    features: FeatureTable | None = None,
    eval_split: str = "test",
) -> SweepResult:
    """Evaluate the same run at several alphas, fitting sub-models once.

    Forecasts and predicted directions do not depend on alpha, so they
    are computed once and only the adjustment arithmetic is repeated.
    Entries come back in the given alpha order.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ConfigError("alpha sweep needs at least one alpha")
    for a in alphas:
        if not a > 0.0:
            raise ConfigError(f"alpha must be positive, got {a}")
    values, start, forecasts, directions = _prepare_run(config, train, test, features, eval_split)
    base_report = None
    entries = []
    for a in alphas:
        run = evaluate_forecasts(values, start, forecasts, directions, a)
        if base_report is None:
            base_report = evaluate_trace(run.base)
        entries.append(
            SweepEntry(
                alpha=a,
                report=evaluate_trace(run.tats, base=base_report),
                tally=run.scenario_tally,
            )
        )
    return SweepResult(base_report=base_report, entries=tuple(entries))
