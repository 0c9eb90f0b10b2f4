"""Trend-adjusted time series forecasting.

A base forecaster produces a one-step-ahead value; a direction
classifier predicts whether the series moves up or down next. When the
forecast's implied direction disagrees with the classifier, the forecast
is replaced by a minimal step of size alpha in the predicted direction.
If the classifier calls directions more reliably than the forecaster
does, the adjustment reduces expected squared error; :mod:`tats.theory`
quantifies the expected reduction and :mod:`tats.montecarlo` checks it
empirically.
"""

from .classifiers import (
    ClassifierKind,
    DirectionTable,
    GaussianNBClassifier,
    KNNClassifier,
    LogisticClassifier,
    MajorityClassifier,
    OracleTrendPredictor,
    TrendPredictorSpec,
    classification_accuracy,
    cross_val_accuracy,
    fit_classifier,
    oracle_predict,
    predict_direction,
)
from .core import (
    FLAT,
    Flat,
    TimeSeries,
    TrendDirection,
    chronological_split,
    concat,
    diff,
    direction_of,
)
from .engine import (
    ForecastStep,
    ForecastTrace,
    Scenario,
    ScenarioTally,
    SweepEntry,
    SweepResult,
    TatsConfig,
    TatsRun,
    adjust,
    classify_scenario,
    evaluate_forecasts,
    indicator,
    run_tats,
    sweep_alpha,
)
from .errors import ConfigError, DataError, NumericError, TatsError
from .forecasters import (
    ARModel,
    ForecasterKind,
    ValueForecasterSpec,
    fit_ar,
    fit_forecaster,
    forecast_one,
    walk_forward_forecasts,
)
from .ingest import (
    Dataset,
    ExternalForecasts,
    FeatureMatrix,
    FeatureTable,
    build_feature_table,
    build_features,
    load_csv,
    load_external_directions,
    load_external_forecasts,
)
from .metrics import (
    EvalReport,
    TrendAwareLossConfig,
    diff_rdiff,
    evaluate_trace,
    mae,
    mape,
    mse,
    td_accuracy,
    trend_aware_loss,
)
from .montecarlo import (
    SimConfig,
    SimulationReport,
    TrialResult,
    gen_random_walk,
    synthetic_forecaster,
    validate_prop1,
)
from .theory import (
    TheoryEstimate,
    abs_gap_from_trace,
    estimate_theory,
    expected_loss_change,
    lower_bound,
    scenario_probabilities,
)

__version__ = "0.1.0"

__all__ = [
    "ARModel",
    "ClassifierKind",
    "ConfigError",
    "DataError",
    "Dataset",
    "DirectionTable",
    "EvalReport",
    "ExternalForecasts",
    "FLAT",
    "FeatureMatrix",
    "FeatureTable",
    "Flat",
    "ForecastStep",
    "ForecastTrace",
    "ForecasterKind",
    "GaussianNBClassifier",
    "KNNClassifier",
    "LogisticClassifier",
    "MajorityClassifier",
    "NumericError",
    "OracleTrendPredictor",
    "Scenario",
    "ScenarioTally",
    "SimConfig",
    "SimulationReport",
    "SweepEntry",
    "SweepResult",
    "TatsConfig",
    "TatsError",
    "TatsRun",
    "TheoryEstimate",
    "TimeSeries",
    "TrendAwareLossConfig",
    "TrendDirection",
    "TrendPredictorSpec",
    "TrialResult",
    "ValueForecasterSpec",
    "abs_gap_from_trace",
    "adjust",
    "build_feature_table",
    "build_features",
    "chronological_split",
    "classification_accuracy",
    "classify_scenario",
    "concat",
    "cross_val_accuracy",
    "diff",
    "diff_rdiff",
    "direction_of",
    "estimate_theory",
    "evaluate_forecasts",
    "evaluate_trace",
    "expected_loss_change",
    "fit_ar",
    "fit_classifier",
    "fit_forecaster",
    "forecast_one",
    "gen_random_walk",
    "indicator",
    "load_csv",
    "load_external_directions",
    "load_external_forecasts",
    "lower_bound",
    "mae",
    "mape",
    "mse",
    "oracle_predict",
    "predict_direction",
    "run_tats",
    "scenario_probabilities",
    "sweep_alpha",
    "synthetic_forecaster",
    "td_accuracy",
    "trend_aware_loss",
    "validate_prop1",
    "walk_forward_forecasts",
]
