"""Trend direction predictors: fitted classifiers, a dial-in oracle, and
externally supplied direction tables.

All decision rules break ties toward UP so results are reproducible:
logistic scores use >= 0.5, nearest-neighbor and majority votes use
count(UP) >= count(DOWN). The oracle consumes exactly one uniform draw
per prediction, which keeps scalar and vectorized paths on the same
random stream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import FLAT, Flat, TrendDirection
from .errors import ConfigError, DataError
from .ingest import FeatureMatrix, load_external_directions

__all__ = [
    "ClassifierKind",
    "DirectionTable",
    "GaussianNBClassifier",
    "KNNClassifier",
    "LogisticClassifier",
    "MajorityClassifier",
    "OracleTrendPredictor",
    "TrendPredictorSpec",
    "classification_accuracy",
    "cross_val_accuracy",
    "fit_classifier",
    "oracle_predict",
    "predict_direction",
]

NB_VARIANCE_FLOOR = 1e-9


class ClassifierKind(enum.Enum):
    MAJORITY = "majority"
    LOGISTIC = "logistic"
    GAUSSIAN_NB = "gaussian_nb"
    KNN = "knn"
    ORACLE = "oracle"
    EXTERNAL = "external"


@dataclass(frozen=True)
class TrendPredictorSpec:
    """Declarative classifier choice; parameters must match the kind."""

    kind: ClassifierKind
    k: int | None = None
    learning_rate: float | None = None
    iterations: int | None = None
    accuracy: float | None = None
    seed: int | None = None
    source: str | Path | dict | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ClassifierKind):
            try:
                object.__setattr__(self, "kind", ClassifierKind(self.kind))
            except ValueError:
                raise ConfigError(f"unknown classifier kind: {self.kind!r}") from None
        allowed = {
            ClassifierKind.MAJORITY: set(),
            ClassifierKind.LOGISTIC: {"learning_rate", "iterations"},
            ClassifierKind.GAUSSIAN_NB: set(),
            ClassifierKind.KNN: {"k"},
            ClassifierKind.ORACLE: {"accuracy", "seed"},
            ClassifierKind.EXTERNAL: {"source"},
        }[self.kind]
        for name in ("k", "learning_rate", "iterations", "accuracy", "seed", "source"):
            if getattr(self, name) is not None and name not in allowed:
                raise ConfigError(f"{name} is not a parameter of the {self.kind.value} classifier")
        if self.kind is ClassifierKind.KNN:
            if self.k is None or self.k < 1:
                raise ConfigError(f"KNN needs k >= 1, got {self.k}")
        elif self.kind is ClassifierKind.LOGISTIC:
            if self.learning_rate is None or not self.learning_rate > 0:
                raise ConfigError(f"logistic learning rate must be positive, got {self.learning_rate}")
            if self.iterations is None or self.iterations < 1:
                raise ConfigError(f"logistic iteration count must be >= 1, got {self.iterations}")
        elif self.kind is ClassifierKind.ORACLE:
            if self.accuracy is None or not 0.0 <= self.accuracy <= 1.0:
                raise ConfigError(f"oracle accuracy must lie in [0, 1], got {self.accuracy}")
            if self.seed is None:
                raise ConfigError("oracle classifier needs a seed")
        elif self.kind is ClassifierKind.EXTERNAL:
            if self.source is None:
                raise ConfigError("external classifier needs a source file or table")

    @classmethod
    def majority(cls) -> "TrendPredictorSpec":
        return cls(ClassifierKind.MAJORITY)

    @classmethod
    def logistic(cls, learning_rate: float = 0.1, iterations: int = 1000) -> "TrendPredictorSpec":
        return cls(ClassifierKind.LOGISTIC, learning_rate=learning_rate, iterations=iterations)

    @classmethod
    def gaussian_nb(cls) -> "TrendPredictorSpec":
        return cls(ClassifierKind.GAUSSIAN_NB)

    @classmethod
    def knn(cls, k: int = 5) -> "TrendPredictorSpec":
        return cls(ClassifierKind.KNN, k=k)

    @classmethod
    def oracle(cls, accuracy: float, seed: int = 0) -> "TrendPredictorSpec":
        return cls(ClassifierKind.ORACLE, accuracy=accuracy, seed=seed)

    @classmethod
    def external(cls, source: str | Path | dict) -> "TrendPredictorSpec":
        return cls(ClassifierKind.EXTERNAL, source=source)


def _check_row(row, n_features: int) -> np.ndarray:
    arr = np.asarray(row, dtype=float)
    if arr.ndim != 1 or arr.size != n_features:
        raise ConfigError(f"feature row has shape {arr.shape}, model expects {n_features} features")
    return arr


@dataclass(frozen=True)
class MajorityClassifier:
    """Always predicts the most frequent training direction (tie: UP)."""

    direction: TrendDirection
    n_features: int

    def predict_matrix(self, rows: np.ndarray) -> np.ndarray:
        return np.full(rows.shape[0], int(self.direction), dtype=int)

    def predict_row(self, row) -> TrendDirection:
        _check_row(row, self.n_features)
        return self.direction


@dataclass(frozen=True)
class LogisticClassifier:
    """Logistic regression trained by full-batch gradient descent.

    Features are standardized with training statistics; weights start at
    zero, so with no informative gradient the model predicts UP (score
    exactly 0.5). loss_history holds the mean log-loss before the first
    update and after each one.
    """

    weights: np.ndarray
    bias: float
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    loss_history: tuple[float, ...]

    @property
    def n_features(self) -> int:
        return int(self.weights.size)

    def _scores(self, rows: np.ndarray) -> np.ndarray:
        standardized = (rows - self.feature_mean) / self.feature_scale
        return standardized @ self.weights + self.bias

    def predict_matrix(self, rows: np.ndarray) -> np.ndarray:
        return np.where(self._scores(rows) >= 0.0, 1, -1)

    def predict_row(self, row) -> TrendDirection:
        arr = _check_row(row, self.n_features)
        return TrendDirection(int(self.predict_matrix(arr[None, :])[0]))


@dataclass(frozen=True)
class GaussianNBClassifier:
    """Gaussian naive Bayes over feature columns (variance floor 1e-9)."""

    class_values: np.ndarray
    log_priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    @property
    def n_features(self) -> int:
        return int(self.means.shape[1])

    def predict_matrix(self, rows: np.ndarray) -> np.ndarray:
        # log N(x; mu, var) summed over features, one column per class
        scores = np.empty((rows.shape[0], self.class_values.size))
        for j in range(self.class_values.size):
            gap = rows - self.means[j]
            scores[:, j] = self.log_priors[j] - 0.5 * np.sum(
                np.log(2.0 * np.pi * self.variances[j]) + gap**2 / self.variances[j], axis=1
            )
        up = int(np.flatnonzero(self.class_values == 1)[0])
        down = int(np.flatnonzero(self.class_values == -1)[0])
        return np.where(scores[:, up] >= scores[:, down], 1, -1)

    def predict_row(self, row) -> TrendDirection:
        arr = _check_row(row, self.n_features)
        return TrendDirection(int(self.predict_matrix(arr[None, :])[0]))


@dataclass(frozen=True)
class KNNClassifier:
    """k-nearest-neighbor direction vote (Euclidean distance, tie: UP)."""

    rows: np.ndarray
    labels: np.ndarray
    k: int

    @property
    def n_features(self) -> int:
        return int(self.rows.shape[1])

    def predict_matrix(self, rows: np.ndarray) -> np.ndarray:
        out = np.empty(rows.shape[0], dtype=int)
        for i in range(rows.shape[0]):
            distances = np.sqrt(np.sum((self.rows - rows[i]) ** 2, axis=1))
            nearest = np.argsort(distances, kind="stable")[: self.k]
            votes_up = int(np.count_nonzero(self.labels[nearest] == 1))
            out[i] = 1 if votes_up >= self.k - votes_up else -1
        return out

    def predict_row(self, row) -> TrendDirection:
        arr = _check_row(row, self.n_features)
        return TrendDirection(int(self.predict_matrix(arr[None, :])[0]))


@dataclass(frozen=True)
class OracleTrendPredictor:
    """Emits the true direction with a dialed-in probability.

    Consumes one uniform draw per prediction. For a FLAT truth there is
    no correct answer; the same draw then picks UP or DOWN evenly.
    """

    accuracy: float
    rng: np.random.Generator

    def draw(self, truth: TrendDirection | Flat) -> TrendDirection:
        u = float(self.rng.random())
        if truth is FLAT:
            return TrendDirection.UP if u < 0.5 else TrendDirection.DOWN
        return truth if u < self.accuracy else truth.flipped()

    def draw_many(self, truths: np.ndarray) -> np.ndarray:
        """Vectorized draws for +1/-1/0 truth signs (0 meaning flat)."""
        u = self.rng.random(truths.size)
        correct = np.where(truths == 0, u < 0.5, u < self.accuracy)
        coin = np.where(u < 0.5, 1, -1)
        flipped = np.where(correct, truths, -truths)
        return np.where(truths == 0, coin, flipped).astype(int)


@dataclass(frozen=True)
class DirectionTable:
    """Directions keyed by series position (externally supplied)."""

    by_index: dict[int, TrendDirection]

    def direction_at(self, time_index: int) -> TrendDirection:
        try:
            return self.by_index[time_index]
        except KeyError:
            raise DataError(f"external directions missing time index {time_index}") from None


def oracle_predict(truth: TrendDirection, accuracy: float, rng: np.random.Generator) -> TrendDirection:
    """One oracle draw: the truth with probability ``accuracy``.

    The truth must be a strict direction; handling of flat moves is the
    caller's policy decision.
    """
    if not isinstance(truth, TrendDirection):
        raise ConfigError(f"oracle truth must be a strict direction, got {truth!r}")
    if not 0.0 <= accuracy <= 1.0:
        raise ConfigError(f"oracle accuracy must lie in [0, 1], got {accuracy}")
    return truth if float(rng.random()) < accuracy else truth.flipped()


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _fit_logistic(features: FeatureMatrix, learning_rate: float, iterations: int) -> LogisticClassifier:
    rows = features.rows.astype(float)
    targets = (features.labels == 1).astype(float)
    mean = rows.mean(axis=0)
    scale = rows.std(axis=0)
    scale = np.where(scale < 1e-12, 1.0, scale)
    X = (rows - mean) / scale
    m, d = X.shape
    w = np.zeros(d)
    b = 0.0
    signs = np.where(features.labels == 1, 1.0, -1.0)
    losses = []
    for _ in range(iterations):
        z = X @ w + b
        losses.append(float(np.mean(np.logaddexp(0.0, -signs * z))))
        p = _sigmoid(z)
        gap = p - targets
        w = w - learning_rate * (X.T @ gap) / m
        b = b - learning_rate * float(np.mean(gap))
    z = X @ w + b
    losses.append(float(np.mean(np.logaddexp(0.0, -signs * z))))
    w.flags.writeable = False
    return LogisticClassifier(
        weights=w, bias=b, feature_mean=mean, feature_scale=scale, loss_history=tuple(losses)
    )


def _fit_gaussian_nb(features: FeatureMatrix) -> GaussianNBClassifier:
    classes = np.array([1, -1], dtype=int)
    means = np.empty((2, features.rows.shape[1]))
    variances = np.empty_like(means)
    log_priors = np.empty(2)
    for j, c in enumerate(classes):
        mask = features.labels == c
        count = int(np.count_nonzero(mask))
        if count == 0:
            raise DataError("gaussian naive Bayes needs both directions in the training set")
        sub = features.rows[mask]
        means[j] = sub.mean(axis=0)
        variances[j] = np.maximum(sub.var(axis=0), NB_VARIANCE_FLOOR)
        log_priors[j] = np.log(count / features.labels.size)
    return GaussianNBClassifier(
        class_values=classes, log_priors=log_priors, means=means, variances=variances
    )


def fit_classifier(spec: TrendPredictorSpec, features: FeatureMatrix | None = None):
    """Build the predictor described by ``spec``.

    Feature-based kinds require a training FeatureMatrix; the oracle and
    external tables do not.
    """
    if spec.kind is ClassifierKind.ORACLE:
        return OracleTrendPredictor(accuracy=spec.accuracy, rng=np.random.default_rng(spec.seed))
    if spec.kind is ClassifierKind.EXTERNAL:
        source = spec.source
        if not isinstance(source, dict):
            source = load_external_directions(source)
        return DirectionTable(by_index=dict(source))
    if features is None:
        raise ConfigError(f"{spec.kind.value} classifier needs a training feature matrix")
    if len(features) == 0:
        raise DataError("training feature matrix is empty")
    if spec.kind is ClassifierKind.MAJORITY:
        ups = int(np.count_nonzero(features.labels == 1))
        direction = TrendDirection.UP if ups >= len(features) - ups else TrendDirection.DOWN
        return MajorityClassifier(direction=direction, n_features=features.rows.shape[1])
    if spec.kind is ClassifierKind.LOGISTIC:
        if np.unique(features.labels).size < 2:
            raise DataError("logistic regression needs both directions in the training set")
        return _fit_logistic(features, spec.learning_rate, spec.iterations)
    if spec.kind is ClassifierKind.GAUSSIAN_NB:
        return _fit_gaussian_nb(features)
    if spec.kind is ClassifierKind.KNN:
        if spec.k > len(features):
            raise ConfigError(f"KNN k={spec.k} exceeds the {len(features)} training rows")
        return KNNClassifier(rows=features.rows.astype(float), labels=features.labels, k=spec.k)
    raise ConfigError(f"unknown classifier kind: {spec.kind}")


def predict_direction(predictor, feature_row) -> TrendDirection:
    """Predict the next move's direction from one feature row."""
    if isinstance(predictor, (OracleTrendPredictor, DirectionTable)):
        raise ConfigError(f"{type(predictor).__name__} does not consume feature rows")
    return predictor.predict_row(feature_row)


def classification_accuracy(predicted, actual) -> float:
    """Fraction of exact direction matches between two aligned sequences."""
    p = np.asarray([int(d) for d in predicted], dtype=int)
    a = np.asarray([int(d) for d in actual], dtype=int)
    if p.size != a.size:
        raise ConfigError(f"prediction and truth lengths differ: {p.size} vs {a.size}")
    if p.size == 0:
        raise ConfigError("accuracy needs at least one prediction")
    return float(np.count_nonzero(p == a) / p.size)


def cross_val_accuracy(spec: TrendPredictorSpec, features: FeatureMatrix, n_folds: int = 5) -> float:
    """Expanding-window cross-validated accuracy.

    Rows are cut into n_folds contiguous chronological blocks; each block
    after the first is predicted by a model fit on all earlier blocks,
    so no fold ever trains on data from its own future.
    """
    if n_folds < 2:
        raise ConfigError(f"cross-validation needs at least 2 folds, got {n_folds}")
    if len(features) < n_folds:
        raise DataError(f"{len(features)} rows cannot form {n_folds} folds")
    blocks = np.array_split(np.arange(len(features)), n_folds)
    scores = []
    for i in range(1, n_folds):
        train_idx = np.concatenate(blocks[:i])
        val_idx = blocks[i]
        train = FeatureMatrix(
            rows=features.rows[train_idx],
            labels=features.labels[train_idx],
            row_time_index=features.row_time_index[train_idx],
            n_flat_dropped=0,
        )
        fitted = fit_classifier(spec, train)
        predicted = fitted.predict_matrix(features.rows[val_idx])
        scores.append(classification_accuracy(predicted, features.labels[val_idx]))
    return float(np.mean(scores))
