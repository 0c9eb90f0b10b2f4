"""Monte-Carlo check of the expected-reduction guarantee.

Each trial draws a seeded random walk, builds a synthetic forecaster
with a dialed-in directional accuracy p_dt, and lets an oracle
classifier with accuracy p_db gate the adjustment. The forecast error
is proportional to the step size: a directionally correct step forecasts
y_prev + u*delta and a wrong one y_prev - u*delta (error scale u), so
correct-direction steps always beat standing still and wrong ones always
lose to it. Under that construction every S4 step strictly reduces the
adjusted loss and every S2 step strictly increases it (for u in (0, 2)
and alpha much smaller than typical steps), which makes the reduction's
sign track the scenario-probability imbalance sharply.

Walk, forecaster, and classifier randomness come from independent
sub-streams spawned per trial from one root seed, so results are
reproducible and independent of scheduling; aggregation uses compensated
summation in a fixed trial order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import TimeSeries
from .engine import Scenario, evaluate_forecasts
from .errors import ConfigError, NumericError
from .theory import lower_bound

__all__ = [
    "SimConfig",
    "SimulationReport",
    "TrialResult",
    "gen_random_walk",
    "synthetic_forecaster",
    "validate_prop1",
]

WALK_START = 100.0
_MAX_REGEN_ATTEMPTS = 100


@dataclass(frozen=True)
class SimConfig:
    """Scenario for one validation run; defaults are the canonical check."""

    n_steps: int = 2000
    n_trials: int = 200
    drift: float = 0.0
    volatility: float = 1.0
    p_dt: float = 0.52
    p_db: float = 0.75
    error_scale: float = 0.5
    alpha: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_steps < 10:
            raise ConfigError(f"n_steps must be at least 10, got {self.n_steps}")
        if self.n_trials < 1:
            raise ConfigError(f"n_trials must be at least 1, got {self.n_trials}")
        if not self.volatility > 0.0:
            raise ConfigError(f"volatility must be positive, got {self.volatility}")
        if not math.isfinite(self.drift):
            raise ConfigError(f"drift must be finite, got {self.drift}")
        for name in ("p_dt", "p_db"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name} must lie strictly inside (0, 1), got {value}")
        if not 0.0 < self.error_scale < 2.0:
            raise ConfigError(
                f"error_scale must lie in (0, 2) for sharp scenario signs, got {self.error_scale}"
            )
        if not self.alpha > 0.0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")


def gen_random_walk(
    n: int,
    drift: float,
    volatility: float,
    seed: int | np.random.SeedSequence | np.random.Generator,
) -> TimeSeries:
    """Gaussian random walk of length n starting at 100."""
    if n < 2:
        raise ConfigError(f"walk length must be at least 2, got {n}")
    if not volatility > 0.0:
        raise ConfigError(f"volatility must be positive, got {volatility}")
    rng = np.random.default_rng(seed)
    steps = drift + volatility * rng.standard_normal(n - 1)
    values = WALK_START + np.concatenate([[0.0], np.cumsum(steps)])
    return TimeSeries(values)


def synthetic_forecaster(
    series: TimeSeries,
    p_dt: float,
    error_scale: float,
    seed: int | np.random.SeedSequence | np.random.Generator,
) -> np.ndarray:
    """Forecasts with dialed-in directional accuracy and proportional error.

    For each step t >= 1 with delta = y_t - y_{t-1}, the forecast is
    y_{t-1} + error_scale*delta with probability p_dt (direction right)
    and y_{t-1} - error_scale*delta otherwise (direction wrong). The
    series must have no flat steps; regenerate it if it does.
    """
    if not 0.0 < p_dt < 1.0:
        raise ConfigError(f"p_dt must lie strictly inside (0, 1), got {p_dt}")
    if not error_scale > 0.0:
        raise ConfigError(f"error_scale must be positive, got {error_scale}")
    deltas = np.diff(series.values)
    if np.any(deltas == 0.0):
        bad = int(np.flatnonzero(deltas == 0.0)[0])
        raise NumericError(
            f"flat step at index {bad + 1}: directional accuracy is undefined there; "
            "regenerate or perturb the series"
        )
    rng = np.random.default_rng(seed)
    correct = rng.random(deltas.size) < p_dt
    signed = np.where(correct, error_scale * deltas, -error_scale * deltas)
    return series.values[:-1] + signed


@dataclass(frozen=True)
class TrialResult:
    mse_base: float
    mse_tats: float

    @property
    def reduction(self) -> float:
        return self.mse_base - self.mse_tats


@dataclass(frozen=True)
class SimulationReport:
    """Aggregated outcome of a validation run."""

    config: SimConfig
    trials: tuple[TrialResult, ...]
    mean_reduction: float
    std_error: float
    positive_fraction: float
    realized_p_db: float
    realized_p_dt: float
    mean_abs_gap: float
    theoretical_bound: float
    scenario_counts: dict[str, int]
    n_steps_total: int

    @property
    def bound_satisfied(self) -> bool:
        """Mean reduction at least the plug-in bound, within 3 standard errors."""
        return self.mean_reduction >= self.theoretical_bound - 3.0 * self.std_error

    def to_dict(self) -> dict:
        return {
            "config": {
                "n_steps": self.config.n_steps,
                "n_trials": self.config.n_trials,
                "drift": self.config.drift,
                "volatility": self.config.volatility,
                "p_dt": self.config.p_dt,
                "p_db": self.config.p_db,
                "error_scale": self.config.error_scale,
                "alpha": self.config.alpha,
                "seed": self.config.seed,
            },
            "mean_reduction": self.mean_reduction,
            "std_error": self.std_error,
            "positive_fraction": self.positive_fraction,
            "realized_p_db": self.realized_p_db,
            "realized_p_dt": self.realized_p_dt,
            "mean_abs_gap": self.mean_abs_gap,
            "theoretical_bound": self.theoretical_bound,
            "bound_satisfied": self.bound_satisfied,
            "scenario_counts": dict(self.scenario_counts),
            "n_steps_total": self.n_steps_total,
        }


def _run_trial(config: SimConfig, child: np.random.SeedSequence):
    """One trial; returns sums so aggregation stays order-deterministic."""
    series = None
    for _ in range(_MAX_REGEN_ATTEMPTS):
        walk_ss, forecaster_ss, classifier_ss = child.spawn(3)
        candidate = gen_random_walk(config.n_steps + 1, config.drift, config.volatility, walk_ss)
        if np.all(np.diff(candidate.values) != 0.0):
            series = candidate
            break
    if series is None:
        raise NumericError("could not generate a walk without flat steps")
    forecasts = synthetic_forecaster(series, config.p_dt, config.error_scale, forecaster_ss)
    truths = np.sign(np.diff(series.values)).astype(int)
    rng = np.random.default_rng(classifier_ss)
    u = rng.random(truths.size)
    directions = np.where(u < config.p_db, truths, -truths)
    run = evaluate_forecasts(series.values, 1, forecasts, directions, config.alpha)
    deltas = run.base.y_true - run.base.y_prev
    mse_base = float(np.mean(run.base.loss_base))
    mse_tats = float(np.mean(run.tats.loss_adj))
    correct_clf = int(np.count_nonzero(directions == truths))
    correct_fc = int(np.count_nonzero((forecasts - run.base.y_prev) * deltas > 0.0))
    abs_gap_sum = float(np.sum(np.abs(run.base.loss_base - deltas**2)))
    counts = np.bincount(run.tats.scenario, minlength=5)
    return mse_base, mse_tats, correct_clf, correct_fc, abs_gap_sum, counts


def validate_prop1(config: SimConfig, n_jobs: int = 1) -> SimulationReport:
    """Run the trials and compare realized reduction to the plug-in bound.

    Each trial's walk, forecaster draws, and classifier draws use
    independent sub-streams spawned from config.seed, so a trial's
    outcome does not depend on how trials are scheduled. n_jobs > 1
    distributes trials across processes; results are identical.
    """
    if n_jobs < 1:
        raise ConfigError(f"n_jobs must be at least 1, got {n_jobs}")
    children = np.random.SeedSequence(config.seed).spawn(config.n_trials)
    if n_jobs == 1 or config.n_trials == 1:
        raw = [_run_trial(config, child) for child in children]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            raw = list(pool.map(_run_trial, [config] * config.n_trials, children))

    trials = tuple(TrialResult(mse_base=r[0], mse_tats=r[1]) for r in raw)
    reductions = [t.reduction for t in trials]
    n = len(reductions)
    mean_reduction = math.fsum(reductions) / n
    if n > 1:
        variance = math.fsum((r - mean_reduction) ** 2 for r in reductions) / (n - 1)
        std_error = math.sqrt(variance / n)
    else:
        std_error = 0.0
    total_steps = config.n_steps * config.n_trials
    correct_clf = sum(r[2] for r in raw)
    correct_fc = sum(r[3] for r in raw)
    abs_gap = math.fsum(r[4] for r in raw) / total_steps
    counts = np.sum([r[5] for r in raw], axis=0)
    realized_p_db = correct_clf / total_steps
    realized_p_dt = correct_fc / total_steps
    return SimulationReport(
        config=config,
        trials=trials,
        mean_reduction=mean_reduction,
        std_error=std_error,
        positive_fraction=sum(1 for r in reductions if r > 0.0) / n,
        realized_p_db=realized_p_db,
        realized_p_dt=realized_p_dt,
        mean_abs_gap=abs_gap,
        theoretical_bound=lower_bound(abs_gap, realized_p_db, realized_p_dt),
        scenario_counts={
            "S1": int(counts[Scenario.S1]),
            "S2": int(counts[Scenario.S2]),
            "S3": int(counts[Scenario.S3]),
            "S4": int(counts[Scenario.S4]),
            "undefined": int(counts[Scenario.UNDEFINED]),
        },
        n_steps_total=total_steps,
    )
