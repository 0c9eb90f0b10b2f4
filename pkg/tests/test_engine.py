import numpy as np
import pytest

from tats import (
    ConfigError,
    DataError,
    Scenario,
    TatsConfig,
    TimeSeries,
    TrendDirection,
    TrendPredictorSpec,
    ValueForecasterSpec,
    adjust,
    chronological_split,
    indicator,
    run_tats,
    sweep_alpha,
)
from tats.engine import ScenarioTally, classify_scenario, evaluate_forecasts
from tats.metrics import evaluate_trace
from tats.forecasters import walk_forward_forecasts

seed = 707
UP, DOWN = TrendDirection.UP, TrendDirection.DOWN


def test_indicator_agreement():
    assert indicator(y_hat=8.0, y_prev=7.0, direction=UP) == 1
    assert indicator(y_hat=2.0, y_prev=7.0, direction=DOWN) == 1
    assert indicator(y_hat=8.0, y_prev=7.0, direction=DOWN) == 0
    assert indicator(y_hat=2.0, y_prev=7.0, direction=UP) == 0


def test_indicator_zero_move_counts_as_agreement():
    assert indicator(y_hat=7.0, y_prev=7.0, direction=UP) == 1
    assert indicator(y_hat=7.0, y_prev=7.0, direction=DOWN) == 1


def test_adjust_passthrough_when_agreeing():
    assert adjust(y_hat=8.0, direction=UP, y_prev=7.0, alpha=2.0) == 8.0


def test_adjust_overrides_when_disagreeing():
    assert adjust(y_hat=8.0, direction=DOWN, y_prev=7.0, alpha=2.0) == 5.0
    assert adjust(y_hat=2.0, direction=UP, y_prev=7.0, alpha=2.0) == 9.0


def test_adjust_rejects_nonpositive_alpha():
    with pytest.raises(ConfigError):
        adjust(y_hat=8.0, direction=UP, y_prev=7.0, alpha=0.0)
    with pytest.raises(ConfigError):
        adjust(y_hat=8.0, direction=UP, y_prev=7.0, alpha=-1.0)


def test_adjust_override_properties_exact():
    # dyadic grid keeps y_prev + alpha exact, so the step size is exactly alpha
    rng = np.random.default_rng(seed)
    for _ in range(2000):
        y_prev = float(rng.integers(-4000, 4000)) / 8.0
        y_hat = float(rng.integers(-4000, 4000)) / 8.0
        alpha = float(rng.integers(1, 800)) / 8.0
        d = UP if rng.random() < 0.5 else DOWN
        out = adjust(y_hat=y_hat, direction=d, y_prev=y_prev, alpha=alpha)
        if indicator(y_hat, y_prev, d) == 1:
            assert out == y_hat
        else:
            assert abs(out - y_prev) == alpha
            assert (out - y_prev) * int(d) > 0


SCENARIO_CASES = [
    # (y_prev, y_true, y_hat, direction, expected)
    (10.0, 12.0, 11.0, UP, Scenario.S1),  # both right
    (10.0, 12.0, 11.0, DOWN, Scenario.S2),  # forecast right, trend wrong
    (10.0, 12.0, 9.0, DOWN, Scenario.S3),  # both wrong
    (10.0, 12.0, 9.0, UP, Scenario.S4),  # forecast wrong, trend right
    (10.0, 8.0, 9.0, DOWN, Scenario.S1),
    (10.0, 8.0, 9.0, UP, Scenario.S2),
    (10.0, 8.0, 11.0, UP, Scenario.S3),
    (10.0, 8.0, 11.0, DOWN, Scenario.S4),
    (10.0, 10.0, 11.0, UP, Scenario.UNDEFINED),  # flat actual move
    (10.0, 12.0, 10.0, UP, Scenario.UNDEFINED),  # flat implied move
]


@pytest.mark.parametrize("y_prev,y_true,y_hat,direction,expected", SCENARIO_CASES)
def test_classify_scenario_truth_table(y_prev, y_true, y_hat, direction, expected):
    assert classify_scenario(y_prev, y_true, y_hat, direction) is expected


def _random_run(rng, n=40, alpha=1.0):
    values = np.cumsum(rng.normal(size=n)) + 50.0
    forecasts = values[:-1] + rng.normal(size=n - 1)
    directions = np.where(rng.random(n - 1) < 0.5, 1, -1)
    return evaluate_forecasts(values, 1, forecasts, directions, alpha)


def test_vectorized_matches_scalar_path():
    rng = np.random.default_rng(seed + 1)
    for _ in range(20):
        run = _random_run(rng)
        t = run.tats
        for step in t.steps():
            d = TrendDirection(int(step.direction))
            assert step.indicator == indicator(step.y_hat, step.y_prev, d)
            assert step.y_adj == adjust(step.y_hat, d, step.y_prev, alpha=1.0)
            assert step.scenario is classify_scenario(step.y_prev, step.y_true, step.y_hat, d)
            # square via multiplication: scalar pow() can differ by one ulp
            adj_err = step.y_adj - step.y_true
            base_err = step.y_hat - step.y_true
            assert step.loss_adj == adj_err * adj_err
            assert step.loss_base == base_err * base_err


def test_adjusted_value_never_fights_the_classifier():
    rng = np.random.default_rng(seed + 2)
    for _ in range(20):
        t = _random_run(rng).tats
        moved = t.y_adj - t.y_prev
        assert np.all(moved * t.direction >= 0.0)
        overridden = t.indicator == 0
        assert np.all(moved[overridden] * t.direction[overridden] > 0.0)


def test_agreeing_steps_share_losses_bitwise():
    rng = np.random.default_rng(seed + 3)
    for _ in range(20):
        run = _random_run(rng)
        agree = run.tats.indicator == 1
        assert np.array_equal(run.tats.y_adj[agree], run.base.y_adj[agree])
        assert np.array_equal(run.tats.loss_adj[agree], run.base.loss_adj[agree])


def test_base_trace_is_unadjusted():
    rng = np.random.default_rng(seed + 4)
    run = _random_run(rng)
    assert np.array_equal(run.base.y_adj, run.base.y_hat)
    assert np.array_equal(run.base.loss_adj, run.base.loss_base)


def test_small_alpha_limit():
    rng = np.random.default_rng(seed + 5)
    values = np.cumsum(rng.normal(size=30)) + 50.0
    forecasts = values[:-1] + rng.normal(size=29)
    directions = np.where(rng.random(29) < 0.5, 1, -1)
    run = evaluate_forecasts(values, 1, forecasts, directions, alpha=1e-9)
    overridden = run.tats.indicator == 0
    deltas = run.tats.y_true - run.tats.y_prev
    assert np.allclose(run.tats.loss_adj[overridden], deltas[overridden] ** 2, rtol=1e-6)


def test_evaluate_forecasts_validation():
    values = np.arange(5, dtype=float)
    with pytest.raises(ConfigError):
        evaluate_forecasts(values, 1, np.array([]), np.array([]), 1.0)
    with pytest.raises(ConfigError):
        evaluate_forecasts(values, 1, np.ones(3), np.ones(2), 1.0)
    with pytest.raises(DataError):
        evaluate_forecasts(values, 1, np.ones(2), np.array([1, 0]), 1.0)
    with pytest.raises(ConfigError):
        evaluate_forecasts(values, 0, np.ones(2), np.array([1, 1]), 1.0)
    with pytest.raises(ConfigError):
        evaluate_forecasts(values, 4, np.ones(2), np.array([1, 1]), 1.0)


def test_scenario_tally():
    rng = np.random.default_rng(seed + 6)
    run = _random_run(rng, n=80)
    tally = ScenarioTally.from_trace(run.tats)
    assert tally.total == len(run.tats)
    d = tally.to_dict()
    assert set(d) == {"S1", "S2", "S3", "S4", "undefined"}
    assert sum(d.values()) == len(run.tats)


def test_trace_step_time_axis():
    rng = np.random.default_rng(seed + 7)
    run = _random_run(rng, n=12)
    assert np.array_equal(run.tats.t, np.arange(1, 12))
    step = run.tats.step_at(3)
    assert step.t == run.tats.t[3]


def _weather_series(rng, n=120):
    return TimeSeries(np.cumsum(rng.normal(0.1, 1.0, size=n)) + 60.0)


def test_run_tats_naive_forecaster_is_identity():
    # naive forecast never moves, so the indicator is always 1
    rng = np.random.default_rng(seed + 8)
    for _ in range(10):
        series = _weather_series(rng)
        train, test = chronological_split(series, 0.7)
        config = TatsConfig(
            alpha=2.0,
            value_forecaster=ValueForecasterSpec.naive(),
            trend_predictor=TrendPredictorSpec.oracle(accuracy=0.3, seed=1),
        )
        run = run_tats(config, train, test)
        assert np.array_equal(run.tats.y_adj, run.base.y_adj)
        assert np.all(run.tats.indicator == 1)


def test_run_tats_echo_classifier_is_identity():
    # table feeding back the forecaster's own implied direction
    rng = np.random.default_rng(seed + 9)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    spec = ValueForecasterSpec.ar(order=2)
    forecasts = walk_forward_forecasts(spec, train, test)
    n_train = len(train)
    table = {}
    for i, f in enumerate(forecasts):
        t = n_train + i
        implied = f - series.values[t - 1]
        table[t] = UP if implied >= 0 else DOWN
    config = TatsConfig(
        alpha=5.0,
        value_forecaster=spec,
        trend_predictor=TrendPredictorSpec.external(source=table),
    )
    run = run_tats(config, train, test)
    assert np.array_equal(run.tats.y_adj, run.base.y_adj)
    assert np.array_equal(run.tats.loss_adj, run.base.loss_base)


def test_run_tats_deterministic():
    rng = np.random.default_rng(seed + 10)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    config = TatsConfig(
        alpha=1.0,
        value_forecaster=ValueForecasterSpec.ar(order=2),
        trend_predictor=TrendPredictorSpec.oracle(accuracy=0.8, seed=4),
    )
    a = run_tats(config, train, test)
    b = run_tats(config, train, test)
    assert np.array_equal(a.tats.y_adj, b.tats.y_adj)
    assert np.array_equal(a.tats.direction, b.tats.direction)


def test_run_tats_perfect_oracle_never_hits_s2_s3():
    rng = np.random.default_rng(seed + 11)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    config = TatsConfig(
        alpha=0.5,
        value_forecaster=ValueForecasterSpec.drift(),
        trend_predictor=TrendPredictorSpec.oracle(accuracy=1.0, seed=2),
    )
    run = run_tats(config, train, test)
    tally = run.scenario_tally
    assert tally.s2 == 0
    assert tally.s3 == 0


def test_run_tats_train_split_is_in_sample():
    rng = np.random.default_rng(seed + 12)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    config = TatsConfig(
        alpha=1.0,
        value_forecaster=ValueForecasterSpec.ar(order=2),
        trend_predictor=TrendPredictorSpec.logistic(),
    )
    run = run_tats(config, train, test, eval_split="train")
    assert run.tats.t[-1] == len(train) - 1
    assert run.tats.t[0] >= 1


def test_run_tats_rejects_unknown_split():
    rng = np.random.default_rng(seed + 13)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    config = TatsConfig(
        alpha=1.0,
        value_forecaster=ValueForecasterSpec.naive(),
        trend_predictor=TrendPredictorSpec.majority(),
    )
    with pytest.raises(ConfigError):
        run_tats(config, train, test, eval_split="validation")


def test_sweep_alpha_shares_forecasts_across_alphas():
    rng = np.random.default_rng(seed + 14)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    config = TatsConfig(
        alpha=1.0,
        value_forecaster=ValueForecasterSpec.ar(order=2),
        trend_predictor=TrendPredictorSpec.oracle(accuracy=0.8, seed=5),
    )
    alphas = (0.5, 1.0, 2.0)
    sweep = sweep_alpha(config, alphas, train, test)
    assert tuple(e.alpha for e in sweep.entries) == alphas
    # the oracle stream is drawn once: scenario tallies agree across alphas
    tallies = [e.tally.to_dict() for e in sweep.entries]
    assert tallies[0] == tallies[1] == tallies[2]
    assert sweep.base_report.n_steps == len(test)


def test_sweep_alpha_single_run_consistency():
    rng = np.random.default_rng(seed + 15)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    config = TatsConfig(
        alpha=2.0,
        value_forecaster=ValueForecasterSpec.drift(),
        trend_predictor=TrendPredictorSpec.oracle(accuracy=0.9, seed=6),
    )
    sweep = sweep_alpha(config, (2.0,), train, test)
    run = run_tats(config, train, test)
    assert sweep.entries[0].report.mse == evaluate_trace(run.tats).mse


def test_sweep_alpha_rejects_bad_grids():
    rng = np.random.default_rng(seed + 16)
    series = _weather_series(rng)
    train, test = chronological_split(series, 0.7)
    config = TatsConfig(
        alpha=1.0,
        value_forecaster=ValueForecasterSpec.naive(),
        trend_predictor=TrendPredictorSpec.majority(),
    )
    with pytest.raises(ConfigError):
        sweep_alpha(config, (), train, test)
    with pytest.raises(ConfigError):
        sweep_alpha(config, (1.0, -2.0), train, test)
