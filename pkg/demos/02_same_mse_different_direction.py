"""Two forecast sets with identical MSE and opposite directional quality.

Squared error alone cannot tell these models apart; trend-direction
accuracy and the trend-aware loss can. This is the motivating case for
gating forecasts on a direction classifier in the first place.

Run: python demos/02_same_mse_different_direction.py
"""

from pathlib import Path

from tats import load_csv, mae, mse, td_accuracy, trend_aware_loss

fixture = Path(__file__).resolve().parent.parent / "data" / "sample_forecasts.csv"
ds = load_csv(fixture, target_column="actual", exogenous_columns=["model_one", "model_two"])
actual = ds.target.values
models = {name: ds.exogenous[name].values for name in ("model_one", "model_two")}

print(f"actuals: {actual.tolist()}")
print()
print(f"{'metric':>18} {'model_one':>10} {'model_two':>10}")
rows = [
    ("MSE", lambda p: mse(actual, p)),
    ("MAE", lambda p: mae(actual, p)),
    ("TDA", lambda p: td_accuracy(actual[:-1], actual[1:], p[1:])),
    ("loss (gamma=0)", lambda p: trend_aware_loss(actual, p, 0.0)),
    ("loss (gamma=10)", lambda p: trend_aware_loss(actual, p, 10.0)),
]
for label, fn in rows:
    one = fn(models["model_one"])
    two = fn(models["model_two"])
    print(f"{label:>18} {one:>10.4g} {two:>10.4g}")

print()
print("model_one calls every move correctly; model_two gets three of four")
print("moves wrong. Their squared errors are identical, so MSE ranks them")
print("as equals. The gamma term charges each wrong direction, separating")
print("them, and TDA shows where the difference comes from.")
