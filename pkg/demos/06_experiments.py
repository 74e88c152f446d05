"""Monte Carlo experiments that regenerate the CSV tables.

The same runs are available from the command line, e.g.
``lllkit experiment rounds --family ksat --n 32 --trials 50``.
"""
import json

from lllkit.harness import ExperimentSpec, fit_log_growth, run_experiment

_, summary = run_experiment(ExperimentSpec("resamplings", trials=200, seed=1))
print("TINY-A resamplings:", json.dumps({k: summary[k] for k in ("mean", "q99", "bound_thm")}))

ns, medians = [16, 32, 64], []
for n in ns:
    _, s = run_experiment(ExperimentSpec("rounds", family="ksat", n=n, trials=40, seed=n))
    medians.append(s["q50"])
fit = fit_log_growth(ns, medians)
print("median rounds", medians, "fit a + b ln n:", round(fit["a"], 2), round(fit["b"], 2))
