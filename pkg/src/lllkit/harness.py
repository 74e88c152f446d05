"""Monte Carlo experiment harness.

Each experiment runs independent trials (trial ``j`` uses seed ``base ^ j``),
sorts rows by trial index and returns them together with a summary dict.
Worker threads (``LLL_THREADS``) change speed only; rows are identical for any
thread count.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import shearer
from .errors import CapExceeded, InvalidModel
from .events import EventSystem, load_model
from .instances import ksat_degree_bound, random_ksat, tiny_a
from .parallel import run_parallel
from .sequential import run_sequential
from .table import ResamplingTable, default_column_cap
from .wd import WitnessDag, is_compatible, weight
from .wdenum import choose_cap, enumerate_wds

FAMILIES = ("tiny_a", "ksat", "model")


@dataclass
class ExperimentSpec:
    """What to run.

    ``family`` is ``"tiny_a"``, ``"ksat"`` (a fresh degree-bounded random
    k-CNF per trial) or ``"model"`` (the file at ``model``). ``epsilon`` is the
    declared slack; for fixed instances it defaults to the exact max slack.
    """

    name: str
    family: str = "tiny_a"
    n: int = 16
    width: int = 3
    d_max: int | None = None
    model: str | None = None
    epsilon: Fraction | None = None
    trials: int = 100
    seed: int = 0
    engine: str = "seq"
    out: str | None = None
    r: int = 10
    timing: bool = False
    threads: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.epsilon is not None:
            self.epsilon = Fraction(self.epsilon)


@dataclass
class ExperimentRow:
    trial: int
    seed: int
    n: int
    m: int
    epsilon: float
    resamplings: int | None = None
    rounds: int | None = None
    mis_rounds: int | None = None
    gamma_size: int | None = None
    cwd_count: int | None = None
    max_wd_size: int | None = None
    tail_count: int | None = None
    retries: int | None = None
    flag: str = ""
    runtime: float | None = None
    per_event: list = field(default_factory=list, repr=False)


COLUMNS = {
    "resamplings": ["trial", "seed", "n", "m", "epsilon", "resamplings", "flag"],
    "rounds": ["trial", "seed", "n", "m", "epsilon", "rounds", "mis_rounds", "resamplings", "flag"],
    "wd_counts": ["trial", "seed", "n", "m", "epsilon", "gamma_size", "cwd_count", "max_wd_size", "tail_count", "flag"],
}


class _Fixed:
    """A single instance shared by all trials, with its exact parameters."""

    def __init__(self, sys: EventSystem, epsilon):
        self.sys = sys
        self.epsilon = Fraction(epsilon) if epsilon is not None else shearer.max_slack(sys)
        if self.epsilon == shearer.UNBOUNDED:
            self.epsilon = Fraction(1, 2)
        if sys.m and not shearer.check_shearer(sys, 1 + self.epsilon):
            raise InvalidModel(f"instance fails the Shearer criterion at slack {self.epsilon}")

    def instance(self, seed):
        return self.sys


class _KSat:
    def __init__(self, spec: ExperimentSpec):
        self.epsilon = spec.epsilon if spec.epsilon is not None else Fraction(3, 10)
        self.n, self.width = spec.n, spec.width
        self.d_max = spec.d_max if spec.d_max is not None else ksat_degree_bound(spec.width, self.epsilon)

    def instance(self, seed):
        sys, _ = random_ksat(self.n, self.width, self.d_max, seed=seed)
        if not shearer.check_symmetric(sys, self.epsilon):
            raise InvalidModel(f"generated instance fails e p d (1 + eps) <= 1 at eps={self.epsilon}")
        return sys


def make_family(spec: ExperimentSpec):
    if spec.family == "tiny_a":
        return _Fixed(tiny_a(), spec.epsilon)
    if spec.family == "model":
        if not spec.model:
            raise ValueError("family 'model' needs a model path")
        return _Fixed(load_model(spec.model), spec.epsilon)
    return _KSat(spec)


def trial_seed(base: int, j: int) -> int:
    return base ^ j


def _run_trials(spec: ExperimentSpec, fn) -> list[ExperimentRow]:
    threads = spec.threads if spec.threads is not None else int(os.environ.get("LLL_THREADS", "1") or 1)
    idx = range(spec.trials)
    if threads <= 1:
        rows = [fn(j) for j in idx]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(fn, idx))
    rows.sort(key=lambda r: r.trial)
    return rows


def _quantiles(values) -> dict:
    if not len(values):
        return {"q50": None, "q90": None, "q99": None}
    a = np.asarray(values, dtype=float)
    q = np.quantile(a, [0.5, 0.9, 0.99])
    return {"q50": float(q[0]), "q90": float(q[1]), "q99": float(q[2])}


def _mean_se(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return 0.0, 0.0
    se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0
    return float(a.mean()), se


def experiment_resamplings(spec: ExperimentSpec):
    """Sequential resampling counts per trial, with summary quantiles and the
    reference bounds ``W``, ``n/eps`` and ``n + d ln^2 n``."""
    fam = make_family(spec)
    eps = fam.epsilon

    def one(j):
        seed = trial_seed(spec.seed, j)
        sys = fam.instance(seed)
        row = ExperimentRow(j, seed, sys.n, sys.m, float(eps))
        t0 = time.perf_counter()
        try:
            _, _, stats = run_sequential(sys, ResamplingTable(sys, seed))
            row.resamplings = stats.resamplings
            row.per_event = stats.per_event
        except CapExceeded:
            row.flag = "cap_exceeded"
        if spec.timing:
            row.runtime = time.perf_counter() - t0
        return row

    rows = _run_trials(spec, one)
    ok = [r.resamplings for r in rows if r.resamplings is not None]
    summary = {"experiment": "resamplings", "trials": spec.trials, "epsilon": float(eps), **_quantiles(ok)}
    summary["mean"], summary["stderr"] = _mean_se(ok)
    if isinstance(fam, _Fixed) and fam.sys.m and fam.sys.m <= shearer.DEFAULT_CAP:
        sys = fam.sys
        W, _ = shearer.work_params(sys)
        summary["W"] = float(W)
        summary["mu"] = [float(x) for x in shearer.measures(sys)]
        per = np.asarray([r.per_event for r in rows if r.resamplings is not None], dtype=float)
        if per.size:
            summary["per_event_mean"] = per.mean(axis=0).tolist()
            summary["per_event_stderr"] = (per.std(axis=0, ddof=1) / math.sqrt(len(per))).tolist() if len(per) > 1 else [0.0] * sys.m
        n = sys.n
        summary["bound_thm"] = 10 * (float(W) + math.log(n) ** 2 / float(eps))
        summary["bound_n_eps"] = n / float(eps)
        summary["bound_n_d"] = n + sys.max_degree() * math.log(n) ** 2
    return rows, summary


def experiment_rounds(spec: ExperimentSpec):
    """Parallel engine rounds and MIS sub-rounds per trial."""
    fam = make_family(spec)
    eps = fam.epsilon

    def one(j):
        seed = trial_seed(spec.seed, j)
        sys = fam.instance(seed)
        row = ExperimentRow(j, seed, sys.n, sys.m, float(eps))
        t0 = time.perf_counter()
        try:
            _, log, stats = run_parallel(sys, ResamplingTable(sys, seed), seed=seed)
            row.rounds, row.mis_rounds, row.resamplings = stats.rounds, stats.mis_rounds, stats.resamplings
        except CapExceeded:
            row.flag = "cap_exceeded"
        if spec.timing:
            row.runtime = time.perf_counter() - t0
        return row

    rows = _run_trials(spec, one)
    ok = [r.rounds for r in rows if r.rounds is not None]
    summary = {"experiment": "rounds", "trials": spec.trials, "n": spec.n, "epsilon": float(eps), **_quantiles(ok)}
    summary["mean"], summary["stderr"] = _mean_se(ok)
    summary["bound_log"] = 8 * math.log(spec.n + 2) / float(eps)
    return rows, summary


def fit_log_growth(ns, medians) -> dict:
    """Least-squares fit ``median ~ a + b ln n``; reports coefficients and residuals."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.asarray(medians, dtype=float)
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    return {"a": float(a), "b": float(b), "residuals": resid.tolist()}


def experiment_wd_counts(spec: ExperimentSpec, s_cap: int = 100_000):
    """``|Gamma^R|``, total CWD count, largest WD and the number of single-sink
    WDs with more than ``spec.r`` nodes, per trial."""
    fam = make_family(spec)
    eps = fam.epsilon

    def one(j):
        seed = trial_seed(spec.seed, j)
        sys = fam.instance(seed)
        row = ExperimentRow(j, seed, sys.n, sys.m, float(eps))
        K = max(choose_cap(sys.n, min(eps, Fraction(999, 1000))), 2 * spec.r + 1)
        table = ResamplingTable(sys, seed, max_column=max(default_column_cap(sys.n, eps), 2 * K + 2))
        t0 = time.perf_counter()
        try:
            F, gamma = enumerate_wds(sys, table, K, s_cap)
            row.gamma_size, row.cwd_count, row.max_wd_size = len(gamma), len(F), F.max_size
            row.tail_count = sum(1 for G in gamma if len(G) > spec.r)
        except CapExceeded:
            row.flag = "cap_exceeded"
        if spec.timing:
            row.runtime = time.perf_counter() - t0
        return row

    rows = _run_trials(spec, one)
    ok = [r for r in rows if not r.flag]
    summary = {"experiment": "wd_counts", "trials": spec.trials, "epsilon": float(eps), "r": spec.r}
    for col in ("gamma_size", "cwd_count", "tail_count"):
        summary[f"{col}_mean"], summary[f"{col}_stderr"] = _mean_se([getattr(r, col) for r in ok])
    if isinstance(fam, _Fixed) and fam.sys.m and fam.sys.m <= shearer.DEFAULT_CAP:
        W, Wp = shearer.work_params(fam.sys)
        summary["W"], summary["w_prime_bound"] = float(W), float(Wp)
        summary["tail_bound"] = math.e * fam.sys.n * spec.r * (1 + float(eps)) ** (-spec.r)
    return rows, summary


def experiment_compat_prob(spec: ExperimentSpec, G: WitnessDag) -> dict:
    """Frequency of ``is_compatible(G, R)`` over ``spec.trials`` fresh tables,
    against the exact weight ``w(G)``."""
    sys = G.sys
    hits = 0
    for j in range(spec.trials):
        if is_compatible(G, ResamplingTable(sys, trial_seed(spec.seed, j))):
            hits += 1
    p = hits / spec.trials
    se = math.sqrt(p * (1 - p) / spec.trials)
    return {"experiment": "compat_prob", "trials": spec.trials, "frequency": p, "stderr": se, "exact": float(weight(G))}


EXPERIMENTS = {
    "resamplings": experiment_resamplings,
    "rounds": experiment_rounds,
    "wd_counts": experiment_wd_counts,
}


def rows_to_csv(name: str, rows, timing: bool = False) -> str:
    cols = list(COLUMNS[name]) + (["runtime"] if timing else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        out = []
        for c in cols:
            v = getattr(r, c)
            out.append("" if v is None else repr(v) if isinstance(v, float) else v)
        w.writerow(out)
    return buf.getvalue()


def run_experiment(spec: ExperimentSpec):
    """Run ``spec.name``; write the CSV to ``spec.out`` when set. Returns ``(csv_text, summary)``."""
    if spec.name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {spec.name!r}; choose from {sorted(EXPERIMENTS)}")
    rows, summary = EXPERIMENTS[spec.name](spec)
    text = rows_to_csv(spec.name, rows, spec.timing)
    if spec.out:
        with open(spec.out, "w", newline="") as fh:
            fh.write(text)
    return text, summary
