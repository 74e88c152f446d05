import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from lllkit.instances import random_ksat, tiny_a
from lllkit.parallel import run_parallel
from lllkit.sequential import replay
from lllkit.table import ResamplingTable
from lllkit.wd import full_witness_dag, is_compatible


def test_nothing_true():
    sys = tiny_a()
    x, log, stats = run_parallel(sys, ResamplingTable.from_columns(sys, [[1], [0]]))
    assert x == (1, 0) and stats.rounds == 0 and len(log) == 0


def test_hand_trace():
    sys = tiny_a()
    x, log, stats = run_parallel(sys, ResamplingTable.from_columns(sys, [[0, 1], [0, 0]]))
    assert x == (1, 0)
    assert stats.rounds == 1 and log.rounds() == [[0]]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_properties(seed):
    sys, _ = random_ksat(16, 3, 2, seed=seed % 997)
    R = ResamplingTable(sys, seed)
    x, log, stats = run_parallel(sys, R, seed=seed, check_mis=True)
    assert sys.avoids(x)
    assert replay(sys, R, log.events) == x
    G = full_witness_dag(sys, log.events)
    assert is_compatible(G, R)
    assert G.depth() <= stats.rounds
    for rnd in log.rounds():
        assert rnd == sorted(rnd)
        assert all(not sys.dependent(a, b) for a in rnd for b in rnd if a != b)
    assert len(log.rounds()) == stats.rounds
    assert run_parallel(sys, ResamplingTable(sys, seed), seed=seed)[0] == x


def test_round_bound():
    eps = 0.3
    sys, _ = random_ksat(32, 3, 2, seed=3)
    rounds = [run_parallel(sys, ResamplingTable(sys, s), seed=s)[2].rounds for s in range(1000)]
    assert np.quantile(rounds, 0.99) <= 8 * math.log(sys.n + 2) / eps
