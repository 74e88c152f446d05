import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lllkit.errors import CapExceeded
from lllkit.instances import random_ksat, random_system, tiny_a
from lllkit.shearer import check_symmetric
from lllkit.table import ResamplingTable
from lllkit.wd import WitnessDag, is_compatible, is_prefix, merge_all, validate
from lllkit.wdenum import choose_cap, enumerate_wds, final_configuration, run_wdenum
from oracles import brute_compatible_cwds

B1, B2 = 0, 1


def fixture_table(sys):
    # R(1,1)=0, R(1,2)=1; R(2,1)=0, R(2,2)=1, R(2,3)=0
    return ResamplingTable.from_columns(sys, [[0, 1], [0, 1, 0]], max_column=3)


def test_choose_cap():
    # ceil(8 ln(4 / (1/4)) / (1/4)) = ceil(32 ln 16)
    assert choose_cap(2, 0.25) == 89
    assert choose_cap(10, 0.25) >= choose_cap(2, 0.25)
    assert choose_cap(2, 0.5) <= choose_cap(2, 0.25)
    assert choose_cap(5, 0.3, c=16) >= 2 * choose_cap(5, 0.3) - 1
    with pytest.raises(ValueError):
        choose_cap(2, 1)


def test_hand_trace():
    sys = tiny_a()
    R = fixture_table(sys)
    F, gamma = enumerate_wds(sys, R, 6)
    chain = WitnessDag(sys, [B1, B2], [(0, 1)])
    assert set(gamma) == {WitnessDag(sys, [B1]), chain}
    assert set(F) == set(gamma)
    x = final_configuration(sys, gamma, R, seed=0)
    assert x == (1, 0)
    assert sys.avoids(x)


def test_initially_avoiding():
    sys = tiny_a()
    R = ResamplingTable.from_columns(sys, [[1], [0]])
    F, gamma = enumerate_wds(sys, R, 10)
    assert len(F) == 0 and gamma == []
    assert final_configuration(sys, gamma, R) == (1, 0)


def test_s_cap():
    sys, _ = random_ksat(20, 3, 2, seed=1)
    seeds = [s for s in range(200) if not sys.avoids(ResamplingTable(sys, s).initial_assignment())]
    with pytest.raises(CapExceeded) as info:
        enumerate_wds(sys, ResamplingTable(sys, seeds[0]), 10, s_cap=0)
    assert info.value.partial is not None


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4), st.integers(0, 2**64 - 1))
def test_oracle_equivalence(seed, K, tseed):
    rng = np.random.default_rng(seed)
    sys = random_system(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)), max_scope=2)
    R = ResamplingTable(sys, tseed)
    F, gamma = enumerate_wds(sys, R, K)
    assert {G.key for G in F} == brute_compatible_cwds(sys, R, K)
    for G in F:
        assert validate(G) is None and is_compatible(G, R) and len(G) <= K
    assert {G.key for G in gamma} == {G.key for G in F if len(G.sinks) == 1}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2**64 - 1))
def test_families_grow_monotonically(seed, tseed):
    rng = np.random.default_rng(seed)
    sys = random_system(rng, 3, 4, max_scope=2)
    R = ResamplingTable(sys, tseed)
    prev = set()
    for K in range(1, 7):
        keys = {G.key for G in enumerate_wds(sys, R, K)[0]}
        assert prev <= keys
        prev = keys


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_run_wdenum_ksat(seed):
    sys, _ = random_ksat(30, 3, 2, seed=seed % 500)
    assert check_symmetric(sys, 0.3)
    x, stats = run_wdenum(sys, seed, 0.3)
    assert sys.avoids(x)
    assert stats.mis_invocations == 1
    assert run_wdenum(sys, seed, 0.3)[0] == x


def test_run_wdenum_tiny_a_many_seeds():
    sys = tiny_a()
    for seed in range(100):
        x, stats = run_wdenum(sys, seed, 1 / 3)
        assert x == (1, 0)
        assert stats.mis_invocations == 1


def test_final_configuration_formula():
    sys = tiny_a()
    for seed in range(40):
        R = ResamplingTable(sys, seed, max_column=400)
        _, gamma = enumerate_wds(sys, R, choose_cap(2, 1 / 3))
        x, info = final_configuration(sys, gamma, R, seed, return_details=True)
        G = merge_all(info["picked"], sys)
        assert all(is_prefix(H, G) for H in info["picked"])
        assert x == tuple(R.cell(i, len(G.paths.get(i, ())) + 1) for i in range(sys.n))
        assert sys.avoids(x)
