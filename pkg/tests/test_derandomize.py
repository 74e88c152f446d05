import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from lllkit.derandomize import GF, build_space, choose_field_size, domain_layout, solve_deterministic, space_cell
from lllkit.errors import CriterionUnsatisfied, InvalidModel, UnsupportedDistribution
from lllkit.events import BadEvent, EventSystem, VariableDomain
from lllkit.instances import random_ksat, random_system, tiny_a
from lllkit.shearer import check_deterministic
from lllkit.table import ResamplingTable
from oracles import all_wds, collectible, compatible


def test_q2_pairs():
    space = build_space(2, 2, 2)
    pairs = [tuple(space.values(pt)) for pt in space.points()]
    assert list(space.points()) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert pairs == [(0, 0), (0, 1), (1, 1), (1, 0)]


def test_zero_point():
    space = build_space(7, 3, 7)
    assert space.values((0, 0, 0)) == [0] * 7


def test_cells_exceed_field():
    with pytest.raises(InvalidModel):
        build_space(5, 2, 6)
    with pytest.raises(InvalidModel):
        build_space(6, 2, 3)


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27])
def test_field_axioms(q):
    f = GF(q)
    els = list(f.elements())
    rng = np.random.default_rng(q)
    for _ in range(300):
        a, b, c = (int(x) for x in rng.choice(els, 3))
        assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.add(a, b) == f.add(b, a)
    for a in els[1:]:
        assert any(f.mul(a, b) == 1 for b in els)
    assert all(f.add(a, 0) == a and f.mul(a, 1) == a for a in els)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_exact_k_wise_independence(q, k):
    space = build_space(q, k, q)
    table = [space.values(pt) for pt in space.points()]
    for cells in itertools.combinations(range(q), min(k, q)):
        tally = Counter(tuple(row[j] for j in cells) for row in table)
        assert len(tally) == q ** len(cells)
        assert set(tally.values()) == {q**k // q ** len(cells)}


def test_single_cell_uniform():
    space = build_space(5, 3, 5)
    for j in range(5):
        tally = Counter(space.evaluate(pt, j) for pt in space.points())
        assert set(tally.values()) == {25}


def test_layouts():
    assert domain_layout(VariableDomain.uniform(2), 2) == (0, 1)
    dom = VariableDomain(((0, Fraction(1, 3)), (1, Fraction(2, 3))))
    assert domain_layout(dom, 3) == (0, 1, 1)
    with pytest.raises(UnsupportedDistribution):
        domain_layout(VariableDomain.uniform(2), 3)
    assert space_cell(build_space(3, 1, 3), (2,), 0, dom) == 1


def test_choose_field_size():
    sys = tiny_a()
    assert choose_field_size(sys, 10) == 16
    assert choose_field_size(sys, 2) == 2
    dom = VariableDomain(((0, Fraction(1, 3)), (1, Fraction(2, 3))))
    s3 = EventSystem([dom], [BadEvent.atomic(1, [(0, 0)])])
    assert choose_field_size(s3, 10) == 27
    d6 = VariableDomain(((0, Fraction(1, 6)), (1, Fraction(5, 6))))
    with pytest.raises(UnsupportedDistribution):
        choose_field_size(EventSystem([d6], [BadEvent.atomic(1, [(0, 0)])]), 4)


def test_tiny_a_deterministic():
    sys = tiny_a()
    runs = [solve_deterministic(sys, return_stats=True) for _ in range(3)]
    assert all(r[0] == runs[0][0] for r in runs)
    assert sys.avoids(runs[0][0])
    assert len({r[1].points_tried for r in runs}) == 1
    for threads in (4, 8):
        assert solve_deterministic(sys, threads=threads) == runs[0][0]


def test_ksat_width3():
    sys, _ = random_ksat(6, 3, 2, seed=4)
    assert sys.m >= 2 and sys.max_degree() == 2
    assert check_deterministic(sys, Fraction(1, 2))
    x = solve_deterministic(sys, epsilon=Fraction(1, 2))
    assert sys.avoids(x)
    assert solve_deterministic(sys, epsilon=Fraction(1, 2), threads=4) == x


def test_first_point_immediate():
    sys = EventSystem([VariableDomain.uniform(2)], [BadEvent.atomic(1, [(0, 1)])])
    x, stats = solve_deterministic(sys, K=4, return_stats=True)
    assert x == (0,)
    assert stats.points_tried == 1 and stats.cwd_count == 0


def test_criterion_checked():
    with pytest.raises(CriterionUnsatisfied):
        solve_deterministic(tiny_a(), epsilon=Fraction(1, 2))


def test_opaque_rejected():
    ev = BadEvent.opaque(1, [0], lambda v: v[0] == 0, Fraction(1, 2))
    with pytest.raises(InvalidModel):
        solve_deterministic(EventSystem([VariableDomain.uniform(2)], [ev]), K=3)


def test_no_point_succeeds():
    # both values of a single bit are bad: nothing can succeed
    dom = VariableDomain.uniform(2)
    sys = EventSystem([dom], [BadEvent.atomic(1, [(0, 0)]), BadEvent.atomic(2, [(0, 1)])])
    with pytest.raises(CriterionUnsatisfied):
        solve_deterministic(sys, K=2, s_cap=50)


def _sizes_of_compatible_cwds(wds, table):
    return {len(G.labels) for G in wds if collectible(G) and compatible(G, table)}


@pytest.mark.parametrize("K", [1, 2, 3])
def test_size_gap_lemma(K):
    """A compatible CWD with at least K nodes implies one with K..2K nodes
    (checked up to 2K + 1 nodes by brute force)."""
    L = 2 * K + 1
    for seed in range(6):
        rng = np.random.default_rng(100 + seed)
        sys = random_system(rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)), max_scope=2)
        wds = [G for t in range(1, L + 1) for G in all_wds(sys, t)]
        for tseed in range(15):
            sizes = _sizes_of_compatible_cwds(wds, ResamplingTable(sys, 1000 * seed + tseed))
            if any(s >= K for s in sizes):
                assert any(K <= s <= 2 * K for s in sizes)
