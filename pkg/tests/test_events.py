import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lllkit.errors import InvalidModel, ParseError
from lllkit.events import (
    BadEvent,
    EventSystem,
    VariableDomain,
    dependent,
    dumps_native,
    evaluate,
    load_model,
    parse_dimacs,
    parse_native,
    true_events,
)
from lllkit.instances import random_system, tiny_a


def test_dimacs_single_clause():
    sys = parse_dimacs("p cnf 2 1\n1 -2 0\n")
    assert sys.n == 2 and sys.m == 1
    ev = sys.events[0]
    # falsifying assignment: X1 = false, X2 = true
    assert ev.assignment == ((0, 0), (1, 1))
    assert sys.prob(0) == Fraction(1, 4)


def test_dimacs_no_clauses():
    sys = parse_dimacs("p cnf 1 0\n")
    assert (sys.n, sys.m) == (1, 0)


def test_dimacs_scopes_and_dependency():
    sys = parse_dimacs("c comment\np cnf 3 2\n1 2 0\n-2 3 0\n")
    assert sys.scope(0) == (0, 1)
    assert sys.scope(1) == (1, 2)
    assert sys.dependent(0, 1)


def test_dimacs_multiline_clause():
    sys = parse_dimacs("p cnf 3 1\n1 2\n3 0\n")
    assert sys.scope(0) == (0, 1, 2)


@pytest.mark.parametrize(
    "text",
    [
        "1 2 0\n",
        "p cnf x 1\n1 0\n",
        "p cnf 2 1\n0\n",
        "p cnf 2 1\n1 3 0\n",
        "p cnf 2 1\n1 a 0\n",
        "p cnf 2 2\n1 0\n",
        "p cnf 2 1\n1 2\n",
    ],
)
def test_dimacs_errors(text):
    with pytest.raises(ParseError):
        parse_dimacs(text)


def test_tiny_a_dependency_and_evaluation():
    sys = tiny_a()
    assert dependent(sys, 0, 1) and dependent(sys, 0, 0)
    assert evaluate(sys, 0, (0, 0))
    assert not evaluate(sys, 0, (1, 0))
    assert evaluate(sys, 1, (0, 1))
    assert true_events(sys, (0, 0)) == {0}
    assert true_events(sys, (1, 0)) == set()
    assert true_events(sys, (0, 1)) == {1}
    assert sys.probs == (Fraction(1, 4), Fraction(1, 2))


def test_disjoint_scopes_independent():
    doms = [VariableDomain.uniform(2)] * 2
    sys = EventSystem(doms, [BadEvent.atomic(1, [(0, 0)]), BadEvent.atomic(2, [(1, 0)])])
    assert not sys.dependent(0, 1)


def test_native_round_trip():
    sys = tiny_a()
    again = parse_native(dumps_native(sys))
    assert again == sys
    assert parse_native(dumps_native(again)) == sys


def test_native_exact_rationals():
    doc = {
        "variables": [{"id": 7, "values": [{"v": 0, "prob": "1/3"}, {"v": 1, "prob": "2/3"}]}],
        "events": [{"id": 3, "kind": "atomic", "assignment": [[7, 1]]}],
    }
    sys = parse_native(json.dumps(doc))
    assert sys.domains[0].prob(1) == Fraction(2, 3)
    assert sys.prob(0) == Fraction(2, 3)
    assert sys.events[0].id == 3


def test_native_bad_sum():
    doc = {"variables": [{"id": 1, "values": [{"v": 0, "prob": "1/2"}, {"v": 1, "prob": "1/3"}]}], "events": []}
    with pytest.raises(InvalidModel):
        parse_native(json.dumps(doc))


def test_native_unknown_variable():
    doc = {"variables": [{"id": 1, "values": [{"v": 0, "prob": "1"}]}], "events": [{"id": 1, "assignment": [[2, 0]]}]}
    with pytest.raises(InvalidModel):
        parse_native(json.dumps(doc))


def test_native_malformed():
    with pytest.raises(ParseError):
        parse_native("{not json")
    with pytest.raises(ParseError):
        parse_native('{"variables": [{"id": 1}]}')


def test_float_probability_rejected():
    doc = {"variables": [{"id": 1, "values": [{"v": 0, "prob": 0.5}, {"v": 1, "prob": "1/2"}]}]}
    with pytest.raises(ParseError):
        parse_native(json.dumps(doc))


def test_load_model_dispatch(tmp_path):
    (tmp_path / "a.cnf").write_text("p cnf 2 1\n1 2 0\n")
    (tmp_path / "b.json").write_text(dumps_native(tiny_a()))
    assert load_model(tmp_path / "a.cnf").m == 1
    assert load_model(tmp_path / "b.json") == tiny_a()


def test_zero_probability_event_dropped():
    never = BadEvent.opaque(1, [0], lambda vals: False, Fraction(0))
    sys = EventSystem([VariableDomain.uniform(2)] * 2, [never, BadEvent.atomic(2, [(1, 0)])])
    assert sys.m == 1 and sys.events[0].id == 2


def test_opaque_event():
    ev = BadEvent.opaque(1, [0, 1], lambda vals: vals[0] != vals[1], Fraction(1, 2))
    sys = EventSystem([VariableDomain.uniform(2)] * 2, [ev])
    assert sys.true_events((0, 1)) == {0}
    assert sys.true_events((1, 1)) == set()
    assert not sys.all_atomic


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 5), st.integers(1, 6))
def test_dependency_symmetric_reflexive(seed, n, m):
    sys = random_system(np.random.default_rng(seed), n, m, max_scope=3, max_domain=3)
    for a, b in itertools.product(range(sys.m), repeat=2):
        assert sys.dependent(a, b) == sys.dependent(b, a)
        assert sys.dependent(a, b) == bool(set(sys.scope(a)) & set(sys.scope(b)))
    assert all(sys.dependent(a, a) for a in range(sys.m))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_true_events_exhaustive(seed):
    sys = random_system(np.random.default_rng(seed), 4, 5, max_scope=3, max_domain=3)
    for x in itertools.product(*[d.value_ids for d in sys.domains]):
        expect = {b for b in range(sys.m) if all(x[v] == val for v, val in sys.events[b].assignment)}
        assert sys.true_events(x) == expect


def test_atomic_probability_monte_carlo():
    rng = np.random.default_rng(5)
    sys = random_system(rng, 3, 4, max_scope=3, max_domain=3)
    N = 100_000
    draws = []
    for d in sys.domains:
        ids = np.array(d.value_ids)
        p = np.array([float(pr) for _, pr in d.values])
        draws.append(rng.choice(ids, size=N, p=p))
    draws = np.stack(draws)
    for b, ev in enumerate(sys.events):
        hit = np.ones(N, dtype=bool)
        for v, val in ev.assignment:
            hit &= draws[v] == val
        p = float(sys.prob(b))
        se = np.sqrt(p * (1 - p) / N)
        assert abs(hit.mean() - p) <= 4 * se
