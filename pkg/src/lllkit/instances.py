"""Instance families used by the harness, tests and demos."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .events import BadEvent, EventSystem, VariableDomain, cnf_system
from .shearer import E_UPPER


def tiny_a() -> EventSystem:
    """Two fair bits; ``B1 = {X1 = 0, X2 = 0}``, ``B2 = {X2 = 1}``."""
    doms = [VariableDomain.uniform(2), VariableDomain.uniform(2)]
    events = [BadEvent.atomic(1, [(0, 0), (1, 0)]), BadEvent.atomic(2, [(1, 1)])]
    return EventSystem(doms, events, variable_ids=[1, 2])


def ksat_degree_bound(k: int, eps, e_bound: Fraction = E_UPPER) -> int:
    """Largest ``d`` (neighbourhood size, self included) with
    ``e 2^-k d (1 + eps) <= 1``."""
    return math.floor(Fraction(2**k) / (Fraction(e_bound) * (1 + Fraction(eps))))


def random_ksat(n: int, k: int = 3, d_max: int = 2, seed: int = 0, m: int | None = None, tries: int | None = None):
    """Random k-CNF on ``n`` variables whose dependency neighbourhoods have at
    most ``d_max`` clauses (self included).

    Clauses are proposed uniformly (``k`` distinct variables, random signs) and
    dropped whenever accepting one would push any neighbourhood past
    ``d_max``. Generation stops at ``m`` clauses or after ``tries`` proposals.

    Returns
    -------
    (EventSystem, list of clauses as signed 1-based literals)
    """
    if k > n:
        raise ValueError("clause width exceeds the number of variables")
    rng = np.random.default_rng(seed)
    m = n if m is None else m
    tries = 20 * n if tries is None else tries
    clauses: list[list[int]] = []
    on_var: list[list[int]] = [[] for _ in range(n)]
    degree: list[int] = []
    for _ in range(tries):
        if len(clauses) >= m:
            break
        vs = rng.choice(n, size=k, replace=False)
        signs = rng.integers(0, 2, size=k)
        nbrs = sorted({c for v in vs for c in on_var[v]})
        if len(nbrs) + 1 > d_max or any(degree[c] + 1 > d_max for c in nbrs):
            continue
        idx = len(clauses)
        clauses.append([int(v) + 1 if s else -(int(v) + 1) for v, s in zip(vs, signs)])
        degree.append(len(nbrs) + 1)
        for c in nbrs:
            degree[c] += 1
        for v in vs:
            on_var[v].append(idx)
    return cnf_system(n, clauses), clauses


def random_system(rng: np.random.Generator, n: int, m: int, max_scope: int = 2, max_domain: int = 2) -> EventSystem:
    """Random atomic event system with small rational domains (for tests)."""
    doms = []
    for _ in range(n):
        size = int(rng.integers(2, max_domain + 1))
        weights = rng.integers(1, 4, size=size)
        total = int(weights.sum())
        doms.append(VariableDomain(tuple((v, Fraction(int(w), total)) for v, w in enumerate(weights))))
    events = []
    for b in range(m):
        width = int(rng.integers(1, min(max_scope, n) + 1))
        scope = sorted(int(v) for v in rng.choice(n, size=width, replace=False))
        pairs = [(v, int(rng.integers(0, len(doms[v].values)))) for v in scope]
        events.append(BadEvent.atomic(b + 1, pairs))
    return EventSystem(doms, events)
