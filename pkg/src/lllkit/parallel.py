"""The Parallel Resampling Algorithm, simulated in synchronous rounds."""

from __future__ import annotations

import time

from .errors import CapExceeded
from .events import EventSystem
from .mis import UndirectedGraph, is_maximal_independent, luby_mis
from .sequential import EngineStats, ExecutionLog


def run_parallel(sys: EventSystem, table, seed: int = 0, max_rounds: int = 100_000, check_mis: bool = False):
    """Each round: find the true events, take a Luby MIS of their dependency
    graph (seeded with ``seed ^ round``), and advance the cursor of every
    variable in the selected scopes once.

    The log lists each round's selected events in ascending index order;
    ``log.round_sizes`` marks the round boundaries. ``stats.true_event_total``
    sums the number of true events over rounds.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    start = time.perf_counter()
    cursor = [1] * sys.n
    x = list(table.initial_assignment())
    log = ExecutionLog(round_sizes=[])
    stats = EngineStats(per_event=[0] * sys.m)
    while True:
        true = sorted(b for b in range(sys.m) if sys.evaluate(b, x))
        if not true:
            break
        if stats.rounds >= max_rounds:
            raise CapExceeded(f"events still true after {max_rounds} rounds", partial=log)
        stats.rounds += 1
        stats.true_event_total += len(true)
        graph = UndirectedGraph.from_relation(true, sys.dependent)
        chosen, mis_rounds = luby_mis(graph, seed ^ stats.rounds)
        stats.mis_invocations += 1
        stats.mis_rounds += mis_rounds
        if check_mis and not is_maximal_independent(graph, chosen):
            raise AssertionError(f"round {stats.rounds}: selection is not a maximal independent set")
        selected = sorted(true[v] for v in chosen)
        touched = set()
        for b in selected:
            scope = sys.scope(b)
            assert touched.isdisjoint(scope), "independent events share a variable"
            touched.update(scope)
        try:
            for i in touched:
                cursor[i] += 1
                x[i] = table.cell(i, cursor[i])
        except CapExceeded as exc:
            raise CapExceeded(str(exc), partial=log) from None
        log.events.extend(selected)
        log.round_sizes.append(len(selected))
        for b in selected:
            stats.per_event[b] += 1
    stats.resamplings = stats.steps = len(log)
    stats.wall_time = time.perf_counter() - start
    return tuple(x), log, stats
