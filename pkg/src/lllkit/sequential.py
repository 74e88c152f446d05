"""The sequential Resampling Algorithm driven by a resampling table."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

from ._prf import word64
from .errors import CapExceeded
from .events import Assignment, EventSystem

FIRST_TRUE = "first-true"
LOWEST_VARIABLE = "lowest-index-variable"
SEEDED_RANDOM = "seeded-random"
RULES = (FIRST_TRUE, LOWEST_VARIABLE, SEEDED_RANDOM)


@dataclass
class ExecutionLog:
    """Resampled events in order. ``round_sizes`` is set by round-based engines:
    entry ``r`` is the number of events resampled in round ``r + 1``."""

    events: list[int] = field(default_factory=list)
    round_sizes: list[int] | None = None

    def __len__(self):
        return len(self.events)

    def rounds(self) -> list[list[int]]:
        if self.round_sizes is None:
            return [[b] for b in self.events]
        out, pos = [], 0
        for size in self.round_sizes:
            out.append(self.events[pos : pos + size])
            pos += size
        return out

    def to_json(self, sys: EventSystem | None = None) -> str:
        ids = self.events if sys is None else [sys.events[b].id for b in self.events]
        return json.dumps(ids)


@dataclass
class EngineStats:
    resamplings: int = 0
    per_event: list[int] = field(default_factory=list)
    steps: int = 0
    wall_time: float = 0.0
    rounds: int = 0
    true_event_total: int = 0
    mis_invocations: int = 0
    mis_rounds: int = 0
    gamma_size: int = 0
    cwd_count: int = 0
    max_wd_size: int = 0
    generations: int = 0
    retries: int = 0
    points_tried: int = 0

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("wall_time")
        return d


def replay(sys: EventSystem, table, log) -> Assignment:
    """Final assignment reached by resampling ``log`` from the table's initial column."""
    cursor = [1] * sys.n
    for b in log:
        for i in sys.scope(b):
            cursor[i] += 1
    return tuple(table.cell(i, cursor[i]) for i in range(sys.n))


def run_sequential(
    sys: EventSystem,
    table,
    rule: str = FIRST_TRUE,
    max_steps: int = 1_000_000,
    seed: int = 0,
):
    """Run the sequential Resampling Algorithm.

    The state is a per-variable column cursor; resampling ``B`` advances the
    cursor of every variable in its scope, and the current assignment is
    ``R(i, cursor[i])``.

    Parameters
    ----------
    rule : {"first-true", "lowest-index-variable", "seeded-random"}
        Which true event to resample: lowest event index; the event whose
        smallest scope variable is lowest (ties by event index); or a choice
        keyed by ``(seed, step)``.

    Returns
    -------
    (Assignment, ExecutionLog, EngineStats)

    Raises
    ------
    CapExceeded
        When ``max_steps`` resamplings were made or the table cap was hit;
        ``exc.partial`` holds the log so far.
    """
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    start = time.perf_counter()
    cursor = [1] * sys.n
    x = list(table.initial_assignment())
    log = ExecutionLog()
    per_event = [0] * sys.m
    true = {b for b in range(sys.m) if sys.evaluate(b, x)}
    steps = 0
    while true:
        if steps >= max_steps:
            raise CapExceeded(f"no avoiding assignment after {max_steps} resamplings", partial=log)
        if rule == FIRST_TRUE:
            b = min(true)
        elif rule == LOWEST_VARIABLE:
            b = min(true, key=lambda e: (sys.scope(e)[0], e))
        else:
            cands = sorted(true)
            b = cands[word64(seed, steps) % len(cands)]
        try:
            for i in sys.scope(b):
                cursor[i] += 1
                x[i] = table.cell(i, cursor[i])
        except CapExceeded as exc:
            raise CapExceeded(str(exc), partial=log) from None
        log.events.append(b)
        per_event[b] += 1
        steps += 1
        for a in sys.neighbors[b]:
            if sys.evaluate(a, x):
                true.add(a)
            else:
                true.discard(a)
    stats = EngineStats(
        resamplings=steps, per_event=per_event, steps=steps, wall_time=time.perf_counter() - start
    )
    return tuple(x), log, stats
