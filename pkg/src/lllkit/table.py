"""Resampling tables ``R(i, t)``.

Variables are 0-based indices; columns ``t`` are 1-based, so ``R(i, 1)`` is the
initial value of variable ``i`` and its ``t``-th resampling reads ``R(i, t + 1)``.
"""

from __future__ import annotations

import bisect
import json
import math
import threading

from ._prf import word64
from .errors import CapExceeded
from .events import Assignment, EventSystem

DEFAULT_MAX_COLUMN = 1 << 20


def default_column_cap(n: int, eps) -> int:
    """``64 * ceil(log2(n + 2) / eps)``: a generous multiple of the number of
    columns a run is expected to touch."""
    return 64 * math.ceil(math.log2(n + 2) / float(eps))


class ResamplingTable:
    """Seed-deterministic table: each cell is a pure function of ``(seed, i, t)``.

    The 64-bit word for a cell comes from a keyed hash of ``(seed, i, t)`` and is
    mapped through the cumulative distribution of variable ``i``. Cells are
    cached on first read; concurrent first reads compute the same value.

    Parameters
    ----------
    sys : EventSystem
    seed : int
    max_column : int, optional
        Hard cap on ``t``; reads beyond it raise :class:`CapExceeded`.
    overrides : mapping ``(i, t) -> value``, optional
        Cells pinned to given values (used for hand-built and reloaded tables).
    """

    def __init__(self, sys: EventSystem, seed: int = 0, max_column: int | None = None, overrides=None):
        self.sys = sys
        self.n = sys.n
        self.seed = int(seed)
        self.max_column = DEFAULT_MAX_COLUMN if max_column is None else int(max_column)
        self._cuts = [dom.thresholds64() for dom in sys.domains]
        self._ids = [dom.value_ids for dom in sys.domains]
        self._cache: dict[tuple[int, int], int] = dict(overrides or {})
        self._lock = threading.Lock()

    def cell(self, i: int, t: int) -> int:
        key = (i, t)
        try:
            return self._cache[key]
        except KeyError:
            pass
        if not 0 <= i < self.n or t < 1:
            raise IndexError(f"cell ({i}, {t}) outside the table")
        if t > self.max_column:
            raise CapExceeded(f"column {t} exceeds table cap {self.max_column}")
        ids = self._ids[i]
        if len(ids) == 1:
            val = ids[0]
        else:
            val = ids[bisect.bisect_right(self._cuts[i], word64(self.seed, i, t))]
        with self._lock:
            self._cache[key] = val
        return val

    __call__ = cell

    def initial_assignment(self) -> Assignment:
        return tuple(self.cell(i, 1) for i in range(self.n))

    @classmethod
    def from_columns(cls, sys: EventSystem, columns, seed: int = 0, max_column: int | None = None):
        """Table whose leading cells are given per variable: ``columns[i][t-1] = R(i, t)``.
        Cells past the given prefix fall back to the seeded generator."""
        over = {(i, t + 1): v for i, col in enumerate(columns) for t, v in enumerate(col)}
        return cls(sys, seed, max_column, over)

    def materialized(self) -> list[tuple[int, int, int]]:
        return sorted((i, t, v) for (i, t), v in self._cache.items())

    def dumps(self) -> str:
        """JSON dump ``{seed, n, cells: [[i, t, value], ...]}`` of all cells read so far."""
        return json.dumps({"seed": self.seed, "n": self.n, "cells": [list(c) for c in self.materialized()]})

    @classmethod
    def loads(cls, sys: EventSystem, text: str, max_column: int | None = None) -> "ResamplingTable":
        doc = json.loads(text)
        if doc["n"] != sys.n:
            raise ValueError(f"table has n={doc['n']}, system has n={sys.n}")
        return cls(sys, doc["seed"], max_column, {(i, t): v for i, t, v in doc["cells"]})


def cell(table, i: int, t: int) -> int:
    return table.cell(i, t)


def initial_assignment(table) -> Assignment:
    return table.initial_assignment()


class SpaceTable:
    """Read-only table view of one point of a k-wise independent sample space.

    ``cell(i, t)`` is the space's value at cell index ``i * cap_T + (t - 1)``
    mapped into variable ``i``'s domain; ``t > cap_T`` raises :class:`CapExceeded`.
    """

    def __init__(self, space, point, sys: EventSystem, cap_T: int):
        from .derandomize import domain_layout

        if space.cells < sys.n * cap_T:
            raise ValueError(f"space covers {space.cells} cells, need {sys.n * cap_T}")
        self.space = space
        self.point = tuple(point)
        self.sys = sys
        self.n = sys.n
        self.cap_T = cap_T
        self.max_column = cap_T
        self._layouts = [domain_layout(dom, space.q) for dom in sys.domains]
        self._cache: dict[tuple[int, int], int] = {}

    def cell(self, i: int, t: int) -> int:
        key = (i, t)
        try:
            return self._cache[key]
        except KeyError:
            pass
        if not 0 <= i < self.n or t < 1:
            raise IndexError(f"cell ({i}, {t}) outside the table")
        if t > self.cap_T:
            raise CapExceeded(f"column {t} exceeds space table cap {self.cap_T}")
        e = self.space.evaluate(self.point, i * self.cap_T + (t - 1))
        val = self._layouts[i][e]
        self._cache[key] = val
        return val

    __call__ = cell

    def initial_assignment(self) -> Assignment:
        return tuple(self.cell(i, 1) for i in range(self.n))


def from_point(space, point, sys: EventSystem, cap_T: int) -> SpaceTable:
    return SpaceTable(space, point, sys, cap_T)
