"""Luby's randomized maximal independent set, with synchronous round counting."""

from __future__ import annotations

from typing import Iterable, Sequence

from ._prf import word64


class UndirectedGraph:
    """Simple undirected graph on vertices ``0..size-1`` (no self-loops)."""

    def __init__(self, size: int, edges: Iterable[tuple[int, int]] = ()):
        self.size = size
        adj = [set() for _ in range(size)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            adj[u].add(v)
            adj[v].add(u)
        self.adj = tuple(frozenset(a) for a in adj)

    @classmethod
    def from_relation(cls, items: Sequence, related) -> "UndirectedGraph":
        """Graph with an edge ``{a, b}`` whenever ``related(items[a], items[b])``."""
        edges = [(a, b) for a in range(len(items)) for b in range(a + 1, len(items)) if related(items[a], items[b])]
        return cls(len(items), edges)

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2


def luby_mis(graph: UndirectedGraph, seed: int = 0) -> tuple[set[int], int]:
    """Maximal independent set by random priorities.

    Each round every live vertex draws a 64-bit priority from ``(seed, round,
    vertex)``; vertices whose priority is smaller than that of every live
    neighbor join the set, and they and their neighbors leave the graph.

    Returns
    -------
    (set of vertices, number of rounds)
    """
    live = set(range(graph.size))
    chosen: set[int] = set()
    rounds = 0
    adj = graph.adj
    while live:
        rounds += 1
        prio = {v: (word64(seed, rounds, v), v) for v in live}
        winners = [v for v in live if all(prio[v] < prio[u] for u in adj[v] if u in live)]
        chosen.update(winners)
        dead = set(winners)
        for v in winners:
            dead.update(adj[v])
        live -= dead
    return chosen, rounds


def is_independent(graph: UndirectedGraph, vertices) -> bool:
    vs = set(vertices)
    return all(not (graph.adj[v] & vs) for v in vs)


def is_maximal_independent(graph: UndirectedGraph, vertices) -> bool:
    vs = set(vertices)
    if not is_independent(graph, vs):
        return False
    return all(v in vs or graph.adj[v] & vs for v in range(graph.size))
