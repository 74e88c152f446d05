"""Witness DAGs.

A witness DAG (WD) is a DAG whose nodes are labeled by bad events, with an
edge between two nodes exactly when their labels are dependent (the
comparability conditions). Nodes are numbered ``0..|G|-1`` by position; two
WDs compare equal when they are isomorphic as extended-labeled DAGs, via
:meth:`WitnessDag.key`.

Every node carries an extended label ``(B, k)``: it is the ``k``-th node
labeled ``B`` along the edge order. Merge and canonical keys work purely on
extended labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InconsistentMerge
from .events import EventSystem

ExtLabel = tuple[int, int]
CanonicalKey = tuple[frozenset, frozenset]


@dataclass(frozen=True)
class Violation:
    """Why a labeled digraph is not a WD."""

    kind: str  # "cycle" | "missing_edge" | "forbidden_edge" | "bad_label" | "both_directions"
    nodes: tuple[int, ...]

    def __str__(self):
        text = {
            "cycle": "cycle through nodes",
            "missing_edge": "missing comparability edge between",
            "forbidden_edge": "edge between independent events at",
            "bad_label": "unknown event label at",
            "both_directions": "edges in both directions between",
        }[self.kind]
        return f"{text} {self.nodes}"


class WitnessDag:
    """Event-labeled DAG satisfying the comparability conditions.

    Parameters
    ----------
    sys : EventSystem
        Supplies scopes and the dependency relation.
    labels : sequence of int
        Event index of each node.
    edges : iterable of (int, int)
        Directed edges ``u -> v`` (``u`` precedes ``v``).
    """

    def __init__(self, sys: EventSystem, labels: Sequence[int], edges: Iterable[tuple[int, int]] = ()):
        self.sys = sys
        self.labels = tuple(labels)
        if isinstance(edges, frozenset):
            self.edges = edges
        else:
            self.edges = frozenset((int(u), int(v)) for u, v in edges)

    # -- basic structure ----------------------------------------------------

    def __len__(self):
        return len(self.labels)

    @cached_property
    def preds(self) -> tuple[frozenset, ...]:
        p = [set() for _ in self.labels]
        for u, v in self.edges:
            p[v].add(u)
        return tuple(frozenset(x) for x in p)

    @cached_property
    def succs(self) -> tuple[frozenset, ...]:
        s = [set() for _ in self.labels]
        for u, v in self.edges:
            s[u].add(v)
        return tuple(frozenset(x) for x in s)

    @cached_property
    def sinks(self) -> tuple[int, ...]:
        return tuple(v for v in range(len(self)) if not self.succs[v])

    @cached_property
    def ext_labels(self) -> tuple[ExtLabel, ...]:
        lab = self.labels
        return tuple((lab[v], 1 + sum(1 for u in self.preds[v] if lab[u] == lab[v])) for v in range(len(lab)))

    @cached_property
    def ext_set(self) -> frozenset:
        return frozenset(self.ext_labels)

    @cached_property
    def key(self) -> CanonicalKey:
        # frozensets cache their hash, which matters for large WDs used as dict keys
        ext = self.ext_labels
        return self.ext_set, frozenset((ext[u], ext[v]) for u, v in self.edges)

    def __eq__(self, other):
        if not isinstance(other, WitnessDag):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"WitnessDag(labels={list(self.labels)}, edges={sorted(self.edges)})"

    @cached_property
    def paths(self) -> dict[int, tuple[int, ...]]:
        """Label sequence of every nonempty variable path, in precedence order."""
        scope = self.sys.scope
        members: dict[int, list[int]] = {}
        for v, b in enumerate(self.labels):
            for i in scope(b):
                members.setdefault(i, []).append(v)
        out = {}
        for i, nodes in members.items():
            out[i] = tuple(self.labels[v] for v in self._ordered(nodes))
        return out

    def _ordered(self, nodes: list[int]) -> list[int]:
        # nodes on one variable form a transitive tournament: in-degree inside the set gives the order
        s = set(nodes)
        return sorted(nodes, key=lambda v: len(self.preds[v] & s))

    def path_length(self, i: int) -> int:
        """``|G[i]|``."""
        return len(self.paths.get(i, ()))

    def depth(self) -> int:
        """Number of nodes on the longest directed path (0 for the empty WD)."""
        best = [0] * len(self)
        for v in self.topological_order():
            best[v] = 1 + max((best[u] for u in self.preds[v]), default=0)
        return max(best, default=0)

    def topological_order(self) -> list[int]:
        indeg = [len(p) for p in self.preds]
        ready = [v for v in range(len(self)) if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop()
            order.append(v)
            for w in self.succs[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        if len(order) != len(self):
            raise ValueError("graph has a cycle")
        return order

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        ids = [ev.id for ev in self.sys.events]
        return {
            "nodes": [{"id": v, "event": ids[b], "k": k} for v, (b, k) in enumerate(self.ext_labels)],
            "edges": [list(e) for e in sorted(self.edges)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, sys: EventSystem, doc: dict) -> "WitnessDag":
        index = {ev.id: b for b, ev in enumerate(sys.events)}
        nodes = sorted(doc["nodes"], key=lambda x: x["id"])
        pos = {node["id"]: p for p, node in enumerate(nodes)}
        labels = [index[node["event"]] for node in nodes]
        return cls(sys, labels, [(pos[u], pos[v]) for u, v in doc["edges"]])


# -- constructors --------------------------------------------------------------


def single(sys: EventSystem, b: int) -> WitnessDag:
    return WitnessDag(sys, (b,))


def extend_with_sink(G: WitnessDag, b: int) -> WitnessDag:
    """Add a node labeled ``b`` with an edge from every node whose label is dependent on ``b``."""
    nb = G.sys.neighbor_sets[b]
    v = len(G)
    new_edges = [(u, v) for u, lab in enumerate(G.labels) if lab in nb]
    H = WitnessDag(G.sys, G.labels + (b,), G.edges.union(new_edges))
    if b not in nb:
        return H
    # the new node follows every node labeled b, so its extended label is known
    ext = G.ext_labels
    e = (b, 1 + G.labels.count(b))
    H.__dict__["ext_labels"] = ext + (e,)
    vs, es = G.key
    H.__dict__["key"] = (vs | {e}, es.union((ext[u], e) for u, _ in new_edges))
    return H


def full_witness_dag(sys: EventSystem, log: Sequence[int]) -> WitnessDag:
    """One node per log entry; edge ``v_i -> v_j`` iff ``i < j`` and the labels are dependent."""
    edges = []
    for j, b in enumerate(log):
        nb = sys.neighbor_sets[b]
        edges.extend((i, j) for i in range(j) if log[i] in nb)
    return WitnessDag(sys, log, edges)


def moser_tardos_tree(sys: EventSystem, log: Sequence[int], t: int) -> list[tuple[int, int | None, int]]:
    """The witness tree for the ``t``-th resampling (1-based) as
    ``(log position, parent position, depth)`` triples, root first.

    Scanning backwards from ``t - 1``, entry ``j`` becomes a child of the
    deepest existing node whose label is dependent on ``log[j]``; ties go to
    the smallest node id (earliest-attached node).
    """
    if not 1 <= t <= len(log):
        raise ValueError(f"t={t} outside 1..{len(log)}")
    nodes = [(t - 1, None, 0)]
    for j in range(t - 2, -1, -1):
        nb = sys.neighbor_sets[log[j]]
        best = None
        for nid, (pos, _, depth) in enumerate(nodes):
            if log[pos] in nb and (best is None or depth > nodes[best][2]):
                best = nid
        if best is not None:
            nodes.append((j, nodes[best][0], nodes[best][2] + 1))
    return nodes


def witness_tree(sys: EventSystem, log: Sequence[int], t: int) -> WitnessDag:
    """Witness tree of the ``t``-th resampling, returned as the WD it induces.

    Nodes are the attached log entries in time order; every dependent pair
    gets an edge from the earlier entry to the later one. The tree's own
    parent function is available from :func:`moser_tardos_tree`.
    """
    positions = sorted(pos for pos, _, _ in moser_tardos_tree(sys, log, t))
    return full_witness_dag(sys, [log[p] for p in positions])


# -- checks --------------------------------------------------------------------


def validate(G: WitnessDag) -> Violation | None:
    """``None`` when ``G`` is a WD, otherwise the first violation found."""
    sys = G.sys
    for v, b in enumerate(G.labels):
        if not 0 <= b < sys.m:
            return Violation("bad_label", (v,))
    for u, v in G.edges:
        if not (0 <= u < len(G) and 0 <= v < len(G)) or u == v:
            return Violation("cycle" if u == v else "bad_label", (u, v))
        if (v, u) in G.edges:
            return Violation("both_directions", (min(u, v), max(u, v)))
        if not sys.dependent(G.labels[u], G.labels[v]):
            return Violation("forbidden_edge", (u, v))
    for u in range(len(G)):
        for v in range(u + 1, len(G)):
            if sys.dependent(G.labels[u], G.labels[v]) and (u, v) not in G.edges and (v, u) not in G.edges:
                return Violation("missing_edge", (u, v))
    try:
        G.topological_order()
    except ValueError:
        return Violation("cycle", _find_cycle(G))
    return None


def _find_cycle(G: WitnessDag) -> tuple[int, ...]:
    color = [0] * len(G)
    stack: list[int] = []

    def dfs(v):
        color[v] = 1
        stack.append(v)
        for w in sorted(G.succs[v]):
            if color[w] == 1:
                return tuple(stack[stack.index(w) :])
            if color[w] == 0:
                got = dfs(w)
                if got:
                    return got
        stack.pop()
        color[v] = 2
        return None

    for v in range(len(G)):
        if color[v] == 0:
            got = dfs(v)
            if got:
                return got
    return ()


def variable_path(G: WitnessDag, i: int) -> list[int]:
    """Nodes of ``G[i]`` (labels whose scope contains ``i``) in precedence order."""
    scope = G.sys.scope_set
    return G._ordered([v for v, b in enumerate(G.labels) if i in scope(b)])


def ancestors(G: WitnessDag, nodes: Iterable[int]) -> set[int]:
    """Nodes with a path to at least one of ``nodes`` (the nodes themselves included)."""
    seen = set()
    stack = list(nodes)
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(G.preds[v])
    return seen


def induced(G: WitnessDag, keep: Iterable[int]) -> WitnessDag:
    keep = sorted(set(keep))
    pos = {v: p for p, v in enumerate(keep)}
    edges = [(pos[u], pos[v]) for u, v in G.edges if u in pos and v in pos]
    return WitnessDag(G.sys, [G.labels[v] for v in keep], edges)


def prefix(G: WitnessDag, nodes: Iterable[int]) -> WitnessDag:
    """Induced subgraph on all nodes having a path to some node of ``nodes``."""
    return induced(G, ancestors(G, nodes))


def remove_node(G: WitnessDag, v: int) -> WitnessDag:
    return induced(G, (u for u in range(len(G)) if u != v))


def node_configuration(G: WitnessDag, v: int, table) -> dict[int, int]:
    """Values ``R(i, 1 + #{w in G[i] : w -> v})`` for ``i`` in the scope of ``v``'s label."""
    scope_set = G.sys.scope_set
    preds = G.preds[v]
    labels = G.labels
    out = {}
    for i in G.sys.scope(labels[v]):
        y = sum(1 for u in preds if i in scope_set(labels[u]))
        out[i] = table.cell(i, 1 + y)
    return out


def node_true(G: WitnessDag, v: int, table) -> bool:
    return G.sys.evaluate(G.labels[v], node_configuration(G, v, table))


def is_compatible(G: WitnessDag, table) -> bool:
    """Every node's label is true on its node configuration."""
    return all(node_true(G, v, table) for v in range(len(G)))


def weight(G: WitnessDag, rho=0) -> Fraction:
    """Adjusted weight ``prod P(label) * (1 + rho)^|G|``; ``rho = 0`` gives the plain weight."""
    w = Fraction(1)
    for b in G.labels:
        w *= G.sys.probs[b]
    return w * (1 + Fraction(rho)) ** len(G)


def _is_initial_segment(a: tuple, b: tuple) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def consistent(G1: WitnessDag, G2: WitnessDag) -> bool:
    """For every variable, one of the two label paths is an initial segment of the other."""
    p1, p2 = G1.paths, G2.paths
    if len(p1) > len(p2):
        p1, p2 = p2, p1
    for i, s1 in p1.items():
        s2 = p2.get(i)
        if s2 is None:
            continue
        if len(s1) <= len(s2):
            if s2[: len(s1)] != s1:
                return False
        elif s1[: len(s2)] != s2:
            return False
    return True


def merge(G1: WitnessDag, G2: WitnessDag) -> WitnessDag:
    """``G1 v G2``: union of nodes and edges, matched by extended label."""
    if G1.sys is not G2.sys and G1.sys != G2.sys:
        raise ValueError("cannot merge WDs over different event systems")
    if not consistent(G1, G2):
        raise InconsistentMerge("witness DAGs are not consistent")
    ext1 = G1.ext_labels
    index = {e: v for v, e in enumerate(ext1)}
    labels = list(G1.labels)
    for e in G2.ext_labels:
        if e not in index:
            index[e] = len(labels)
            labels.append(e[0])
    if len(labels) == len(G1):
        ext2 = G2.ext_labels
        extra = [(index[ext2[u]], index[ext2[v]]) for u, v in G2.edges]
        if G1.edges.issuperset(extra):
            return G1
    ext2 = G2.ext_labels
    edges = set(G1.edges)
    edges.update((index[ext2[u]], index[ext2[v]]) for u, v in G2.edges)
    return WitnessDag(G1.sys, labels, frozenset(edges))


def merge_all(dags: Iterable[WitnessDag], sys: EventSystem | None = None) -> WitnessDag:
    """Merge of a family in one pass.

    Each member's paths are compared with the longest path seen so far on
    every variable, so the family is pairwise consistent exactly when every
    comparison succeeds.
    """
    dags = list(dags)
    if not dags:
        if sys is None:
            raise ValueError("merge of an empty family needs the event system")
        return WitnessDag(sys, ())
    if len(dags) == 1:
        return dags[0]
    first = dags[0]
    longest: dict[int, tuple] = {}
    index: dict = {}
    labels: list[int] = []
    edges: set = set()
    for G in dags:
        if G.sys is not first.sys and G.sys != first.sys:
            raise ValueError("cannot merge WDs over different event systems")
        for i, path in G.paths.items():
            cur = longest.get(i, ())
            if len(path) > len(cur):
                cur, path = path, cur
                longest[i] = cur
            if cur[: len(path)] != path:
                raise InconsistentMerge("witness DAGs are not consistent")
        ext = G.ext_labels
        for e in ext:
            if e not in index:
                index[e] = len(labels)
                labels.append(e[0])
        edges.update((index[ext[u]], index[ext[v]]) for u, v in G.edges)
    return WitnessDag(first.sys, labels, frozenset(edges))


def collectible_targets(G: WitnessDag) -> set[int]:
    """Events ``B`` dependent on every sink label of ``G`` (all events when ``G`` is empty)."""
    sys = G.sys
    sinks = G.sinks
    if not sinks:
        return set(range(sys.m))
    labels = {G.labels[v] for v in sinks}
    it = iter(labels)
    out = set(sys.neighbor_sets[next(it)])
    for b in it:
        out &= sys.neighbor_sets[b]
    return out


def is_collectible(G: WitnessDag) -> bool:
    return bool(collectible_targets(G))


def is_prefix(H: WitnessDag, G: WitnessDag) -> bool:
    """``H`` is (isomorphic to) a prefix of ``G``."""
    ext = {e: v for v, e in enumerate(G.ext_labels)}
    try:
        nodes = [ext[e] for e in H.ext_labels]
    except KeyError:
        return False
    return prefix(G, nodes) == H
