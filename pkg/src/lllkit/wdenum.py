"""Single-MIS LLL algorithm: enumerate compatible collectible WDs, then finalize.

Enumeration grows a family ``F_k`` of collectible witness DAGs (CWDs)
compatible with a fixed table ``R``. Each generation merges consistent pairs
and extends members by a new sink. Afterwards one MIS of the inconsistency
graph over the single-sink members decides which resamplings happen, and
the final configuration is read off the merged WD.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from ._prf import derive_seed
from .errors import CapExceeded
from .events import Assignment, EventSystem
from .mis import UndirectedGraph, is_maximal_independent, luby_mis
from .sequential import EngineStats
from .table import ResamplingTable, default_column_cap
from .wd import (
    WitnessDag,
    collectible_targets,
    consistent,
    extend_with_sink,
    merge,
    merge_all,
    node_true,
    single,
)


def choose_cap(n: int, epsilon, c=8) -> int:
    """``K = ceil(c * ln((n + 2) / eps) / eps)``."""
    epsilon = float(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if c <= 0:
        raise ValueError("c must be positive")
    return math.ceil(float(c) * math.log((n + 2) / epsilon) / epsilon)


@dataclass
class WdFamily:
    """The family ``F_k``: CWDs keyed by canonical key."""

    k: int
    members: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.members)

    def __contains__(self, G):
        return G.key in self.members

    def __iter__(self):
        return iter(self.members.values())

    @property
    def max_size(self) -> int:
        return max((len(G) for G in self.members.values()), default=0)

    def single_sink(self) -> list[WitnessDag]:
        """Members with exactly one sink, in insertion order."""
        return [G for G in self.members.values() if len(G.sinks) == 1]


def enumerate_wds(sys: EventSystem, table, K: int, s_cap: int = 100_000):
    """Compute ``F_K`` and the single-sink WDs compatible with ``table``.

    ``F_1`` holds one single-node WD per event true on ``R(., 1)``. Going from
    ``F_k`` to ``F_{k+1}``, members are carried forward, consistent pairs are
    merged when the merge is collectible with at most ``k + 1`` nodes, and each
    member collectible to ``B`` is extended by a new sink labeled ``B`` when
    that sink's configuration makes ``B`` true.

    Work is semi-naive: a pair or extension is evaluated once, when its newest
    member first appears. Merges rejected only for size are revisited once
    ``k + 1`` reaches their size. The result equals the generation-by-generation
    definition, which contains exactly the compatible CWDs with at most ``K``
    nodes.

    Returns
    -------
    (WdFamily, list of single-sink WDs)

    Raises
    ------
    CapExceeded
        When the family would exceed ``s_cap`` members.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    x0 = table.initial_assignment()
    family = WdFamily(1)
    members = family.members
    frontier = []
    for b in range(sys.m):
        if sys.evaluate(b, x0):
            G = single(sys, b)
            members[G.key] = G
            frontier.append(G)
    _check_cap(family, s_cap)
    pending: dict = {}  # key -> merged WD waiting for the size bound to grow
    nmask = sys.neighbor_masks
    full = (1 << sys.m) - 1
    # extended labels as bits: a merge's size and sinks then cost a few int ops
    bit_of: dict = {}
    bit_nmask: list[int] = []
    outline: dict = {}

    def masks(G):
        key = G.key
        got = outline.get(key)
        if got is None:
            ext, succs = G.ext_labels, G.succs
            e = ns = 0
            for v, lab in enumerate(ext):
                bit = bit_of.get(lab)
                if bit is None:
                    bit = bit_of[lab] = len(bit_nmask)
                    bit_nmask.append(nmask[lab[0]])
                e |= 1 << bit
                if succs[v]:
                    ns |= 1 << bit
            got = outline[key] = (G, e, ns, len(G))
        return got
    k = 1
    while k < K:
        limit = k + 1
        fresh: dict = {}

        def admit(H):
            fresh[H.key] = H
            overflow()

        def overflow():
            # pending merges of at most K nodes are certain to join F_K
            if len(members) + len(fresh) + len(pending) > s_cap:
                members.update(fresh)
                members.update(pending)
                family.k = k + 1
                _check_cap(family, s_cap)

        for key in [key for key, H in pending.items() if len(H) <= limit]:
            H = pending.pop(key)
            if H.key not in members and H.key not in fresh:
                admit(H)
        old = list(members.values())
        frontier_keys = {G.key for G in frontier}
        settled = [masks(G) for G in old if G.key not in frontier_keys]
        front = [masks(G) for G in frontier]
        for idx, (G1, e1, n1, s1) in enumerate(front):
            for G2, e2, n2, s2 in settled + front[idx + 1 :]:
                union = e1 | e2
                size = union.bit_count()
                # over K nodes, or one side contains the other (the merge is already a member)
                if size > K or size == s1 or size == s2:
                    continue
                mask = full
                sinks = union & ~(n1 | n2)
                while sinks and mask:
                    low = sinks & -sinks
                    mask &= bit_nmask[low.bit_length() - 1]
                    sinks ^= low
                if not mask or not consistent(G1, G2):
                    continue
                H = merge(G1, G2)
                key = H.key
                if key in members or key in fresh or key in pending:
                    continue
                if len(H) <= limit:
                    admit(H)
                else:
                    pending[key] = H
                    overflow()
        for G in frontier:
            for b in sorted(collectible_targets(G)):
                H = extend_with_sink(G, b)
                if H.key in members or H.key in fresh:
                    continue
                if node_true(H, len(H) - 1, table):
                    admit(H)
        k += 1
        members.update(fresh)
        family.k = k
        _check_cap(family, s_cap)
        frontier = list(fresh.values())
        if not frontier:
            if not pending:
                family.k = K
                break
            # nothing changes until k + 1 reaches the smallest pending size
            k = max(k, min(min(len(H) for H in pending.values()) - 1, K))
            family.k = k
    return family, family.single_sink()


def _check_cap(family: WdFamily, s_cap: int) -> None:
    if len(family) > s_cap:
        raise CapExceeded(f"WD family grew past s_cap={s_cap} at generation {family.k}", partial=family)


def final_configuration(sys: EventSystem, gamma, table, seed: int = 0, return_details: bool = False):
    """``X*(i) = R(i, |G[i]| + 1)`` where ``G`` merges a maximal pairwise-consistent
    subfamily of ``gamma`` chosen by one MIS on the inconsistency graph."""
    gamma = list(gamma)
    graph = UndirectedGraph.from_relation(gamma, lambda a, b: not consistent(a, b))
    chosen, mis_rounds = luby_mis(graph, seed)
    assert is_maximal_independent(graph, chosen)
    picked = [gamma[v] for v in sorted(chosen)]
    G = merge_all(picked, sys)
    x = tuple(table.cell(i, G.path_length(i) + 1) for i in range(sys.n))
    if return_details:
        return x, {"merged": G, "picked": picked, "mis_rounds": mis_rounds, "graph": graph}
    return x


def solve_table(sys: EventSystem, table, K: int, s_cap: int, mis_seed: int = 0):
    """One attempt on a fixed table. Returns ``(assignment or None, stats, family, gamma)``;
    ``None`` means the final configuration did not verify."""
    stats = EngineStats(per_event=[0] * sys.m)
    family, gamma = enumerate_wds(sys, table, K, s_cap)
    x, info = final_configuration(sys, gamma, table, mis_seed, return_details=True)
    stats.mis_invocations = 1
    stats.mis_rounds = info["mis_rounds"]
    stats.gamma_size = len(gamma)
    stats.cwd_count = len(family)
    stats.max_wd_size = family.max_size
    stats.generations = family.k
    merged = info["merged"]
    if merged.labels:
        # resamplings the merged WD stands for
        for b in merged.labels:
            stats.per_event[b] += 1
    stats.resamplings = stats.steps = len(merged)
    ok = sys.avoids(x)
    return (x if ok else None), stats, family, gamma


def run_wdenum(
    sys: EventSystem,
    seed: int = 0,
    epsilon_hint=0.25,
    c=8,
    s_cap: int = 100_000,
    max_doublings: int = 3,
    max_reseeds: int = 4,
    K: int | None = None,
) -> tuple[Assignment, EngineStats]:
    """Las Vegas wrapper: draw ``R`` from ``seed``, enumerate with
    ``K = choose_cap(n, epsilon_hint, c)``, finalize and verify.

    A failed verification doubles ``K`` on the same table (up to
    ``max_doublings`` times); after that, or on family overflow, the table is
    re-seeded (up to ``max_reseeds`` times).
    """
    start = time.perf_counter()
    K0 = choose_cap(sys.n, epsilon_hint, c) if K is None else int(K)
    attempts = 0
    last_error = None
    for reseed in range(max_reseeds + 1):
        table_seed = seed if reseed == 0 else derive_seed(seed, reseed)
        Kcur = K0
        col_cap = max(default_column_cap(sys.n, epsilon_hint), (K0 << max_doublings) + 2)
        table = ResamplingTable(sys, table_seed, max_column=col_cap)
        for _ in range(max_doublings + 1):
            try:
                x, stats, _, _ = solve_table(sys, table, Kcur, s_cap)
            except CapExceeded as exc:
                last_error = exc
                attempts += 1
                break
            if x is not None:
                stats.retries = attempts
                stats.wall_time = time.perf_counter() - start
                return x, stats
            attempts += 1
            Kcur *= 2
    raise CapExceeded(f"no verified assignment after {attempts} attempts", partial=last_error)
