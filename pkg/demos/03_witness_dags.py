"""Witness DAGs built from an execution log, and the merge algebra.

Any prefix of the full witness DAG of a log is itself a WD. Two prefixes of
the same DAG are always consistent, and merging them gives a prefix again.
"""
from lllkit import ResamplingTable, WitnessDag, consistent, merge, run_sequential, tiny_a
from lllkit.wd import full_witness_dag, is_prefix, prefix

sys = tiny_a()
x, log, stats = run_sequential(sys, ResamplingTable(sys, seed=8))
events = log.events
print("resampled events:", [sys.events[b].id for b in events])

G = full_witness_dag(sys, events)
print("full WD:", G.to_json())
if len(G) >= 2:
    A = prefix(G, [0])
    B = prefix(G, [len(G) - 1])
    print("prefixes consistent:", consistent(A, B))
    AB = merge(A, B)
    print("merge size", len(AB), "is a prefix of G:", is_prefix(AB, G))

chain = WitnessDag(sys, [0, 1], [(0, 1)])
print("chain B1 -> B2, sinks:", chain.sinks)
