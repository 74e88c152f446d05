"""Sequential and parallel resampling on a random 3-SAT formula.

Both engines read variable values from the same seeded resampling table,
so reruns are byte-identical. Try changing the seed or the selection rule.
"""
from lllkit import ResamplingTable, random_ksat, run_parallel, run_sequential

sys, clauses = random_ksat(50, 3, 2, seed=1)
print(f"{sys.n} variables, {sys.m} clauses, max degree {sys.max_degree()}")

x, log, stats = run_sequential(sys, ResamplingTable(sys, seed=5))
print("sequential: avoids all events =", sys.avoids(x), "| resamplings =", stats.resamplings)

x, _, stats = run_parallel(sys, ResamplingTable(sys, seed=5), seed=5)
print("parallel:   avoids all events =", sys.avoids(x), "| rounds =", stats.rounds)
