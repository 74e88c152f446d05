"""Enumerate the compatible witness DAGs of a table, then solve from them.

This engine never runs the resampling process. From the table alone it
builds every collectible WD that could have appeared. One maximal
independent set over the single-sink WDs gives the final assignment.
"""
from lllkit import ResamplingTable, choose_cap, enumerate_wds, final_configuration, tiny_a
from lllkit.table import default_column_cap

sys = tiny_a()
K = choose_cap(sys.n, 0.25)
table = ResamplingTable(sys, seed=3, max_column=max(default_column_cap(sys.n, 0.25), 2 * K + 2))
family, gamma = enumerate_wds(sys, table, K)
print(f"K = {K}: {len(family)} compatible collectible WDs, {len(gamma)} with a single sink")
x, details = final_configuration(sys, gamma, table, return_details=True)
print("picked", len(details["picked"]), "WDs; assignment", x, "avoids all:", sys.avoids(x))
