"""Deterministic solving over a pairwise independent polynomial space.

Table cells come from a low-degree polynomial over a finite field. The
search walks the seed points in lexicographic order, so the answer is the
same on every run and for every thread count.
"""
from fractions import Fraction

from lllkit import random_ksat, solve_deterministic

sys, _ = random_ksat(30, 3, 2, seed=2)
x, stats = solve_deterministic(sys, epsilon=Fraction(1, 2), return_stats=True)
print("avoids all:", sys.avoids(x), "| points tried:", stats.points_tried)
print("repeat with 4 threads agrees:", solve_deterministic(sys, epsilon=Fraction(1, 2), threads=4) == x)
