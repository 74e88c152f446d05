"""Exact criterion checks on a two-event toy system.

Two bits, B1 = {X1=0, X2=0} (probability 1/4) and B2 = {X2=1}
(probability 1/2). They share X2, so they are dependent. The independence
polynomial is 1 - 1/4 - 1/2 = 1/4, which is positive: the system is inside
the Shearer region, and the slack printed below is how far it can be scaled.
"""
from fractions import Fraction

from lllkit import max_slack, report, tiny_a
from lllkit.shearer import check_shearer

sys = tiny_a()
print(report(sys).to_json(sys))
eps = max_slack(sys)
print("max slack:", eps, "~", float(eps))
print("scaled by 1 + slack still satisfied:", check_shearer(sys, 1 + eps))
print("scaled by 4/3:", check_shearer(sys, Fraction(4, 3)))
