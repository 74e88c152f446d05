"""Exact LLL criteria: the independent-set polynomial, measures and slack.

All arithmetic is in :class:`fractions.Fraction`. The alternating sums behind
``Q(I, p)`` cancel catastrophically in floating point, so floats never enter.

Exact operations enumerate independent sets of the dependency graph and are
gated by ``cap`` (number of events, default 20).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import CapExceeded, CriterionUnsatisfied
from .events import EventSystem

DEFAULT_CAP = 20
E_UPPER = Fraction(2719, 1000)
UNBOUNDED = math.inf


def _require_cap(sys: EventSystem, cap: int) -> None:
    if sys.m > cap:
        raise CapExceeded(f"{sys.m} events exceed the exact-enumeration cap {cap}")


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Alternating:
    """Memoized ``Z(U) = sum over independent J within U of prod(-p)``.

    ``Q(I, p) = prod_{B in I} p(B) * Z(all events outside N[I])`` for
    independent ``I``; the recursion removes the lowest event ``v`` from ``U``:
    ``Z(U) = Z(U - v) - p(v) Z(U - N[v])``.
    """

    def __init__(self, sys: EventSystem, p: Sequence[Fraction]):
        self.nbr = sys.neighbor_masks
        self.p = [Fraction(x) for x in p]
        self.memo = {0: Fraction(1)}

    def __call__(self, mask: int) -> Fraction:
        memo = self.memo
        if mask in memo:
            return memo[mask]
        # explicit stack: recursion depth would reach m
        stack = [mask]
        while stack:
            u = stack[-1]
            if u in memo:
                stack.pop()
                continue
            low = u & -u
            v = low.bit_length() - 1
            a, b = u ^ low, u & ~self.nbr[v]
            missing = [w for w in (a, b) if w not in memo]
            if missing:
                stack.extend(missing)
                continue
            memo[u] = memo[a] - self.p[v] * memo[b]
            stack.pop()
        return memo[mask]


def independent_sets(sys: EventSystem, within: int | None = None):
    """Yield every independent set (as a bitmask) inside ``within``, including 0."""
    if within is None:
        within = (1 << sys.m) - 1
    nbr = sys.neighbor_masks

    def rec(chosen, avail):
        yield chosen
        rest = avail
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            yield from rec(chosen | low, rest & ~nbr[v])

    yield from rec(0, within)


def _is_independent(sys: EventSystem, members) -> bool:
    members = list(members)
    for x, a in enumerate(members):
        for b in members[x + 1 :]:
            if sys.dependent(a, b):
                return False
    return len(set(members)) == len(members)


def q_polynomial(sys: EventSystem, p: Sequence[Fraction], I=(), cap: int = DEFAULT_CAP) -> Fraction:
    """Independent-set polynomial ``Q(I, p)``.

    Sum over independent ``J`` containing ``I`` of ``(-1)^{|J|-|I|} prod_{B in J} p(B)``;
    zero when ``I`` is not independent.
    """
    _require_cap(sys, cap)
    I = tuple(I)
    if not _is_independent(sys, I):
        return Fraction(0)
    full = (1 << sys.m) - 1
    outside = full
    lead = Fraction(1)
    for b in I:
        outside &= ~sys.neighbor_masks[b]
        lead *= Fraction(p[b])
    return lead * _Alternating(sys, p)(outside)


def _shearer_holds(sys: EventSystem, p: Sequence[Fraction]) -> bool:
    z = _Alternating(sys, p)
    full = (1 << sys.m) - 1
    if z(full) <= 0:
        return False
    nbr = sys.neighbor_masks

    # Q(I) = prod p * Z(outside N[I]); products are positive, so only the sign of Z matters.
    def rec(outside, avail):
        rest = avail
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            out2 = outside & ~nbr[v]
            if p[v] > 0 and z(out2) < 0:
                return False
            if not rec(out2, rest & ~nbr[v]):
                return False
        return True

    return rec(full, full)


def check_shearer(sys: EventSystem, scale=1, cap: int = DEFAULT_CAP) -> bool:
    """Shearer criterion for ``scale * P``: ``Q(empty) > 0`` and ``Q(I) >= 0`` for all
    independent ``I``. Use ``scale = 1 + eps`` for eps-slack."""
    _require_cap(sys, cap)
    scale = Fraction(scale)
    return _shearer_holds(sys, [scale * q for q in sys.probs])


def measure(sys: EventSystem, b: int, cap: int = DEFAULT_CAP) -> Fraction:
    """``mu(B) = Q({B}, P) / Q(empty, P)``."""
    return measures(sys, cap)[b]


def measures(sys: EventSystem, cap: int = DEFAULT_CAP) -> list[Fraction]:
    _require_cap(sys, cap)
    z = _Alternating(sys, sys.probs)
    full = (1 << sys.m) - 1
    q0 = z(full)
    if q0 <= 0:
        raise CriterionUnsatisfied(f"Q(empty, P) = {q0} is not positive")
    return [sys.probs[b] * z(full & ~sys.neighbor_masks[b]) / q0 for b in range(sys.m)]


def work_params(sys: EventSystem, cap: int = DEFAULT_CAP) -> tuple[Fraction, Fraction]:
    """``(W, sum mu(B) / P(B))``; the second value upper-bounds the CWD count parameter."""
    if not check_shearer(sys, 1, cap):
        raise CriterionUnsatisfied("Shearer criterion fails at scale 1")
    mu = measures(sys, cap)
    return sum(mu, Fraction(0)), sum((m / p for m, p in zip(mu, sys.probs)), Fraction(0))


def max_slack(sys: EventSystem, tol=Fraction(1, 1000), cap: int = DEFAULT_CAP):
    """Largest eps (up to ``tol``) with the Shearer criterion satisfied at ``1 + eps``.

    Returns ``eps`` such that scale ``1 + eps`` passes and ``1 + eps + tol``
    fails; :data:`UNBOUNDED` when there are no events.
    """
    _require_cap(sys, cap)
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if sys.m == 0:
        return UNBOUNDED
    if not check_shearer(sys, 1, cap):
        raise CriterionUnsatisfied("Shearer criterion fails at scale 1")
    lo = Fraction(1)
    # any single event forces scale * P(B) < 1
    hi = 1 / max(sys.probs)
    while check_shearer(sys, hi, cap):
        hi *= 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if check_shearer(sys, mid, cap):
            lo = mid
        else:
            hi = mid
    return lo - 1


def check_symmetric(sys: EventSystem, eps=0, e_bound: Fraction = E_UPPER) -> bool:
    """``e p d (1 + eps) <= 1`` with ``p = max P(B)``, ``d = max |N(B)|`` (self included)
    and ``e`` replaced by the rational upper bound ``e_bound``."""
    if sys.m == 0:
        return True
    p = max(sys.probs)
    d = sys.max_degree()
    return Fraction(e_bound) * p * d * (1 + Fraction(eps)) <= 1


def check_asymmetric(sys: EventSystem, x: Sequence[Fraction], eps=0) -> bool:
    """``(1 + eps) P(B) <= x(B) prod_{A ~ B, A != B} (1 - x(A))`` for every ``B``."""
    eps = Fraction(eps)
    for b in range(sys.m):
        if not 0 < x[b] < 1:
            raise ValueError(f"x({b}) = {x[b]} outside (0, 1)")
    for b in range(sys.m):
        rhs = Fraction(x[b])
        for a in sys.neighbors[b]:
            if a != b:
                rhs *= 1 - Fraction(x[a])
        if (1 + eps) * sys.probs[b] > rhs:
            return False
    return True


def check_cluster_expansion(sys: EventSystem, mu_tilde: Sequence[Fraction], eps=0, cap: int = DEFAULT_CAP) -> bool:
    """``mu~(B) >= (1 + eps) P(B) sum_{independent I in N(B)} prod_{A in I} mu~(A)``."""
    eps = Fraction(eps)
    for b in range(sys.m):
        if len(sys.neighbors[b]) > cap:
            raise CapExceeded(f"|N({b})| = {len(sys.neighbors[b])} exceeds cap {cap}")
        total = Fraction(0)
        for mask in independent_sets(sys, sys.neighbor_masks[b]):
            term = Fraction(1)
            for a in _bits(mask):
                term *= Fraction(mu_tilde[a])
            total += term
        if Fraction(mu_tilde[b]) < (1 + eps) * sys.probs[b] * total:
            return False
    return True


def asymmetric_preset(sys: EventSystem, kind: str = "ep", e_bound: Fraction = E_UPPER) -> list[Fraction]:
    """Weighting functions commonly used with the asymmetric criterion.

    ``"ep"``: ``x(B) = eP/(1 + eP)``; ``"inverse_degree"``: ``x(B) = 1/d``.
    Neither is claimed to be optimal.
    """
    if kind == "ep":
        return [Fraction(e_bound) * p / (1 + Fraction(e_bound) * p) for p in sys.probs]
    if kind == "inverse_degree":
        d = max(sys.max_degree(), 2)
        return [Fraction(1, d)] * sys.m
    raise ValueError(f"unknown preset {kind!r}")


def cluster_preset(sys: EventSystem, e_bound: Fraction = E_UPPER) -> list[Fraction]:
    """``mu~(B) = x/(1 - x)`` for the ``"ep"`` asymmetric preset, i.e. ``eP``."""
    return [Fraction(e_bound) * p for p in sys.probs]


def check_deterministic(sys: EventSystem, eps, e_bound: Fraction = E_UPPER) -> bool:
    """``e p d^(1 + eps) <= 1`` exactly, for rational ``eps = a/b``:
    equivalent to ``d^(a + b) <= (1 / (e p))^b``."""
    if sys.m == 0:
        return True
    eps = Fraction(eps)
    p = max(sys.probs)
    d = sys.max_degree()
    a, b = eps.numerator, eps.denominator
    return Fraction(d) ** (a + b) <= (1 / (Fraction(e_bound) * p)) ** b


def _fmt(x):
    if x is None:
        return None
    if isinstance(x, float):
        return "unbounded" if math.isinf(x) else repr(x)
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class ShearerReport:
    q_empty: Fraction | None
    mu: list[Fraction] | None
    W: Fraction | None
    w_prime_bound: Fraction | None
    max_slack: Fraction | float | None
    satisfied: dict[str, bool] = field(default_factory=dict)
    scale: Fraction = Fraction(1)

    def to_dict(self, sys: EventSystem | None = None) -> dict:
        mu = None
        if self.mu is not None:
            ids = [ev.id for ev in sys.events] if sys is not None else range(len(self.mu))
            mu = {str(i): _fmt(v) for i, v in zip(ids, self.mu)}
        return {
            "scale": _fmt(self.scale),
            "q_empty": _fmt(self.q_empty),
            "mu": mu,
            "W": _fmt(self.W),
            "w_prime_bound": _fmt(self.w_prime_bound),
            "max_slack": _fmt(self.max_slack),
            "satisfied": dict(self.satisfied),
        }

    def to_json(self, sys: EventSystem | None = None) -> str:
        return json.dumps(self.to_dict(sys), indent=2)


def report(sys: EventSystem, scale=1, tol=Fraction(1, 1000), cap: int = DEFAULT_CAP) -> ShearerReport:
    """Every criterion the system can be checked against.

    Exact Shearer quantities are filled only when ``m <= cap``; the symmetric,
    asymmetric (``"ep"`` preset) and cluster-expansion checks use
    ``eps = scale - 1`` and are always reported.
    """
    scale = Fraction(scale)
    eps = scale - 1
    sat = {"symmetric": check_symmetric(sys, eps)}
    sat["asymmetric"] = check_asymmetric(sys, asymmetric_preset(sys), eps)
    try:
        sat["cluster_expansion"] = check_cluster_expansion(sys, cluster_preset(sys), eps, cap)
    except CapExceeded:
        pass
    rep = ShearerReport(None, None, None, None, None, sat, scale)
    if sys.m > cap:
        return rep
    sat["shearer"] = check_shearer(sys, scale, cap)
    full = (1 << sys.m) - 1
    rep.q_empty = _Alternating(sys, sys.probs)(full)
    if check_shearer(sys, 1, cap):
        rep.mu = measures(sys, cap)
        rep.W, rep.w_prime_bound = work_params(sys, cap)
        rep.max_slack = max_slack(sys, tol, cap)
    return rep
