"""Deterministic search over an exact k-wise independent sample space.

A point ``a = (a_0, ..., a_{k-1})`` of ``GF(q)^k`` assigns cell ``j`` the field
value ``a_0 + a_1 j + ... + a_{k-1} j^(k-1)``. Distinct cells are distinct field
points, so any ``k`` cells are jointly uniform over the support. Field values
are mapped into a variable's domain through its cumulative layout, which
requires every probability to be a multiple of ``1/q``.

``q`` may be a prime power. Uniform Boolean domains force ``q = 2^r``, and
``q = 2`` alone could only cover two cells.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache

from .errors import CapExceeded, CriterionUnsatisfied, InvalidModel, UnsupportedDistribution
from .events import Assignment, EventSystem, VariableDomain
from .sequential import EngineStats
from .shearer import check_deterministic
from .table import SpaceTable
from .wdenum import choose_cap, solve_table


def _prime_power(q: int) -> tuple[int, int] | None:
    """``(p, r)`` with ``q == p**r`` and ``p`` prime, else ``None``."""
    if q < 2:
        return None
    p = q
    for f in range(2, math.isqrt(q) + 1):
        if q % f == 0:
            p = f
            break
    r, rest = 0, q
    while rest % p == 0:
        rest //= p
        r += 1
    return (p, r) if rest == 1 else None


def is_prime(q: int) -> bool:
    pr = _prime_power(q)
    return pr is not None and pr[1] == 1


class GF:
    """The finite field with ``q = p^r`` elements.

    Elements are the integers ``0..q-1``; for ``r > 1`` the base-``p`` digits of
    an integer are the coefficients of a polynomial modulo a primitive
    polynomial. Multiplication goes through log/antilog tables.
    """

    def __init__(self, q: int):
        pr = _prime_power(q)
        if pr is None:
            raise InvalidModel(f"{q} is not a prime power")
        self.q = q
        self.p, self.r = pr
        if self.r == 1:
            self._exp = self._log = None
        else:
            self._exp, self._log = _tables(self.p, self.r)

    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.q
        p = self.p
        if p == 2:
            return a ^ b
        out, scale = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def mul(self, a: int, b: int) -> int:
        if self.r == 1:
            return a * b % self.q
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)


def _poly_mulx(a: int, p: int, r: int, modulus: tuple[int, ...]) -> int:
    """Multiply the element ``a`` by ``x`` modulo the monic polynomial whose
    low coefficients are ``modulus``."""
    digits = [(a // p**i) % p for i in range(r)]
    top = digits[-1]
    digits = [0] + digits[:-1]
    if top:
        digits = [(d - top * c) % p for d, c in zip(digits, modulus)]
    return sum(d * p**i for i, d in enumerate(digits))


@lru_cache(maxsize=None)
def _tables(p: int, r: int):
    q = p**r
    for low in itertools.product(range(p), repeat=r):
        if low[0] == 0:
            continue
        exp = [1]
        a = 1
        for _ in range(q - 2):
            a = _poly_mulx(a, p, r, low)
            if a == 1:
                break
            exp.append(a)
        # x generates the multiplicative group iff its order is q - 1
        if len(exp) == q - 1 and _poly_mulx(a, p, r, low) == 1:
            log = [0] * q
            for i, v in enumerate(exp):
                log[v] = i
            return tuple(exp), tuple(log)
    raise AssertionError(f"no primitive polynomial of degree {r} over GF({p})")


class KWiseSpace:
    """Exact k-wise independent space over ``GF(q)`` covering ``cells`` cells.

    Attributes
    ----------
    q, k, cells : int
    field : GF
    """

    def __init__(self, q: int, k: int, cells: int):
        if k < 1:
            raise InvalidModel("k must be >= 1")
        if cells > q:
            raise InvalidModel(f"{cells} cells need a field with at least that many points, got q={q}")
        self.field = GF(q)
        self.q, self.k, self.cells = q, k, cells
        # powers[j][i] = j^i, so evaluation is a dot product
        f = self.field
        self._powers = []
        for j in range(cells):
            row, acc = [], 1
            for _ in range(k):
                row.append(acc)
                acc = f.mul(acc, j)
            self._powers.append(row)

    @property
    def support_size(self) -> int:
        return self.q**self.k

    def points(self):
        """Support points in lexicographic order of coefficient vectors."""
        return itertools.product(range(self.q), repeat=self.k)

    def evaluate(self, point, j: int) -> int:
        if not 0 <= j < self.cells:
            raise IndexError(f"cell {j} outside the space")
        f = self.field
        out = 0
        for a, pw in zip(point, self._powers[j]):
            if a:
                out = f.add(out, f.mul(a, pw))
        return out

    def values(self, point) -> list[int]:
        return [self.evaluate(point, j) for j in range(self.cells)]


def build_space(q: int, k: int, cells: int) -> KWiseSpace:
    return KWiseSpace(q, k, cells)


def domain_layout(domain: VariableDomain, q: int) -> tuple[int, ...]:
    """Value id for each field element; value ``v`` covers ``q * P(v)``
    consecutive residues in domain order."""
    out: list[int] = []
    for vid, pr in domain.values:
        share = pr * q
        if share.denominator != 1:
            raise UnsupportedDistribution(f"probability {pr} is not a multiple of 1/{q}")
        out.extend([vid] * int(share))
    return tuple(out)


def space_cell(space: KWiseSpace, point, cell_index: int, domain: VariableDomain) -> int:
    return domain_layout(domain, space.q)[space.evaluate(point, cell_index)]


def choose_field_size(sys: EventSystem, cells: int) -> int:
    """Smallest prime power ``q >= cells`` for which every domain is q-adic.

    Raises
    ------
    UnsupportedDistribution
        When the probability denominators involve more than one prime.
    """
    den = 1
    for dom in sys.domains:
        for _, pr in dom.values:
            den = math.lcm(den, pr.denominator)
    cells = max(cells, 2)
    if den == 1:
        q = cells
        while not is_prime(q):
            q += 1
        return q
    pr = _prime_power(den)
    if pr is None:
        raise UnsupportedDistribution(f"denominators have lcm {den}, not a prime power")
    p = pr[0]
    q = den
    while q < cells:
        q *= p
    return q


def _try_point(sys, space, point, cap_T, K, s_cap):
    table = SpaceTable(space, point, sys, cap_T)
    try:
        x, stats, _, _ = solve_table(sys, table, K, s_cap, mis_seed=0)
    except CapExceeded:
        return None, None
    return x, stats


def solve_deterministic(
    sys: EventSystem,
    K: int | None = None,
    s_cap: int = 1_000,
    k: int = 2,
    q: int | None = None,
    epsilon=None,
    threads: int | None = None,
    return_stats: bool = False,
):
    """Search the support of a k-wise independent space for a good table.

    Points are tried in lexicographic order. Each builds a table with
    ``K + 1`` columns, runs capped WD enumeration and the final configuration,
    and is abandoned as soon as a cap is hit. The first verified point wins.

    Parameters
    ----------
    sys : EventSystem
        Atomic events only.
    K : int, optional
        WD size cap. Defaults to ``choose_cap(n, epsilon or 1/2)``.
    s_cap : int
        Family size cap per point. Good points tend to have small families,
        so a low cap mainly abandons hopeless points sooner.
    k : int
        Independence of the space.
    q : int, optional
        Field size; chosen by :func:`choose_field_size` when omitted.
    epsilon : rational, optional
        When given, ``e p d^(1 + epsilon) <= 1`` is checked first.
    threads : int, optional
        Worker count (default ``LLL_THREADS`` or 1). Never changes the result.

    Raises
    ------
    CriterionUnsatisfied
        If the declared criterion fails or no point succeeds.
    """
    start = time.perf_counter()
    if not sys.all_atomic:
        raise InvalidModel("the deterministic engine needs atomic events")
    if epsilon is not None and not check_deterministic(sys, epsilon):
        raise CriterionUnsatisfied(f"e p d^(1+eps) > 1 for eps={epsilon}")
    if K is None:
        K = choose_cap(sys.n, Fraction(epsilon) if epsilon is not None else Fraction(1, 2))
    cap_T = K + 1
    cells = sys.n * cap_T
    if q is None:
        q = choose_field_size(sys, cells)
    space = build_space(q, k, cells)
    if threads is None:
        threads = int(os.environ.get("LLL_THREADS", "1") or 1)
    threads = max(1, threads)

    tried = 0
    found = None
    if threads == 1:
        for point in space.points():
            tried += 1
            x, stats = _try_point(sys, space, point, cap_T, K, s_cap)
            if x is not None:
                found = (point, x, stats)
                break
    else:
        batch = 4 * threads
        it = space.points()
        with ThreadPoolExecutor(max_workers=threads) as pool:
            while found is None:
                chunk = list(itertools.islice(it, batch))
                if not chunk:
                    break
                results = list(pool.map(lambda pt: _try_point(sys, space, pt, cap_T, K, s_cap), chunk))
                for pt, (x, stats) in zip(chunk, results):
                    tried += 1
                    if x is not None:
                        found = (pt, x, stats)
                        break
    if found is None:
        raise CriterionUnsatisfied(f"no point of the {space.support_size}-point space succeeded (K={K}, s_cap={s_cap})")
    point, x, stats = found
    stats.points_tried = tried
    stats.wall_time = time.perf_counter() - start
    if return_stats:
        return x, stats
    return x
