"""Variables, bad events and the dependency relation.

Variables and events are addressed internally by dense 0-based indices.
The ids written in model files are kept alongside for serialization, so a
model round-trips through :func:`to_native` unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .errors import InvalidModel, ParseError

Assignment = tuple[int, ...]

ATOMIC = "atomic"
OPAQUE = "opaque"


@dataclass(frozen=True)
class VariableDomain:
    """Finite distribution of one variable: ``(value_id, probability)`` pairs."""

    values: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        if not self.values:
            raise InvalidModel("variable domain has no values")
        ids = [v for v, _ in self.values]
        if len(set(ids)) != len(ids):
            raise InvalidModel(f"duplicate value ids in domain {ids}")
        for v, p in self.values:
            if not isinstance(p, Fraction):
                raise InvalidModel(f"probability of value {v} is not an exact rational")
            if not 0 < p <= 1:
                raise InvalidModel(f"probability {p} of value {v} outside (0, 1]")
        total = sum(p for _, p in self.values)
        if total != 1:
            raise InvalidModel(f"domain probabilities sum to {total}, not 1")

    @classmethod
    def uniform(cls, k: int = 2) -> "VariableDomain":
        return cls(tuple((v, Fraction(1, k)) for v in range(k)))

    @property
    def value_ids(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.values)

    def prob(self, value: int) -> Fraction:
        for v, p in self.values:
            if v == value:
                return p
        return Fraction(0)

    def thresholds64(self) -> tuple[int, ...]:
        """Cumulative cut points on ``[0, 2**64)``; a word ``u`` maps to the first
        value whose cut exceeds ``u``."""
        cuts = []
        acc = Fraction(0)
        for _, p in self.values:
            acc += p
            num = acc.numerator << 64
            cuts.append(-(-num // acc.denominator))
        return tuple(cuts)


@dataclass(frozen=True)
class BadEvent:
    """A bad event over a sorted scope of variable indices.

    Atomic events are conjunctions ``X_var == val`` over exactly their scope.
    Opaque events carry a predicate that receives the scope values (in scope
    order) and an author-supplied probability.
    """

    id: int
    scope: tuple[int, ...]
    kind: str = ATOMIC
    assignment: tuple[tuple[int, int], ...] = ()
    predicate: Callable[[tuple[int, ...]], bool] | None = field(default=None, compare=False)
    prob: Fraction | None = None

    def __post_init__(self):
        if not self.scope:
            raise InvalidModel(f"event {self.id} has an empty scope")
        if list(self.scope) != sorted(set(self.scope)):
            raise InvalidModel(f"event {self.id} scope must be sorted and duplicate-free")
        if self.kind == ATOMIC:
            avars = [v for v, _ in self.assignment]
            if sorted(avars) != list(self.scope) or len(set(avars)) != len(avars):
                raise InvalidModel(f"event {self.id}: atomic assignment vars must equal the scope")
        elif self.kind == OPAQUE:
            if self.predicate is None or self.prob is None:
                raise InvalidModel(f"opaque event {self.id} needs a predicate and a probability")
        else:
            raise InvalidModel(f"unknown event kind {self.kind!r}")

    @classmethod
    def atomic(cls, id: int, assignment) -> "BadEvent":
        pairs = tuple(sorted((int(v), int(x)) for v, x in assignment))
        return cls(id=id, scope=tuple(v for v, _ in pairs), kind=ATOMIC, assignment=pairs)

    @classmethod
    def opaque(cls, id: int, scope, predicate, prob) -> "BadEvent":
        return cls(id=id, scope=tuple(sorted(scope)), kind=OPAQUE, predicate=predicate, prob=Fraction(prob))


class EventSystem:
    """Immutable collection of variables and bad events.

    Parameters
    ----------
    domains : sequence of VariableDomain
        One per variable, indexed ``0..n-1``.
    events : sequence of BadEvent
        Scopes use variable indices. Events of probability zero are dropped.
    variable_ids : sequence of int, optional
        External ids written to model files; defaults to ``0..n-1``.
    """

    def __init__(self, domains: Sequence[VariableDomain], events: Sequence[BadEvent], variable_ids=None):
        self.domains = tuple(domains)
        self.n = len(self.domains)
        self.variable_ids = tuple(range(self.n)) if variable_ids is None else tuple(variable_ids)
        if len(self.variable_ids) != self.n or len(set(self.variable_ids)) != self.n:
            raise InvalidModel("variable ids must be distinct, one per domain")
        kept = []
        probs = []
        for ev in events:
            for v in ev.scope:
                if not 0 <= v < self.n:
                    raise InvalidModel(f"event {ev.id} references unknown variable index {v}")
            if ev.kind == ATOMIC:
                p = Fraction(1)
                for v, x in ev.assignment:
                    if x not in self.domains[v].value_ids:
                        raise InvalidModel(f"event {ev.id}: value {x} illegal for variable {v}")
                    p *= self.domains[v].prob(x)
            else:
                p = ev.prob
                if not 0 <= p <= 1:
                    raise InvalidModel(f"event {ev.id}: probability {p} outside [0, 1]")
            if p == 0:
                continue
            kept.append(ev)
            probs.append(p)
        if len({ev.id for ev in kept}) != len(kept):
            raise InvalidModel("event ids must be distinct")
        self.events = tuple(kept)
        self.m = len(self.events)
        self.probs = tuple(probs)

        by_var = [[] for _ in range(self.n)]
        for b, ev in enumerate(self.events):
            for v in ev.scope:
                by_var[v].append(b)
        self.events_of_var = tuple(tuple(x) for x in by_var)
        nbrs = []
        for ev in self.events:
            s = set()
            for v in ev.scope:
                s.update(by_var[v])
            nbrs.append(tuple(sorted(s)))
        self.neighbors = tuple(nbrs)
        self.neighbor_sets = tuple(frozenset(x) for x in nbrs)
        self.neighbor_masks = tuple(sum(1 << a for a in x) for x in nbrs)
        self._scope_sets = tuple(frozenset(ev.scope) for ev in self.events)

    # -- structural queries -------------------------------------------------

    def scope(self, b: int) -> tuple[int, ...]:
        return self.events[b].scope

    def scope_set(self, b: int) -> frozenset:
        return self._scope_sets[b]

    def dependent(self, b: int, c: int) -> bool:
        return c in self.neighbor_sets[b]

    def prob(self, b: int) -> Fraction:
        return self.probs[b]

    @property
    def all_atomic(self) -> bool:
        return all(ev.kind == ATOMIC for ev in self.events)

    def max_degree(self) -> int:
        """Largest ``|N(B)|``, counting ``B`` itself."""
        return max((len(x) for x in self.neighbors), default=0)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, b: int, x) -> bool:
        """Truth of event ``b`` on ``x`` (anything indexable by variable index)."""
        ev = self.events[b]
        if ev.kind == ATOMIC:
            for v, val in ev.assignment:
                if x[v] != val:
                    return False
            return True
        return bool(ev.predicate(tuple(x[v] for v in ev.scope)))

    def true_events(self, x) -> set[int]:
        return {b for b in range(self.m) if self.evaluate(b, x)}

    def avoids(self, x) -> bool:
        return not any(self.evaluate(b, x) for b in range(self.m))

    def check_assignment(self, x) -> None:
        if len(x) != self.n:
            raise InvalidModel(f"assignment has {len(x)} entries, expected {self.n}")
        for i, val in enumerate(x):
            if val not in self.domains[i].value_ids:
                raise InvalidModel(f"value {val} illegal for variable {i}")

    # -- identity -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, EventSystem):
            return NotImplemented
        return (
            self.domains == other.domains
            and self.variable_ids == other.variable_ids
            and self.events == other.events
        )

    def __hash__(self):
        return hash((self.domains, self.variable_ids, self.events))

    def __repr__(self):
        return f"EventSystem(n={self.n}, m={self.m})"

    def event_index(self, event_id: int) -> int:
        for b, ev in enumerate(self.events):
            if ev.id == event_id:
                return b
        raise KeyError(event_id)


def dependent(sys: EventSystem, b: int, c: int) -> bool:
    return sys.dependent(b, c)


def evaluate(sys: EventSystem, b: int, x) -> bool:
    return sys.evaluate(b, x)


def true_events(sys: EventSystem, x) -> set[int]:
    return sys.true_events(x)


# -- DIMACS -------------------------------------------------------------------


def parse_dimacs(text: str) -> EventSystem:
    """Parse DIMACS CNF into an event system.

    Each CNF variable becomes a uniform Boolean (value 0 = false, 1 = true) and
    each clause becomes the atomic event "this clause is falsified". Variable
    and event ids are the 1-based DIMACS numbers. Duplicate literals collapse;
    a tautological clause (``x`` and ``-x``) can never be falsified and is
    skipped.
    """
    header = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError(f"line {lineno}: negative counts in header")
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                tokens.append(int(tok))
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
    if header is None:
        raise ParseError("missing 'p cnf' header")
    n, m = header
    clauses = []
    cur: list[int] = []
    for lit in tokens:
        if lit == 0:
            if not cur:
                raise ParseError(f"clause {len(clauses) + 1} is empty (instance is unsatisfiable)")
            clauses.append(cur)
            cur = []
        else:
            if abs(lit) > n:
                raise ParseError(f"literal {lit} exceeds declared variable count {n}")
            cur.append(lit)
    if cur:
        raise ParseError("last clause is not terminated by 0")
    if len(clauses) != m:
        raise ParseError(f"header declares {m} clauses, found {len(clauses)}")
    return cnf_system(n, clauses)


def cnf_system(n: int, clauses: Sequence[Sequence[int]]) -> EventSystem:
    """Event system for a CNF given as lists of signed 1-based literals."""
    domains = [VariableDomain.uniform(2)] * n
    events = []
    for cid, clause in enumerate(clauses, 1):
        lits = set(clause)
        if any(-lit in lits for lit in lits):
            continue
        # +v is falsified by X_v = 0, -v by X_v = 1
        events.append(BadEvent.atomic(cid, [(abs(lit) - 1, 0 if lit > 0 else 1) for lit in lits]))
    return EventSystem(domains, events, variable_ids=range(1, n + 1))


# -- native JSON --------------------------------------------------------------


def _parse_prob(raw, where) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise ParseError(f"{where}: probability must be a 'num/den' string")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: bad probability {raw!r}") from None


def parse_native(text: str) -> EventSystem:
    """Parse the native JSON model format (exact rational probabilities)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "variables" not in doc:
        raise ParseError("model must be an object with a 'variables' list")
    try:
        var_ids = []
        domains = []
        for k, var in enumerate(doc["variables"]):
            values = tuple(
                (int(val["v"]), _parse_prob(val["prob"], f"variable {var['id']}")) for val in var["values"]
            )
            var_ids.append(int(var["id"]))
            domains.append(VariableDomain(values))
        index = {vid: k for k, vid in enumerate(var_ids)}
        if len(index) != len(var_ids):
            raise InvalidModel("duplicate variable ids")
        events = []
        for ev in doc.get("events", []):
            kind = ev.get("kind", ATOMIC)
            if kind != ATOMIC:
                raise InvalidModel(f"event {ev.get('id')}: only atomic events can be stored in model files")
            pairs = []
            for var, val in ev["assignment"]:
                if var not in index:
                    raise InvalidModel(f"event {ev['id']} references unknown variable {var}")
                pairs.append((index[var], int(val)))
            if len({v for v, _ in pairs}) != len(pairs):
                raise InvalidModel(f"event {ev['id']} assigns a variable twice")
            events.append(BadEvent.atomic(int(ev["id"]), pairs))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model: {exc!r}") from None
    return EventSystem(domains, events, variable_ids=var_ids)


def _fmt(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def to_native(sys: EventSystem) -> dict:
    """Native-format document for ``sys`` (atomic events only)."""
    variables = [
        {"id": vid, "values": [{"v": v, "prob": _fmt(p)} for v, p in dom.values]}
        for vid, dom in zip(sys.variable_ids, sys.domains)
    ]
    events = []
    for ev in sys.events:
        if ev.kind != ATOMIC:
            raise InvalidModel(f"opaque event {ev.id} cannot be serialized")
        events.append(
            {
                "id": ev.id,
                "kind": ATOMIC,
                "assignment": [[sys.variable_ids[v], x] for v, x in ev.assignment],
            }
        )
    return {"variables": variables, "events": events}


def dumps_native(sys: EventSystem) -> str:
    return json.dumps(to_native(sys), indent=2)


def load_model(path) -> EventSystem:
    """Load a model file, choosing the parser from the extension (``.cnf``/``.dimacs``
    versus JSON) and falling back on content sniffing."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".cnf", ".dimacs"):
        return parse_dimacs(text)
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return parse_native(text)
    return parse_dimacs(text)


def assignment_dict(sys: EventSystem, x: Assignment) -> Mapping[int, int]:
    """Assignment keyed by external variable id."""
    return {vid: val for vid, val in zip(sys.variable_ids, x)}
