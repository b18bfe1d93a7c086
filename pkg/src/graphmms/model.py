"""Multigraph instances, allocations and the instance JSON format.

Agents are numbered 1..n, edges carry dense ids 0..m-1.  A self-loop ``(i, i)``
is an item only agent ``i`` can care about.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence


class InstanceError(ValueError):
    """Raised for malformed instances, allocations or valuation payloads."""


class CapExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured size cap."""


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, i: int) -> int:
        return self.v if i == self.u else self.u


@dataclass(frozen=True)
class Multigraph:
    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError("agent count must be positive")
        for k, e in enumerate(self.edges):
            if e.id != k:
                raise InstanceError(f"edge ids must be dense 0..m-1, got {e.id} at {k}")
            if not (1 <= e.u <= e.v <= self.n):
                raise InstanceError(f"edge {e.id}: endpoint out of range ({e.u}, {e.v})")

    @property
    def m(self) -> int:
        return len(self.edges)

    def endpoints(self, e: int) -> tuple[int, int]:
        edge = self.edges[e]
        return edge.u, edge.v

    def incident_edges(self, i: int) -> frozenset[int]:
        if not (1 <= i <= self.n):
            raise InstanceError(f"agent {i} out of range 1..{self.n}")
        return frozenset(e.id for e in self.edges if e.u == i or e.v == i)

    def common_edges(self, i: int, j: int) -> frozenset[int]:
        """E_{i,j}: edges with endpoint set {i, j} (self-loops when i == j)."""
        a, b = min(i, j), max(i, j)
        return frozenset(e.id for e in self.edges if e.u == a and e.v == b)

    def all_edges(self) -> frozenset[int]:
        return frozenset(range(self.m))


def incident_edges(g: Multigraph, i: int) -> frozenset[int]:
    return g.incident_edges(i)


@dataclass(frozen=True)
class Allocation:
    """Bundles for agents 1..n; ``bundles[i - 1]`` is agent i's edge set."""

    bundles: tuple[frozenset[int], ...]

    @classmethod
    def empty(cls, n: int) -> "Allocation":
        return cls(tuple(frozenset() for _ in range(n)))

    @classmethod
    def from_lists(cls, bundles: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def bundle(self, i: int) -> frozenset[int]:
        return self.bundles[i - 1]

    def allocated(self) -> frozenset[int]:
        return frozenset().union(*self.bundles) if self.bundles else frozenset()

    def owner_of(self) -> dict[int, int]:
        return {e: i + 1 for i, b in enumerate(self.bundles) for e in b}

    def validate(self, g: Multigraph) -> None:
        if self.n != g.n:
            raise InstanceError(f"allocation has {self.n} bundles for {g.n} agents")
        seen: set[int] = set()
        for b in self.bundles:
            for e in b:
                if not (0 <= e < g.m):
                    raise InstanceError(f"allocation references unknown edge {e}")
                if e in seen:
                    raise InstanceError(f"edge {e} allocated twice")
                seen.add(e)

    def is_partition(self, g: Multigraph) -> bool:
        return self.allocated() == g.all_edges()

    def is_orientation(self, g: Multigraph) -> bool:
        for i, b in enumerate(self.bundles, start=1):
            for e in b:
                if i not in g.endpoints(e):
                    return False
        return True


@dataclass(frozen=True)
class DPartition:
    owner: int
    parts: tuple[frozenset[int], ...]

    @property
    def d(self) -> int:
        return len(self.parts)

    def part_of(self, e: int) -> int:
        for t, p in enumerate(self.parts):
            if e in p:
                return t
        raise KeyError(e)

    def check(self, g: Multigraph) -> None:
        union: set[int] = set()
        for p in self.parts:
            if union & p:
                raise InstanceError("partition parts overlap")
            union |= p
        if union != set(g.incident_edges(self.owner)):
            raise InstanceError(f"partition of agent {self.owner} does not cover E_i")


@dataclass(frozen=True)
class Instance:
    graph: Multigraph
    valuations: tuple  # tuple[Valuation, ...], valuations[i - 1] is agent i's
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.valuations) != self.graph.n:
            raise InstanceError(
                f"{len(self.valuations)} valuations for {self.graph.n} agents")
        for i, val in enumerate(self.valuations, start=1):
            if val.owner != i:
                raise InstanceError(f"valuation {i} has owner {val.owner}")
        # binding attaches E_i to set-function valuations and checks relevance
        bound = tuple(v.bind(self.graph.incident_edges(v.owner)) for v in self.valuations)
        object.__setattr__(self, "valuations", bound)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    def valuation(self, i: int):
        return self.valuations[i - 1]

    def value(self, i: int, bundle: Iterable[int]) -> Fraction:
        return self.valuations[i - 1].evaluate(bundle)

    def incident(self, i: int) -> frozenset[int]:
        return self.graph.incident_edges(i)


# --------------------------------------------------------------------------
# JSON

def parse_rational(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise InstanceError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {x!r}") from exc
    raise InstanceError(f"rationals must be ints or 'p/q' strings, got {x!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def instance_to_dict(inst: Instance) -> dict:
    from .valuations import valuation_to_json

    out = {
        "n": inst.n,
        "edges": [{"id": e.id, "u": e.u, "v": e.v} for e in inst.graph.edges],
        "valuations": [valuation_to_json(v) for v in inst.valuations],
    }
    if inst.meta:
        out["meta"] = inst.meta
    return out


def instance_from_dict(data: dict) -> Instance:
    from .valuations import valuation_from_json

    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise InstanceError("instance JSON needs 'n', 'edges' and 'valuations'")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise InstanceError(f"bad agent count {n!r}")
    raw_edges = sorted(data["edges"], key=lambda e: e["id"])
    ids = [e["id"] for e in raw_edges]
    if len(set(ids)) != len(ids):
        raise InstanceError("duplicate edge id")
    edges = []
    for e in raw_edges:
        u, v = int(e["u"]), int(e["v"])
        if not (1 <= u <= n and 1 <= v <= n):
            raise InstanceError(f"edge {e['id']}: endpoint out of range")
        edges.append(Edge(int(e["id"]), min(u, v), max(u, v)))
    graph = Multigraph(n, tuple(edges))
    vals = data.get("valuations")
    if not isinstance(vals, list) or len(vals) != n:
        raise InstanceError("need exactly one valuation per agent")
    valuations = tuple(valuation_from_json(i + 1, v) for i, v in enumerate(vals))
    return Instance(graph, valuations, dict(data.get("meta", {})))


def serialize_instance(inst: Instance) -> bytes:
    return dumps(instance_to_dict(inst)).encode("utf-8")


def parse_instance(text: bytes | str) -> Instance:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    return instance_from_dict(data)


def allocation_to_dict(alloc: Allocation) -> dict:
    return {"n": alloc.n, "bundles": [sorted(b) for b in alloc.bundles]}


def allocation_from_dict(data: dict) -> Allocation:
    try:
        return Allocation.from_lists(data["bundles"])
    except (KeyError, TypeError) as exc:
        raise InstanceError("allocation JSON needs 'bundles'") from exc


def make_instance(n: int, endpoints: Sequence[tuple[int, int]], valuations: Sequence,
                  meta: dict | None = None) -> Instance:
    """Convenience constructor: edge ids follow the order of ``endpoints``."""
    edges = tuple(Edge(k, min(u, v), max(u, v)) for k, (u, v) in enumerate(endpoints))
    return Instance(Multigraph(n, edges), tuple(valuations), dict(meta or {}))


def orient_leftovers(g: Multigraph, alloc: Allocation) -> Allocation:
    """Give every unallocated edge to its lower-index endpoint."""
    bundles = [set(b) for b in alloc.bundles]
    taken = alloc.allocated()
    for e in g.edges:
        if e.id not in taken:
            bundles[e.u - 1].add(e.id)
    return Allocation.from_lists(bundles)
