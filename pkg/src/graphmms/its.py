"""Multipartite graphs: independent transversals, Hall matchings, block
degree metrics and a search for small graphs without an independent
transversal.

Vertices are ``(part, index)`` pairs.  An independent transversal of size s
(ITS) picks s vertices from every part with no edge among the picks.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .model import CapExceeded, InstanceError

Vertex = tuple[int, int]


def _norm(a: Vertex, b: Vertex) -> tuple[Vertex, Vertex]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class MultipartiteGraph:
    parts: tuple[int, ...]  # part sizes
    edges: frozenset  # of ((p, i), (q, j)) with p < q

    def __post_init__(self):
        clean = set()
        for a, b in self.edges:
            a, b = _norm(tuple(a), tuple(b))
            if a[0] == b[0]:
                raise InstanceError(f"intra-part edge {a}-{b}")
            for p, i in (a, b):
                if not (0 <= p < len(self.parts) and 0 <= i < self.parts[p]):
                    raise InstanceError(f"vertex {(p, i)} out of bounds")
            clean.add((a, b))
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_lists(cls, parts: Sequence[int], edges: Iterable[Sequence[int]]) -> "MultipartiteGraph":
        return cls(tuple(parts), frozenset(((p, i), (q, j)) for p, i, q, j in edges))

    @property
    def r(self) -> int:
        return len(self.parts)

    def vertices(self) -> list[Vertex]:
        return [(p, i) for p, size in enumerate(self.parts) for i in range(size)]

    def adjacency(self) -> dict[Vertex, set[Vertex]]:
        adj = {v: set() for v in self.vertices()}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def degree(self, v: Vertex) -> int:
        return sum(1 for a, b in self.edges if v in (a, b))

    def without(self, edge) -> "MultipartiteGraph":
        a, b = _norm(*edge)
        return MultipartiteGraph(self.parts, self.edges - {(a, b)})

    def to_json(self) -> dict:
        return {"parts": list(self.parts),
                "edges": sorted([a[0], a[1], b[0], b[1]] for a, b in self.edges)}

    @classmethod
    def from_json(cls, data: dict) -> "MultipartiteGraph":
        try:
            return cls.from_lists(data["parts"], data["edges"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"bad multipartite graph JSON: {exc}") from exc


def parse_graph(text: str | bytes) -> MultipartiteGraph:
    try:
        return MultipartiteGraph.from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc


def find_its(g: MultipartiteGraph, s: int = 1, cap: int = 10 ** 8):
    """Lexicographically smallest ITS of size ``s`` as a tuple of per-part
    index tuples, or None when none exists.

    Parts are visited in order and candidate s-subsets in lexicographic order,
    with forward checking: once a choice leaves some later part fewer than s
    free vertices the branch is cut.
    """
    if any(size < s for size in g.parts):
        return None
    adj = g.adjacency()
    r = g.r
    nodes = [0]
    choice: list[tuple[int, ...]] = []

    def rec(p: int, blocked: dict[int, set[int]]):
        if p == r:
            return True
        free = [i for i in range(g.parts[p]) if i not in blocked.get(p, ())]
        for combo in itertools.combinations(free, s):
            nodes[0] += 1
            if nodes[0] > cap:
                raise CapExceeded(f"ITS search exceeded {cap} nodes")
            picked = [(p, i) for i in combo]
            # picks inside one part are never adjacent, only cross-part edges matter
            nb = {q: set(v) for q, v in blocked.items()}
            dead = False
            for v in picked:
                for q, j in adj[v]:
                    if q > p:
                        nb.setdefault(q, set()).add(j)
            for q in range(p + 1, r):
                if g.parts[q] - len(nb.get(q, ())) < s:
                    dead = True
                    break
            if dead:
                continue
            choice.append(combo)
            if rec(p + 1, nb):
                return True
            choice.pop()
        return False

    if rec(0, {}):
        return tuple(choice)
    return None


def is_independent_transversal(g: MultipartiteGraph, picks: Sequence[Sequence[int]]) -> bool:
    chosen = {(p, i) for p, idx in enumerate(picks) for i in idx}
    if len(picks) != g.r:
        return False
    return not any(a in chosen and b in chosen for a, b in g.edges)


def count_transversals_brute(g: MultipartiteGraph) -> int:
    """Number of size-1 independent transversals by plain enumeration."""
    edges = g.edges
    total = 0
    for pick in itertools.product(*(range(n) for n in g.parts)):
        vs = [(p, i) for p, i in enumerate(pick)]
        if not any(_norm(a, b) in edges for a, b in itertools.combinations(vs, 2)):
            total += 1
    return total


@dataclass(frozen=True)
class BlockMetrics:
    avg_degree: tuple[Fraction, ...]
    max_block_avg: Fraction
    thickness: int
    max_degree: int
    max_edges_between_parts: int


def block_metrics(g: MultipartiteGraph) -> BlockMetrics:
    deg = {v: 0 for v in g.vertices()}
    between: dict[tuple[int, int], int] = {}
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
        key = (a[0], b[0])
        between[key] = between.get(key, 0) + 1
    avg = tuple(Fraction(sum(deg[(p, i)] for i in range(n)), n) if n else Fraction(0)
                for p, n in enumerate(g.parts))
    return BlockMetrics(avg, max(avg, default=Fraction(0)), min(g.parts, default=0),
                        max(deg.values(), default=0), max(between.values(), default=0))


@dataclass(frozen=True)
class HallResult:
    matching: dict  # left index -> right index
    violator: frozenset | None  # left indices S with |N(S)| < |S|

    @property
    def size(self) -> int:
        return len(self.matching)


def hall_matching(g: MultipartiteGraph) -> HallResult:
    """Maximum matching from part 0 into part 1 by augmenting paths.

    When part 0 is not saturated the result carries a Hall violator: the
    part-0 vertices reachable by alternating paths from an unmatched one.
    """
    if g.r != 2:
        raise InstanceError("hall_matching needs a bipartite (r=2) graph")
    nl, nr = g.parts
    nbrs = [[] for _ in range(nl)]
    for a, b in sorted(g.edges):
        nbrs[a[1]].append(b[1])
    match_r: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for w in nbrs[u]:
            if w in seen:
                continue
            seen.add(w)
            if w not in match_r or augment(match_r[w], seen):
                match_r[w] = u
                return True
        return False

    for u in range(nl):
        augment(u, set())
    matching = {u: w for w, u in match_r.items()}
    if len(matching) == nl:
        return HallResult(dict(sorted(matching.items())), None)
    free = next(u for u in range(nl) if u not in matching)
    left, stack = {free}, [free]
    while stack:
        u = stack.pop()
        for w in nbrs[u]:
            v = match_r.get(w)
            if v is not None and v not in left:
                left.add(v)
                stack.append(v)
    return HallResult(dict(sorted(matching.items())), frozenset(left))


def bipartite(left: int, right: int, pairs: Iterable[tuple[int, int]]) -> MultipartiteGraph:
    return MultipartiteGraph((left, right), frozenset(((0, u), (1, v)) for u, v in pairs))


def delta(n: int, d: int) -> int:
    """Degree threshold of the XOS upper-bound construction."""
    if n < 3:
        raise ValueError("delta needs n >= 3")
    if d < 1:
        raise ValueError("delta needs d >= 1")
    if n % 2:
        num, den = (n - 1) * d, 2 * (n - 2)
    else:
        num, den = n * d, 2 * (n - 1)
    return -(-num // den)


def k22_block_graph() -> MultipartiteGraph:
    """Four parts of four vertices joined by six K_{2,2} blocks; no ITS."""
    lo, hi = (0, 1), (2, 3)
    blocks = [(0, lo, 1, lo), (0, hi, 2, hi), (0, hi, 3, hi),
              (1, hi, 2, hi), (1, hi, 3, hi), (2, lo, 3, lo)]
    edges = [(p, i, q, j) for p, ip, q, jq in blocks for i in ip for j in jq]
    return MultipartiteGraph.from_lists((4, 4, 4, 4), edges)


# --------------------------------------------------------------------------
# searching for graphs without an independent transversal

def _local_search(r: int, d: int, b: int, rng: random.Random, steps: int):
    """Add edges greedily to kill the most surviving transversals, respecting
    the degree bound.  Returns an edge set or None."""
    deg = {(p, i): 0 for p in range(r) for i in range(d)}
    edges: set = set()
    alive = set(itertools.product(range(d), repeat=r))
    for _ in range(steps):
        if not alive:
            return edges
        counts: dict = {}
        for t in alive:
            for p, q in itertools.combinations(range(r), 2):
                e = ((p, t[p]), (q, t[q]))
                if e not in edges and deg[e[0]] < b and deg[e[1]] < b:
                    counts[e] = counts.get(e, 0) + 1
        if not counts:
            return None
        top = max(counts.values())
        pick = rng.choice(sorted(e for e, c in counts.items() if c == top))
        edges.add(pick)
        deg[pick[0]] += 1
        deg[pick[1]] += 1
        alive = {t for t in alive if not (t[pick[0][0]] == pick[0][1] and t[pick[1][0]] == pick[1][1])}
    return edges if not alive else None


def _ilp(r: int, d: int, b: int, time_limit: float):
    """Exact covering ILP: every transversal must contain an edge."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    cand = [((p, i), (q, j)) for p in range(r) for q in range(p + 1, r)
            for i in range(d) for j in range(d)]
    index = {e: k for k, e in enumerate(cand)}
    trans = list(itertools.product(range(d), repeat=r))
    cover = lil_matrix((len(trans), len(cand)))
    for row, t in enumerate(trans):
        for p, q in itertools.combinations(range(r), 2):
            cover[row, index[((p, t[p]), (q, t[q]))]] = 1
    verts = [(p, i) for p in range(r) for i in range(d)]
    degm = lil_matrix((len(verts), len(cand)))
    for row, v in enumerate(verts):
        for k, (a, c) in enumerate(cand):
            if v in (a, c):
                degm[row, k] = 1
    res = milp(
        c=np.ones(len(cand)),
        constraints=[LinearConstraint(cover.tocsr(), lb=1, ub=np.inf),
                     LinearConstraint(degm.tocsr(), lb=0, ub=b)],
        integrality=np.ones(len(cand)),
        bounds=Bounds(0, 1),
        options={"time_limit": time_limit},
    )
    if res.x is None or res.status not in (0,):
        return None
    return {cand[k] for k in range(len(cand)) if res.x[k] > 0.5}


def search_no_its(r: int, d: int, b: int, budget: int = 20, seed: int = 0,
                  use_ilp: bool = True, time_limit: float = 60.0):
    """A certified no-ITS graph with ``r`` parts of size ``d`` and maximum
    degree at most ``b``, or None if none was found within the budget."""
    if b <= 0 or r < 2 or d < 1:
        return None
    if r * d > 24:
        raise CapExceeded("r*d above 24 cannot be certified exhaustively")
    rng = random.Random(seed)
    found = None
    for _ in range(budget):
        edges = _local_search(r, d, b, rng, steps=r * d * b)
        if edges is not None:
            found = edges
            break
    if found is None and use_ilp:
        found = _ilp(r, d, b, time_limit)
    if found is None:
        return None
    g = MultipartiteGraph((d,) * r, frozenset(found))
    if find_its(g, 1) is not None or block_metrics(g).max_degree > b:
        return None
    return g
