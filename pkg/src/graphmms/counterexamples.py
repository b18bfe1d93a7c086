"""Deterministic generators for the lower- and upper-bound instances, each
with the certificate the repo's oracles can re-establish."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .its import MultipartiteGraph, block_metrics, find_its
from .model import Allocation, DPartition, Instance, InstanceError, make_instance
from .valuations import AdditiveValuation, SubadditiveValuation, XOSValuation

HALF = Fraction(1, 2)


def gen_greedy_bad(n: int) -> Instance:
    """One heavy edge of weight n and 2(n-1) light edges of weight 1/2, all
    between agents 1 and 2; agents 3..n are isolated."""
    if n < 2:
        raise InstanceError("greedy-bad needs n >= 2")
    weights = {0: Fraction(n)}
    weights.update({e: HALF for e in range(1, 2 * n - 1)})
    ends = [(1, 2)] * (2 * n - 1)
    vals = [AdditiveValuation(1, weights), AdditiveValuation(2, weights)]
    vals += [AdditiveValuation(i, {}) for i in range(3, n + 1)]
    return make_instance(n, ends, vals, {"preset": "greedy-bad", "n": n})


def gen_complete_unit(n: int) -> Instance:
    if n < 3:
        raise InstanceError("complete-unit needs n >= 3")
    ends = list(itertools.combinations(range(1, n + 1), 2))
    vals = [AdditiveValuation(i, {e: Fraction(1) for e, (u, v) in enumerate(ends) if i in (u, v)})
            for i in range(1, n + 1)]
    return make_instance(n, ends, vals, {"preset": "complete-unit", "n": n})


def gen_mms_not_pmms(M) -> tuple[Instance, Allocation]:
    """Two heavy edges (ids 0, 1) of weight M and a light one (id 2) between
    agents 1 and 2, plus an isolated third agent.  The allocation gives the
    light edge to agent 1 and both heavy ones to agent 2."""
    M = Fraction(M)
    if M < 1:
        raise InstanceError("M must be at least 1")
    w = {0: M, 1: M, 2: Fraction(1)}
    inst = make_instance(3, [(1, 2)] * 3,
                         [AdditiveValuation(1, w), AdditiveValuation(2, w), AdditiveValuation(3, {})],
                         {"preset": "mms-not-pmms", "M": str(M)})
    return inst, Allocation.from_lists([{2}, {0, 1}, set()])


def gen_xos_pmms_upper(pad: int = 0) -> tuple[Instance, Allocation]:
    """Edges e11, e12, e21, e22 (ids 0..3) between agents 1 and 2.  Agent 1
    values rows, agent 2 columns, each edge at 1/2 in its clause."""
    if pad < 0:
        raise InstanceError("pad must be nonnegative")
    label = {(1, 1): 0, (1, 2): 1, (2, 1): 2, (2, 2): 3}
    rows = tuple({label[(t, j)]: HALF for j in (1, 2)} for t in (1, 2))
    cols = tuple({label[(i, t)]: HALF for i in (1, 2)} for t in (1, 2))
    n = 3 + pad
    vals = [XOSValuation(1, rows), XOSValuation(2, cols)]
    vals += [AdditiveValuation(i, {}) for i in range(3, n + 1)]
    inst = make_instance(n, [(1, 2)] * 4, vals, {"preset": "xos-pmms-upper", "pad": pad})
    alloc = Allocation.from_lists([{0, 1}, {2}, {3}] + [set()] * pad)
    return inst, alloc


def subadditive_upper_edge(n: int, i: int, ti: int, j: int, tj: int) -> int:
    """Id of e(i, ti, j, tj), i < j, indices 1-based, in lexicographic order."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    return pairs.index((i, j)) * n * n + (ti - 1) * n + (tj - 1)


def gen_subadditive_upper(n: int) -> Instance:
    """n agents, n^2 parallel edges per pair; agent i is satisfied (value 1)
    only by a superset of one of its n bundles, else gets 1/2."""
    if n < 2:
        raise InstanceError("subadditive-upper needs n >= 2")
    ends, labels = [], []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for ti in range(1, n + 1):
            for tj in range(1, n + 1):
                ends.append((i, j))
                labels.append((i, ti, j, tj))
    vals = []
    for a in range(1, n + 1):
        bundles = []
        for t in range(1, n + 1):
            bundles.append(frozenset(k for k, (i, ti, j, tj) in enumerate(labels)
                                     if (i == a and ti == t) or (j == a and tj == t)))
        vals.append(SubadditiveValuation(a, bundles=tuple(bundles), inside=1, outside=HALF))
    return make_instance(n, ends, vals, {"preset": "subadditive-upper", "n": n})


def subadditive_upper_bundles(inst: Instance) -> list[tuple[frozenset, ...]]:
    return [v.bundles for v in inst.valuations]


@dataclass(frozen=True)
class StructureCertificate:
    ok: bool
    checked_pairs: int
    failure: str = ""


def certify_pairwise_intersections(inst: Instance) -> StructureCertificate:
    """Every B_{i,t} and B_{j,u} (i < j) meet in exactly e(i,t,j,u), so any
    allocation giving every agent a whole bundle would hand that edge to two
    agents."""
    n = inst.n
    bundles = subadditive_upper_bundles(inst)
    count = 0
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for t in range(1, n + 1):
            for u in range(1, n + 1):
                count += 1
                got = bundles[i - 1][t - 1] & bundles[j - 1][u - 1]
                want = {subadditive_upper_edge(n, i, t, j, u)}
                if got != want:
                    return StructureCertificate(False, count,
                                                f"B[{i},{t}] & B[{j},{u}] = {sorted(got)}")
    return StructureCertificate(True, count)


def gen_xos_upper(conflict: MultipartiteGraph, b: int) -> Instance:
    """Agent p+1 for part p; one edge per conflict edge, then b - deg(v)
    self-loops at every vertex v.  Clause t of agent p+1 puts 1/b on every
    edge attached to vertex (p, t)."""
    if find_its(conflict) is not None:
        raise InstanceError("conflict graph has an independent transversal")
    metrics = block_metrics(conflict)
    if metrics.max_degree > b:
        raise InstanceError(f"conflict graph has degree {metrics.max_degree} > b = {b}")
    if len(set(conflict.parts)) != 1:
        raise InstanceError("all parts must have the same size")
    d = conflict.parts[0]
    ends, at = [], []  # at[k] = vertices the edge k is attached to
    for a, c in sorted(conflict.edges):
        ends.append((a[0] + 1, c[0] + 1))
        at.append((a, c))
    deg = {v: conflict.degree(v) for v in conflict.vertices()}
    for v in conflict.vertices():
        for _ in range(b - deg[v]):
            ends.append((v[0] + 1, v[0] + 1))
            at.append((v,))
    w = Fraction(1, b)
    vals, bundles = [], {}
    for p in range(conflict.r):
        clauses = []
        for t in range(d):
            edges = sorted(k for k, vs in enumerate(at) if (p, t) in vs)
            clauses.append({k: w for k in edges})
            bundles.setdefault(str(p + 1), []).append(edges)
        vals.append(XOSValuation(p + 1, tuple(clauses)))
    meta = {"preset": "xos-upper", "b": b, "d": d, "conflict": conflict.to_json(),
            "bundles": bundles}
    return make_instance(conflict.r, ends, vals, meta)


def xos_upper_canon(inst: Instance) -> tuple[DPartition, ...]:
    """The construction's bundles, in clause order."""
    return tuple(DPartition(i, tuple(frozenset(b) for b in inst.meta["bundles"][str(i)]))
                 for i in range(1, inst.n + 1))


def no_whole_bundle_selection(inst: Instance) -> bool:
    """No choice of one bundle per agent is pairwise disjoint; equivalent to
    the conflict graph having no independent transversal."""
    canon = xos_upper_canon(inst)
    for pick in itertools.product(*(range(c.d) for c in canon)):
        chosen = [c.parts[t] for c, t in zip(canon, pick)]
        if all(not (x & y) for x, y in itertools.combinations(chosen, 2)):
            return False
    return True


def gen_k22_witness() -> Instance:
    """Four XOS agents whose bundles conflict exactly like the four-part
    no-ITS graph.  Low bundles are two edges of weight 5, high bundles four
    edges with weight 4 towards the first partner part and 1 towards the
    second, so every bundle is worth 10 and is the unique MMS partition."""
    from .its import k22_block_graph

    g = k22_block_graph()
    ends, at = [], []
    for a, c in sorted(g.edges):
        ends.append((a[0] + 1, c[0] + 1))
        at.append((a, c))
    partner = {0: 2, 1: 2, 2: 0, 3: 0}
    vals = []
    for p in range(4):
        clauses = []
        for t in range(4):
            w = {}
            for k, (a, c) in enumerate(at):
                if (p, t) not in (a, c):
                    continue
                other = c if a == (p, t) else a
                if t < 2:
                    w[k] = Fraction(5)
                else:
                    w[k] = Fraction(4 if other[0] == partner[p] else 1)
            clauses.append(w)
        vals.append(XOSValuation(p + 1, tuple(clauses)))
    return make_instance(4, ends, vals, {"preset": "k22-witness"})


PRESETS = ("greedy-bad", "complete-unit", "mms-not-pmms", "xos-pmms-upper",
           "subadditive-upper", "xos-upper")
