"""Frugal allocations for XOS agents.

Everything here runs on the frugal reduction of the instance (see
:func:`graphmms.valuations.frugal_reduce`): every agent with positive MMS
values each of its canonical bundles at exactly 1 and is additive inside a
bundle.  A bound like "value at least 2/3" therefore reads "at least 2/3 of
mu" for the original XOS valuation.  Agents with mu = 0 value everything at 0
and are satisfied by anything.

Index sets ``idx[i]`` hold 0-based bundle indices into agent i's canonical
partition.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .additive import greedy_walk
from .its import MultipartiteGraph, bipartite, find_its, hall_matching
from .model import Allocation, CapExceeded, Instance, InstanceError
from .valuations import FrugalReduction, frugal_reduce

TWO_THIRDS = Fraction(2, 3)
THIRD = Fraction(1, 3)


class _Frame:
    """Bundles and reduced values of a frugal reduction, with shorthands."""

    def __init__(self, red: FrugalReduction):
        self.red = red
        self.inst = red.instance
        self.n = red.instance.n
        self.B = {i: red.canon[i - 1].parts for i in range(1, self.n + 1)}
        self.positive = {i: red.mu[i - 1] > 0 for i in range(1, self.n + 1)}

    def w(self, i: int, s) -> Fraction:
        return self.inst.value(i, s)

    def bundle(self, i: int, t: int) -> frozenset:
        return self.B[i][t]

    def need(self, i: int, frac: Fraction) -> Fraction:
        return frac if self.positive[i] else Fraction(0)


def _reduce(inst: Instance, d: int) -> _Frame:
    return _Frame(frugal_reduce(inst, d))  # raises for non-XOS agents


@dataclass(frozen=True)
class Frugal:
    """A frugal orientation over some agents: bundle and bundle index each."""

    bundles: Mapping[int, frozenset]
    index: Mapping[int, int]
    method: str = ""

    def allocated(self) -> frozenset:
        return frozenset().union(*self.bundles.values()) if self.bundles else frozenset()

    def extend(self, i: int, t: int, x: frozenset, method: str | None = None) -> "Frugal":
        b = dict(self.bundles)
        ix = dict(self.index)
        b[i], ix[i] = frozenset(x), t
        return Frugal(b, ix, method or self.method)

    def to_allocation(self, n: int) -> Allocation:
        return Allocation.from_lists([self.bundles.get(i, frozenset()) for i in range(1, n + 1)])


def _check(fr: _Frame, sol: Frugal, agents, frac: Fraction, idx=None) -> bool:
    seen: set = set()
    for i in agents:
        x = sol.bundles.get(i, frozenset())
        if x & seen:
            return False
        seen |= x
        t = sol.index[i]
        if idx is not None and t not in idx[i]:
            return False
        if not x <= fr.bundle(i, t):
            return False
        if fr.w(i, x) < fr.need(i, frac):
            return False
    return True


# --------------------------------------------------------------------------
# two and three agents

def xos_two_agents(inst: Instance, d: int) -> Allocation:
    """Agent 1 keeps its first bundle minus the cheapest (for its) bundle of
    agent 2, which agent 2 receives whole."""
    if d < 1:
        raise InstanceError("d must be positive")
    if inst.n < 2:
        raise InstanceError("needs two agents")
    for i in range(3, inst.n + 1):
        if inst.incident(i):
            raise InstanceError("agents beyond the first two must be isolated")
    fr = _reduce(inst, d)
    b1 = fr.bundle(1, 0)
    t_star = min(range(d), key=lambda t: (fr.w(1, b1 & fr.bundle(2, t)), t))
    x2 = fr.bundle(2, t_star)
    bundles = [b1 - x2, x2] + [frozenset()] * (inst.n - 2)
    return Allocation.from_lists(bundles)


@dataclass(frozen=True)
class ThreeAgentInfo:
    case: str  # "base" or "step"
    k: int
    i: int
    j: int
    h: int
    t: int


def three_agent_core(fr: _Frame, agents: Sequence[int], idx: Mapping[int, Sequence[int]]
                     ) -> tuple[Frugal, ThreeAgentInfo]:
    """Downward induction on the number k of large intersections.

    All three index sets have the same size d and the smallness threshold is
    1/d.  Each agent ends up with at least 1 - 1/d of a bundle.
    """
    agents = tuple(agents)
    d = len(idx[agents[0]])
    thr = Fraction(1, d)

    def inter(i, t, j, u):
        return fr.w(i, fr.bundle(i, t) & fr.bundle(j, u))

    best = None
    for i in agents:
        for j in agents:
            if i == j:
                continue
            for t in sorted(idx[i]):
                cnt = sum(1 for u in idx[j] if inter(i, t, j, u) > thr)
                if best is None or cnt > best[0]:
                    best = (cnt, i, j, t)
    k, i, j, t = best
    h = next(a for a in agents if a not in (i, j))
    bit = fr.bundle(i, t)
    if k == d - 1:
        large = [u for u in sorted(idx[j]) if inter(i, t, j, u) > thr]
        t_star = next(u for u in sorted(idx[j]) if u not in large)
        r = next(r for r in sorted(idx[h]) if fr.w(j, fr.bundle(j, t_star) & fr.bundle(h, r)) <= thr)
        xi = bit & frozenset().union(*(fr.bundle(j, u) for u in large)) if large else frozenset()
        xh = fr.bundle(h, r)
        xj = fr.bundle(j, t_star) - xh
        sol = Frugal({i: xi, j: xj, h: xh}, {i: t, j: t_star, h: r}, "three-base")
        info = ThreeAgentInfo("base", k, i, j, h, t)
    else:
        small = [u for u in sorted(idx[j]) if inter(i, t, j, u) <= thr]
        right = sorted(idx[h])
        pairs = [(a, b) for a, u in enumerate(small) for b, r in enumerate(right)
                 if fr.w(j, fr.bundle(j, u) & fr.bundle(h, r)) <= thr]
        hm = hall_matching(bipartite(len(small), len(right), pairs))
        assert hm.size == len(small), "small-intersection graph must saturate"
        pick = None
        for a in range(len(small)):
            u, r = small[a], right[hm.matching[a]]
            if fr.w(i, bit & (fr.bundle(j, u) | fr.bundle(h, r))) <= thr:
                pick = (u, r)
                break
        assert pick is not None, "some matched pair must be cheap for the first agent"
        u, r = pick
        xh = fr.bundle(h, r)
        xj = fr.bundle(j, u) - xh
        xi = bit - (fr.bundle(j, u) | xh)
        sol = Frugal({i: xi, j: xj, h: xh}, {i: t, j: u, h: r}, "three-step")
        info = ThreeAgentInfo("step", k, i, j, h, t)
    assert _check(fr, sol, agents, 1 - thr, idx), "three-agent guarantee violated"
    return sol, info


def xos_three_agents(inst: Instance, d: int) -> Allocation:
    if inst.n != 3:
        raise InstanceError("xos_three_agents needs exactly three agents")
    if d < 1:
        raise InstanceError("d must be positive")
    fr = _reduce(inst, d)
    sol, _ = three_agent_core(fr, (1, 2, 3), {i: range(d) for i in (1, 2, 3)})
    return sol.to_allocation(3)


# --------------------------------------------------------------------------
# 1/2-out-of-2 greedy

@dataclass
class HalfTrace:
    rounds: list = field(default_factory=list)
    binding: dict = field(default_factory=dict)  # agent -> bundle index


def xos_half_out_of_two(inst: Instance, with_trace: bool = False):
    """Max-edge walk in which an agent, when first served, commits to one of
    its two canonical bundles that nobody has touched yet."""
    fr = _reduce(inst, 2)
    bound: dict[int, int] = {}
    inc = {i: inst.incident(i) for i in range(1, inst.n + 1)}

    def allowed(i, remaining):
        if i in bound:
            return fr.bundle(i, bound[i]) & remaining
        fresh = [t for t in (0, 1) if fr.bundle(i, t) and fr.bundle(i, t) <= remaining]
        return frozenset().union(*(fr.bundle(i, t) for t in fresh)) & inc[i] if fresh else set()

    def on_take(i, e):
        if i not in bound:
            bound[i] = 0 if e in fr.bundle(i, 0) else 1

    alloc, trace = greedy_walk(fr.inst, allowed, on_take)
    if with_trace:
        return alloc, HalfTrace(trace.rounds, dict(bound))
    return alloc


# --------------------------------------------------------------------------
# exhaustive frugal search

def _frugal_search(fr: _Frame, agents: Sequence[int], idx: Mapping[int, Sequence[int]],
                   frac: Fraction, conflict_cap: int = 22) -> Frugal | None:
    """First index vector (lexicographic) admitting a frugal orientation that
    gives every agent at least ``frac`` of its chosen bundle."""
    agents = tuple(agents)
    aset = set(agents)
    g = fr.inst.graph
    for ts in itertools.product(*(sorted(idx[i]) for i in agents)):
        chosen = dict(zip(agents, ts))
        fixed = {i: set() for i in agents}
        conflicts = []
        for e in g.edges:
            a = e.u in aset and e.id in fr.bundle(e.u, chosen[e.u])
            b = e.v != e.u and e.v in aset and e.id in fr.bundle(e.v, chosen[e.v])
            if a and b:
                conflicts.append(e)
            elif a:
                fixed[e.u].add(e.id)
            elif b:
                fixed[e.v].add(e.id)
        base = {i: fr.w(i, fixed[i]) for i in agents}
        need = {i: fr.need(i, frac) for i in agents}
        # potential of each agent if it won every conflict still open
        pot = dict(base)
        for e in conflicts:
            pot[e.u] += fr.w(e.u, [e.id])
            pot[e.v] += fr.w(e.v, [e.id])
        if any(pot[i] < need[i] for i in agents):
            continue
        if len(conflicts) > conflict_cap:
            raise CapExceeded(f"{len(conflicts)} conflict edges exceed cap {conflict_cap}")
        have = dict(base)
        side: list[int] = []

        def dfs(q: int) -> bool:
            if q == len(conflicts):
                return all(have[i] >= need[i] for i in agents)
            e = conflicts[q]
            wu, wv = fr.w(e.u, [e.id]), fr.w(e.v, [e.id])
            for s in (0, 1):
                win, lose, gain, loss = (e.u, e.v, wu, wv) if s == 0 else (e.v, e.u, wv, wu)
                pot[lose] -= loss
                have[win] += gain
                if pot[lose] >= need[lose]:
                    side.append(s)
                    if dfs(q + 1):
                        return True
                    side.pop()
                pot[lose] += loss
                have[win] -= gain
            return False

        if dfs(0):
            bundles = {i: set(fixed[i]) for i in agents}
            for e, s in zip(conflicts, side):
                bundles[e.v if s else e.u].add(e.id)
            return Frugal({i: frozenset(b) for i, b in bundles.items()}, chosen, "exhaustive")
    return None


def frugal_exhaustive_23(inst: Instance, conflict_cap: int = 22) -> Allocation | None:
    """A frugal orientation giving everyone 2/3 of an n-bundle, or None."""
    fr = _reduce(inst, inst.n)
    agents = tuple(range(1, inst.n + 1))
    sol = _frugal_search(fr, agents, {i: range(inst.n) for i in agents}, TWO_THIRDS, conflict_cap)
    return None if sol is None else sol.to_allocation(inst.n)


# --------------------------------------------------------------------------
# overconstrained sets

@dataclass(frozen=True)
class OverconstrainedWitness:
    agents: tuple[int, ...]
    idx: Mapping[int, tuple[int, ...]]
    promised: Mapping[int, tuple[Frugal, Frugal]]  # left-out agent -> (X, X')
    S: Mapping[tuple[int, int], frozenset]  # (agent, bundle index) -> S_{i,t}

    def conflict(self, i: int, t: int, j: int, u: int) -> bool:
        """Whether S_{i,t} and S_{j,u} sit in the same K_{2,2} collection."""
        xi, xi2 = self.promised[i]
        xj, xj2 = self.promised[j]
        return u in (xi.index[j], xi2.index[j]) and t in (xj.index[i], xj2.index[i])

    def collection(self, i: int, j: int) -> set[tuple[tuple[int, int], tuple[int, int]]]:
        return {((i, t), (j, u)) for t in self.idx[i] for u in self.idx[j]
                if self.conflict(i, t, j, u)}

    def conflict_graph(self, edge_level: bool = False) -> MultipartiteGraph:
        """One part per agent, one vertex per S-bundle (position in idx)."""
        pos = {i: {t: q for q, t in enumerate(self.idx[i])} for i in self.agents}
        edges = set()
        for a, b in itertools.combinations(range(len(self.agents)), 2):
            i, j = self.agents[a], self.agents[b]
            for t in self.idx[i]:
                for u in self.idx[j]:
                    hit = (self.S[(i, t)] & self.S[(j, u)]) if edge_level else self.conflict(i, t, j, u)
                    if hit:
                        edges.add(((a, pos[i][t]), (b, pos[j][u])))
        return MultipartiteGraph(tuple(len(self.idx[i]) for i in self.agents), frozenset(edges))


Promise = Callable[[tuple, Mapping[int, tuple]], Frugal]


def _key(agents, idx):
    return tuple(agents), tuple(tuple(sorted(idx[i])) for i in agents)


def detect_overconstrained(fr: _Frame, agents: Sequence[int], idx: Mapping[int, Sequence[int]],
                           promised: Promise) -> Frugal | OverconstrainedWitness:
    """Try to extend the two promised orientations of every leave-one-out
    subset; return the extension or the overconstrained witness."""
    agents = tuple(agents)
    pairs = {}
    for ell in agents:
        rest = tuple(a for a in agents if a != ell)
        first = {j: tuple(sorted(idx[j]))[:-1] for j in rest}
        x = promised(rest, first)
        second = {j: tuple(t for t in sorted(idx[j]) if t != x.index[j]) for j in rest}
        x2 = promised(rest, second)
        for j in rest:
            assert x.index[j] != x2.index[j]
        ax, ax2 = x.allocated(), x2.allocated()
        for t in sorted(idx[ell]):
            b = fr.bundle(ell, t)
            assert not (b & ax & ax2), "promised orientations overlap on a live bundle"
            if fr.w(ell, b & ax) <= fr.need(ell, THIRD):
                return x.extend(ell, t, b - ax, "extend")
            if fr.w(ell, b & ax2) <= fr.need(ell, THIRD):
                return x2.extend(ell, t, b - ax2, "extend")
        pairs[ell] = (x, x2)
    S = {}
    for i in agents:
        x, x2 = pairs[i]
        both = x.allocated() | x2.allocated()
        for t in idx[i]:
            S[(i, t)] = fr.bundle(i, t) & both
            assert fr.w(i, S[(i, t)]) >= fr.need(i, TWO_THIRDS)
    return OverconstrainedWitness(agents, {i: tuple(sorted(idx[i])) for i in agents}, pairs, S)


def _from_its(w: OverconstrainedWitness, picks, method: str) -> Frugal:
    bundles, index = {}, {}
    for a, i in enumerate(w.agents):
        t = w.idx[i][picks[a][0]]
        bundles[i], index[i] = w.S[(i, t)], t
    return Frugal(bundles, index, method)


def _greedy_transversal(w: OverconstrainedWitness):
    """Most-constrained-first greedy over S-bundles; None if it gets stuck."""
    g = w.conflict_graph()
    adj = g.adjacency()
    left = set(range(len(w.agents)))
    chosen: dict[int, int] = {}
    while left:
        def feasible(a):
            return [q for q in range(g.parts[a])
                    if not any((b, chosen[b]) in adj[(a, q)] for b in chosen)]
        a = min(sorted(left), key=lambda p: len(feasible(p)))
        opts = feasible(a)
        if not opts:
            return None

        def pressure(q):
            return sum(1 for (b, _) in adj[(a, q)] if b in left)
        chosen[a] = min(opts, key=lambda q: (pressure(q), q))
        left.discard(a)
    return tuple((chosen[a],) for a in range(len(w.agents)))


def _its_list(g: MultipartiteGraph, parts: Sequence[int]):
    """All independent transversals of the given parts, lexicographic."""
    edges = g.edges
    out = []
    for pick in itertools.product(*(range(g.parts[p]) for p in parts)):
        vs = [(p, q) for p, q in zip(parts, pick)]
        if not any(((a, b) if a <= b else (b, a)) in edges for a, b in itertools.combinations(vs, 2)):
            out.append(dict(zip(parts, pick)))
    return out


def _four_agent_special(fr: _Frame, w: OverconstrainedWitness) -> Frugal | None:
    """Redistribute S-bundles when four agents admit no transversal: two
    per-agent-disjoint transversals Y, Y' of three agents either extend to the
    fourth agent's bundle, or the fourth agent takes its part of two
    S-bundles of one agent j who is served from a third bundle."""
    g = w.conflict_graph()
    agents = w.agents
    for a_ell, ell in enumerate(agents):
        others = [a for a in range(4) if a != a_ell]
        trans = _its_list(g, others)
        for t_ell in w.idx[ell]:
            b = fr.bundle(ell, t_ell)
            for y, y2 in itertools.permutations(trans, 2):
                if any(y[a] == y2[a] for a in others):
                    continue
                for cand in (y, y2):
                    alloc = {agents[a]: w.S[(agents[a], w.idx[agents[a]][cand[a]])] for a in others}
                    taken = frozenset().union(*alloc.values())
                    if fr.w(ell, b & taken) <= fr.need(ell, THIRD):
                        sol = Frugal({**alloc, ell: b - taken},
                                     {**{agents[a]: w.idx[agents[a]][cand[a]] for a in others},
                                      ell: t_ell}, "four-extend")
                        if _check(fr, sol, agents, TWO_THIRDS):
                            return sol
                for a_j in others:
                    j = agents[a_j]
                    sj = w.S[(j, w.idx[j][y[a_j]])] | w.S[(j, w.idx[j][y2[a_j]])]
                    mine = b & sj
                    if fr.w(ell, mine) < fr.need(ell, TWO_THIRDS):
                        continue
                    for z in trans:
                        if z[a_j] in (y[a_j], y2[a_j]):
                            continue
                        alloc = {agents[a]: w.S[(agents[a], w.idx[agents[a]][z[a]])] for a in others}
                        sol = Frugal({**alloc, ell: mine},
                                     {**{agents[a]: w.idx[agents[a]][z[a]] for a in others},
                                      ell: t_ell}, "four-special")
                        if _check(fr, sol, agents, TWO_THIRDS):
                            return sol
    return None


def allocate_from_witness(fr: _Frame, w: OverconstrainedWitness) -> Frugal:
    agents = w.agents
    if len(agents) < 4:
        raise InstanceError("witnesses have at least four agents")
    if len(agents) >= 5:
        picks = _greedy_transversal(w)
        if picks is not None:
            sol = _from_its(w, picks, "greedy")
            if _check(fr, sol, agents, TWO_THIRDS):
                return sol
        picks = find_its(w.conflict_graph())
        if picks is not None:
            sol = _from_its(w, picks, "its-search")
            if _check(fr, sol, agents, TWO_THIRDS):
                return sol
    else:
        picks = find_its(w.conflict_graph())
        if picks is not None:
            sol = _from_its(w, picks, "its-search")
            if _check(fr, sol, agents, TWO_THIRDS):
                return sol
        sol = _four_agent_special(fr, w)
        if sol is not None:
            return sol
    picks = find_its(w.conflict_graph(edge_level=True))
    if picks is not None:
        sol = _from_its(w, picks, "edge-level-its")
        if _check(fr, sol, agents, TWO_THIRDS):
            return sol
    sol = _frugal_search(fr, agents, w.idx, TWO_THIRDS)
    if sol is None:
        raise AssertionError("no frugal 2/3 orientation for an overconstrained set")
    return Frugal(sol.bundles, sol.index, "witness-exhaustive")


# --------------------------------------------------------------------------
# the recursive driver

class _Budget(Exception):
    pass


@dataclass
class TwoThirdsResult:
    allocation: Allocation
    methods: Counter
    fallback: bool


def construct_two_thirds_traced(inst: Instance, max_calls: int = 50000) -> TwoThirdsResult:
    n = inst.n
    if n < 3:
        raise InstanceError("construct_two_thirds needs at least three agents")
    fr = _reduce(inst, n)
    memo: dict = {}
    methods: Counter = Counter()

    def solve(agents: tuple, idx: Mapping[int, tuple]) -> Frugal:
        key = _key(agents, idx)
        if key in memo:
            return memo[key]
        if len(memo) >= max_calls:
            raise _Budget()
        if len(agents) == 3:
            sol, _ = three_agent_core(fr, agents, idx)
        else:
            res = detect_overconstrained(fr, agents, idx, solve)
            sol = res if isinstance(res, Frugal) else allocate_from_witness(fr, res)
        assert _check(fr, sol, agents, TWO_THIRDS, idx)
        methods[sol.method] += 1
        memo[key] = sol
        return sol

    agents = tuple(range(1, n + 1))
    try:
        sol = solve(agents, {i: tuple(range(n)) for i in agents})
        return TwoThirdsResult(sol.to_allocation(n), methods, False)
    except _Budget:
        alloc = frugal_exhaustive_23(inst)
        if alloc is None:
            raise CapExceeded("recursion budget exhausted and exhaustive search found nothing")
        return TwoThirdsResult(alloc, methods, True)


def construct_two_thirds(inst: Instance) -> Allocation:
    return construct_two_thirds_traced(inst).allocation


def _all_frugal(fr: _Frame, agents: tuple, idx: Mapping[int, Sequence[int]], frac: Fraction):
    """Every frugal orientation over ``agents`` that hands each agent its
    whole chosen bundle except the conflict edges it loses, filtered to
    those giving everyone ``frac``."""
    aset = set(agents)
    g = fr.inst.graph
    for ts in itertools.product(*(sorted(idx[i]) for i in agents)):
        chosen = dict(zip(agents, ts))
        fixed = {i: set() for i in agents}
        conflicts = []
        for e in g.edges:
            a = e.u in aset and e.id in fr.bundle(e.u, chosen[e.u])
            b = e.v != e.u and e.v in aset and e.id in fr.bundle(e.v, chosen[e.v])
            if a and b:
                conflicts.append(e)
            elif a:
                fixed[e.u].add(e.id)
            elif b:
                fixed[e.v].add(e.id)
        for bits in itertools.product((0, 1), repeat=len(conflicts)):
            bundles = {i: set(f) for i, f in fixed.items()}
            for e, s in zip(conflicts, bits):
                bundles[e.v if s else e.u].add(e.id)
            sol = Frugal({i: frozenset(b) for i, b in bundles.items()}, chosen, "adversarial")
            if _check(fr, sol, agents, frac, idx):
                yield sol


def adversarial_promise(fr: _Frame, agents: Sequence[int],
                        full_idx: Mapping[int, Sequence[int]] | None = None) -> Promise:
    """A promise oracle that steers detection towards overconstrained
    witnesses.

    On the first call for a leave-one-out subset it picks, among all maximal
    frugal 2/3 orientations X and X' (on the index sets detection will ask
    for), the pair covering as much as possible of the left-out agent's
    weakest bundle in both; the second call returns the stored X'.
    """
    full = tuple(agents)
    if full_idx is None:
        full_idx = {i: range(len(fr.B[i])) for i in full}
    full_idx = {i: tuple(sorted(full_idx[i])) for i in full}
    stash: dict = {}

    def coverage(ell, sol):
        got = sol.allocated()
        return tuple(fr.w(ell, fr.bundle(ell, t) & got) for t in range(len(fr.B[ell])))

    def pareto(cands):
        keep = []
        for cov, sol in sorted(cands, key=lambda c: c[0], reverse=True):
            if not any(all(a >= b for a, b in zip(k, cov)) for k, _ in keep):
                keep.append((cov, sol))
        return keep

    def promise(rest: tuple, idx: Mapping[int, tuple]) -> Frugal:
        key = _key(rest, idx)
        if key in stash:
            return stash[key]
        ell = next(a for a in full if a not in rest)
        by_index: dict = {}
        for sol in _all_frugal(fr, rest, idx, TWO_THIRDS):
            by_index.setdefault(tuple(sol.index[j] for j in rest), []).append((coverage(ell, sol), sol))
        best = None
        for ts, cands in sorted(by_index.items()):
            second = {j: tuple(t for t in full_idx[j] if t != ts[q]) for q, j in enumerate(rest)}
            others = list(_all_frugal(fr, rest, second, TWO_THIRDS))
            for cov, sol in pareto(cands):
                for sol2 in others:
                    cov2 = coverage(ell, sol2)
                    score = min(min(cov), min(cov2))
                    if best is None or score > best[0]:
                        best = (score, sol, sol2, second)
        assert best is not None, "no frugal 2/3 orientation for a subset"
        _, sol, sol2, second = best
        stash[_key(rest, second)] = sol2
        stash[key] = sol
        return sol
    return promise
