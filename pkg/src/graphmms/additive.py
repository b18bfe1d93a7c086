"""Pairwise cut-and-choose and the greedy max-edge walk for additive agents."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .model import Allocation, Instance, InstanceError
from .oracle import DEFAULT_CAP, mu_on
from .valuations import AdditiveValuation


@dataclass(frozen=True)
class PairStep:
    chooser: int  # i, the smaller index
    cutter: int  # j
    cut: tuple[frozenset, frozenset]
    pick: int  # index into cut taken by the chooser

    @property
    def chooser_part(self) -> frozenset:
        return self.cut[self.pick]

    @property
    def cutter_part(self) -> frozenset:
        return self.cut[1 - self.pick]

    def to_dict(self) -> dict:
        return {"chooser": self.chooser, "cutter": self.cutter,
                "cut": [sorted(p) for p in self.cut], "pick": self.pick}


@dataclass
class CutChooseTrace:
    steps: list[PairStep] = field(default_factory=list)
    loops: dict[int, frozenset] = field(default_factory=dict)

    def share(self, i: int, j: int) -> frozenset:
        """X_{i,j}: what agent i took out of E_{i,j}."""
        if i == j:
            return self.loops.get(i, frozenset())
        for s in self.steps:
            if (s.chooser, s.cutter) == (i, j):
                return s.chooser_part
            if (s.cutter, s.chooser) == (i, j):
                return s.cutter_part
        return frozenset()

    def singleton_takers(self, i: int) -> set[int]:
        """K_i: earlier agents that picked a single edge from i's cut."""
        return {s.chooser for s in self.steps if s.cutter == i and len(s.chooser_part) == 1}

    def to_dict(self) -> dict:
        return {"pairs": [s.to_dict() for s in self.steps],
                "loops": {str(i): sorted(b) for i, b in sorted(self.loops.items())}}


def _require_additive(inst: Instance) -> None:
    for v in inst.valuations:
        if not isinstance(v, AdditiveValuation):
            raise InstanceError(f"agent {v.owner} is not additive ({v.kind})")


def _claim_safe(v, parts) -> bool:
    """Each side is worth a third of the whole to the cutter, or the other
    side is a single edge."""
    total = v.evaluate(parts[0] | parts[1])
    return all(3 * v.evaluate(parts[q]) >= total or len(parts[1 - q]) == 1 for q in (0, 1))


def optimal_cut(v, shared: tuple[int, ...], cap: int = DEFAULT_CAP) -> tuple[frozenset, frozenset]:
    """The cutter's 2-partition: the lexicographically first maximizer that is
    claim-safe.  The plain first maximizer can fail this when some edges are
    worth nothing to the cutter; a safe maximizer always exists for additive
    cutters, otherwise the first maximizer is kept."""
    mu, parts = mu_on(v, shared, 2, cap)
    if _claim_safe(v, parts):
        return parts[0], parts[1]
    k = len(shared)
    for mask in range(1 << (k - 1)):
        # bit j set puts shared[j + 1] into block 1; block 0 keeps shared[0]
        p1 = frozenset(shared[j + 1] for j in range(k - 1) if mask >> (k - 2 - j) & 1)
        p0 = frozenset(shared) - p1
        cand = (p0, p1)
        if min(v.evaluate(p0), v.evaluate(p1)) == mu and _claim_safe(v, cand):
            return cand
    return parts[0], parts[1]


def pairwise_cut_and_choose(inst: Instance, cap: int = DEFAULT_CAP
                            ) -> tuple[Allocation, CutChooseTrace]:
    """Cut-and-choose on every E_{i,j}, pairs i<j in lexicographic order.

    Works with any valuation class the oracle can partition; the additive and
    subadditive entry points differ only in their precondition.
    """
    g = inst.graph
    bundles = [set() for _ in range(inst.n)]
    trace = CutChooseTrace()
    for i in range(1, inst.n + 1):
        loops = g.common_edges(i, i)
        if loops:
            bundles[i - 1] |= loops
            trace.loops[i] = loops
    for i in range(1, inst.n + 1):
        for j in range(i + 1, inst.n + 1):
            shared = tuple(sorted(g.common_edges(i, j)))
            if not shared:
                continue
            parts = optimal_cut(inst.valuation(j), shared, cap)
            vi = inst.valuation(i)
            a, b = vi.evaluate(parts[0]), vi.evaluate(parts[1])
            # block 0 holds the smallest edge id, so ties go to it
            pick = 0 if a >= b else 1
            step = PairStep(i, j, (parts[0], parts[1]), pick)
            trace.steps.append(step)
            bundles[i - 1] |= step.chooser_part
            bundles[j - 1] |= step.cutter_part
    return Allocation.from_lists(bundles), trace


def cut_and_choose(inst: Instance) -> tuple[Allocation, CutChooseTrace]:
    _require_additive(inst)
    return pairwise_cut_and_choose(inst)


def claim_holds(inst: Instance, trace: CutChooseTrace) -> bool:
    """Per-pair property: v_i(X_ij) >= v_i(E_ij)/3 or |X_ji| = 1."""
    g = inst.graph
    for i in range(1, inst.n + 1):
        v = inst.valuation(i)
        for j in range(1, inst.n + 1):
            if i == j:
                continue
            mine = trace.share(i, j)
            if 3 * v.evaluate(mine) < v.evaluate(g.common_edges(i, j)) and len(trace.share(j, i)) != 1:
                return False
    return True


@dataclass(frozen=True)
class GreedyRound:
    agent: int
    edge: int
    next_agent: int
    restart: bool  # agent was picked by the restart rule, not handed the turn


@dataclass
class GreedyTrace:
    rounds: list[GreedyRound] = field(default_factory=list)

    def first_turn(self, i: int) -> int:
        for k, r in enumerate(self.rounds):
            if r.agent == i:
                return k
        return len(self.rounds)

    def taken_before_first_turn(self, g, i: int) -> set[int]:
        k = self.first_turn(i)
        inc = g.incident_edges(i)
        return {r.edge for r in self.rounds[:k] if r.edge in inc}

    def to_dict(self) -> dict:
        return {"rounds": [{"agent": r.agent, "edge": r.edge, "next": r.next_agent,
                            "restart": r.restart} for r in self.rounds]}


def greedy_walk(inst: Instance, allowed=None, on_take=None, start: int = 1):
    """The max-edge walk.  ``allowed(i, remaining)`` narrows the edges agent i
    may take (all remaining incident edges by default) and ``on_take(i, e)``
    is told about every pick."""
    g = inst.graph
    remaining = set(range(g.m))
    bundles = [set() for _ in range(inst.n)]
    trace = GreedyTrace()
    inc = {i: g.incident_edges(i) for i in range(1, inst.n + 1)}

    def options(i):
        if allowed is None:
            return inc[i] & remaining
        return allowed(i, remaining)

    agent, restart = start, False
    while remaining:
        opts = options(agent) if agent is not None else set()
        if not opts:
            agent = next((i for i in range(1, inst.n + 1) if options(i)), None)
            restart = True
            if agent is None:
                break
            opts = options(agent)
        v = inst.valuation(agent)
        e = max(sorted(opts), key=lambda x: v.evaluate([x]))  # first max wins
        remaining.discard(e)
        bundles[agent - 1].add(e)
        if on_take is not None:
            on_take(agent, e)
        nxt = g.edges[e].other(agent)
        trace.rounds.append(GreedyRound(agent, e, nxt, restart))
        agent, restart = nxt, False
    return Allocation.from_lists(bundles), trace


def greedy_max_edge(inst: Instance) -> tuple[Allocation, GreedyTrace]:
    _require_additive(inst)
    return greedy_walk(inst)


def value_of(inst: Instance, alloc: Allocation, i: int) -> Fraction:
    return inst.value(i, alloc.bundle(i))
