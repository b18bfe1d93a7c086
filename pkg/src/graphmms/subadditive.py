"""Half-MMS and half-PMMS orientations for subadditive agents."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .additive import CutChooseTrace, pairwise_cut_and_choose
from .model import Allocation, CapExceeded, Instance, InstanceError
from .oracle import DEFAULT_CAP, canon_of

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class RecursionNode:
    """One solved subproblem: agents ``order[:k]`` on the given index sets."""

    k: int
    idx: tuple[tuple[int, ...], ...]
    bundles: tuple[frozenset, ...]  # aligned with order[:k]
    index: tuple[int, ...]
    branch: str  # "base", "keep-first" or "keep-second"
    t: int  # bundle index taken by the newest agent


@dataclass
class HalfMmsResult:
    allocation: Allocation
    order: tuple[int, ...]
    nodes: dict  # memo key -> RecursionNode

    @property
    def calls(self) -> int:
        return len(self.nodes)


def subadditive_half_mms_traced(inst: Instance, order: Sequence[int] | None = None,
                                cap: int = DEFAULT_CAP, max_calls: int = 1 << 16) -> HalfMmsResult:
    """Induction over agent prefixes.  For k + 1 agents on index sets I_j, X
    solves the first k agents on I_j minus its largest index and X' on I_j
    minus the index X used; the newest agent takes its lowest admissible
    bundle B and either keeps B minus X (extending X) or B inside X
    (extending X')."""
    n = inst.n
    order = tuple(range(1, n + 1)) if order is None else tuple(order)
    if sorted(order) != list(range(1, n + 1)):
        raise InstanceError("order must be a permutation of the agents")
    canon = canon_of(inst, n, cap)
    B = {i: canon[i - 1].parts for i in order}
    memo: dict = {}

    def solve(k: int, idx: tuple[tuple[int, ...], ...]) -> RecursionNode:
        key = (k, idx)
        if key in memo:
            return memo[key]
        if len(memo) >= max_calls:
            raise CapExceeded(f"subadditive recursion exceeded {max_calls} subproblems")
        new = order[k - 1]
        t = min(idx[k - 1])
        bundle = B[new][t]
        if k == 1:
            node = RecursionNode(1, idx, (bundle,), (t,), "base", t)
        else:
            first = tuple(s[:-1] for s in idx[:-1])
            x = solve(k - 1, first)
            second = tuple(tuple(u for u in s if u != x.index[q]) for q, s in enumerate(idx[:-1]))
            x2 = solve(k - 1, second)
            ax = frozenset().union(*x.bundles)
            ax2 = frozenset().union(*x2.bundles)
            assert not (ax & ax2 & bundle), "promised orientations overlap on the new bundle"
            v = inst.valuation(new)
            whole = v.evaluate(bundle)
            outside, inside = bundle - ax, bundle & ax
            assert v.evaluate(outside) + v.evaluate(inside) >= whole, "valuation is not subadditive"
            if 2 * v.evaluate(outside) >= whole:
                node = RecursionNode(k, idx, x.bundles + (outside,), x.index + (t,), "keep-first", t)
            else:
                node = RecursionNode(k, idx, x2.bundles + (inside,), x2.index + (t,), "keep-second", t)
        for q in range(k):
            agent = order[q]
            assert node.bundles[q] <= B[agent][node.index[q]]
            thr = min(inst.value(agent, p) for p in B[agent])
            assert 2 * inst.value(agent, node.bundles[q]) >= thr, "half-MMS guarantee violated"
        memo[key] = node
        return node

    full = tuple(tuple(range(n)) for _ in range(n))
    root = solve(n, full)
    bundles = [frozenset()] * n
    for q, agent in enumerate(order):
        bundles[agent - 1] = root.bundles[q]
    return HalfMmsResult(Allocation.from_lists(bundles), order, memo)


def subadditive_half_mms(inst: Instance, order: Sequence[int] | None = None,
                         cap: int = DEFAULT_CAP) -> Allocation:
    return subadditive_half_mms_traced(inst, order, cap).allocation


def subadditive_half_pmms(inst: Instance, cap: int = DEFAULT_CAP) -> tuple[Allocation, CutChooseTrace]:
    """Pairwise cut-and-choose with the cutter's 2-partition computed on its
    (possibly subadditive) valuation."""
    return pairwise_cut_and_choose(inst, cap)


def recursion_summary(res: HalfMmsResult) -> Mapping[str, int]:
    out: dict[str, int] = {}
    for node in res.nodes.values():
        out[node.branch] = out.get(node.branch, 0) + 1
    return out
