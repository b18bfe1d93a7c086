"""Exact MMS values, canonical partitions, PMMS thresholds and exhaustive
best-allocation search.

Valuations are compiled into integer tables indexed by bitmasks over the
relevant ground set (bit ``j`` is the ``j``-th smallest edge id), scaled by the
lcm of all denominators so the searches never touch ``Fraction``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .model import Allocation, CapExceeded, DPartition, Instance, InstanceError, format_rational
from .valuations import (
    AdditiveValuation,
    CappedValuation,
    SubadditiveValuation,
    XOSValuation,
)

DEFAULT_CAP = 14
ZERO = Fraction(0)


def _lcm_of(fracs: Iterable[Fraction]) -> int:
    out = 1
    for q in fracs:
        out = math.lcm(out, q.denominator)
    return out


def _doubling(weights: Sequence[int]) -> list[int]:
    tbl = [0]
    for w in weights:
        tbl += [x + w for x in tbl]
    return tbl


@lru_cache(maxsize=4096)
def compile_table(v, ground: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Integer table ``T`` and scale ``s`` with ``v(S) = T[mask(S)] / s``."""
    k = len(ground)
    if isinstance(v, AdditiveValuation):
        ws = [v.weight(e) for e in ground]
        s = _lcm_of(ws)
        return tuple(_doubling([int(w * s) for w in ws])), s
    if isinstance(v, XOSValuation):
        s = _lcm_of(w for c in v.clauses for e, w in c.items() if e in set(ground))
        tbl = None
        for c in v.clauses:
            t = _doubling([int(c.get(e, ZERO) * s) for e in ground])
            tbl = t if tbl is None else [max(a, b) for a, b in zip(tbl, t)]
        return tuple(tbl), s
    if isinstance(v, SubadditiveValuation) and v.is_rule:
        s = _lcm_of([v.inside, v.outside])
        bmasks = [sum(1 << j for j, e in enumerate(ground) if e in b) for b in v.bundles
                  if b <= set(ground)]
        inside, outside = int(v.inside * s), int(v.outside * s)
        # edges in ground but outside the bound ground set carry no value
        live = sum(1 << j for j, e in enumerate(ground) if v.ground is None or e in v.ground)
        tbl = []
        for m in range(1 << k):
            mm = m & live
            if not mm:
                tbl.append(0)
            elif any(mm & b == b for b in bmasks):
                tbl.append(inside)
            else:
                tbl.append(outside)
        return tuple(tbl), s
    vals = [v.evaluate([ground[j] for j in range(k) if m >> j & 1]) for m in range(1 << k)]
    s = _lcm_of(vals)
    return tuple(int(x * s) for x in vals), s


def _search(tbl: Sequence[int], k: int, d: int, additive: bool) -> tuple[int, tuple[int, ...]]:
    """Max over partitions of range(k) into <= d blocks of the min block value
    (empty blocks count 0), plus the lexicographically smallest restricted
    growth string attaining it."""
    full = (1 << k) - 1
    if d == 1:
        return tbl[full], (0,) * k
    if k < d:
        return 0, (0,) * k

    # phase 1: value-ordered branch and bound for the optimum
    order = sorted(range(k), key=lambda j: -tbl[1 << j])
    ceiling = tbl[full] // d if additive else tbl[full]
    best = [-1]
    blocks: list[int] = []

    def dfs(pos: int, rest: int) -> bool:
        if pos == k:
            val = min(tbl[b] for b in blocks) if len(blocks) == d else 0
            if val > best[0]:
                best[0] = val
            return best[0] >= ceiling
        bound = tbl[rest] if len(blocks) < d else ceiling
        for b in blocks:
            x = tbl[b | rest]
            if x < bound:
                bound = x
        if bound <= best[0]:
            return False
        bit = 1 << order[pos]
        nrest = rest & ~bit
        if len(blocks) < d:
            blocks.append(bit)
            if dfs(pos + 1, nrest):
                return True
            blocks.pop()
        for idx in sorted(range(len(blocks)), key=lambda q: tbl[blocks[q]]):
            old = blocks[idx]
            blocks[idx] = old | bit
            done = dfs(pos + 1, nrest)
            blocks[idx] = old
            if done:
                return True
        return False

    dfs(0, full)
    mu = best[0]

    # phase 2: first restricted growth string in lexicographic order reaching mu
    labels = [0] * k
    blocks.clear()

    def lex(j: int, rest: int) -> bool:
        if j == k:
            val = min(tbl[b] for b in blocks) if len(blocks) == d else 0
            return val >= mu
        bound = tbl[rest] if len(blocks) < d else tbl[full]
        for b in blocks:
            x = tbl[b | rest]
            if x < bound:
                bound = x
        if bound < mu:
            return False
        bit = 1 << j
        nrest = rest & ~bit
        for idx in range(len(blocks)):
            labels[j] = idx
            old = blocks[idx]
            blocks[idx] = old | bit
            ok = lex(j + 1, nrest)
            blocks[idx] = old
            if ok:
                return True
        if len(blocks) < d:
            labels[j] = len(blocks)
            blocks.append(bit)
            if lex(j + 1, nrest):
                return True
            blocks.pop()
        return False

    found = lex(0, full)
    assert found, "phase 2 must reach the phase 1 optimum"
    return mu, tuple(labels)


def _rule_fast_path(v: SubadditiveValuation, ground: tuple[int, ...], d: int):
    """MMS of a bundle-containment rule by packing d disjoint bundles."""
    gset = frozenset(ground)
    cands = sorted({b for b in v.bundles if b and b <= gset}, key=lambda b: sorted(b))
    chosen: list[frozenset] = []

    def pack(start: int, used: frozenset) -> bool:
        if len(chosen) == d:
            return True
        for q in range(start, len(cands)):
            if not cands[q] & used:
                chosen.append(cands[q])
                if pack(q + 1, used | cands[q]):
                    return True
                chosen.pop()
        return False

    if d >= 1 and pack(0, frozenset()):
        parts = sorted(chosen, key=min)
        extra = gset - frozenset().union(*parts)
        parts[0] = parts[0] | extra
        parts.sort(key=min)
        return v.inside, tuple(parts)
    g = sorted(ground)
    if len(g) < d:
        return ZERO, (gset,) + (frozenset(),) * (d - 1)
    head = frozenset(g[: len(g) - d + 1])
    parts = (head,) + tuple(frozenset([e]) for e in g[len(g) - d + 1:])
    return v.outside, parts


@lru_cache(maxsize=65536)
def mu_on(v, ground: tuple[int, ...], d: int, cap: int = DEFAULT_CAP
          ) -> tuple[Fraction, tuple[frozenset, ...]]:
    """``mu^d`` of ``v`` restricted to ``ground`` and the canonical d-partition."""
    ground = tuple(sorted(ground))
    k = len(ground)
    if d < 1:
        raise InstanceError("d must be positive")
    if k > cap:
        if isinstance(v, SubadditiveValuation) and v.is_rule:
            return _rule_fast_path(v, ground, d)
        raise CapExceeded(f"{k} relevant edges exceed the oracle cap {cap}")
    tbl, s = compile_table(v, ground)
    mu, rgs = _search(tbl, k, d, isinstance(v, AdditiveValuation))
    parts = [set() for _ in range(d)]
    for j, lab in enumerate(rgs):
        parts[lab].add(ground[j])
    return Fraction(mu, s), tuple(frozenset(p) for p in parts)


@dataclass(frozen=True)
class MmsResult:
    owner: int
    d: int
    mu: Fraction
    canonical: DPartition


def compute_mms(inst: Instance, i: int, d: int, cap: int = DEFAULT_CAP) -> MmsResult:
    ground = tuple(sorted(inst.incident(i)))
    mu, parts = mu_on(inst.valuation(i), ground, d, cap)
    return MmsResult(i, d, mu, DPartition(i, parts))


def canon_of(inst: Instance, d: int, cap: int = DEFAULT_CAP) -> tuple[DPartition, ...]:
    return tuple(compute_mms(inst, i, d, cap).canonical for i in range(1, inst.n + 1))


def mus_of(inst: Instance, d: int, cap: int = DEFAULT_CAP) -> tuple[Fraction, ...]:
    return tuple(compute_mms(inst, i, d, cap).mu for i in range(1, inst.n + 1))


def brute_force_mu(v, ground: Sequence[int], d: int) -> Fraction:
    """Second oracle: every labeled assignment of ``ground`` to d parts.

    Independent of :func:`compile_table`: the subset table comes from
    ``v.evaluate`` directly and the search is plain numpy enumeration.
    """
    g = sorted(ground)
    k = len(g)
    vals = [v.evaluate([g[j] for j in range(k) if m >> j & 1]) for m in range(1 << k)]
    s = _lcm_of(vals)
    table = np.array([int(x * s) for x in vals], dtype=np.int64)
    if k == 0:
        return ZERO
    labels = np.array(list(itertools.product(range(d), repeat=k)), dtype=np.int64)
    weights = (1 << np.arange(k, dtype=np.int64))
    best = 0
    mins = None
    for b in range(d):
        masks = ((labels == b) * weights).sum(axis=1)
        part = table[masks]
        mins = part if mins is None else np.minimum(mins, part)
    best = int(mins.max())
    return Fraction(best, s)


def ratio(value: Fraction, threshold: Fraction) -> Fraction:
    """``value / threshold`` with a zero threshold counting as satisfied."""
    if threshold == 0:
        return Fraction(1)
    return Fraction(value) / threshold


def pmms_threshold(inst: Instance, alloc: Allocation, i: int, cap: int = DEFAULT_CAP) -> Fraction:
    ei = inst.incident(i)
    mine = alloc.bundle(i) & ei
    best = ZERO
    for j in range(1, inst.n + 1):
        if j == i:
            continue
        ground = tuple(sorted(mine | (alloc.bundle(j) & ei)))
        mu, _ = mu_on(inst.valuation(i), ground, 2, cap)
        best = max(best, mu)
    return best


def frugal_index(bundle: frozenset[int], part: DPartition) -> int | None:
    """Index t with ``bundle`` inside part t, or None; empty bundles get 0."""
    for t, p in enumerate(part.parts):
        if bundle <= p:
            return t
    return None


def is_frugal(alloc: Allocation, canon: Sequence[DPartition]) -> bool:
    return all(frugal_index(alloc.bundle(i), canon[i - 1]) is not None
               for i in range(1, alloc.n + 1))


@dataclass(frozen=True)
class AgentReport:
    agent: int
    mu: Fraction
    value: Fraction
    mms_ratio: Fraction
    pmms_threshold: Fraction | None
    pmms_ratio: Fraction | None
    frugal_index: int | None

    def to_dict(self) -> dict:
        f = lambda q: None if q is None else format_rational(q)  # noqa: E731
        return {"agent": self.agent, "mu": f(self.mu), "value": f(self.value),
                "mms_ratio": f(self.mms_ratio), "pmms_threshold": f(self.pmms_threshold),
                "pmms_ratio": f(self.pmms_ratio), "frugal_index": self.frugal_index}


@dataclass(frozen=True)
class FairnessReport:
    d: int
    agents: tuple[AgentReport, ...]
    is_partition: bool
    is_orientation: bool
    is_frugal: bool

    def agent(self, i: int) -> AgentReport:
        return self.agents[i - 1]

    @property
    def min_mms_ratio(self) -> Fraction:
        return min((a.mms_ratio for a in self.agents), default=Fraction(1))

    @property
    def min_pmms_ratio(self) -> Fraction:
        return min((a.pmms_ratio for a in self.agents if a.pmms_ratio is not None),
                   default=Fraction(1))

    def to_dict(self) -> dict:
        return {"d": self.d, "agents": [a.to_dict() for a in self.agents],
                "is_partition": self.is_partition, "is_orientation": self.is_orientation,
                "is_frugal": self.is_frugal,
                "min_mms_ratio": format_rational(self.min_mms_ratio),
                "min_pmms_ratio": format_rational(self.min_pmms_ratio)}


def verify(inst: Instance, alloc: Allocation, d: int | None = None,
           canon: Sequence[DPartition] | None = None, pmms: bool = True,
           cap: int = DEFAULT_CAP) -> FairnessReport:
    d = inst.n if d is None else d
    alloc.validate(inst.graph)
    results = [compute_mms(inst, i, d, cap) for i in range(1, inst.n + 1)]
    if canon is None:
        canon = tuple(r.canonical for r in results)
    rows = []
    for i, r in enumerate(results, start=1):
        val = inst.value(i, alloc.bundle(i))
        thr = pmms_threshold(inst, alloc, i, cap) if pmms else None
        rows.append(AgentReport(
            i, r.mu, val, ratio(val, r.mu), thr,
            None if thr is None else ratio(val, thr),
            frugal_index(alloc.bundle(i), canon[i - 1])))
    return FairnessReport(d, tuple(rows), alloc.is_partition(inst.graph),
                          alloc.is_orientation(inst.graph),
                          all(a.frugal_index is not None for a in rows))


# --------------------------------------------------------------------------
# exhaustive best-allocation search

@dataclass(frozen=True)
class SearchCaps:
    allocations: int = 1 << 20
    orientations: int = 1 << 24
    frugal: int = 1 << 22


def _min_ratio(inst, alloc, thresholds, measure, cap):
    worst = None
    for i in range(1, inst.n + 1):
        val = inst.value(i, alloc.bundle(i))
        thr = thresholds[i - 1] if measure == "mms" else pmms_threshold(inst, alloc, i, cap)
        r = ratio(val, thr)
        if worst is None or r < worst:
            worst = r
    return worst if worst is not None else Fraction(1)


def frugal_candidates(inst: Instance, canon: Sequence[DPartition]):
    """Yield ``(index vector, allocation)`` for every frugal orientation that
    gives each agent its whole chosen bundle minus the conflicts it loses."""
    n, g = inst.n, inst.graph
    for ts in itertools.product(*(range(canon[i].d) for i in range(n))):
        chosen = [canon[i].parts[ts[i]] for i in range(n)]
        fixed = [set() for _ in range(n)]
        conflicts = []
        for e in g.edges:
            a = e.id in chosen[e.u - 1]
            b = e.u != e.v and e.id in chosen[e.v - 1]
            if a and b:
                conflicts.append(e)
            elif a:
                fixed[e.u - 1].add(e.id)
            elif b:
                fixed[e.v - 1].add(e.id)
        for bits in itertools.product((0, 1), repeat=len(conflicts)):
            bundles = [set(f) for f in fixed]
            for e, side in zip(conflicts, bits):
                bundles[(e.v if side else e.u) - 1].add(e.id)
            yield ts, Allocation.from_lists(bundles)


def best_minmax_ratio(inst: Instance, d: int | None = None, mode: str = "allocations",
                      measure: str = "mms", canon: Sequence[DPartition] | None = None,
                      mus: Sequence[Fraction] | None = None, caps: SearchCaps = SearchCaps(),
                      cap: int = DEFAULT_CAP) -> tuple[Fraction, Allocation]:
    """Exhaustive max over ``mode`` of the min agent ratio (first maximizer wins)."""
    d = inst.n if d is None else d
    n, m, g = inst.n, inst.m, inst.graph
    if measure not in ("mms", "pmms"):
        raise ValueError(f"unknown measure {measure!r}")
    thresholds = None
    if measure == "mms":
        thresholds = tuple(mus) if mus is not None else mus_of(inst, d, cap)

    if mode == "allocations":
        if n ** m > caps.allocations:
            raise CapExceeded(f"{n}^{m} allocations exceed cap")
        space = (Allocation.from_lists([[e for e in range(m) if owners[e] == i]
                                        for i in range(1, n + 1)])
                 for owners in itertools.product(range(1, n + 1), repeat=m))
    elif mode == "orientations":
        loops = [e for e in g.edges if e.is_loop]
        free = [e for e in g.edges if not e.is_loop]
        if 2 ** len(free) > caps.orientations:
            raise CapExceeded(f"2^{len(free)} orientations exceed cap")

        def gen():
            for bits in itertools.product((0, 1), repeat=len(free)):
                bundles = [[] for _ in range(n)]
                for e in loops:
                    bundles[e.u - 1].append(e.id)
                for e, side in zip(free, bits):
                    bundles[(e.v if side else e.u) - 1].append(e.id)
                yield Allocation.from_lists(bundles)
        space = gen()
    elif mode == "frugal":
        if canon is None:
            canon = canon_of(inst, d, cap)
        size = 1
        for p in canon:
            size *= p.d
        if size > caps.frugal:
            raise CapExceeded("frugal index space exceeds cap")
        space = (a for _, a in frugal_candidates(inst, canon))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    best, witness = None, None
    for alloc in space:
        r = _min_ratio(inst, alloc, thresholds, measure, cap)
        if best is None or r > best:
            best, witness = r, alloc
    if best is None:
        return Fraction(1), Allocation.empty(n)
    return best, witness
