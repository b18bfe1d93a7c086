"""Seeded random instance families used by tests, benchmarks and the CLI."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, make_instance
from .valuations import (AdditiveValuation, SubadditiveValuation, XOSValuation,
                         as_table, validate_valuation)


@dataclass(frozen=True)
class RandomConfig:
    n: int = 4
    m: int = 8
    max_weight: int = 10
    clauses: int = 3
    max_degree: int = 10  # cap on |E_i|
    loop_prob: float = 0.1
    zero_prob: float = 0.2  # chance a clause ignores an edge


def random_graph(rng: random.Random, n: int, m: int, max_degree: int = 10,
                 loop_prob: float = 0.1) -> list[tuple[int, int]]:
    """m endpoint pairs with every agent on at most ``max_degree`` edges.
    Stops early if no pair has room left."""
    deg = [0] * (n + 1)
    ends: list[tuple[int, int]] = []
    for _ in range(m):
        room = [i for i in range(1, n + 1) if deg[i] < max_degree]
        if not room:
            break
        u = rng.choice(room)
        others = [j for j in room if j != u]
        if not others or rng.random() < loop_prob:
            v = u
        else:
            v = rng.choice(others)
        u, v = min(u, v), max(u, v)
        ends.append((u, v))
        deg[u] += 1
        if v != u:
            deg[v] += 1
    return ends


def _weights(rng, edges, cfg: RandomConfig, allow_zero=True) -> dict[int, Fraction]:
    w = {}
    for e in sorted(edges):
        if allow_zero and rng.random() < cfg.zero_prob:
            continue
        w[e] = Fraction(rng.randint(0 if allow_zero else 1, cfg.max_weight))
    return w


def _incident(ends, i):
    return [k for k, (u, v) in enumerate(ends) if i in (u, v)]


def random_additive(cfg: RandomConfig, seed: int) -> Instance:
    rng = random.Random(seed)
    ends = random_graph(rng, cfg.n, cfg.m, cfg.max_degree, cfg.loop_prob)
    vals = [AdditiveValuation(i, {e: Fraction(rng.randint(0, cfg.max_weight)) for e in _incident(ends, i)})
            for i in range(1, cfg.n + 1)]
    return make_instance(cfg.n, ends, vals, {"family": "additive", "seed": seed})


def random_xos(cfg: RandomConfig, seed: int) -> Instance:
    rng = random.Random(seed)
    ends = random_graph(rng, cfg.n, cfg.m, cfg.max_degree, cfg.loop_prob)
    vals = []
    for i in range(1, cfg.n + 1):
        inc = _incident(ends, i)
        k = rng.randint(1, max(1, cfg.clauses))
        vals.append(XOSValuation(i, tuple(_weights(rng, inc, cfg) for _ in range(k))))
    return make_instance(cfg.n, ends, vals, {"family": "xos", "seed": seed})


def _capped_additive_max(rng, inc, cfg) -> dict[frozenset, Fraction]:
    """max over a few functions min(c, a(S)), plus sometimes a bundle rule
    with inside <= 2 * outside; a max of subadditive functions is
    subadditive, and the rule part is usually not XOS."""
    parts = []
    for _ in range(rng.randint(1, max(1, cfg.clauses))):
        a = _weights(rng, inc, cfg)
        total = sum(a.values(), Fraction(0))
        cap = Fraction(rng.randint(1, max(1, int(total)))) if total else Fraction(0)
        parts.append((a, cap))
    rule = None
    if inc and rng.random() < 0.5:
        k = rng.randint(1, min(3, len(inc)))
        bundles = [frozenset(rng.sample(inc, rng.randint(1, len(inc)))) for _ in range(k)]
        outside = Fraction(rng.randint(1, cfg.max_weight))
        inside = outside + Fraction(rng.randint(0, int(outside)))
        rule = (bundles, inside, outside)
    table = {}
    for mask in range(1 << len(inc)):
        s = frozenset(inc[b] for b in range(len(inc)) if mask >> b & 1)
        best = Fraction(0)
        for a, cap in parts:
            best = max(best, min(cap, sum((a.get(e, Fraction(0)) for e in s), Fraction(0))))
        if rule is not None and s:
            bundles, inside, outside = rule
            best = max(best, inside if any(b <= s for b in bundles) else outside)
        table[s] = best
    return table


def random_subadditive(cfg: RandomConfig, seed: int, attempts: int = 20) -> Instance:
    rng = random.Random(seed)
    ends = random_graph(rng, cfg.n, cfg.m, cfg.max_degree, cfg.loop_prob)
    tmp = make_instance(cfg.n, ends, [AdditiveValuation(i, {}) for i in range(1, cfg.n + 1)])
    vals = []
    for i in range(1, cfg.n + 1):
        inc = _incident(ends, i)
        for _ in range(attempts):
            v = SubadditiveValuation(i, table=_capped_additive_max(rng, inc, cfg), ground=frozenset(inc))
            if validate_valuation(v, tmp.graph).ok:
                break
        else:  # pragma: no cover - the construction is valid by design
            raise RuntimeError("could not sample a valid subadditive valuation")
        vals.append(v)
    return make_instance(cfg.n, ends, vals, {"family": "subadditive", "seed": seed})


FAMILIES = {"additive": random_additive, "xos": random_xos, "subadditive": random_subadditive}


def random_instance(family: str, cfg: RandomConfig, seed: int) -> Instance:
    try:
        gen = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; pick one of {sorted(FAMILIES)}") from None
    return gen(cfg, seed)


def lift_to_table(inst: Instance) -> Instance:
    """Same instance with every valuation written out as a subadditive table."""
    vals = [as_table(v, inst.incident(v.owner)) for v in inst.valuations]
    return Instance(inst.graph, tuple(vals), dict(inst.meta))


def corpus(family: str, count: int, seed: int, n_range=(2, 6), m_range=(1, 12),
           max_degree: int = 10, **overrides):
    """``count`` instances with n and m drawn per item; reproducible from
    ``seed``.  ``m_range`` may be a callable n -> (lo, hi)."""
    rng = random.Random(seed)
    for k in range(count):
        n = rng.randint(*n_range)
        lo, hi = m_range(n) if callable(m_range) else m_range
        m = rng.randint(lo, hi)
        cfg = RandomConfig(n=n, m=m, max_degree=max_degree, **overrides)
        yield random_instance(family, cfg, seed * 100_003 + k)
