import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from graphmms.counterexamples import gen_subadditive_upper, gen_xos_pmms_upper
from graphmms.model import Allocation, CapExceeded, InstanceError, make_instance
from graphmms.oracle import (SearchCaps, best_minmax_ratio, brute_force_mu, compute_mms,
                             frugal_index, is_frugal, mu_on, pmms_threshold, ratio, verify)
from graphmms.random_instances import RandomConfig, lift_to_table, random_instance
from graphmms.valuations import AdditiveValuation, SubadditiveValuation, XOSValuation, as_table


def rgs(k, d):
    """Restricted growth strings of length k with at most d labels, lex order."""
    def rec(prefix, top):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for lab in range(min(top + 2, d)):
            yield from rec(prefix + [lab], max(top, lab))
    yield from rec([], -1)


def slow_canonical(v, ground, d):
    g = sorted(ground)
    best, first = None, None
    for s in rgs(len(g), d):
        parts = [frozenset(g[j] for j in range(len(g)) if s[j] == t) for t in range(d)]
        val = min(v.evaluate(p) for p in parts)
        if best is None or val > best:
            best, first = val, tuple(parts)
    return best, first


@pytest.mark.parametrize("family", ["additive", "xos", "subadditive"])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_mu_and_canonical_match_slow_rgs(family, d):
    for seed in range(6):
        inst = random_instance(family, RandomConfig(n=3, m=6), seed)
        for i in range(1, 4):
            r = compute_mms(inst, i, d)
            mu, parts = slow_canonical(inst.valuation(i), inst.incident(i), d)
            assert r.mu == mu
            assert r.canonical.parts == parts
            r.canonical.check(inst.graph)


def test_mu_examples():
    v = AdditiveValuation(1, {0: 3, 1: 2, 2: 2, 3: 1})
    assert mu_on(v, (0, 1, 2, 3), 2)[0] == 4
    assert mu_on(v, (0, 1, 2, 3), 3)[0] == 2
    assert mu_on(v, (0, 1, 2, 3), 5)[0] == 0
    assert mu_on(v, (), 1)[0] == 0


def test_mu_rejects_bad_d_and_cap():
    v = AdditiveValuation(1, {})
    with pytest.raises(InstanceError):
        mu_on(v, (0,), 0)
    with pytest.raises(CapExceeded):
        mu_on(AdditiveValuation(1, {e: 1 for e in range(20)}), tuple(range(20)), 2)


def test_rule_fast_path_beyond_cap():
    inst = gen_subadditive_upper(3)  # 12 edges per agent, fine under the default cap
    r = compute_mms(inst, 1, 3)
    assert r.mu == 1 and set(r.canonical.parts) >= set()
    big = gen_subadditive_upper(4)  # 3 * 16 = 48 relevant edges per agent
    r = compute_mms(big, 2, 4)
    assert r.mu == 1
    assert all(any(b <= p for b in big.valuation(2).bundles) for p in r.canonical.parts)
    r.canonical.check(big.graph)


@pytest.mark.parametrize("seed", range(20))
def test_brute_force_agrees(seed):
    rng = random.Random(seed)
    fam = rng.choice(["additive", "xos", "subadditive"])
    inst = random_instance(fam, RandomConfig(n=3, m=rng.randint(1, 7)), seed)
    i, d = rng.randint(1, 3), rng.randint(1, 4)
    ground = tuple(sorted(inst.incident(i)))
    assert compute_mms(inst, i, d).mu == brute_force_mu(inst.valuation(i), ground, d)


@given(st.lists(st.integers(0, 10), min_size=0, max_size=7), st.integers(1, 5))
def test_mms_monotone_in_d(ws, d):
    v = AdditiveValuation(1, dict(enumerate(ws)))
    g = tuple(range(len(ws)))
    assert mu_on(v, g, d + 1)[0] <= mu_on(v, g, d)[0]
    # additive: mu^d never exceeds the proportional share
    assert d * mu_on(v, g, d)[0] <= sum(ws)


@given(st.lists(st.integers(0, 10), min_size=1, max_size=6))
def test_table_lift_same_mu(ws):
    v = AdditiveValuation(1, dict(enumerate(ws)))
    g = tuple(range(len(ws)))
    t = as_table(v, g)
    for d in (2, 3):
        assert mu_on(v, g, d)[0] == mu_on(t, g, d)[0]
        assert mu_on(v, g, d)[1] == mu_on(t, g, d)[1]


def test_ratio_conventions():
    assert ratio(F(0), F(0)) == 1
    assert ratio(F(1), F(2)) == F(1, 2)


def test_pmms_threshold_and_verify_upper_fixture():
    inst, alloc = gen_xos_pmms_upper()
    rep = verify(inst, alloc)
    # the explicit allocation hands e22 to the outsider agent 3
    assert rep.is_partition and not rep.is_orientation
    assert rep.min_pmms_ratio == 1
    assert pmms_threshold(inst, alloc, 1) == F(1, 2)


def test_frugal_index():
    inst = make_instance(2, [(1, 2)] * 2, [AdditiveValuation(1, {0: 1, 1: 1}),
                                           AdditiveValuation(2, {0: 1, 1: 1})])
    canon = [compute_mms(inst, i, 2).canonical for i in (1, 2)]
    assert frugal_index(frozenset(), canon[0]) == 0
    assert frugal_index(frozenset({0, 1}), canon[0]) is None
    assert is_frugal(Allocation.from_lists([{0}, {1}]), canon)
    assert not is_frugal(Allocation.from_lists([{0, 1}, set()]), canon)


def test_best_minmax_modes_agree_on_small_additive():
    inst = random_instance("additive", RandomConfig(n=3, m=5, loop_prob=0), 4)
    a, _ = best_minmax_ratio(inst, mode="allocations")
    o, _ = best_minmax_ratio(inst, mode="orientations")
    # every allocation can be turned into an orientation without lowering a graphical value
    assert a == o


def test_best_minmax_caps_and_errors():
    inst = random_instance("additive", RandomConfig(n=3, m=8), 1)
    with pytest.raises(CapExceeded):
        best_minmax_ratio(inst, caps=SearchCaps(allocations=10))
    with pytest.raises(ValueError):
        best_minmax_ratio(inst, mode="bogus")
    with pytest.raises(ValueError):
        best_minmax_ratio(inst, measure="bogus")


def test_frugal_mode_on_subadditive_upper():
    inst = gen_subadditive_upper(2)
    r, alloc = best_minmax_ratio(inst, mode="frugal")
    assert r == F(1, 2)
    assert verify(inst, alloc).min_mms_ratio == F(1, 2)


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_table_lifted_instance_same_mus(seed):
    inst = random_instance("xos", RandomConfig(n=3, m=6), seed)
    lifted = lift_to_table(inst)
    for i in range(1, 4):
        assert compute_mms(inst, i, 3).mu == compute_mms(lifted, i, 3).mu


def test_xos_rgs_tie_break_prefers_lexicographically_first():
    v = XOSValuation(1, ({0: 1, 1: 1, 2: 1, 3: 1},))
    mu, parts = mu_on(v, (0, 1, 2, 3), 2)
    assert mu == 2 and parts == (frozenset({0, 1}), frozenset({2, 3}))


def test_rule_table_has_no_value_outside_ground():
    v = SubadditiveValuation(1, bundles=(frozenset({0}),), inside=2, outside=1).bind(frozenset({0, 1}))
    assert mu_on(v, (0, 1), 2)[0] == 1
    assert list(itertools.islice(rgs(3, 2), 4)) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]
