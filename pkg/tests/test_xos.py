from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from graphmms.additive import GreedyTrace
from graphmms.counterexamples import gen_k22_witness
from graphmms.its import block_metrics, find_its
from graphmms.model import InstanceError, make_instance
from graphmms.oracle import best_minmax_ratio, canon_of, is_frugal, mus_of, verify
from graphmms.random_instances import RandomConfig, random_xos
from graphmms.valuations import AdditiveValuation, XOSValuation
from graphmms.xos import (TWO_THIRDS, Frugal, OverconstrainedWitness, _check, _reduce,
                          adversarial_promise, allocate_from_witness, construct_two_thirds,
                          construct_two_thirds_traced, detect_overconstrained,
                          frugal_exhaustive_23, three_agent_core, xos_half_out_of_two,
                          xos_three_agents, xos_two_agents)


def ratio_ok(inst, alloc, d, alpha):
    rep = verify(inst, alloc, d, pmms=False)
    assert rep.is_orientation
    assert rep.is_frugal
    return rep.min_mms_ratio >= alpha


def disjoint_pairs_instance(n, d):
    """Every agent owns d self-loops of weight 1, nothing shared."""
    ends, vals = [], []
    for i in range(1, n + 1):
        ids = list(range(len(ends), len(ends) + d))
        ends += [(i, i)] * d
        vals.append(AdditiveValuation(i, {e: 1 for e in ids}))
    return make_instance(n, ends, vals)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_two_agents_disjoint(d):
    inst = disjoint_pairs_instance(2, d)
    assert ratio_ok(inst, xos_two_agents(inst, d), d, 1)


def test_two_agents_third_each():
    # agent 1's bundles are {0,1,2}, {3,4,5}, {6,7,8}; agent 2 splits {0,1,2} across its bundles
    ends = [(1, 2)] * 3 + [(1, 1)] * 6 + [(2, 2)] * 6
    w1 = {e: 1 for e in range(9)}
    w2 = {0: 3, 1: 3, 2: 3}
    w2.update({e: 1 for e in range(9, 15)})
    inst = make_instance(2, ends, [AdditiveValuation(1, w1), AdditiveValuation(2, w2)])
    canon = canon_of(inst, 3)
    assert canon[0].parts[0] == {0, 1, 2}
    assert [len(p & {0, 1, 2}) for p in canon[1].parts] == [1, 1, 1]
    alloc = xos_two_agents(inst, 3)
    assert verify(inst, alloc, 3, pmms=False).agent(1).mms_ratio == F(2, 3)


def test_two_agents_errors():
    inst = disjoint_pairs_instance(2, 2)
    with pytest.raises(InstanceError):
        xos_two_agents(inst, 0)
    bad = make_instance(3, [(2, 3)], [AdditiveValuation(i, {}) for i in (1, 2, 3)])
    with pytest.raises(InstanceError, match="isolated"):
        xos_two_agents(bad, 2)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("seed", range(25))
def test_two_agents_random(d, seed):
    inst = random_xos(RandomConfig(n=2, m=8, max_degree=8), seed)
    assert ratio_ok(inst, xos_two_agents(inst, d), d, 1 - F(1, d))


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("seed", range(25))
def test_three_agents_random(d, seed):
    inst = random_xos(RandomConfig(n=3, m=9, max_degree=8), seed)
    assert ratio_ok(inst, xos_three_agents(inst, d), d, 1 - F(1, d))


@pytest.mark.parametrize("seed", range(40))
def test_three_agent_shapes(seed):
    """Base case gives (B_it & union of large B_ju, B_jt* - B_hr, B_hr);
    the step gives (B_it - (B_ju | B_hr), B_ju - B_hr, B_hr)."""
    inst = random_xos(RandomConfig(n=3, m=9, max_degree=8), seed)
    fr = _reduce(inst, 3)
    sol, info = three_agent_core(fr, (1, 2, 3), {i: range(3) for i in (1, 2, 3)})
    i, j, h = info.i, info.j, info.h
    t, u, r = sol.index[i], sol.index[j], sol.index[h]
    assert t == info.t
    assert sol.bundles[h] == fr.bundle(h, r)
    assert sol.bundles[j] == fr.bundle(j, u) - fr.bundle(h, r)
    if info.case == "base":
        assert info.k == 2
        large = [v for v in range(3) if v != u]
        want = fr.bundle(i, t) & (fr.bundle(j, large[0]) | fr.bundle(j, large[1]))
    else:
        assert info.k < 2
        want = fr.bundle(i, t) - (fr.bundle(j, u) | fr.bundle(h, r))
    assert sol.bundles[i] == want


def test_three_agents_disjoint_full_bundles():
    inst = disjoint_pairs_instance(3, 3)
    assert ratio_ok(inst, xos_three_agents(inst, 3), 3, 1)
    with pytest.raises(InstanceError):
        xos_three_agents(disjoint_pairs_instance(2, 3), 3)


def test_half_out_of_two_fixture():
    w = {0: 4, 1: 3, 2: 2, 3: 1}
    inst = make_instance(2, [(1, 2)] * 4, [XOSValuation(1, (w,)), XOSValuation(2, (w,))])
    alloc, trace = xos_half_out_of_two(inst, with_trace=True)
    rep = verify(inst, alloc, 2, pmms=False)
    assert rep.min_mms_ratio >= F(1, 2) and rep.is_frugal
    assert trace.binding[1] == 0


def test_half_out_of_two_single_agent():
    inst = make_instance(1, [(1, 1)] * 3, [AdditiveValuation(1, {0: 2, 1: 1, 2: 1})])
    alloc = xos_half_out_of_two(inst)
    assert verify(inst, alloc, 2, pmms=False).min_mms_ratio >= 1


@settings(max_examples=80)
@given(st.integers(0, 10 ** 6), st.integers(1, 6), st.integers(0, 12))
def test_half_out_of_two_random(seed, n, m):
    inst = random_xos(RandomConfig(n=n, m=m), seed)
    alloc, trace = xos_half_out_of_two(inst, with_trace=True)
    assert ratio_ok(inst, alloc, 2, F(1, 2))
    gt = GreedyTrace(trace.rounds)
    mus = mus_of(inst, 2)
    for i in range(1, n + 1):
        if mus[i - 1] == 0:
            continue  # never needs to act
        assert len(gt.taken_before_first_turn(inst.graph, i)) <= 1


def test_exhaustive_disjoint_is_ratio_one():
    inst = disjoint_pairs_instance(3, 3)
    alloc = frugal_exhaustive_23(inst)
    assert ratio_ok(inst, alloc, 3, 1)


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("seed", range(8))
def test_two_thirds_random(n, seed):
    inst = random_xos(RandomConfig(n=n, m=2 * n, max_degree=6), seed)
    res = construct_two_thirds_traced(inst)
    assert not res.fallback
    assert ratio_ok(inst, res.allocation, n, TWO_THIRDS)
    assert ratio_ok(inst, frugal_exhaustive_23(inst), n, TWO_THIRDS)


def test_extension_fires_for_isolated_last_agent():
    inst = random_xos(RandomConfig(n=3, m=6, max_degree=6), 3)
    ends = [(e.u, e.v) for e in inst.graph.edges] + [(4, 4)] * 4
    vals = list(inst.valuations)[:3] + [AdditiveValuation(4, {inst.m + k: 1 for k in range(4)})]
    inst4 = make_instance(4, ends, vals)
    fr = _reduce(inst4, 4)
    agents = (1, 2, 3, 4)

    def promise(rest, idx):
        return three_agent_core(fr, rest, idx)[0]
    res = detect_overconstrained(fr, agents, {i: range(4) for i in agents}, promise)
    assert isinstance(res, Frugal) and res.method == "extend"


@pytest.fixture(scope="module")
def k22_witness():
    inst = gen_k22_witness()
    fr = _reduce(inst, 4)
    agents = (1, 2, 3, 4)
    idx = {i: tuple(range(4)) for i in agents}
    w = detect_overconstrained(fr, agents, idx, adversarial_promise(fr, agents))
    return inst, fr, w


def test_k22_witness_structure(k22_witness):
    inst, fr, w = k22_witness
    assert isinstance(w, OverconstrainedWitness)
    for i in w.agents:
        x, x2 = w.promised[i]
        for j in w.agents:
            if j != i:
                assert x.index[j] != x2.index[j]
                assert not (x.bundles[j] & x2.bundles[j])
        for t in w.idx[i]:
            assert fr.w(i, w.S[(i, t)]) >= TWO_THIRDS
    for a in w.agents:
        for b in w.agents:
            if a < b:
                assert len(w.collection(a, b)) == 4
    g = w.conflict_graph()
    assert find_its(g) is None
    assert block_metrics(g).max_degree == 4


def test_k22_witness_allocation(k22_witness):
    inst, fr, w = k22_witness
    sol = allocate_from_witness(fr, w)
    assert sol.method == "four-special"
    assert _check(fr, sol, w.agents, TWO_THIRDS, w.idx)
    alloc = sol.to_allocation(4)
    rep = verify(inst, alloc, 4, pmms=False)
    assert rep.min_mms_ratio >= TWO_THIRDS and rep.is_frugal and rep.is_orientation
    # one agent takes its share of two S-bundles of another, the rest keep whole S-bundles
    whole = [i for i in w.agents if alloc.bundle(i) == w.S[(i, sol.index[i])]]
    assert len(whole) == 3


def test_k22_witness_end_to_end():
    inst = gen_k22_witness()
    alloc = construct_two_thirds(inst)
    assert ratio_ok(inst, alloc, 4, TWO_THIRDS)
    assert frugal_exhaustive_23(inst) is not None
    best, _ = best_minmax_ratio(inst, mode="frugal")
    assert best >= TWO_THIRDS


def test_witness_needs_four_agents(k22_witness):
    _, fr, w = k22_witness
    small = OverconstrainedWitness(w.agents[:3], w.idx, w.promised, w.S)
    with pytest.raises(InstanceError):
        allocate_from_witness(fr, small)


@pytest.mark.parametrize("seed", range(6))
def test_detect_with_adversarial_promise_random(seed):
    inst = random_xos(RandomConfig(n=4, m=7, max_degree=5), seed)
    fr = _reduce(inst, 4)
    agents = (1, 2, 3, 4)
    idx = {i: tuple(range(4)) for i in agents}
    res = detect_overconstrained(fr, agents, idx, adversarial_promise(fr, agents))
    if isinstance(res, OverconstrainedWitness):
        res = allocate_from_witness(fr, res)
    assert _check(fr, res, agents, TWO_THIRDS, idx)
    assert is_frugal(res.to_allocation(4), fr.red.canon)


def test_construct_two_thirds_needs_three():
    with pytest.raises(InstanceError):
        construct_two_thirds(disjoint_pairs_instance(2, 2))


def test_budget_fallback():
    inst = random_xos(RandomConfig(n=5, m=10, max_degree=6), 2)
    res = construct_two_thirds_traced(inst, max_calls=1)
    assert res.fallback
    assert ratio_ok(inst, res.allocation, 5, TWO_THIRDS)
