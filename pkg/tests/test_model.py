import pytest
from hypothesis import given, strategies as st

from graphmms.counterexamples import gen_greedy_bad
from graphmms.model import (Allocation, Edge, InstanceError, Multigraph, incident_edges,
                            instance_from_dict, instance_to_dict, orient_leftovers,
                            parse_instance, parse_rational, serialize_instance)
from graphmms.random_instances import RandomConfig, random_additive, random_subadditive, random_xos

K3 = Multigraph(3, (Edge(0, 1, 2), Edge(1, 2, 3), Edge(2, 1, 3)))


@pytest.mark.parametrize("g,i,want", [
    (K3, 1, {0, 2}),
    (Multigraph(2, (Edge(0, 2, 2),)), 1, set()),
    (Multigraph(2, (Edge(0, 2, 2),)), 2, {0}),
])
def test_incident_edges(g, i, want):
    assert incident_edges(g, i) == want


def test_incident_edges_example_instance():
    inst = gen_greedy_bad(3)
    assert inst.incident(2) == frozenset(range(5))


def test_incident_out_of_range():
    with pytest.raises(InstanceError):
        incident_edges(K3, 4)


@pytest.mark.parametrize("edges", [
    (Edge(0, 1, 4),),
    (Edge(0, 2, 1),),
    (Edge(1, 1, 2),),
    (Edge(0, 1, 2), Edge(0, 1, 3)),
])
def test_graph_invariants(edges):
    with pytest.raises(InstanceError):
        Multigraph(3, edges)


def test_minimal_instance_parses():
    inst = parse_instance('{"n":1,"edges":[{"id":0,"u":1,"v":1}],'
                          '"valuations":[{"type":"additive","weights":{"0":1}}]}')
    assert inst.value(1, {0}) == 1


@pytest.mark.parametrize("text,msg", [
    ('{"n":3,"edges":[{"id":0,"u":1,"v":2}],"valuations":[{"type":"additive","weights":{}},'
     '{"type":"additive","weights":{}},{"type":"additive","weights":{"0":"1"}}]}', "relevance violation"),
    ('{"n":2,"edges":[{"id":0,"u":1,"v":3}],"valuations":[]}', "out of range"),
    ('{"n":2,"edges":[{"id":0,"u":1,"v":2},{"id":0,"u":1,"v":2}],"valuations":[]}', "duplicate"),
    ('{"n":2, "edges": [', "malformed"),
])
def test_parse_errors(text, msg):
    with pytest.raises(InstanceError, match=msg):
        parse_instance(text)


def test_k3_round_trip(fixtures_dir):
    raw = (fixtures_dir / "k3.json").read_bytes()
    assert serialize_instance(parse_instance(raw)) == raw


@pytest.mark.parametrize("gen", [random_additive, random_xos, random_subadditive])
@pytest.mark.parametrize("seed", range(5))
def test_round_trip_random(gen, seed):
    inst = gen(RandomConfig(n=3, m=6), seed)
    again = parse_instance(serialize_instance(inst))
    assert again == inst
    assert instance_to_dict(instance_from_dict(instance_to_dict(inst))) == instance_to_dict(inst)


@pytest.mark.parametrize("x,want", [(3, "3"), ("1/2", "1/2"), (" 4/6", "2/3")])
def test_parse_rational(x, want):
    assert str(parse_rational(x)) == want


@pytest.mark.parametrize("x", [True, 1.5, "a/b", "1/0", None])
def test_parse_rational_rejects(x):
    with pytest.raises(InstanceError):
        parse_rational(x)


def test_allocation_flags():
    a = Allocation.from_lists([{0}, {1}, set()])
    assert a.is_orientation(K3) and not a.is_partition(K3)
    b = Allocation.from_lists([{0, 1}, set(), {2}])
    assert not b.is_orientation(K3)
    with pytest.raises(InstanceError):
        Allocation.from_lists([{0}, {0}, set()]).validate(K3)
    with pytest.raises(InstanceError):
        Allocation.from_lists([{7}, set(), set()]).validate(K3)


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_orient_leftovers_completes(owners):
    bundles = [set(), set(), set()]
    for e, o in enumerate(owners):
        if o and o in K3.endpoints(e):
            bundles[o - 1].add(e)
    full = orient_leftovers(K3, Allocation.from_lists(bundles))
    assert full.is_partition(K3) and full.is_orientation(K3)
    for i in range(3):
        assert set(bundles[i]) <= full.bundle(i + 1)
