import json

import pytest
from hypothesis import given, strategies as st

from fptmix.core import (
    Digraph,
    Graph,
    InstanceError,
    OrderedUniverse,
    WeightedSetFamily,
    WeightOverflowError,
    add_weights,
    parse_instance,
    reorder_universe,
    serialize_instance,
)


def test_parse_digraph_echo():
    doc = json.dumps({"nodes": 3, "arcs": [[0, 1, 1], [1, 2, 1]]})
    parsed = parse_instance(doc)
    assert parsed.kind == "digraph"
    assert parsed.value.node_count == 3
    assert len(parsed.value.arcs) == 2


def test_parse_setfamily_echo():
    doc = json.dumps({
        "universe": ["a", "b", "c", "d", "e", "f"],
        "sets": [{"members": ["a", "b", "c"], "weight": 2},
                 {"members": ["d", "e", "f"], "weight": 5}],
    })
    parsed = parse_instance(doc)
    assert parsed.kind == "setfamily"
    assert parsed.value.set_size == 3
    assert len(parsed.value) == 2


def test_parse_index_out_of_range():
    doc = json.dumps({"nodes": 3, "arcs": [[0, 7, 1]]})
    with pytest.raises(InstanceError, match="index out of range"):
        parse_instance(doc)


def test_parse_malformed():
    with pytest.raises(InstanceError, match="malformed"):
        parse_instance(b"{not json")


def test_roundtrip_fixed_point():
    docs = [
        {"nodes": 4, "arcs": [[1, 0, 3], [0, 1, 2], [2, 3, -5]], "k": 2, "W": 7},
        {"nodes": 3, "edges": [[2, 1], [0, 1]]},
        {"universe": ["x", "y", "z"],
         "sets": [{"members": ["y", "x"], "weight": 1}], "k": 1},
    ]
    for doc in docs:
        once = serialize_instance(parse_instance(json.dumps(doc)))
        twice = serialize_instance(parse_instance(once))
        assert once == twice


def test_weight_overflow_reported():
    with pytest.raises(WeightOverflowError):
        add_weights(2**62, 2**62)
    with pytest.raises(WeightOverflowError):
        parse_instance(json.dumps({"nodes": 2, "arcs": [[0, 1, 2**63]]}))


def test_digraph_invariants():
    with pytest.raises(InstanceError, match="self-loop"):
        Digraph(2, ((1, 1, 0),))
    g = Digraph(2, ((0, 1, 5), (0, 1, 3)))
    assert g.arcs == ((0, 1, 3),)  # parallel arcs collapse to the minimum


def test_graph_invariants():
    with pytest.raises(InstanceError):
        Graph(2, ((0, 2),))
    g = Graph(3, ((1, 0), (0, 1), (2, 0)))
    assert g.edges == ((0, 1), (0, 2))


def test_dedup_policy_max_and_min():
    uni = OrderedUniverse.from_labels("abc")
    sets = (((0, 1), 4), ((1, 0), 9), ((1, 2), 1))
    fam_max = WeightedSetFamily(uni, 2, sets, "max")
    fam_min = WeightedSetFamily(uni, 2, sets, "min")
    assert dict(fam_max.sets)[(0, 1)] == 9
    assert dict(fam_min.sets)[(0, 1)] == 4
    assert len(fam_max) == len(fam_min) == 2


def test_reorder_identity_and_reversal():
    uni = OrderedUniverse.from_labels("abc")
    assert reorder_universe(uni, [0, 1, 2]).rank == uni.rank
    rev = reorder_universe(uni, [2, 1, 0])
    assert rev.rank == (2, 1, 0)


def test_reorder_block_rule():
    # pieces {c, d} then the rest {a, b} -> order c, d, a, b
    uni = OrderedUniverse.from_labels("abcd")
    from fptmix.core import block_permutation

    perm = block_permutation(uni, [(2, 3)])
    out = reorder_universe(uni, perm)
    assert [out.elements[i] for i in out.by_rank()] == ["c", "d", "a", "b"]


def test_reorder_not_permutation():
    uni = OrderedUniverse.from_labels("ab")
    with pytest.raises(InstanceError):
        reorder_universe(uni, [0, 0])


@given(st.permutations(range(6)))
def test_reorder_compose_inverse_is_identity(perm):
    uni = OrderedUniverse.from_labels([f"e{i}" for i in range(6)])
    inverse = [0] * 6
    for i, p in enumerate(perm):
        inverse[p] = i
    back = reorder_universe(reorder_universe(uni, perm), inverse)
    assert back.rank == uni.rank


@given(st.lists(st.tuples(st.sets(st.integers(0, 5), min_size=2, max_size=2),
                          st.integers(-50, 50)), max_size=12))
def test_dedup_keeps_extremal(groups):
    uni = OrderedUniverse.from_labels([f"e{i}" for i in range(6)])
    sets = tuple((tuple(sorted(s)), w) for s, w in groups)
    for objective, pick in (("max", max), ("min", min)):
        fam = WeightedSetFamily(uni, 2, sets, objective)
        stored = dict(fam.sets)
        assert len(stored) == len(fam.sets)  # pairwise distinct members
        for members, weight in stored.items():
            expected = pick(w for m, w in sets if m == members)
            assert weight == expected
