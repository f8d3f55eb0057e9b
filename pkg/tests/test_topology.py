import itertools
import json
import random

import pytest

from butterfly_pairs.connectivity import SubButterflyId
from butterfly_pairs.errors import ConstructionError, NoSuchNeighbourError, PreconditionError
from butterfly_pairs.topology import (
    Butterfly,
    NodeRef,
    PairNetwork,
    Side,
    benes,
    build_pair,
    double_butterfly,
    format_label,
    parse_label,
    sub_butterfly_nodes,
)

from .brute import pair_edges, single_edges


def N(layer, bits):
    return NodeRef(layer, int(bits, 2))


def edge_set(net):
    d = net.d
    return {((u.layer, format_label(u.label, d)), (v.layer, format_label(v.label, d))) for u, v in net.edges()}


def test_smallest_pair_counts():
    net = build_pair(1)
    assert len(list(net.nodes())) == 6
    assert len(list(net.edges())) == 8
    assert net.depth == 2


def test_relabel_preserves_counts():
    plain = double_butterfly(2)
    twisted = build_pair(2, middle_relabel=[3, 2, 1, 0])
    assert len(list(plain.nodes())) == len(list(twisted.nodes()))
    assert len(list(plain.edges())) == len(list(twisted.edges()))
    assert edge_set(plain) != edge_set(twisted)


def test_benes_form():
    net = benes(2)
    assert net.right_perm == (2, 1)
    assert benes(3).right_perm == (3, 2, 1)


@pytest.mark.parametrize(
    "bad",
    [dict(left_perm=(1, 2, 3)), dict(right_perm=(1, 1)), dict(middle_relabel=(0, 1, 2, 2)), dict(middle_relabel=(0, 1))],
)
def test_construction_errors(bad):
    with pytest.raises(ConstructionError):
        build_pair(2, **bad)


def test_dimension_must_be_positive():
    with pytest.raises(ConstructionError):
        build_pair(0)


def test_successor_examples():
    net = double_butterfly(2)
    assert net.successors(N(0, "00")) == {N(1, "00"), N(1, "10")}
    assert net.successors(N(1, "10")) == {N(2, "10"), N(2, "11")}


def test_benes_successor_matches_edge_enumeration():
    # oracle: edge list built from the bit-string definition
    net = benes(2)
    expected = {v for u, v in pair_edges(2, (1, 2), (2, 1)) if u == (2, "01")}
    assert expected == {(3, "00"), (3, "01")}
    assert net.successors(N(2, "01")) == {N(3, "00"), N(3, "01")}


def test_predecessor_example():
    net = double_butterfly(2)
    expected = {u for u, v in pair_edges(2, (1, 2), (1, 2)) if v == (2, "11")}
    assert expected == {(1, "10"), (1, "11")}
    assert net.predecessors(N(2, "11")) == {N(1, "10"), N(1, "11")}


def test_boundary_errors():
    net = double_butterfly(2)
    with pytest.raises(NoSuchNeighbourError):
        net.predecessors(N(0, "01"))
    with pytest.raises(NoSuchNeighbourError):
        net.successors(N(4, "01"))
    with pytest.raises(PreconditionError):
        net.successors(NodeRef(0, 4))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_edges_match_definition_for_every_permutation(d):
    rng = random.Random(d)
    for lp in itertools.permutations(range(1, d + 1)):
        for rp in itertools.permutations(range(1, d + 1)):
            relabel = list(range(2**d))
            rng.shuffle(relabel)
            for rl in (None, relabel):
                net = build_pair(d, lp, rp, rl)
                assert edge_set(net) == set(pair_edges(d, lp, rp, rl))


def test_adjacency_symmetry_exhaustive_d2():
    for rl in itertools.permutations(range(4)):
        net = build_pair(2, (2, 1), (1, 2), rl)
        for v in net.nodes():
            if v.layer < net.depth:
                for u in net.successors(v):
                    assert v in net.predecessors(u)
            if v.layer > 0:
                for u in net.predecessors(v):
                    assert v in net.successors(u)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_degrees_are_two(d):
    rng = random.Random(10 + d)
    lp, rp, rl = list(range(1, d + 1)), list(range(1, d + 1)), list(range(2**d))
    for _ in range(5):
        rng.shuffle(lp)
        rng.shuffle(rp)
        rng.shuffle(rl)
        net = build_pair(d, lp, rp, rl)
        for v in net.nodes():
            if v.layer < net.depth:
                assert len(net.successors(v)) == 2
            if v.layer > 0:
                assert len(net.predecessors(v)) == 2


@pytest.mark.parametrize("d", [1, 2, 3])
def test_maximal_paths_have_2d_plus_1_nodes(d):
    net = build_pair(d, right_perm=tuple(reversed(range(1, d + 1))))
    frontier = [(N(0, "0" * d),)]
    while frontier:
        path = frontier.pop()
        v = path[-1]
        if v.layer == net.depth:
            assert len(path) == 2 * d + 1
            continue
        frontier.extend(path + (u,) for u in net.successors(v))


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_single_butterfly_full_reachability(d):
    b = Butterfly(d, tuple(reversed(range(1, d + 1))))
    for a in range(2**d):
        reach = {NodeRef(0, a)}
        for _ in range(d):
            reach = {u for v in reach for u in b.successors(v)}
        assert reach == {NodeRef(d, y) for y in range(2**d)}


def test_single_butterfly_edges_match_definition():
    for perm in itertools.permutations((1, 2, 3)):
        b = Butterfly(3, perm)
        got = {((u.layer, format_label(u.label, 3)), (v.layer, format_label(v.label, 3))) for u, v in b.edges()}
        assert got == set(single_edges(3, perm))


def test_identity_pair_is_two_concatenated_butterflies():
    d = 3
    left, right = Butterfly.standard(d), Butterfly.standard(d)
    glued = {(u, v) for u, v in left.edges()}
    glued |= {(NodeRef(u.layer + d, u.label), NodeRef(v.layer + d, v.label)) for u, v in right.edges()}
    assert set(double_butterfly(d).edges()) == glued


def test_sub_butterfly_node_examples():
    net = double_butterfly(2)
    sb = SubButterflyId(Side.LEFT, 2, 1, ((1, 0),))
    assert sub_butterfly_nodes(net, sb) == {N(1, "00"), N(1, "01"), N(2, "00"), N(2, "01")}
    whole = SubButterflyId(Side.LEFT, 2, 2, ())
    assert len(sub_butterfly_nodes(net, whole)) == 4 * 3
    single = SubButterflyId(Side.LEFT, 2, 0, ((1, 1), (2, 0)))
    assert sub_butterfly_nodes(net, single) == {N(2, "10")}


def test_sub_butterfly_nodes_follow_relabel():
    net = build_pair(2, middle_relabel=[3, 2, 1, 0])
    sb = SubButterflyId(Side.LEFT, 2, 1, ((1, 0),))
    # left outputs 00, 01 are renamed 11, 10 on the middle layer
    assert {v for v in sub_butterfly_nodes(net, sb) if v.layer == 2} == {N(2, "11"), N(2, "10")}


def test_sub_butterfly_rejects_wrong_positions():
    net = benes(2)
    with pytest.raises(PreconditionError):
        sub_butterfly_nodes(net, SubButterflyId(Side.RIGHT, 2, 1, ((2, 0),)))


def test_descriptor_round_trip():
    net = build_pair(3, (2, 3, 1), (3, 1, 2), [7, 6, 5, 4, 3, 2, 1, 0])
    again = PairNetwork.from_descriptor(json.loads(net.to_json()))
    assert again == net
    assert hash(again) == hash(net)


def test_label_parsing():
    assert parse_label("0110", 4) == 6
    assert parse_label("6", 4, decimal=True) == 6
    assert format_label(6, 4) == "0110"
    for bad in ("011", "0120", "10000"):
        with pytest.raises(PreconditionError):
            parse_label(bad, 4)


def test_dot_export_is_layered():
    dot = build_pair(1).to_dot()
    assert dot.count("rank=same") == 3
    assert dot.count("->") == 8
