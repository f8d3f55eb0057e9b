import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from butterfly_pairs.errors import PreconditionError, UnsupportedNetworkError
from butterfly_pairs.oracle import max_vertex_disjoint, validate_path_set
from butterfly_pairs.routing import (
    PathSet,
    extend_to_full_switch_setting,
    middle_is_complete,
    route,
    route_complement,
    route_general,
    route_mini_rearrangeable,
    route_power_of_two,
)
from butterfly_pairs.topology import NodeRef, benes, build_pair, double_butterfly

from .brute import brute_assignment_routable, brute_max_disjoint, brute_valid, cached_pair_adj


def ok(net, A, B, paths):
    rl = None if net.is_layer_permuted else list(net.middle_relabel)
    return brute_valid(net.d, net.left_perm, net.right_perm, rl, A, B, paths.paths)


def nets(d):
    return st.tuples(
        st.permutations(range(1, d + 1)), st.permutations(range(1, d + 1)), st.permutations(range(2**d))
    ).map(lambda t: build_pair(d, *t))


def terminal_sets(d, sizes):
    return st.sampled_from(sizes).flatmap(
        lambda k: st.tuples(
            st.lists(st.integers(0, 2**d - 1), min_size=k, max_size=k, unique=True),
            st.lists(st.integers(0, 2**d - 1), min_size=k, max_size=k, unique=True),
        )
    )


# -- powers of two -------------------------------------------------------------


def test_full_routing():
    for d in (1, 2, 3):
        net = build_pair(d, middle_relabel=list(reversed(range(2**d))))
        everything = list(range(2**d))
        assert ok(net, everything, everything, route_power_of_two(net, everything, everything))


def test_d2_two_packets_example():
    net = double_butterfly(2)
    A, B = [0b00, 0b01], [0b10, 0b11]
    adj = cached_pair_adj(2, (1, 2), (1, 2))
    assert brute_max_disjoint(adj, ["00", "01"], ["10", "11"], 4) == 2
    assert ok(net, A, B, route_power_of_two(net, A, B))


def test_single_packet_any_relabel():
    rng = random.Random(1)
    for _ in range(30):
        rl = list(range(8))
        rng.shuffle(rl)
        net = build_pair(3, (2, 1, 3), (3, 2, 1), rl)
        a, b = rng.randrange(8), rng.randrange(8)
        paths = route_power_of_two(net, [a], [b])
        assert len(paths) == 1 and ok(net, [a], [b], paths)


def test_power_of_two_rejects_other_sizes():
    with pytest.raises(PreconditionError):
        route_power_of_two(double_butterfly(2), [0, 1, 2], [0, 1, 2])
    with pytest.raises(PreconditionError):
        route_power_of_two(double_butterfly(2), [0, 1], [0])


@settings(deadline=None, max_examples=120)
@given(st.integers(1, 5).flatmap(lambda d: st.tuples(nets(d), terminal_sets(d, [2**m for m in range(d + 1)]))))
def test_power_of_two_on_random_pairs(args):
    net, (A, B) = args
    paths = route_power_of_two(net, A, B)
    assert ok(net, A, B, paths)


# -- general sizes -------------------------------------------------------------


def test_benes_d3_five_packets():
    net = benes(3)
    rng = random.Random(3)
    for _ in range(20):
        A, B = rng.sample(range(8), 5), rng.sample(range(8), 5)
        assert max_vertex_disjoint(net, A, B).max_disjoint == 5
        assert ok(net, A, B, route_general(net, A, B))


def test_general_full_size():
    net = build_pair(3, (3, 1, 2), (1, 3, 2))
    assert ok(net, range(8), range(8), route_general(net, range(8), range(8)))


def test_general_exhaustive_d2_every_pair():
    for lp in itertools.permutations((1, 2)):
        for rp in itertools.permutations((1, 2)):
            net = build_pair(2, lp, rp)
            for k in range(1, 5):
                for A in itertools.combinations(range(4), k):
                    for B in itertools.combinations(range(4), k):
                        assert ok(net, A, B, route_general(net, A, B))


def test_general_rejects_relabel_and_size_mismatch():
    with pytest.raises(UnsupportedNetworkError):
        route_general(build_pair(2, middle_relabel=[1, 0, 2, 3]), [0], [0])
    with pytest.raises(PreconditionError):
        route_general(double_butterfly(2), [0, 1], [0])
    with pytest.raises(PreconditionError):
        route_general(double_butterfly(2), [0, 0], [0, 1])


@settings(deadline=None, max_examples=150)
@given(st.integers(1, 6).flatmap(lambda d: st.tuples(
    st.permutations(range(1, d + 1)).flatmap(
        lambda lp: st.permutations(range(1, d + 1)).map(lambda rp: build_pair(d, lp, rp))),
    terminal_sets(d, list(range(1, 2**d + 1))))))
def test_general_on_random_layer_permuted_pairs(args):
    net, (A, B) = args
    assert ok(net, A, B, route_general(net, A, B))


# -- switch settings and complements ------------------------------------------


def test_switch_extension_d2():
    net = double_butterfly(2)
    p = route_general(net, [0, 1], [0, 1])
    setting = extend_to_full_switch_setting(net, p)
    induced = setting.induced_paths()
    assert {induced[a][-1].label for a in (0, 1)} == {0, 1}
    assert sorted(path[-1].label for path in induced.values()) == [0, 1, 2, 3]
    assert len(setting.states()) == 4 * 2


def test_empty_path_set_goes_straight():
    net = double_butterfly(2)
    setting = extend_to_full_switch_setting(net, PathSet(2, []))
    assert not any(setting.states().values())
    assert all(p[-1].label == a for a, p in setting.induced_paths().items())


def test_conflicting_paths_rejected():
    net = double_butterfly(1)
    p = PathSet(1, [(NodeRef(0, 0), NodeRef(1, 0), NodeRef(2, 0)), (NodeRef(0, 1), NodeRef(1, 0), NodeRef(2, 1))])
    with pytest.raises(PreconditionError):
        extend_to_full_switch_setting(net, p)


def test_complement_of_full_is_empty():
    net = double_butterfly(2)
    everything = list(range(4))
    out = route_complement(net, everything, everything, route_general(net, everything, everything))
    assert len(out) == 0


def test_complement_of_single_packet():
    net = benes(2)
    for a, b in itertools.product(range(4), repeat=2):
        out = route_complement(net, [a], [b], route_general(net, [a], [b]))
        rest_a = [x for x in range(4) if x != a]
        rest_b = [y for y in range(4) if y != b]
        assert len(out) == 3 and ok(net, rest_a, rest_b, out)
        assert max_vertex_disjoint(net, rest_a, rest_b).max_disjoint == 3


def test_complement_rejects_invalid_input():
    net = double_butterfly(1)
    with pytest.raises(PreconditionError):
        route_complement(net, [0], [0], PathSet(1, []))


@settings(deadline=None, max_examples=100)
@given(st.integers(1, 4).flatmap(lambda d: st.tuples(nets(d), terminal_sets(d, list(range(1, 2**d + 1))))))
def test_complement_sizes(args):
    net, (A, B) = args
    k = len(A)
    if net.is_layer_permuted:
        p = route_general(net, A, B)
    elif k & (k - 1) == 0:
        p = route_power_of_two(net, A, B)
    else:
        return
    ac = [x for x in range(net.width) if x not in A]
    bc = [y for y in range(net.width) if y not in B]
    assert ok(net, ac, bc, route_complement(net, A, B, p))


def test_complement_mode_handles_large_sizes():
    rng = random.Random(9)
    for d in (2, 3, 4):
        for m in range(d):
            rl = list(range(2**d))
            rng.shuffle(rl)
            net = build_pair(d, middle_relabel=rl)
            k = 2**d - 2**m
            A, B = rng.sample(range(2**d), k), rng.sample(range(2**d), k)
            paths = route(net, A, B, mode="complement")
            assert ok(net, A, B, paths)


# -- mini-rearrangeability ------------------------------------------------------


def test_double_butterflies_have_complete_middles():
    assert all(middle_is_complete(double_butterfly(d)) for d in range(1, 7))
    assert not middle_is_complete(benes(2))


def test_mini_d2_both_assignments():
    net = double_butterfly(2)
    adj = cached_pair_adj(2, (1, 2), (1, 2))
    for rho in ({0b00: 0b01, 0b11: 0b10}, {0b00: 0b10, 0b11: 0b01}):
        named = {format(a, "02b"): format(b, "02b") for a, b in rho.items()}
        assert brute_assignment_routable(adj, named, 4)
        paths = route_mini_rearrangeable(net, list(rho), list(rho.values()), rho)
        assert paths.endpoint_map() == rho and ok(net, list(rho), list(rho.values()), paths)


def test_mini_single_packet():
    net = double_butterfly(3)
    for a, b in itertools.product(range(8), repeat=2):
        assert route_mini_rearrangeable(net, [a], [b], {a: b}).endpoint_map() == {a: b}


def test_mini_rejections():
    net = double_butterfly(2)
    with pytest.raises(PreconditionError):
        route_mini_rearrangeable(net, [0, 1, 2], [0, 1, 2], {0: 0, 1: 1, 2: 2})
    with pytest.raises(PreconditionError):
        route_mini_rearrangeable(net, [0, 1], [0, 1], {0: 0, 1: 0})
    with pytest.raises(UnsupportedNetworkError):
        route_mini_rearrangeable(benes(2), [0, 1], [0, 1], {0: 1, 1: 0})


def test_mini_exhaustive_d2():
    net = double_butterfly(2)
    for A in itertools.combinations(range(4), 2):
        for B in itertools.combinations(range(4), 2):
            for image in itertools.permutations(B):
                rho = dict(zip(A, image))
                paths = route_mini_rearrangeable(net, A, B, rho)
                assert paths.endpoint_map() == rho and ok(net, A, B, paths)


@settings(deadline=None, max_examples=100)
@given(st.integers(2, 6).flatmap(lambda d: st.tuples(
    st.just(d), terminal_sets(d, list(range(1, 2 ** (d // 2) + 1))), st.randoms(use_true_random=False))))
def test_mini_random(args):
    d, (A, B), rnd = args
    net = double_butterfly(d)
    image = list(B)
    rnd.shuffle(image)
    rho = dict(zip(A, image))
    paths = route_mini_rearrangeable(net, A, B, rho)
    assert paths.endpoint_map() == rho and ok(net, A, B, paths)


# -- dispatch --------------------------------------------------------------------


def test_auto_dispatch():
    assert route(benes(3), [0, 1, 2], [3, 4, 5]).info["mode"] == "general"
    twisted = build_pair(3, middle_relabel=[7, 6, 5, 4, 3, 2, 1, 0])
    assert route(twisted, [0, 1], [2, 3]).info["mode"] == "pow2"
    assert route(twisted, range(6), range(6)).info["mode"] == "complement"
    assert route(double_butterfly(2), [0], [3], assignment={0: 3}).info["mode"] == "mini"
    with pytest.raises(UnsupportedNetworkError):
        route(twisted, [0, 1, 2], [0, 1, 2])
    with pytest.raises(PreconditionError):
        route(twisted, [0], [0], mode="bogus")
    with pytest.raises(PreconditionError):
        route(twisted, [0], [0], mode="mini")


def test_router_output_passes_library_validator():
    net = benes(4)
    rng = random.Random(4)
    for k in range(1, 17):
        A, B = rng.sample(range(16), k), rng.sample(range(16), k)
        assert validate_path_set(net, A, B, route(net, A, B)).valid
