"""Node-disjoint routing on pair networks.

All routers share one shape: packets start on ``A`` (moving forward) and on
``B`` (moving backward), are split level by level until each sub-butterfly
holds at most one packet, left and right sub-butterflies are paired, and
each pair is joined through a middle node the two sub-butterflies share.
A sub-butterfly holding a single packet can steer it anywhere inside
itself, so the steering phase cannot collide.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from ..connectivity import connected_components, connectivity_graph, fixed_mask
from ..errors import InternalInvariantError, PreconditionError, UnsupportedNetworkError
from ..topology import NodeRef, PairNetwork, Side, parse_label
from .matching import perfect_matching_regular_bipartite
from .paths import PathSet, check_terminals
from .plan import component_mask, compute_rounding_plan
from .splitting import PacketDistribution, realize_split, split_mask

Decide = Callable[[int, int], int]


def _no_preference(level: int, key: int) -> int:
    return 0


def _split_side(
    net: PairNetwork, side: Side, labels: Iterable[int], levels: int, decide: Decide = _no_preference
) -> tuple[dict[int, list[int]], dict[int, int]]:
    """Split packets for ``levels`` levels.

    Returns each packet's trail (side coordinates, one label per level,
    keyed by origin) and the map from final position to origin.
    """
    trails = {x: [x] for x in labels}
    where = {x: x for x in trails}
    for level in range(levels):
        res = realize_split(net, side, level, where, lambda key, lv=level: decide(lv, key))
        moved = {}
        for cur, origin in where.items():
            nxt = res.moves[cur]
            trails[origin].append(nxt)
            moved[nxt] = origin
        where = moved
    return trails, where


def _steer(net: PairNetwork, side: Side, trail: list[int], target: int) -> None:
    """Extend a trail to the middle layer, copying ``target``'s remaining bits."""
    for level in range(len(trail) - 1, net.d):
        bit = split_mask(net, side, level)
        trail.append((trail[-1] & ~bit) | (target & bit))


def _join(net: PairNetwork, left: list[int], right: list[int], middle: int) -> tuple[NodeRef, ...]:
    d = net.d
    left, right = list(left), list(right)
    _steer(net, Side.LEFT, left, net.relabel_inverse[middle])
    _steer(net, Side.RIGHT, right, middle)
    if net.middle_relabel[left[d]] != middle or right[d] != middle:
        raise InternalInvariantError("trails do not meet at the chosen middle node")
    nodes = [NodeRef(k, left[k]) for k in range(d)]
    nodes.append(NodeRef(d, middle))
    nodes.extend(NodeRef(2 * d - i, right[i]) for i in range(d - 1, -1, -1))
    return tuple(nodes)


@lru_cache(maxsize=256)
def lowest_shared_nodes(net: PairNetwork, level: int) -> dict[tuple[int, int], int]:
    """(left key, right key) -> lowest middle label shared by the level-``level`` sub-butterflies."""
    lmask, rmask = fixed_mask(net, Side.LEFT, level), fixed_mask(net, Side.RIGHT, level)
    inv = net.relabel_inverse
    table: dict[tuple[int, int], int] = {}
    for y in range(net.width):
        table.setdefault((inv[y] & lmask, y & rmask), y)
    return table


def _one_per_sub_butterfly(net: PairNetwork, side: Side, level: int, where: Mapping[int, int]) -> dict[int, int]:
    mask = fixed_mask(net, side, level)
    out = {}
    for pos, origin in where.items():
        if (pos & mask) in out:
            raise InternalInvariantError("two packets left in one sub-butterfly")
        out[pos & mask] = origin
    return out


def _finish(net, ltrails, rtrails, pairs, **info) -> PathSet:
    paths = [_join(net, ltrails[a], rtrails[b], z) for a, b, z in pairs]
    paths.sort(key=lambda p: p[0].label)
    return PathSet(net.d, paths, info)


# -- powers of two -----------------------------------------------------------


@lru_cache(maxsize=256)
def _pow2_pairing(net: PairNetwork, m: int) -> tuple[tuple[int, int, int], ...]:
    g = connectivity_graph(net, net.d - m, enriched=True)
    matching = perfect_matching_regular_bipartite(g)
    shared = lowest_shared_nodes(net, m)
    return tuple(sorted((x.key, y.key, shared[x.key, y.key]) for x, y in matching.items()))


def route_power_of_two(net: PairNetwork, A, B) -> PathSet:
    """Route ``|A| = |B| = 2**m`` packets on any pair network."""
    A, B = check_terminals(net.d, A, B)
    n = len(A)
    m = n.bit_length() - 1
    if n != 1 << m:
        raise PreconditionError(f"|A|={n} is not a power of two")
    ltrails, lwhere = _split_side(net, Side.LEFT, A, m)
    rtrails, rwhere = _split_side(net, Side.RIGHT, B, m)
    left_at = _one_per_sub_butterfly(net, Side.LEFT, m, lwhere)
    right_at = _one_per_sub_butterfly(net, Side.RIGHT, m, rwhere)
    pairs = [(left_at[x], right_at[y], z) for x, y, z in _pow2_pairing(net, m)]
    return _finish(net, ltrails, rtrails, pairs, mode="pow2", levels=m)


# -- arbitrary sizes on layer-permuted pairs ---------------------------------


def route_general(net: PairNetwork, A, B) -> PathSet:
    """Route any ``|A| = |B|`` on a pair of layer-permuted butterflies."""
    if not net.is_layer_permuted:
        raise UnsupportedNetworkError("general routing needs an identity middle relabel")
    A, B = check_terminals(net.d, A, B)
    plan = compute_rounding_plan(net, len(A))
    depth = plan.depth
    trails = {}
    wheres = {}
    for side, terminals in ((Side.LEFT, A), (Side.RIGHT, B)):
        trail, where = _split_side(
            net, side, terminals, depth, lambda lv, key, s=side: plan.decision(s, lv, key)
        )
        for level in range(depth + 1):
            got = PacketDistribution.from_labels(net, side, level, (t[level] for t in trail.values()))
            if got.counts != plan.counts[side][level]:
                raise InternalInvariantError(f"{side.value} split deviates from the plan at level {level}")
        trails[side], wheres[side] = trail, where

    smask = component_mask(net, depth)
    lmask, rmask = fixed_mask(net, Side.LEFT, depth), fixed_mask(net, Side.RIGHT, depth)
    by_comp: dict[int, tuple[list, list]] = defaultdict(lambda: ([], []))
    for pos, origin in wheres[Side.LEFT].items():
        by_comp[pos & smask][0].append((pos & lmask, origin))
    for pos, origin in wheres[Side.RIGHT].items():
        by_comp[pos & smask][1].append((pos & rmask, origin))
    pairs = []
    for comp in sorted(by_comp):
        ls, rs = by_comp[comp]
        if len(ls) != len(rs):
            raise InternalInvariantError(f"component {comp} unbalanced: {len(ls)} vs {len(rs)}")
        for (lk, a), (rk, b) in zip(sorted(ls), sorted(rs)):
            pairs.append((a, b, lk | rk))
    return _finish(net, trails[Side.LEFT], trails[Side.RIGHT], pairs, mode="general", levels=depth, plan=plan)


# -- small permutations -------------------------------------------------------


def middle_is_complete(net: PairNetwork) -> bool:
    """Every left sub-butterfly of level floor(d/2) meets every right one."""
    q = net.d - net.d // 2
    g = connectivity_graph(net, q)
    comps = connected_components(g)
    return len(comps) == 1 and len(g.multiplicity) == len(g.left) * len(g.right)


def route_mini_rearrangeable(net: PairNetwork, A, B, assignment: Mapping) -> PathSet:
    """Route a bijection ``A -> B`` with ``|A| <= 2**floor(d/2)``."""
    A, B = check_terminals(net.d, A, B)
    rho = {_lab(net, a): _lab(net, b) for a, b in assignment.items()}
    if sorted(rho) != A or sorted(rho.values()) != B:
        raise PreconditionError("assignment is not a bijection from A onto B")
    h = net.d // 2
    if len(A) > 1 << h:
        raise PreconditionError(f"|A|={len(A)} exceeds 2**{h}")
    if not middle_is_complete(net):
        raise UnsupportedNetworkError("middle layers are not completely connected")

    pad = (1 << h) - len(A)
    dummy_a = [x for x in range(net.width) if x not in rho][:pad]
    used_b = set(B)
    dummy_b = [y for y in range(net.width) if y not in used_b][:pad]
    full = dict(rho)
    full.update(zip(dummy_a, dummy_b))

    ltrails, lwhere = _split_side(net, Side.LEFT, full.keys(), h)
    rtrails, rwhere = _split_side(net, Side.RIGHT, full.values(), h)
    _one_per_sub_butterfly(net, Side.LEFT, h, lwhere)
    _one_per_sub_butterfly(net, Side.RIGHT, h, rwhere)
    lmask, rmask = fixed_mask(net, Side.LEFT, h), fixed_mask(net, Side.RIGHT, h)
    shared = lowest_shared_nodes(net, h)
    pairs = [
        (a, rho[a], shared[ltrails[a][-1] & lmask, rtrails[rho[a]][-1] & rmask]) for a in sorted(rho)
    ]
    return _finish(net, ltrails, rtrails, pairs, mode="mini", levels=h, dummies=pad)


def _lab(net: PairNetwork, x) -> int:
    return parse_label(x, net.d) if isinstance(x, str) else parse_label(int(x), net.d)


# -- switch settings and complements ------------------------------------------


@dataclass
class SwitchSetting:
    """State of every 2x2 switch.

    A switch is keyed by ``(edge layer, label with the toggled bit cleared)``
    in the coordinates of the layer it leaves. Switches absent from
    ``crossed`` are straight.
    """

    net: PairNetwork
    crossed: dict[tuple[int, int], bool]

    def is_crossed(self, layer: int, label: int) -> bool:
        return self.crossed.get((layer, label & ~self.net.masks[layer]), False)

    def forward(self, layer: int, label: int) -> int:
        nxt = label ^ self.net.masks[layer] if self.is_crossed(layer, label) else label
        return self.net.middle_relabel[nxt] if layer == self.net.d - 1 else nxt

    def states(self) -> dict[tuple[int, int], bool]:
        """Every switch of the network with its state."""
        out = {}
        for layer, m in enumerate(self.net.masks):
            for x in range(self.net.width):
                if not x & m:
                    out[layer, x] = self.crossed.get((layer, x), False)
        return out

    def induced_paths(self) -> dict[int, tuple[NodeRef, ...]]:
        paths = {}
        for start in range(self.net.width):
            x, nodes = start, [NodeRef(0, start)]
            for layer in range(self.net.depth):
                x = self.forward(layer, x)
                nodes.append(NodeRef(layer + 1, x))
            paths[start] = tuple(nodes)
        return paths


def extend_to_full_switch_setting(net: PairNetwork, p: PathSet) -> SwitchSetting:
    """Switch states realising ``p``; untouched switches stay straight."""
    crossed: dict[tuple[int, int], bool] = {}
    inv, d = net.relabel_inverse, net.d
    for path in p.paths:
        if len(path) != net.depth + 1:
            raise PreconditionError("path does not span the network")
        for i in range(net.depth):
            u, v = path[i], path[i + 1]
            if u.layer != i or v.layer != i + 1:
                raise PreconditionError(f"path leaves the layer order at layer {i}")
            m = net.masks[i]
            y = inv[v.label] if i == d - 1 else v.label
            diff = u.label ^ y
            if diff not in (0, m):
                raise PreconditionError(f"{u} -> {v} is not an edge")
            key = (i, u.label & ~m)
            state = diff != 0
            if crossed.setdefault(key, state) != state:
                raise PreconditionError(f"paths need switch {key} both straight and crossed")
    return SwitchSetting(net, crossed)


def route_complement(net: PairNetwork, A, B, p: PathSet) -> PathSet:
    """Paths from the complement of ``A`` to the complement of ``B``."""
    from ..oracle import validate_path_set

    A, B = check_terminals(net.d, A, B, allow_empty=True)
    report = validate_path_set(net, A, B, p)
    if not report.valid:
        raise PreconditionError(f"path set is not valid for (A, B): {report.violations[:3]}")
    setting = extend_to_full_switch_setting(net, p)
    induced = setting.induced_paths()
    in_a, in_b = set(A), set(B)
    paths = [induced[x] for x in range(net.width) if x not in in_a]
    if any(path[-1].label in in_b for path in paths):
        raise InternalInvariantError("induced path from the complement ends in B")
    return PathSet(net.d, paths, {"mode": "complement", "switches": len(setting.crossed)})


# -- dispatch -----------------------------------------------------------------

MODES = ("auto", "pow2", "general", "mini", "complement")


def _complement_pow2(net: PairNetwork, A, B) -> PathSet:
    A, B = check_terminals(net.d, A, B)
    ac = [x for x in range(net.width) if x not in set(A)]
    bc = [y for y in range(net.width) if y not in set(B)]
    k = len(ac)
    if k == 0 or k & (k - 1):
        raise PreconditionError(f"|A^c|={k} is not a power of two")
    inner = route_power_of_two(net, ac, bc)
    out = route_complement(net, ac, bc, inner)
    out.info["mode"] = "complement"
    return out


def route(net: PairNetwork, A, B, mode: str = "auto", assignment: Mapping | None = None) -> PathSet:
    """Dispatch to the router that applies to ``(net, |A|, mode)``."""
    if mode not in MODES:
        raise PreconditionError(f"unknown mode {mode!r}")
    if assignment is not None and mode in ("auto", "mini"):
        return route_mini_rearrangeable(net, A, B, assignment)
    if mode == "mini":
        raise PreconditionError("mini mode needs an assignment")
    if mode == "pow2":
        return route_power_of_two(net, A, B)
    if mode == "general":
        return route_general(net, A, B)
    if mode == "complement":
        return _complement_pow2(net, A, B)
    if net.is_layer_permuted:
        return route_general(net, A, B)
    n = len(list(A))
    if n and not n & (n - 1):
        return route_power_of_two(net, A, B)
    rest = net.width - n
    if rest and not rest & (rest - 1):
        return _complement_pow2(net, A, B)
    raise UnsupportedNetworkError(
        f"no constructive router for |A|={n} on a pair with a non-identity middle relabel"
    )
