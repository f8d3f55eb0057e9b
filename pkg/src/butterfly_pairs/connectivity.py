"""Sub-butterfly connectivity graphs of a pair network.

A left sub-butterfly of dimension ``q`` fixes the ``m = d - q`` bits consumed
by edge layers ``0..m-1`` and lives on layers ``m..d``; a right one fixes the
bits consumed by layers ``2d-m..2d-1`` and lives on layers ``d..2d-m``. The
connectivity graph joins a left and a right sub-butterfly when they share a
node on layer ``d``; the enriched graph counts the shared nodes.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Union

from .errors import PreconditionError, StructureError, UnsupportedNetworkError
from .topology import PairNetwork, Side, bitmask, format_label


def left_fixed_mask(net: PairNetwork, level: int) -> int:
    """Bits fixed by a left sub-butterfly ``level`` edge layers from the input."""
    mask = 0
    for m in net.masks[:level]:
        mask |= m
    return mask


def right_fixed_mask(net: PairNetwork, level: int) -> int:
    mask = 0
    for m in net.masks[2 * net.d - level :]:
        mask |= m
    return mask


def fixed_mask(net: PairNetwork, side: Side, level: int) -> int:
    return left_fixed_mask(net, level) if side is Side.LEFT else right_fixed_mask(net, level)


def fixed_positions(net: PairNetwork, side: Side, q: int) -> tuple[int, ...]:
    m = net.d - q
    if side is Side.LEFT:
        return tuple(sorted(net.left_perm[:m]))
    return tuple(sorted(net.right_perm[q:]))


@dataclass(frozen=True, order=True)
class SubButterflyId:
    """A ``q``-dimensional sub-butterfly: side plus its fixed bit values.

    ``fixed`` is a tuple of ``(position, value)`` pairs sorted by position.
    Labels are read in the side's own coordinates (left labels on the left).
    """

    side: Side
    d: int
    q: int
    fixed: tuple[tuple[int, int], ...]

    @property
    def level(self) -> int:
        return self.d - self.q

    @property
    def mask(self) -> int:
        return sum(bitmask(self.d, p) for p, _ in self.fixed)

    @property
    def key(self) -> int:
        return sum(bitmask(self.d, p) for p, v in self.fixed if v)

    @property
    def pattern(self) -> str:
        chars = ["*"] * self.d
        for p, v in self.fixed:
            chars[p - 1] = str(v)
        return "".join(chars)

    def __str__(self) -> str:
        return f"{self.side.value[0].upper()}[{self.pattern}]"

    @classmethod
    def of(cls, net: PairNetwork, side: Side, q: int, label: int) -> "SubButterflyId":
        """The ``q``-dimensional sub-butterfly on ``side`` containing ``label``."""
        if not 0 <= q <= net.d:
            raise PreconditionError(f"q={q} outside 0..{net.d}")
        d = net.d
        fixed = tuple((p, (label >> (d - p)) & 1) for p in fixed_positions(net, side, q))
        return cls(side, d, q, fixed)

    def validate(self, net: PairNetwork) -> None:
        if self.d != net.d or not 0 <= self.q <= net.d:
            raise PreconditionError(f"{self} does not fit a d={net.d} network")
        positions = tuple(p for p, _ in self.fixed)
        if positions != fixed_positions(net, self.side, self.q):
            raise PreconditionError(f"{self} fixes the wrong bit positions for this network")
        if any(v not in (0, 1) for _, v in self.fixed):
            raise PreconditionError(f"{self} has a non-binary fixed value")

    def children(self, net: PairNetwork) -> tuple["SubButterflyId", "SubButterflyId"]:
        """The two ``(q-1)``-dimensional halves, new bit 0 first."""
        if self.q == 0:
            raise PreconditionError("a 0-dimensional sub-butterfly does not split")
        m = self.level
        pos = net.left_perm[m] if self.side is Side.LEFT else net.right_perm[self.q - 1]
        return tuple(  # type: ignore[return-value]
            SubButterflyId(self.side, self.d, self.q - 1, tuple(sorted(self.fixed + ((pos, v),))))
            for v in (0, 1)
        )


def all_sub_butterflies(net: PairNetwork, side: Side, q: int) -> list[SubButterflyId]:
    positions = fixed_positions(net, side, q)
    out = []
    for bits in range(1 << len(positions)):
        values = [(bits >> (len(positions) - 1 - i)) & 1 for i in range(len(positions))]
        out.append(SubButterflyId(side, net.d, q, tuple(zip(positions, values))))
    return out


@dataclass
class ConnectivityGraph:
    d: int
    q: int
    enriched: bool
    left: list[SubButterflyId]
    right: list[SubButterflyId]
    multiplicity: dict[tuple[SubButterflyId, SubButterflyId], int]

    def neighbours(self, v: SubButterflyId) -> list[SubButterflyId]:
        if v.side is Side.LEFT:
            return sorted(y for (x, y) in self.multiplicity if x == v)
        return sorted(x for (x, y) in self.multiplicity if y == v)

    def degree(self, v: SubButterflyId) -> int:
        if v.side is Side.LEFT:
            return sum(c for (x, _), c in self.multiplicity.items() if x == v)
        return sum(c for (_, y), c in self.multiplicity.items() if y == v)

    def degrees(self) -> dict[SubButterflyId, int]:
        deg: dict[SubButterflyId, int] = {v: 0 for v in self.left + self.right}
        for (x, y), c in self.multiplicity.items():
            deg[x] += c
            deg[y] += c
        return deg

    def adjacency(self) -> dict[SubButterflyId, list[SubButterflyId]]:
        adj: dict[SubButterflyId, list[SubButterflyId]] = {x: [] for x in self.left}
        for x, y in sorted(self.multiplicity):
            adj[x].append(y)
        return adj

    def to_dot(self, name: str = "connectivity") -> str:
        lines = [f"graph {name} {{", "  rankdir=LR;", "  node [shape=box, fontsize=9];"]
        for side, verts in (("L", self.left), ("R", self.right)):
            members = " ".join(f'"{v}";' for v in verts)
            lines.append(f"  {{ rank=same; {members} }}  // {side}")
        for (x, y) in sorted(self.multiplicity):
            c = self.multiplicity[x, y]
            label = f' [label="{c}"]' if self.enriched else ""
            lines.append(f'  "{x}" -- "{y}"{label};')
        lines.append("}")
        return "\n".join(lines) + "\n"


def connectivity_graph(net: PairNetwork, q: int, enriched: bool = False) -> ConnectivityGraph:
    """Connectivity graph of the ``q``-dimensional sub-butterflies.

    Multiplicities always come from counting shared layer-``d`` nodes through
    the middle relabelling. The plain graph keeps multiplicity 1 per edge.
    """
    if not isinstance(q, int) or not 0 <= q <= net.d:
        raise PreconditionError(f"q={q} outside 0..{net.d}")
    m = net.d - q
    lmask, rmask = left_fixed_mask(net, m), right_fixed_mask(net, m)
    left = all_sub_butterflies(net, Side.LEFT, q)
    right = all_sub_butterflies(net, Side.RIGHT, q)
    lby = {v.key: v for v in left}
    rby = {v.key: v for v in right}
    counts: dict[tuple[SubButterflyId, SubButterflyId], int] = defaultdict(int)
    inv = net.relabel_inverse
    for y in range(net.width):
        counts[lby[inv[y] & lmask], rby[y & rmask]] += 1
    if not enriched:
        counts = {k: 1 for k in counts}
    return ConnectivityGraph(net.d, q, enriched, left, right, dict(counts))


def predicate_adjacent(x: SubButterflyId, y: SubButterflyId) -> bool:
    """Adjacency test for layer-permuted pairs: fixed bits agree where both fix."""
    yv = dict(y.fixed)
    return all(yv.get(p, v) == v for p, v in x.fixed)


@dataclass(frozen=True, order=True)
class Component:
    left: tuple[SubButterflyId, ...]
    right: tuple[SubButterflyId, ...]
    key: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    @property
    def size(self) -> tuple[int, int]:
        return len(self.left), len(self.right)


def connected_components(g: ConnectivityGraph, require_complete: bool = False) -> list[Component]:
    """Split the connectivity graph into components, sorted deterministically.

    With ``require_complete`` every component must be complete bipartite with
    equal sides; a violation raises :class:`StructureError`.
    """
    parent: dict[SubButterflyId, SubButterflyId] = {v: v for v in g.left + g.right}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for x, y in g.multiplicity:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    groups: dict[SubButterflyId, tuple[list, list]] = defaultdict(lambda: ([], []))
    for v in g.left:
        groups[find(v)][0].append(v)
    for v in g.right:
        groups[find(v)][1].append(v)
    comps = []
    for ls, rs in groups.values():
        ls.sort()
        rs.sort()
        comps.append(Component(tuple(ls), tuple(rs), _shared_key(ls, rs)))
    comps.sort()
    if require_complete:
        for c in comps:
            if not is_complete_bipartite(g, c):
                raise StructureError(f"component {c.size} is not complete bipartite with equal sides")
    return comps


def _shared_key(ls, rs) -> tuple[tuple[int, int], ...]:
    if not ls or not rs:
        return ()
    lp, rp = dict(ls[0].fixed), dict(rs[0].fixed)
    return tuple((p, lp[p]) for p in sorted(lp.keys() & rp.keys()) if lp[p] == rp[p])


def is_complete_bipartite(g: ConnectivityGraph, c: Component) -> bool:
    if len(c.left) != len(c.right):
        return False
    return all((x, y) in g.multiplicity for x in c.left for y in c.right)


def components_json(comps: list[Component]) -> str:
    return json.dumps(
        [
            {
                "key": {str(p): v for p, v in c.key},
                "left": [x.pattern for x in c.left],
                "right": [y.pattern for y in c.right],
            }
            for c in comps
        ],
        indent=2,
    )


def components_dot(g: ConnectivityGraph, comps: list[Component], name: str = "components") -> str:
    lines = [f"graph {name} {{", "  rankdir=LR;", "  node [shape=box, fontsize=9];"]
    for i, c in enumerate(comps):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f'    label="component {i}";')
        for v in c.left + c.right:
            lines.append(f'    "{v}";')
        for x in c.left:
            for y in c.right:
                if (x, y) in g.multiplicity:
                    lines.append(f'    "{x}" -- "{y}";')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- refinement from q to q - 1 ---------------------------------------------


@dataclass(frozen=True)
class NoReuse:
    n_children = 1


@dataclass(frozen=True)
class OneReuse:
    """Components split by the value of ``bit``.

    ``left_splits``/``right_splits`` say on which side the newly fixed bit is
    ``bit`` itself, i.e. where a sub-butterfly's two halves fall into
    different child components. The other side already fixed ``bit``.
    """

    bit: int
    left_splits: bool = True
    right_splits: bool = True
    n_children = 2


@dataclass(frozen=True)
class TwoReuse:
    """Components split four ways by ``bit`` (left's new bit) and ``other`` (right's)."""

    bit: int
    other: int
    n_children = 4

    def __post_init__(self) -> None:
        if self.bit == self.other:
            raise ValueError("TwoReuse needs two distinct bits")


RefinementCase = Union[NoReuse, OneReuse, TwoReuse]


def _require_layer_permuted(net: PairNetwork) -> None:
    if not net.is_layer_permuted:
        raise UnsupportedNetworkError("component structure needs an identity middle relabel")


def classify_refinement(net: PairNetwork, q: int) -> RefinementCase:
    """How the components change when passing from dimension ``q`` to ``q - 1``.

    The left side newly fixes ``left_perm`` position ``m + 1`` and the right
    side ``right_perm`` position ``q``; a new bit is reused when the other
    side fixes it too (already, or as its own new bit).
    """
    if not isinstance(q, int) or not 1 <= q <= net.d:
        raise PreconditionError(f"refinement needs 1 <= q <= d, got q={q}")
    _require_layer_permuted(net)
    m = net.d - q
    new_left = net.left_perm[m]
    new_right = net.right_perm[q - 1]
    if new_left == new_right:
        return OneReuse(new_left, True, True)
    left_reused = new_left in net.right_perm[q:]
    right_reused = new_right in net.left_perm[:m]
    if left_reused and right_reused:
        return TwoReuse(new_left, new_right)
    if left_reused:
        return OneReuse(new_left, True, False)
    if right_reused:
        return OneReuse(new_right, False, True)
    return NoReuse()


def refinement_map(net: PairNetwork, q: int) -> dict[Component, list[Component]]:
    """Map each ``q``-dimensional component to the ``(q-1)``-dimensional ones inside it."""
    case = classify_refinement(net, q)
    parents = connected_components(connectivity_graph(net, q), require_complete=True)
    kids = connected_components(connectivity_graph(net, q - 1), require_complete=True)
    owner: dict[SubButterflyId, Component] = {}
    for c in parents:
        for v in c.left + c.right:
            for child in v.children(net):
                owner[child] = c
    out: dict[Component, list[Component]] = {c: [] for c in parents}
    for k in kids:
        homes = {owner[v] for v in k.left + k.right}
        if len(homes) != 1:
            raise StructureError("child component straddles two parents")
        out[homes.pop()].append(k)
    for c, children in out.items():
        if len(children) != case.n_children:
            raise StructureError(f"{case} predicts {case.n_children} children, found {len(children)}")
        covered = sorted(v for k in children for v in k.left + k.right)
        expected = sorted(ch for v in c.left + c.right for ch in v.children(net))
        if covered != expected:
            raise StructureError("children do not partition the parent's halves")
    return out
