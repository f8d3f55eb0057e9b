"""Standard, layer-permuted and concatenated butterfly networks.

Node labels are integers in ``range(2**d)``. Bit position ``p`` (1-based)
is the ``p``-th character of the big-endian bit-string, so position 1 is the
most significant bit: ``bit(label, p) == (label >> (d - p)) & 1``.

Edges leaving layer ``i`` of a butterfly with layer permutation ``perm``
toggle bit ``perm[i]`` (``perm`` stored as a 0-indexed tuple of 1-based bit
positions). In a pair network the left butterfly occupies layers ``0..d``,
the right one ``d..2d``. The middle relabelling renames each left output
label ``x`` to ``middle_relabel[x]`` before it is identified with a right
input, so labels on layer ``d`` are right-butterfly labels.

Adjacency is computed on demand; nothing is stored per node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import ConstructionError, NoSuchNeighbourError, PreconditionError


class NodeRef(NamedTuple):
    layer: int
    label: int


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


def bitmask(d: int, position: int) -> int:
    """Mask selecting 1-based bit ``position`` of a ``d``-bit label."""
    return 1 << (d - position)


def label_bit(label: int, d: int, position: int) -> int:
    return (label >> (d - position)) & 1


def format_label(label: int, d: int) -> str:
    return format(label, f"0{d}b") if d else ""


def parse_label(text: str | int, d: int, *, decimal: bool = False) -> int:
    """Parse a bit-string label (or a decimal one when ``decimal`` is set)."""
    if isinstance(text, int):
        value = text
    else:
        text = text.strip()
        try:
            if decimal:
                value = int(text, 10)
            else:
                if len(text) != d or set(text) - {"0", "1"}:
                    raise ValueError
                value = int(text, 2)
        except ValueError:
            raise PreconditionError(f"bad label {text!r} for d={d}") from None
    if not 0 <= value < (1 << d):
        raise PreconditionError(f"label {value} out of range for d={d}")
    return value


def node_to_json(node: NodeRef, d: int) -> dict:
    return {"layer": node.layer, "label": format_label(node.label, d)}


def node_from_json(obj: dict, d: int) -> NodeRef:
    return NodeRef(int(obj["layer"]), parse_label(obj["label"], d))


def _check_perm(perm: Sequence[int], d: int, what: str) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if len(perm) != d:
        raise ConstructionError(f"{what} has length {len(perm)}, expected {d}")
    if sorted(perm) != list(range(1, d + 1)):
        raise ConstructionError(f"{what} {perm} is not a permutation of 1..{d}")
    return perm


def _check_relabel(relabel: Sequence[int], d: int) -> tuple[int, ...]:
    relabel = tuple(int(x) for x in relabel)
    if sorted(relabel) != list(range(1 << d)):
        raise ConstructionError(f"middle relabel is not a bijection on {1 << d} labels")
    return relabel


def identity_perm(d: int) -> tuple[int, ...]:
    return tuple(range(1, d + 1))


def reversal_perm(d: int) -> tuple[int, ...]:
    return tuple(range(d, 0, -1))


class _Layered:
    """Shared queries for layered butterfly-like networks.

    Subclasses provide ``d``, ``depth`` (index of the output layer) and
    ``_step(layer, label)``, the two labels reachable from ``label`` on the
    next layer with the bit-0 target first.
    """

    d: int
    depth: int

    @property
    def width(self) -> int:
        return 1 << self.d

    def _step(self, layer: int, label: int) -> tuple[int, int]:
        raise NotImplementedError

    def _back(self, layer: int, label: int) -> tuple[int, int]:
        raise NotImplementedError

    def _check_node(self, v: NodeRef) -> None:
        if not 0 <= v.layer <= self.depth or not 0 <= v.label < self.width:
            raise PreconditionError(f"node {v} is not in this network")

    def successors(self, v: NodeRef) -> frozenset[NodeRef]:
        self._check_node(v)
        if v.layer == self.depth:
            raise NoSuchNeighbourError(f"{v} is an output node")
        return frozenset(NodeRef(v.layer + 1, x) for x in self._step(v.layer, v.label))

    def predecessors(self, v: NodeRef) -> frozenset[NodeRef]:
        self._check_node(v)
        if v.layer == 0:
            raise NoSuchNeighbourError(f"{v} is an input node")
        return frozenset(NodeRef(v.layer - 1, x) for x in self._back(v.layer, v.label))

    def nodes(self) -> Iterable[NodeRef]:
        for layer in range(self.depth + 1):
            for label in range(self.width):
                yield NodeRef(layer, label)

    def edges(self) -> Iterable[tuple[NodeRef, NodeRef]]:
        for layer in range(self.depth):
            for label in range(self.width):
                for x in self._step(layer, label):
                    yield NodeRef(layer, label), NodeRef(layer + 1, x)

    def has_edge(self, u: NodeRef, v: NodeRef) -> bool:
        return (
            0 <= u.layer < self.depth
            and v.layer == u.layer + 1
            and 0 <= u.label < self.width
            and v.label in self._step(u.layer, u.label)
        )

    def to_dot(self, name: str = "network") -> str:
        d = self.d
        lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle, fontsize=9];"]
        for layer in range(self.depth + 1):
            members = " ".join(f'"{layer}:{format_label(x, d)}";' for x in range(self.width))
            lines.append(f"  {{ rank=same; {members} }}")
        for u, v in self.edges():
            lines.append(
                f'  "{u.layer}:{format_label(u.label, d)}" -> "{v.layer}:{format_label(v.label, d)}";'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Butterfly(_Layered):
    """A single (possibly layer-permuted) ``d``-dimensional butterfly."""

    d: int
    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ConstructionError("dimension must be at least 1")
        object.__setattr__(self, "perm", _check_perm(self.perm, self.d, "perm"))

    @classmethod
    def standard(cls, d: int) -> "Butterfly":
        return cls(d, identity_perm(d))

    @property
    def depth(self) -> int:
        return self.d

    @cached_property
    def _masks(self) -> tuple[int, ...]:
        return tuple(bitmask(self.d, p) for p in self.perm)

    def _step(self, layer: int, label: int) -> tuple[int, int]:
        m = self._masks[layer]
        return label & ~m, label | m

    def _back(self, layer: int, label: int) -> tuple[int, int]:
        m = self._masks[layer - 1]
        return label & ~m, label | m


# alias: a butterfly description and a Butterfly are the same value
ButterflySpec = Butterfly


@dataclass(frozen=True)
class PairNetwork(_Layered):
    """Two ``d``-dimensional butterflies joined at layer ``d``."""

    d: int
    left_perm: tuple[int, ...]
    right_perm: tuple[int, ...]
    middle_relabel: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or self.d < 1:
            raise ConstructionError("dimension must be an integer >= 1")
        object.__setattr__(self, "left_perm", _check_perm(self.left_perm, self.d, "left_perm"))
        object.__setattr__(self, "right_perm", _check_perm(self.right_perm, self.d, "right_perm"))
        object.__setattr__(self, "middle_relabel", _check_relabel(self.middle_relabel, self.d))

    @property
    def depth(self) -> int:
        return 2 * self.d

    @property
    def left(self) -> Butterfly:
        return Butterfly(self.d, self.left_perm)

    @property
    def right(self) -> Butterfly:
        return Butterfly(self.d, self.right_perm)

    @cached_property
    def is_layer_permuted(self) -> bool:
        """True when the middle relabel is the identity."""
        return all(i == x for i, x in enumerate(self.middle_relabel))

    @cached_property
    def relabel_inverse(self) -> tuple[int, ...]:
        inv = [0] * self.width
        for x, y in enumerate(self.middle_relabel):
            inv[y] = x
        return tuple(inv)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Bit toggled by each of the ``2d`` edge layers."""
        d = self.d
        return tuple(bitmask(d, p) for p in self.left_perm + self.right_perm)

    def _step(self, layer: int, label: int) -> tuple[int, int]:
        m = self.masks[layer]
        lo, hi = label & ~m, label | m
        if layer == self.d - 1:
            return self.middle_relabel[lo], self.middle_relabel[hi]
        return lo, hi

    def _back(self, layer: int, label: int) -> tuple[int, int]:
        m = self.masks[layer - 1]
        if layer == self.d:
            label = self.relabel_inverse[label]
        return label & ~m, label | m

    def descriptor(self) -> dict:
        return {
            "d": self.d,
            "left_perm": list(self.left_perm),
            "right_perm": list(self.right_perm),
            "middle_relabel": list(self.middle_relabel),
        }

    def to_json(self) -> str:
        return json.dumps(self.descriptor())

    @classmethod
    def from_descriptor(cls, obj: dict) -> "PairNetwork":
        try:
            d = int(obj["d"])
            left = obj.get("left_perm") or identity_perm(d)
            right = obj.get("right_perm") or identity_perm(d)
            relabel = obj.get("middle_relabel") or range(1 << d)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConstructionError(f"bad network descriptor: {exc}") from None
        return build_pair(d, left, right, relabel)


def build_pair(
    d: int,
    left_perm: Sequence[int] | None = None,
    right_perm: Sequence[int] | None = None,
    middle_relabel: Sequence[int] | None = None,
) -> PairNetwork:
    """Build a pair network; omitted parts default to the identity."""
    if not isinstance(d, int) or d < 1:
        raise ConstructionError("dimension must be an integer >= 1")
    return PairNetwork(
        d,
        tuple(left_perm) if left_perm is not None else identity_perm(d),
        tuple(right_perm) if right_perm is not None else identity_perm(d),
        tuple(middle_relabel) if middle_relabel is not None else tuple(range(1 << d)),
    )


def double_butterfly(d: int) -> PairNetwork:
    return build_pair(d)


def benes(d: int) -> PairNetwork:
    """Forward butterfly followed by a reversed one."""
    return build_pair(d, identity_perm(d), reversal_perm(d))


def sub_butterfly_nodes(net: PairNetwork, sb) -> frozenset[NodeRef]:
    """All nodes of a sub-butterfly (see ``connectivity.SubButterflyId``)."""
    sb.validate(net)
    d = net.d
    key, mask = sb.key, sb.mask
    if sb.side is Side.LEFT:
        m = d - sb.q
        out = {NodeRef(layer, x) for layer in range(m, d) for x in range(net.width) if x & mask == key}
        inv = net.relabel_inverse
        out.update(NodeRef(d, y) for y in range(net.width) if inv[y] & mask == key)
    else:
        out = {
            NodeRef(layer, y)
            for layer in range(d, d + sb.q + 1)
            for y in range(net.width)
            if y & mask == key
        }
    return frozenset(out)
