"""One-layer packet splitting inside sub-butterflies.

A side of a pair network is split level by level. On the left, level ``k``
means layer ``k`` and the split toggles the bit of edge layer ``k``. On the
right, packets move backwards: level ``k`` is layer ``2d - k`` and the split
toggles the bit of edge layer ``2d - k - 1``. Labels are in the side's own
coordinates, so left packets never see the middle relabel here.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from ..connectivity import SubButterflyId, fixed_mask
from ..errors import PreconditionError
from ..topology import PairNetwork, Side


def split_mask(net: PairNetwork, side: Side, level: int) -> int:
    """Bit that separates the two children of a level-``level`` sub-butterfly."""
    if side is Side.LEFT:
        return net.masks[level]
    return net.masks[2 * net.d - level - 1]


def layer_of(net: PairNetwork, side: Side, level: int) -> int:
    return level if side is Side.LEFT else 2 * net.d - level


@dataclass
class PacketDistribution:
    """Packet counts per sub-butterfly at one level of one side.

    ``counts`` is keyed by the sub-butterfly's fixed bits (a label with all
    free positions zero). Empty sub-butterflies may be omitted.
    """

    net: PairNetwork
    side: Side
    level: int
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, key: int) -> int:
        return self.counts.get(key, 0)

    def by_id(self) -> dict[SubButterflyId, int]:
        q = self.net.d - self.level
        return {
            SubButterflyId.of(self.net, self.side, q, key): c
            for key, c in sorted(self.counts.items())
            if c
        }

    @classmethod
    def from_labels(cls, net: PairNetwork, side: Side, level: int, labels: Iterable[int]):
        mask = fixed_mask(net, side, level)
        counts: dict[int, int] = defaultdict(int)
        for x in labels:
            counts[x & mask] += 1
        return cls(net, side, level, dict(counts))


def split_level(dist: PacketDistribution, decisions: Mapping[int, int] | None = None) -> PacketDistribution:
    """Advance a distribution one level.

    A sub-butterfly holding ``p`` packets sends ``ceil(p/2)`` to the child
    named by its decision (default 0) and ``floor(p/2)`` to the other.
    """
    net, side, level = dist.net, dist.side, dist.level
    if level >= net.d:
        raise PreconditionError("level-d sub-butterflies cannot be split")
    bit = split_mask(net, side, level)
    decisions = decisions or {}
    out: dict[int, int] = defaultdict(int)
    for key, p in dist.counts.items():
        if p == 0:
            continue
        hi, lo = (p + 1) // 2, p // 2
        if decisions.get(key, 0):
            out[key | bit] += hi
            out[key] += lo
        else:
            out[key] += hi
            out[key | bit] += lo
    return PacketDistribution(net, side, level + 1, {k: v for k, v in out.items() if v})


@dataclass
class SplitResult:
    moves: dict[int, int]
    """Packet label at this level -> label at the next level."""
    crossed: dict[int, bool]
    """Switch (label with the split bit cleared) -> crossed? for touched switches."""


def realize_split(
    net: PairNetwork,
    side: Side,
    level: int,
    positions: Iterable[int],
    decide: Callable[[int], int] | Mapping[int, int] | None = None,
) -> SplitResult:
    """Move packets one level, node-disjointly, honouring rounding decisions.

    Full switches go straight. Lone packets of a sub-butterfly are sorted by
    label; the first ``ceil(l/2)`` of them go to the decided child.
    """
    if level >= net.d:
        raise PreconditionError("level-d sub-butterflies cannot be split")
    positions = list(positions)
    if len(set(positions)) != len(positions):
        raise PreconditionError("two packets on one node")
    if decide is None:
        decide = _zero
    elif not callable(decide):
        table = decide
        decide = lambda key: table.get(key, 0)  # noqa: E731

    bit = split_mask(net, side, level)
    fmask = fixed_mask(net, side, level)
    occupied = set(positions)
    moves: dict[int, int] = {}
    crossed: dict[int, bool] = {}
    lone: dict[int, list[int]] = defaultdict(list)
    for x in positions:
        if x ^ bit in occupied:
            moves[x] = x
            crossed[x & ~bit] = False
        else:
            lone[x & fmask].append(x)
    for key, xs in lone.items():
        xs.sort()
        want = decide(key)
        ceil_half = (len(xs) + 1) // 2
        for i, x in enumerate(xs):
            target = want if i < ceil_half else 1 - want
            y = (x | bit) if target else (x & ~bit)
            moves[x] = y
            crossed[x & ~bit] = x != y
    return SplitResult(moves, crossed)


def _zero(key: int) -> int:
    return 0
