"""Balancing free packets when a connected component refines.

Every sub-butterfly in the component holds one or two packets. A two-packet
sub-butterfly sends one packet into each half (constrained packets); a
one-packet sub-butterfly may send its packet either way (a free packet).
The task is to choose, for the free packets, how many go towards each half
so that every child component again has as many packets on the left as on
the right.

Sub-butterflies of one side whose halves land in the same pair of child
components form a :class:`Group`; only the count per group matters.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable

from ..connectivity import NoReuse, OneReuse, RefinementCase, TwoReuse
from ..errors import PreconditionError


@dataclass(frozen=True)
class Group:
    targets: tuple[Hashable, Hashable]
    """Child component reached through new bit 0 and new bit 1."""
    singles: int
    doubles: int

    @property
    def splits(self) -> bool:
        return self.targets[0] != self.targets[1]

    @property
    def packets(self) -> int:
        return self.singles + 2 * self.doubles


@dataclass(frozen=True)
class ComponentOccupancy:
    left: tuple[Group, ...]
    right: tuple[Group, ...]

    def totals(self) -> tuple[int, int]:
        return sum(g.packets for g in self.left), sum(g.packets for g in self.right)


@dataclass(frozen=True)
class Allocation:
    """Free packets each group sends towards ``targets[0]``; the rest go to ``targets[1]``."""

    left: tuple[int, ...]
    right: tuple[int, ...]


def child_loads(groups: tuple[Group, ...], to_first: tuple[int, ...]) -> dict[Hashable, int]:
    loads: dict[Hashable, int] = defaultdict(int)
    for g, a in zip(groups, to_first):
        if not 0 <= a <= g.singles:
            raise PreconditionError(f"allocation {a} outside 0..{g.singles}")
        c0, c1 = g.targets
        loads[c0] += g.doubles + a
        loads[c1] += g.doubles + g.singles - a
    return dict(loads)


def is_balanced(occ: ComponentOccupancy, alloc: Allocation) -> bool:
    left = child_loads(occ.left, alloc.left)
    right = child_loads(occ.right, alloc.right)
    return all(left.get(c, 0) == right.get(c, 0) for c in left.keys() | right.keys())


def balance_components(case: RefinementCase, occ: ComponentOccupancy) -> Allocation:
    """Allocate free packets so every child component balances."""
    for g in occ.left + occ.right:
        if g.singles < 0 or g.doubles < 0:
            raise PreconditionError("negative occupancy")
    nl, nr = occ.totals()
    if nl != nr:
        raise PreconditionError(f"component is unbalanced: {nl} left vs {nr} right packets")

    if isinstance(case, NoReuse):
        if any(g.splits for g in occ.left + occ.right):
            raise PreconditionError("no-reuse refinement cannot split a component")
        alloc = Allocation(tuple(g.singles for g in occ.left), tuple(g.singles for g in occ.right))
    elif isinstance(case, OneReuse):
        alloc = _one_reuse(case, occ)
    elif isinstance(case, TwoReuse):
        alloc = _two_reuse(occ)
    else:
        raise TypeError(f"unknown refinement case {case!r}")

    if not is_balanced(occ, alloc):
        raise PreconditionError("occupancy admits no balancing allocation")
    return alloc


def _one_reuse(case: OneReuse, occ: ComponentOccupancy) -> Allocation:
    if case.left_splits and case.right_splits:
        if len(occ.left) != 1 or len(occ.right) != 1:
            raise PreconditionError("expected one group per side")
        (gl,), (gr,) = occ.left, occ.right
        # floor(y/2) free packets to the bit-0 child on both sides
        return Allocation((gl.singles // 2,), (gr.singles // 2,))

    splitting, fixed = (occ.left, occ.right) if case.left_splits else (occ.right, occ.left)
    if len(splitting) != 1 or not splitting[0].splits or any(g.splits for g in fixed):
        raise PreconditionError("occupancy does not match a one-sided split")
    g = splitting[0]
    need = child_loads(fixed, tuple(h.singles for h in fixed)).get(g.targets[0], 0)
    to_first = need - g.doubles
    if not 0 <= to_first <= g.singles:
        raise PreconditionError("not enough free packets to match the fixed side")
    mine = (to_first,)
    theirs = tuple(h.singles for h in fixed)
    return Allocation(mine, theirs) if case.left_splits else Allocation(theirs, mine)


def _two_reuse(occ: ComponentOccupancy) -> Allocation:
    left, right = occ.left, occ.right
    if not all(g.splits for g in left + right):
        raise PreconditionError("two-reuse refinement splits every group")
    common: dict[tuple[int, int], Hashable] = {}
    for i, gl in enumerate(left):
        for j, gr in enumerate(right):
            shared = set(gl.targets) & set(gr.targets)
            if len(shared) != 1:
                raise PreconditionError("left and right groups must meet in exactly one child")
            common[i, j] = shared.pop()

    constrained_l: dict[Hashable, int] = defaultdict(int)
    constrained_r: dict[Hashable, int] = defaultdict(int)
    for g in left:
        for c in g.targets:
            constrained_l[c] += g.doubles
    for g in right:
        for c in g.targets:
            constrained_r[c] += g.doubles

    # first cover each child's deficit from the short side's group
    send_l = [dict.fromkeys(g.targets, 0) for g in left]
    send_r = [dict.fromkeys(g.targets, 0) for g in right]
    for c in set(constrained_l) | set(constrained_r):
        gap = constrained_r[c] - constrained_l[c]
        groups, sends = (left, send_l) if gap > 0 else (right, send_r)
        for g, s in zip(groups, sends):
            if c in g.targets:
                s[c] += abs(gap)
    spare_l = [g.singles - sum(s.values()) for g, s in zip(left, send_l)]
    spare_r = [g.singles - sum(s.values()) for g, s in zip(right, send_r)]
    if min(spare_l + spare_r, default=0) < 0:
        raise PreconditionError("not enough free packets to cover the constrained imbalance")

    # then pair the remaining free packets, earliest child first
    for i in range(len(left)):
        for j in range(len(right)):
            k = min(spare_l[i], spare_r[j])
            if k:
                c = common[i, j]
                send_l[i][c] += k
                send_r[j][c] += k
                spare_l[i] -= k
                spare_r[j] -= k
    if any(spare_l) or any(spare_r):
        raise PreconditionError("free packets left over after pairing")
    return Allocation(
        tuple(s[g.targets[0]] for g, s in zip(left, send_l)),
        tuple(s[g.targets[0]] for g, s in zip(right, send_r)),
    )


def case3_parameters(occ: ComponentOccupancy) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Constrained-pair counts per group on each side and the group size.

    For router-generated occupancies both sides sum to the same value and no
    count exceeds the group size.
    """
    sizes = {g.singles + g.doubles for g in occ.left + occ.right}
    if len(sizes) != 1:
        raise PreconditionError(f"groups differ in size: {sorted(sizes)}")
    return tuple(g.doubles for g in occ.left), tuple(g.doubles for g in occ.right), sizes.pop()
