"""Rounding plans: where each odd sub-butterfly sends its extra packet.

A plan depends only on the network and the number of packets. For
``n = 2**t + r`` with ``0 < r < 2**t`` the plan for ``r`` (carried down to
level ``t``) is reused for levels below ``t``; at level ``t`` every
sub-butterfly then holds one or two packets and the free packets are
balanced per component. Levels beyond the point where each sub-butterfly
holds at most one packet are filled in by matching packets inside their
(complete bipartite) components and steering each matched pair towards a
common middle node, which keeps every component balanced further down.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

from ..connectivity import RefinementCase, SubButterflyId, classify_refinement, fixed_mask
from ..errors import InternalInvariantError, PreconditionError, UnsupportedNetworkError
from ..topology import PairNetwork, Side, format_label
from .balance import Allocation, ComponentOccupancy, Group, balance_components
from .splitting import PacketDistribution, split_level, split_mask

SIDES = (Side.LEFT, Side.RIGHT)


@dataclass(frozen=True)
class BalanceRecord:
    level: int
    case: RefinementCase
    component: int
    occupancy: ComponentOccupancy
    allocation: Allocation


@dataclass
class RoundingPlan:
    net: PairNetwork
    n: int
    depth: int
    decisions: dict[Side, list[dict[int, int]]]
    """Per side, per level ``< depth``: sub-butterfly key -> child taking the extra packet."""
    counts: dict[Side, list[dict[int, int]]]
    """Per side, per level ``0..depth``: sub-butterfly key -> packets (zeros omitted)."""
    balance_log: list[BalanceRecord] = field(default_factory=list)

    def decision(self, side: Side, level: int, key: int) -> int:
        return self.decisions[side][level].get(key, 0)

    def distribution(self, side: Side, level: int) -> PacketDistribution:
        return PacketDistribution(self.net, side, level, dict(self.counts[side][level]))

    def to_json(self) -> dict:
        d = self.net.d
        out: dict = {"n": self.n, "depth": self.depth, "levels": []}
        for level in range(self.depth):
            entry = {}
            for side in SIDES:
                q = d - level
                entry[side.value] = {
                    SubButterflyId.of(self.net, side, q, key).pattern: bit
                    for key, bit in sorted(self.decisions[side][level].items())
                }
            out["levels"].append(entry)
        out["final_occupancy"] = {
            side.value: sorted(format_label(k, d) for k in self.counts[side][self.depth])
            for side in SIDES
        }
        return out


def final_depth(n: int) -> int:
    """Number of split levels until every sub-butterfly holds at most one packet."""
    t = n.bit_length() - 1
    return t if n == 1 << t else t + 1


def component_mask(net: PairNetwork, level: int) -> int:
    return fixed_mask(net, Side.LEFT, level) & fixed_mask(net, Side.RIGHT, level)


def compute_rounding_plan(net: PairNetwork, n: int) -> RoundingPlan:
    if not net.is_layer_permuted:
        raise UnsupportedNetworkError("rounding plans need a pair of layer-permuted butterflies")
    if not isinstance(n, int) or not 1 <= n <= net.width:
        raise PreconditionError(f"packet count {n} outside 1..{net.width}")
    return _plan(net, n, final_depth(n))


@lru_cache(maxsize=4096)
def _plan(net: PairNetwork, n: int, depth: int) -> RoundingPlan:
    t = n.bit_length() - 1
    decisions: dict[Side, list[dict[int, int]]] = {s: [] for s in SIDES}
    counts: dict[Side, list[dict[int, int]]] = {s: [{0: n}] for s in SIDES}
    plan = RoundingPlan(net, n, depth, decisions, counts)

    if n == 1 << t:
        for side in SIDES:
            for _ in range(t):
                _advance(plan, side, {})
        base = t
    else:
        rest = n - (1 << t)
        sub = _plan(net, rest, t)
        for side in SIDES:
            for level in range(t):
                _advance(plan, side, dict(sub.decisions[side][level]))
        _check_parity(plan, sub, t)
        _balance(plan, t)
        base = t + 1

    if base > depth:
        raise InternalInvariantError(f"plan for n={n} needs depth {base}, asked for {depth}")
    _check_matchable(plan, base)
    _extend(plan, base)
    return plan


def _advance(plan: RoundingPlan, side: Side, decided: dict[int, int]) -> None:
    level = len(plan.decisions[side])
    dist = PacketDistribution(plan.net, side, level, plan.counts[side][level])
    nxt = split_level(dist, decided)
    plan.decisions[side].append({k: v for k, v in decided.items() if dist.count(k) % 2})
    plan.counts[side].append(nxt.counts)


def _check_parity(plan: RoundingPlan, sub: RoundingPlan, t: int) -> None:
    # counts differ by exactly 2**(t-k) at level k, so parities agree below t
    for side in SIDES:
        for level in range(t + 1):
            extra = 1 << (t - level)
            new, old = plan.counts[side][level], sub.counts[side][level]
            if len(new) != 1 << level:
                raise InternalInvariantError(f"empty sub-butterfly at level {level} for n={plan.n}")
            for key, c in new.items():
                if c != old.get(key, 0) + extra:
                    raise InternalInvariantError(
                        f"parity reuse broken at level {level}, key {key}: {c} vs {old.get(key, 0)}"
                    )


def _balance(plan: RoundingPlan, level: int) -> None:
    """Choose level-``level`` decisions for sub-butterflies holding 1 or 2 packets."""
    net = plan.net
    case = classify_refinement(net, net.d - level)
    smask = component_mask(net, level)
    child_smask = component_mask(net, level + 1)

    per_comp: dict[int, dict[Side, dict[tuple[int, int], list]]] = defaultdict(
        lambda: {s: defaultdict(lambda: [[], 0]) for s in SIDES}
    )
    for side in SIDES:
        bit = split_mask(net, side, level)
        for key, c in plan.counts[side][level].items():
            if c not in (1, 2):
                raise InternalInvariantError(f"balancing needs 1 or 2 packets, found {c}")
            targets = (key & child_smask, (key | bit) & child_smask)
            slot = per_comp[key & smask][side][targets]
            if c == 1:
                slot[0].append(key)
            else:
                slot[1] += 1

    decided: dict[Side, dict[int, int]] = {s: {} for s in SIDES}
    for comp in sorted(per_comp):
        groups = {s: sorted(per_comp[comp][s].items()) for s in SIDES}
        occ = ComponentOccupancy(
            *(tuple(Group(tg, len(slot[0]), slot[1]) for tg, slot in groups[s]) for s in SIDES)
        )
        try:
            alloc = balance_components(case, occ)
        except PreconditionError as exc:
            raise InternalInvariantError(f"balance failed at level {level}: {exc}") from exc
        plan.balance_log.append(BalanceRecord(level, case, comp, occ, alloc))
        for side, to_first in zip(SIDES, (alloc.left, alloc.right)):
            for (_, (singles, _)), a in zip(groups[side], to_first):
                for i, key in enumerate(sorted(singles)):
                    decided[side][key] = 0 if i < a else 1
    for side in SIDES:
        _advance(plan, side, decided[side])


def _pairs_at(plan: RoundingPlan, level: int) -> list[tuple[int, int]]:
    """Match occupied left and right sub-butterflies inside each component, in key order."""
    smask = component_mask(plan.net, level)
    by_comp: dict[int, tuple[list[int], list[int]]] = defaultdict(lambda: ([], []))
    for i, side in enumerate(SIDES):
        for key, c in plan.counts[side][level].items():
            if c != 1:
                raise InternalInvariantError(f"expected at most one packet per sub-butterfly, found {c}")
            by_comp[key & smask][i].append(key)
    pairs = []
    for comp in sorted(by_comp):
        ls, rs = by_comp[comp]
        if len(ls) != len(rs):
            raise InternalInvariantError(f"component {comp} unbalanced at level {level}: {len(ls)} vs {len(rs)}")
        pairs.extend(zip(sorted(ls), sorted(rs)))
    return pairs


def _check_matchable(plan: RoundingPlan, level: int) -> None:
    _pairs_at(plan, level)


def _extend(plan: RoundingPlan, base: int) -> None:
    """Fill levels ``base..depth-1`` by steering matched pairs to a common middle node."""
    if base >= plan.depth:
        return
    middles = [lk | rk for lk, rk in _pairs_at(plan, base)]
    net = plan.net
    for level in range(base, plan.depth):
        for side in SIDES:
            mask = fixed_mask(net, side, level)
            bit = split_mask(net, side, level)
            decided = {z & mask: int(bool(z & bit)) for z in middles}
            _advance(plan, side, decided)
    _check_matchable(plan, plan.depth)
