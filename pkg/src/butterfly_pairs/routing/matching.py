"""Bipartite matching on connectivity graphs."""

from __future__ import annotations

from typing import Hashable, Mapping, Sequence, TypeVar

from ..connectivity import ConnectivityGraph
from ..errors import InternalInvariantError, PreconditionError

L = TypeVar("L", bound=Hashable)
R = TypeVar("R", bound=Hashable)


def maximum_matching(adj: Mapping[L, Sequence[R]]) -> dict[L, R]:
    """Maximum matching by repeated augmenting-path search (Kuhn).

    Left vertices are tried in iteration order and neighbours in list order,
    so the result is deterministic.
    """
    match_right: dict[R, L] = {}

    def augment(u: L, seen: set) -> bool:
        # explicit stack; alternating paths can be long on 2**d vertices
        stack = [(u, iter(adj[u]))]
        trail: list[tuple[L, R]] = []
        while stack:
            x, it = stack[-1]
            for y in it:
                if y in seen:
                    continue
                seen.add(y)
                owner = match_right.get(y)
                trail.append((x, y))
                if owner is None:
                    for a, b in trail:
                        match_right[b] = a
                    return True
                stack.append((owner, iter(adj[owner])))
                break
            else:
                stack.pop()
                if trail:
                    trail.pop()
        return False

    for u in adj:
        augment(u, set())
    return {u: y for y, u in match_right.items()}


def perfect_matching_regular_bipartite(g: ConnectivityGraph) -> dict:
    """Perfect matching of a regular bipartite (multi)graph.

    Regularity (counting multiplicity) and equal side sizes guarantee one
    exists, so failing to find it is an internal error.
    """
    if len(g.left) != len(g.right):
        raise PreconditionError("sides differ in size")
    degrees = set(g.degrees().values())
    if len(degrees) != 1 or 0 in degrees:
        raise PreconditionError(f"graph is not regular: degrees {sorted(degrees)}")
    matching = maximum_matching(g.adjacency())
    if len(matching) != len(g.left):
        raise InternalInvariantError("regular bipartite graph without a perfect matching")
    return matching
