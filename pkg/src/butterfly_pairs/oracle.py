"""Independent certification of routings.

``max_vertex_disjoint`` solves the vertex-disjoint path problem as a max
flow: every node becomes an ``in -> out`` arc of capacity 1, graph edges
and terminal arcs are uncapacitated, so a minimum cut consists of nodes
only. ``validate_path_set`` checks a path set literally against the
network's adjacency. Neither touches router internals.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .topology import NodeRef, format_label, node_to_json


@dataclass
class FlowResult:
    max_disjoint: int
    paths: list[tuple[NodeRef, ...]] = field(default_factory=list)
    cut: list[NodeRef] = field(default_factory=list)

    def to_json(self, d: int) -> dict:
        return {"max_disjoint": self.max_disjoint, "cut": [node_to_json(v, d) for v in self.cut]}


class _SplitGraph:
    """Arc arrays of the node-split network, shared by every query on one net."""

    def __init__(self, net) -> None:
        width, depth = net.width, net.depth
        self.width, self.depth = width, depth
        n_nodes = width * (depth + 1)
        self.source, self.sink = 2 * n_nodes, 2 * n_nodes + 1
        self.n_vertices = 2 * n_nodes + 2
        self.inf = n_nodes + 1
        self.head: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for layer in range(depth + 1):
            for x in range(width):
                v = layer * width + x
                self._arc(2 * v, 2 * v + 1, 1)
        for layer in range(depth):
            for x in range(width):
                u = layer * width + x
                for y in net._step(layer, x):
                    self._arc(2 * u + 1, 2 * ((layer + 1) * width + y), self.inf)
        self.source_arc = [self._arc(self.source, 2 * x, 0) for x in range(width)]
        last = depth * width
        self.sink_arc = [self._arc(2 * (last + y) + 1, self.sink, 0) for y in range(width)]

    def _arc(self, u: int, v: int, c: int) -> int:
        e = len(self.head)
        self.head += [v, u]
        self.cap += [c, 0]
        self.adj[u].append(e)
        self.adj[v].append(e + 1)
        return e

    def node_of(self, vertex: int) -> NodeRef:
        layer, x = divmod(vertex // 2, self.width)
        return NodeRef(layer, x)


@lru_cache(maxsize=64)
def _split_graph(net) -> _SplitGraph:
    return _SplitGraph(net)


def _dinic(g: _SplitGraph, cap: list[int]) -> tuple[int, list[int]]:
    """Max flow on residual capacities ``cap`` (mutated). Returns value and final BFS levels."""
    head, adj, s, t = g.head, g.adj, g.source, g.sink
    n = g.n_vertices
    flow = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                if cap[e] > 0 and level[head[e]] < 0:
                    level[head[e]] = level[u] + 1
                    queue.append(head[e])
        if level[t] < 0:
            return flow, level
        it = [0] * n
        while True:
            # one augmenting path along the level graph; every path carries one unit
            stack = [s]
            arcs: list[int] = []
            while stack:
                u = stack[-1]
                if u == t:
                    break
                advanced = False
                edges = adj[u]
                while it[u] < len(edges):
                    e = edges[it[u]]
                    v = head[e]
                    if cap[e] > 0 and level[v] == level[u] + 1:
                        stack.append(v)
                        arcs.append(e)
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    stack.pop()
                    level[u] = -1
                    if arcs:
                        arcs.pop()
                        it[stack[-1]] += 1
            if not stack:
                break
            for e in arcs:
                cap[e] -= 1
                cap[e ^ 1] += 1
            flow += 1


def max_vertex_disjoint(net, A: Iterable[int], B: Iterable[int], *, with_paths: bool = True) -> FlowResult:
    """Maximum number of node-disjoint paths from inputs ``A`` to outputs ``B``."""
    g = _split_graph(net)
    cap = list(g.cap)
    for x in set(A):
        cap[g.source_arc[x]] = g.inf
    for y in set(B):
        cap[g.sink_arc[y]] = g.inf
    original = list(cap)
    value, level = _dinic(g, cap)

    reach = [lv >= 0 for lv in level]
    cut = []
    for vertex in range(0, g.source, 2):
        if reach[vertex] and not reach[vertex + 1]:
            cut.append(g.node_of(vertex))

    paths = []
    if with_paths:
        used = [original[e] - cap[e] if not e & 1 else 0 for e in range(len(cap))]
        for _ in range(value):
            u, nodes = g.source, []
            while u != g.sink:
                for e in g.adj[u]:
                    if not e & 1 and used[e] > 0:
                        used[e] -= 1
                        u = g.head[e]
                        break
                else:  # pragma: no cover - flow conservation makes this unreachable
                    raise RuntimeError("flow decomposition got stuck")
                if u != g.sink and not u & 1:
                    nodes.append(g.node_of(u))
            paths.append(tuple(nodes))
    return FlowResult(value, paths, sorted(cut))


# -- path set validation -------------------------------------------------------

VIOLATION_KINDS = ("node-reuse", "broken-edge", "wrong-endpoint", "wrong-length")


@dataclass(frozen=True)
class Violation:
    kind: str
    location: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": [[v.kind, v.location] for v in self.violations]}


def validate_path_set(net, A: Iterable[int], B: Iterable[int], paths) -> ValidationReport:
    """Check every path-set invariant and report all violations."""
    d, depth = net.d, net.depth
    A, B = sorted(set(A)), sorted(set(B))
    paths: Sequence[Sequence[NodeRef]] = list(getattr(paths, "paths", paths))
    out: list[Violation] = []
    seen: dict[NodeRef, int] = {}

    def where(v) -> str:
        return f"layer {v.layer} node {format_label(v.label, d)}"

    for i, path in enumerate(paths):
        path = [NodeRef(*v) for v in path]
        if len(path) != depth + 1:
            out.append(Violation("wrong-length", f"path {i}: {len(path)} nodes, expected {depth + 1}"))
        for j, v in enumerate(path):
            if v.layer != j or not 0 <= v.label < net.width:
                out.append(Violation("broken-edge", f"path {i}: position {j} holds {where(v)}"))
            if v in seen:
                out.append(Violation("node-reuse", f"path {i} and path {seen[v]} share {where(v)}"))
            else:
                seen[v] = i
        for u, v in zip(path, path[1:]):
            if not net.has_edge(u, v):
                out.append(Violation("broken-edge", f"path {i}: {where(u)} -> {where(v)}"))
        if path and (path[0].layer != 0 or path[0].label not in A):
            out.append(Violation("wrong-endpoint", f"path {i} starts at {where(path[0])}, not in A"))
        if path and (path[-1].layer != depth or path[-1].label not in B):
            out.append(Violation("wrong-endpoint", f"path {i} ends at {where(path[-1])}, not in B"))
    starts = sorted(p[0][1] for p in paths if p)
    ends = sorted(p[-1][1] for p in paths if p)
    if starts != A:
        out.append(Violation("wrong-endpoint", f"path starts {starts} do not cover A={A} exactly"))
    if ends != B:
        out.append(Violation("wrong-endpoint", f"path ends {ends} do not cover B={B} exactly"))
    return ValidationReport(out)


# -- negative control ------------------------------------------------------------


@dataclass
class Witness:
    A: list[int]
    B: list[int]
    max_disjoint: int

    def to_json(self, d: int) -> dict:
        return {
            "A": [format_label(x, d) for x in self.A],
            "B": [format_label(y, d) for y in self.B],
            "max_disjoint": self.max_disjoint,
        }


def search_blocking_witness(
    net, sizes: Sequence[int] | None = None, trials: int = 2000, seed: int = 0, exhaustive_up_to: int = 2
) -> Witness | None:
    """Look for terminal sets that cannot be joined node-disjointly.

    Small sizes are enumerated exhaustively, larger ones sampled.
    """
    width = net.width
    sizes = list(sizes) if sizes is not None else list(range(2, width))
    rng = random.Random(seed)
    for k in sizes:
        if k <= exhaustive_up_to:
            for A in combinations(range(width), k):
                for B in combinations(range(width), k):
                    r = max_vertex_disjoint(net, A, B, with_paths=False)
                    if r.max_disjoint < k:
                        return Witness(list(A), list(B), r.max_disjoint)
        else:
            for _ in range(trials):
                A = sorted(rng.sample(range(width), k))
                B = sorted(rng.sample(range(width), k))
                r = max_vertex_disjoint(net, A, B, with_paths=False)
                if r.max_disjoint < k:
                    return Witness(A, B, r.max_disjoint)
    return None


def flow_json(result: FlowResult, d: int) -> str:
    return json.dumps(result.to_json(d))
