from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from ..errors import PreconditionError
from ..topology import NodeRef, node_from_json, node_to_json, parse_label


@dataclass
class PathSet:
    """Input-to-output paths, one node per layer, sorted by start label."""

    d: int
    paths: list[tuple[NodeRef, ...]]
    info: dict[str, Any] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def starts(self) -> list[int]:
        return [p[0].label for p in self.paths]

    def ends(self) -> list[int]:
        return [p[-1].label for p in self.paths]

    def endpoint_map(self) -> dict[int, int]:
        return {p[0].label: p[-1].label for p in self.paths}

    def to_json(self) -> list[list[dict]]:
        return [[node_to_json(v, self.d) for v in p] for p in self.paths]

    @classmethod
    def from_json(cls, d: int, obj: Sequence[Sequence[dict]]) -> "PathSet":
        return cls(d, [tuple(node_from_json(v, d) for v in p) for p in obj])


def check_terminals(
    d: int, A: Iterable[int | str], B: Iterable[int | str], *, allow_empty: bool = False
) -> tuple[list[int], list[int]]:
    """Normalise terminal sets to sorted label lists and check ``|A| == |B|``."""
    a = [parse_label(x, d) if isinstance(x, str) else parse_label(int(x), d) for x in A]
    b = [parse_label(x, d) if isinstance(x, str) else parse_label(int(x), d) for x in B]
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise PreconditionError("terminal sets contain duplicates")
    if len(a) != len(b):
        raise PreconditionError(f"|A|={len(a)} differs from |B|={len(b)}")
    if not a and not allow_empty:
        raise PreconditionError("terminal sets are empty")
    return sorted(a), sorted(b)
