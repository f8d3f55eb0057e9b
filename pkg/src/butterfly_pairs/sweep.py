"""Verification sweeps: route many instances and certify each with the oracle."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Iterator

from .errors import ButterflyError, PreconditionError
from .oracle import max_vertex_disjoint, search_blocking_witness, validate_path_set
from .routing import route
from .topology import Butterfly, PairNetwork, build_pair, format_label, identity_perm

ROUTERS = ("general", "pow2", "complement", "mini", "probe")


@dataclass
class SweepConfig:
    d: list[int]
    router: str = "general"
    perms: str | int = "exhaustive"
    """``"exhaustive"``, ``"identity"`` or a number of sampled (left, right) pairs."""
    relabels: str | int = "identity"
    """``"identity"`` or a number of sampled middle relabels per permutation pair."""
    sizes: str | list[int] = "all"
    """``"all"``, ``"pow2"``, ``"complement"``, ``"mini"`` or explicit sizes."""
    subsets: str | int = 20
    """``"exhaustive"`` or the number of random (A, B) pairs per size."""
    seed: int = 0
    oracle: bool = True
    keep_records: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.d, int):
            self.d = [self.d]
        self.d = [int(x) for x in self.d]
        if not self.d or min(self.d) < 1:
            raise PreconditionError("sweep needs dimensions >= 1")
        if self.router not in ROUTERS:
            raise PreconditionError(f"router must be one of {ROUTERS}")
        if self.perms == "exhaustive" and max(self.d) > 4:
            raise PreconditionError("exhaustive permutation sweeps are limited to d <= 4")
        if not (self.perms in ("exhaustive", "identity") or (isinstance(self.perms, int) and self.perms > 0)):
            raise PreconditionError(f"bad perms setting {self.perms!r}")
        if not (self.relabels == "identity" or (isinstance(self.relabels, int) and self.relabels > 0)):
            raise PreconditionError(f"bad relabels setting {self.relabels!r}")
        if not (self.subsets == "exhaustive" or (isinstance(self.subsets, int) and self.subsets > 0)):
            raise PreconditionError(f"bad subsets setting {self.subsets!r}")
        if isinstance(self.sizes, str) and self.sizes not in ("all", "pow2", "complement", "mini"):
            raise PreconditionError(f"bad sizes setting {self.sizes!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "SweepConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(obj) - known
        if extra:
            raise PreconditionError(f"unknown sweep config keys: {sorted(extra)}")
        return cls(**obj)


@dataclass
class SweepReport:
    config: SweepConfig
    attempted: int = 0
    routed: int = 0
    oracle_agreed: int = 0
    failed: int = 0
    failures: list[dict] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    witnesses: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        if self.config.router == "probe":
            return bool(self.witnesses)
        agreed = self.oracle_agreed == self.routed or not self.config.oracle
        return self.failed == 0 and self.attempted == self.routed and agreed

    def to_json(self) -> dict:
        out = {
            "header": {"seed": self.config.seed, "config": asdict(self.config)},
            "counts": {
                "attempted": self.attempted,
                "routed": self.routed,
                "oracle_agreed": self.oracle_agreed,
                "failed": self.failed,
            },
            "failures": sorted(self.failures, key=_record_key),
        }
        if self.config.router == "probe":
            out["witnesses"] = self.witnesses
        if self.config.keep_records:
            out["records"] = sorted(self.records, key=_record_key)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def summary(self) -> str:
        c = self.config
        if c.router == "probe":
            found = len(self.witnesses)
            return f"probe d={c.d}: {found} blocking witness(es) found"
        return (
            f"{c.router} d={c.d}: attempted {self.attempted}, routed {self.routed}, "
            f"oracle-agreed {self.oracle_agreed}, failed {self.failed}"
        )


def _record_key(r: dict) -> tuple:
    return tuple(json.dumps(r.get(k), sort_keys=True) for k in ("d", "left_perm", "right_perm", "relabel", "size", "A", "B"))


def _networks(cfg: SweepConfig, d: int, rng: random.Random) -> Iterator[PairNetwork]:
    labels = list(range(1 << d))
    if cfg.perms == "exhaustive":
        perm_pairs = [
            (lp, rp)
            for lp in itertools.permutations(range(1, d + 1))
            for rp in itertools.permutations(range(1, d + 1))
        ]
    elif cfg.perms == "identity":
        perm_pairs = [(identity_perm(d), identity_perm(d))]
    else:
        perm_pairs = []
        for _ in range(cfg.perms):
            lp, rp = list(range(1, d + 1)), list(range(1, d + 1))
            rng.shuffle(lp)
            rng.shuffle(rp)
            perm_pairs.append((tuple(lp), tuple(rp)))
    for lp, rp in perm_pairs:
        if cfg.relabels == "identity":
            yield build_pair(d, lp, rp)
        else:
            for _ in range(cfg.relabels):
                relabel = labels[:]
                rng.shuffle(relabel)
                yield build_pair(d, lp, rp, relabel)


def _sizes(cfg: SweepConfig, d: int) -> list[int]:
    width = 1 << d
    if isinstance(cfg.sizes, list):
        return [k for k in cfg.sizes if 1 <= k <= width]
    if cfg.sizes == "all":
        return list(range(1, width + 1))
    if cfg.sizes == "pow2":
        return [1 << m for m in range(d + 1)]
    if cfg.sizes == "complement":
        return [width - (1 << m) for m in range(d)]
    return list(range(1, (1 << (d // 2)) + 1))


def _terminal_pairs(cfg: SweepConfig, width: int, k: int, rng: random.Random):
    if cfg.subsets == "exhaustive":
        for A in itertools.combinations(range(width), k):
            for B in itertools.combinations(range(width), k):
                yield list(A), list(B)
    else:
        for _ in range(cfg.subsets):
            yield sorted(rng.sample(range(width), k)), sorted(rng.sample(range(width), k))


def run_instance(net: PairNetwork, router: str, A: list[int], B: list[int], rng: random.Random, check_oracle: bool = True) -> dict:
    """Route one instance and certify it; never raises for routing failures."""
    d = net.d
    rec: dict[str, Any] = {
        "d": d,
        "left_perm": list(net.left_perm),
        "right_perm": list(net.right_perm),
        "relabel": None if net.is_layer_permuted else list(net.middle_relabel),
        "size": len(A),
        "A": [format_label(x, d) for x in A],
        "B": [format_label(y, d) for y in B],
    }
    assignment = None
    if router == "mini":
        shuffled = B[:]
        rng.shuffle(shuffled)
        assignment = dict(zip(A, shuffled))
        rec["assignment"] = {format_label(a, d): format_label(b, d) for a, b in assignment.items()}
    try:
        paths = route(net, A, B, mode=router, assignment=assignment)
    except ButterflyError as exc:
        rec.update(outcome="failed", error=f"{type(exc).__name__}: {exc}")
        return rec
    report = validate_path_set(net, A, B, paths)
    if not report.valid:
        rec.update(outcome="failed", error="invalid path set", violations=report.to_json()["violations"][:5])
        return rec
    if assignment is not None and paths.endpoint_map() != assignment:
        rec.update(outcome="failed", error="assignment not honoured")
        return rec
    rec["outcome"] = "routed"
    if check_oracle:
        flow = max_vertex_disjoint(net, A, B)
        rec["oracle"] = flow.max_disjoint
        rec["oracle_agreed"] = flow.max_disjoint == len(A) == len(flow.paths) == len(flow.cut)
    return rec


def run_sweep(cfg: SweepConfig) -> SweepReport:
    rng = random.Random(cfg.seed)
    report = SweepReport(cfg)
    if cfg.router == "probe":
        for d in cfg.d:
            w = search_blocking_witness(Butterfly.standard(d), seed=rng.randrange(2**32))
            if w is not None:
                report.witnesses.append({"d": d, **w.to_json(d)})
        return report

    for d in cfg.d:
        width = 1 << d
        for net in _networks(cfg, d, rng):
            for k in _sizes(cfg, d):
                if cfg.router == "pow2" and k & (k - 1):
                    continue
                for A, B in _terminal_pairs(cfg, width, k, rng):
                    rec = run_instance(net, cfg.router, A, B, rng, cfg.oracle)
                    report.attempted += 1
                    if rec["outcome"] == "routed":
                        report.routed += 1
                        if rec.get("oracle_agreed", not cfg.oracle):
                            report.oracle_agreed += 1
                        elif cfg.oracle:
                            rec["error"] = "oracle disagrees"
                            report.failures.append(rec)
                    else:
                        report.failed += 1
                        report.failures.append(rec)
                    if cfg.keep_records:
                        report.records.append(rec)
    return report


def load_config(path) -> SweepConfig:
    with open(path) as fh:
        return SweepConfig.from_json(json.load(fh))
