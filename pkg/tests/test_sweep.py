import json
import random

import pytest

from butterfly_pairs.errors import PreconditionError
from butterfly_pairs.sweep import SweepConfig, load_config, run_instance, run_sweep
from butterfly_pairs.topology import build_pair


def test_exhaustive_small_sweep_routes_everything():
    report = run_sweep(SweepConfig(d=[1, 2], subsets="exhaustive"))
    # d=1: 1 perm pair, sizes 1..2 -> 4 + 1 instances; d=2: 4 pairs x (16+36+16+1)
    assert report.attempted == 5 + 4 * 69
    assert report.ok and report.routed == report.oracle_agreed == report.attempted
    assert report.attempted == report.routed + report.failed


def test_sweep_is_reproducible_byte_for_byte():
    cfg = dict(d=[3], router="pow2", perms=3, relabels=2, sizes="pow2", subsets=4, seed=11)
    first = run_sweep(SweepConfig(**cfg)).dumps()
    second = run_sweep(SweepConfig(**cfg)).dumps()
    assert first == second
    assert json.loads(first)["header"]["seed"] == 11


def test_records_are_kept_sorted():
    report = run_sweep(SweepConfig(d=[2], perms="identity", subsets=3, keep_records=True, seed=1))
    records = report.to_json()["records"]
    assert len(records) == report.attempted == 4 * 3
    assert all(r["outcome"] == "routed" and r["oracle_agreed"] for r in records)


def test_complement_and_mini_sweeps():
    assert run_sweep(SweepConfig(d=[2, 3], router="complement", perms=2, relabels=2, sizes="complement", subsets=5)).ok
    assert run_sweep(SweepConfig(d=[2, 3, 4], router="mini", perms="identity", sizes="mini", subsets=5)).ok


def test_probe_finds_single_butterfly_witness():
    report = run_sweep(SweepConfig(d=[3], router="probe"))
    assert report.ok and report.witnesses[0]["max_disjoint"] < len(report.witnesses[0]["A"])
    assert "witness" in report.summary()


def test_failures_are_recorded_with_replay_data():
    net = build_pair(2, middle_relabel=[1, 0, 2, 3])
    rec = run_instance(net, "general", [0], [0], random.Random(0))
    assert rec["outcome"] == "failed" and "UnsupportedNetworkError" in rec["error"]
    assert rec["relabel"] == [1, 0, 2, 3] and rec["A"] == ["00"]


@pytest.mark.parametrize(
    "bad",
    [
        dict(d=[5], perms="exhaustive"),
        dict(d=[0]),
        dict(d=[2], router="magic"),
        dict(d=[2], perms=0),
        dict(d=[2], relabels="all"),
        dict(d=[2], subsets=-1),
        dict(d=[2], sizes="odd"),
    ],
)
def test_config_validation(bad):
    with pytest.raises(PreconditionError):
        SweepConfig(**bad)


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"d": 2, "router": "general", "sizes": [1, 3]}))
    cfg = load_config(path)
    assert cfg.d == [2] and cfg.sizes == [1, 3]
    path.write_text(json.dumps({"d": 2, "colour": "blue"}))
    with pytest.raises(PreconditionError):
        load_config(path)
