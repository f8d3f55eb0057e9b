"""Command line front end.

Exit codes: 0 success, 2 usage error, 3 precondition violated,
4 unsupported network, 5 internal invariant broken, 6 I/O error,
7 verification failed (invalid path set, failing sweep, no witness).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .connectivity import components_dot, components_json, connected_components, connectivity_graph
from .errors import ButterflyError, PreconditionError
from .oracle import max_vertex_disjoint, validate_path_set
from .routing import MODES, PathSet, route
from .sweep import load_config, run_sweep
from .topology import PairNetwork, build_pair, format_label, identity_perm, parse_label, reversal_perm

EXIT_OK = 0
EXIT_IO = 6
EXIT_VERIFY = 7
OUT_DIR_ENV = "BUTTERFLY_PAIRS_OUT_DIR"


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _labels(text: str | None, d: int, decimal: bool) -> list[int]:
    if not text:
        return []
    return [parse_label(x, d, decimal=decimal) for x in text.split(",") if x.strip()]


def _out_path(out: str) -> Path:
    path = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path = _out_path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n")


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _load_net(path: str) -> PairNetwork:
    return PairNetwork.from_descriptor(_read_json(path))


# -- subcommands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    d = args.d
    left = args.left_perm or list(identity_perm(d))
    right = args.right_perm or list(reversal_perm(d) if args.benes else identity_perm(d))
    if args.benes and args.right_perm:
        raise PreconditionError("--benes and --right-perm are mutually exclusive")
    net = build_pair(d, left, right, args.relabel)
    _emit(json.dumps(net.descriptor()), args.out)
    return EXIT_OK


def _parse_assignment(obj, d: int, decimal: bool) -> dict[int, int] | None:
    if obj is None:
        return None
    if isinstance(obj, str):
        pairs = [item.split(":") for item in obj.split(",") if item.strip()]
    elif isinstance(obj, dict):
        pairs = list(obj.items())
    else:
        pairs = list(obj)
    try:
        return {parse_label(a, d, decimal=decimal): parse_label(b, d, decimal=decimal) for a, b in pairs}
    except ValueError:
        raise PreconditionError("assignment must be pairs a:b") from None


def cmd_route(args) -> int:
    if args.request:
        req = _read_json(args.request)
        net = PairNetwork.from_descriptor(req["network"])
        d = net.d
        A = [parse_label(x, d, decimal=args.decimal) for x in req["A"]]
        B = [parse_label(x, d, decimal=args.decimal) for x in req["B"]]
        assignment = _parse_assignment(req.get("assignment"), d, args.decimal)
    else:
        if not args.network:
            raise PreconditionError("route needs a network file or --request")
        net = _load_net(args.network)
        d = net.d
        A = _labels(args.A, d, args.decimal)
        B = _labels(args.B, d, args.decimal)
        assignment = _parse_assignment(args.assignment, d, args.decimal)

    paths = route(net, A, B, mode=args.mode, assignment=assignment)
    report = validate_path_set(net, A, B, paths)
    if not report.valid:
        sys.stderr.write(f"router produced an invalid path set: {report.to_json()}\n")
        return EXIT_VERIFY
    plan = paths.info.get("plan")
    response = {
        "network": net.descriptor(),
        "A": [format_label(x, d) for x in sorted(A)],
        "B": [format_label(y, d) for y in sorted(B)],
        "paths": paths.to_json(),
        "plan": plan.to_json() if plan is not None else None,
        "stats": {
            "size": len(paths),
            "mode": paths.info.get("mode"),
            "levels": paths.info.get("levels"),
            "valid": True,
        },
    }
    _emit(json.dumps(response, indent=2), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    resp = _read_json(args.response)
    net = _load_net(args.network) if args.network else PairNetwork.from_descriptor(resp["network"])
    d = net.d
    A = _labels(args.A, d, args.decimal) if args.A else [parse_label(x, d) for x in resp["A"]]
    B = _labels(args.B, d, args.decimal) if args.B else [parse_label(x, d) for x in resp["B"]]
    paths = PathSet.from_json(d, resp["paths"])
    report = validate_path_set(net, A, B, paths)
    flow = max_vertex_disjoint(net, A, B, with_paths=False)
    out = report.to_json()
    out["oracle"] = flow.to_json(d)
    _emit(json.dumps(out, indent=2), args.out)
    return EXIT_OK if report.valid else EXIT_VERIFY


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    report = run_sweep(cfg)
    _emit(report.dumps(), args.out)
    sys.stderr.write(report.summary() + "\n")
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_export(args) -> int:
    net = _load_net(args.network)
    if args.what == "graph":
        text = net.to_dot()
    else:
        if args.q is None:
            raise PreconditionError(f"export {args.what} needs --q")
        g = connectivity_graph(net, args.q, enriched=args.enriched)
        if args.what == "connectivity":
            text = g.to_dot()
        else:
            comps = connected_components(g)
            text = components_json(comps) if args.json else components_dot(g, comps)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="butterfly-pairs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a network descriptor")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--left-perm", type=_ints)
    g.add_argument("--right-perm", type=_ints)
    g.add_argument("--relabel", type=_ints, help="middle relabel as 2**d comma-separated labels")
    g.add_argument("--benes", action="store_true", help="right butterfly consumes bits in reverse")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("route", help="route A to B and print the path set")
    r.add_argument("network", nargs="?")
    r.add_argument("--request", help="request JSON with network, A, B, assignment")
    r.add_argument("--A", help="comma-separated input labels")
    r.add_argument("--B", help="comma-separated output labels")
    r.add_argument("--assignment", help="a:b pairs for mini-rearrangeable routing")
    r.add_argument("--mode", choices=MODES, default="auto")
    r.add_argument("--decimal", action="store_true", help="labels are decimal, not bit-strings")
    r.add_argument("--out")
    r.set_defaults(func=cmd_route)

    v = sub.add_parser("verify", help="validate a route response and run the flow oracle")
    v.add_argument("response")
    v.add_argument("--network")
    v.add_argument("--A")
    v.add_argument("--B")
    v.add_argument("--decimal", action="store_true")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="run a verification sweep from a JSON config")
    s.add_argument("config")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("export", help="DOT export of the network or its connectivity graphs")
    e.add_argument("network")
    e.add_argument("--what", choices=("graph", "connectivity", "components"), default="graph")
    e.add_argument("--q", type=int)
    e.add_argument("--enriched", action="store_true")
    e.add_argument("--json", action="store_true", help="components as JSON instead of DOT")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ButterflyError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
