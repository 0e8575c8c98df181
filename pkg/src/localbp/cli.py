"""Command-line entry point: ``localbp <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments as ex
from .channels import ChannelSpecError, parse_channel
from .counterexamples import BUILTIN_CODES, code_from_matrix, find_witness
from .gf2 import project, read_alist, subcodebook_json
from .tanner import DirectedEdge


def load_code(spec: str, edge: str | None = None, iters: int = 1):
    """``builtin:sec2``, ``builtin:sec3`` or a path to an alist file."""
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in BUILTIN_CODES:
            raise ValueError(f"unknown builtin code {name!r}; choose from {sorted(BUILTIN_CODES)}")
        code = BUILTIN_CODES[name]()
        if edge is None and iters == 1:
            return code
        e = DirectedEdge.parse(edge) if edge else code.edge
        return code_from_matrix(code.H, e, depth=2 * iters, name=code.name)
    if edge is None:
        raise ValueError("--edge is required for codes loaded from alist files")
    return code_from_matrix(read_alist(spec), DirectedEdge.parse(edge), depth=2 * iters,
                            name=Path(spec).stem)


def _emit(payload: dict, out: str | None, fname: str) -> None:
    text = json.dumps(ex._jsonable(payload), indent=2, sort_keys=True)
    print(text)
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / fname).write_text(text + "\n")


def cmd_demo(args) -> bool:
    spec = args.code or f"builtin:sec{args.section}"
    code = load_code(spec, args.edge, args.iters)
    ch = parse_channel(args.channel)
    report = find_witness(code, ch, "sampled" if args.mode == "mc" else "exhaustive",
                          n_samples=args.trials, seed=args.seed)
    found = code.implicit()
    payload = {"code": code.name, "index_set": list(code.I),
               "tree_like": code.tree.is_tree_like,
               "implicit_constraints": found.astype(int).tolist(),
               "witness": report.to_dict()}
    _emit(payload, args.out, "witness.json")
    return True


def cmd_projection(args) -> bool:
    code = load_code(args.code, args.edge, args.iters)
    S = project(code.codebook, code.I)
    payload = json.loads(subcodebook_json(S))
    payload["implicit_constraints"] = code.implicit().astype(int).tolist()
    payload["local_checks"] = code.local_checks.astype(int).tolist()
    _emit(payload, args.out, "projection.json")
    return True


def cmd_a2(args) -> bool:
    code = load_code(args.code, args.edge, args.iters)
    r = ex.embedded_vs_tree_equivalence(code, parse_channel(args.channel), args.trials, args.seed)
    _emit({"code": code.name, "matches": r.matches, "total": r.total, "passed": r.passed},
          args.out, "a2.json")
    return r.passed


def cmd_b2(args) -> bool:
    code = load_code(args.code, args.edge, args.iters)
    r = ex.codeword_independence(code, parse_channel(args.channel))
    _emit({"code": code.name, **asdict(r), "passed": r.passed}, args.out, "b2.json")
    return r.passed


def cmd_monotonicity(args) -> bool:
    code = load_code(args.code, args.edge, args.iters)
    mode = {"exact": "exact", "mc": "mc"}.get(args.mode, "auto")
    r = ex.check_monotonicity(code, parse_channel(args.channel), args.degrade, mode=mode,
                              trials=args.trials, seed=args.seed)
    _emit({"code": code.name, **asdict(r)}, args.out, "monotonicity.json")
    return r.passed


def cmd_suite(args) -> bool:
    cfg = ex.SuiteConfig(seed=args.seed)
    if args.sections:
        cfg.sections = tuple(s.strip() for s in args.sections.split(","))
    if args.trials is not None:
        cfg.trials = args.trials
    summary = ex.run_suite(cfg, out_dir=args.out)
    print(json.dumps(ex._jsonable(summary), indent=2, sort_keys=True))
    return summary["passed"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localbp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, channel="bsc:0.1", trials=10_000, need_code=True):
        if need_code:
            p.add_argument("--code", default="builtin:sec3",
                           help="alist path, builtin:sec2 or builtin:sec3")
        p.add_argument("--edge", help="directed edge 'v,c' (default: the builtin code's edge)")
        p.add_argument("--iters", type=int, default=1, help="BP iteration l (neighborhood depth 2l)")
        p.add_argument("--channel", default=channel, help="bsc:p, biawgn:sigma or bec:eps")
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=("exact", "mc"), default=None,
                       help="exact sums or Monte Carlo (default: exact when feasible)")
        p.add_argument("--out", help="directory for JSON output")

    p = sub.add_parser("demo-counterexample", help="search for a BP vs local-ML witness")
    p.add_argument("--section", choices=("2", "3"), default="3")
    common(p, need_code=False)
    p.add_argument("--code", default=None, help="overrides --section")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("verify-projection", help="projected code, dual basis and implicit constraints")
    common(p)
    p.set_defaults(func=cmd_projection)

    p = sub.add_parser("check-a2", help="embedded vs standalone tree message equality")
    common(p, channel="biawgn:0.8")
    p.set_defaults(func=cmd_a2)

    p = sub.add_parser("check-b2", help="error probability independent of the transmitted codeword")
    common(p, channel="bsc:0.05")
    p.set_defaults(func=cmd_b2)

    p = sub.add_parser("check-monotonicity", help="error rate on W versus W degraded by q")
    common(p, channel="bsc:0.05", trials=100_000)
    p.add_argument("--degrade", type=float, default=0.0, help="auxiliary-channel parameter q")
    p.set_defaults(func=cmd_monotonicity)

    p = sub.add_parser("run-suite", help="run every check and write summary.json and tables")
    p.add_argument("--sections", help=f"comma-separated subset of {','.join(ex.SECTIONS)}")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ok = args.func(args)
    except (ChannelSpecError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
