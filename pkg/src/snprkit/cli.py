"""Command line entry point: ``snprkit <command> ...``.

Inputs are eNewick strings or paths to files holding them (the first
network of a file is used).  Exit status is 0 on success, 1 on a domain
error (a JSON error record is written to stdout) and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .display import displayed_trees
from .forest import dsnpr_via_displayed, maf_tree_network, snpr_sequence_from_forest
from .moves import MINUS, PLUS, ZERO, neighbors
from .network import (
    Network,
    NetworkError,
    is_reticulation_visible,
    is_tree,
    is_tree_based,
    is_tree_child,
)
from .newick import parse_enewick, read_enewick_file, write_enewick
from .oracle import CLASSES, SearchConfig, bfs_distance, geodesic_sequences, realise
from .rspr import maximum_agreement_forest


def _load(text: str) -> Network:
    if os.path.exists(text):
        nets = read_enewick_file(text)
        if not nets:
            raise NetworkError(f"{text}: no network found")
        return nets[0]
    if "(" not in text and ";" not in text:
        raise NetworkError(f"{text}: no such file")
    return parse_enewick(text)


def _summary(net: Network) -> dict:
    return {
        "leaves": len(net.leaves),
        "reticulations": len(net.reticulations),
        "vertices": len(net.children),
        "edges": len(net.edges),
    }


def cmd_validate(args):
    net = _load(args.network)
    return {"valid": True, **_summary(net), "network": write_enewick(net)}


def cmd_classify(args):
    net = _load(args.network)
    return {
        "tree": is_tree(net),
        "tree_child": is_tree_child(net),
        "reticulation_visible": is_reticulation_visible(net),
        "tree_based": is_tree_based(net),
        "reticulations": len(net.reticulations),
    }


def cmd_display(args):
    trees = [write_enewick(t) for t in displayed_trees(_load(args.network))]
    return {"count": len(trees), "trees": trees}


def cmd_neighbors(args):
    kinds = args.kind or [ZERO, PLUS, MINUS]
    out = [{"network": write_enewick(m), "move": mv.to_json()} for m, mv in neighbors(_load(args.network), kinds)]
    return {"count": len(out), "neighbors": out}


def cmd_rspr(args):
    forest = maximum_agreement_forest(_load(args.tree1), _load(args.tree2))
    return {"distance": forest.size - 1, "forest": forest.to_json()}


def cmd_dsnpr_tn(args):
    tree, net = _load(args.tree), _load(args.network)
    out = {"method": args.method}
    if args.method in ("maf", "both") or args.emit_sequence:
        forest, size = maf_tree_network(tree, net)
        out["distance"] = size.m
        out["forest"] = forest.to_json()
    if args.method in ("displayed", "both"):
        d = dsnpr_via_displayed(tree, net)
        if args.method == "both" and d != out["distance"]:
            raise NetworkError(f"methods disagree: maf gives {out['distance']}, displayed trees give {d}")
        out["distance"] = d
    if args.emit_sequence:
        seq = snpr_sequence_from_forest(forest, tree, net)
        out["sequence"] = seq.to_json()
    return out


def cmd_oracle(args):
    a, b = _load(args.network1), _load(args.network2)
    cfg = SearchConfig(max_reticulations=args.max_ret, class_restriction=args.cls, max_depth=args.max_depth)
    rep = bfs_distance(a, b, cfg)
    out = rep.to_json()
    if args.all_geodesics or args.trace:
        geos = []
        for nets in geodesic_sequences(rep, args.limit):
            if args.trace:
                geos.append(realise(nets).to_json())
            else:
                geos.append([write_enewick(n) for n in nets])
        out["geodesics"] = geos
    out["edge_identity"] = "edges followed through each move; subdivided or merged edges count as new"
    return out


def cmd_verify_figures(args):
    from .figures import run_battery

    rows = run_battery(args.fixtures)
    return {"passed": all(r["pass"] for r in rows), "checks": rows}


def _text(cmd: str, result: dict) -> str:
    if cmd == "display":
        return "\n".join([f"# {result['count']} displayed trees"] + result["trees"])
    if cmd == "neighbors":
        return "\n".join([f"# {result['count']} neighbours"] + [n["network"] for n in result["neighbors"]])
    if cmd == "verify-paper":
        width = max(len(r["check"]) for r in result["checks"])
        lines = [f"{r['check']:<{width}}  {'PASS' if r['pass'] else 'FAIL'}  {r['detail']}" for r in result["checks"]]
        return "\n".join(lines)
    lines = []
    for k, v in result.items():
        if isinstance(v, (list, dict)):
            v = json.dumps(v, ensure_ascii=False)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snprkit", description="SNPR distances on rooted binary phylogenetic networks.")
    parser.add_argument("--format", choices=["json", "text"], default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a network")
    p.add_argument("network")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="tree-child / reticulation-visible / tree-based membership")
    p.add_argument("network")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("display", help="list the displayed trees")
    p.add_argument("network")
    p.set_defaults(func=cmd_display)

    p = sub.add_parser("neighbors", help="all networks one SNPR away")
    p.add_argument("network")
    p.add_argument("--kind", action="append", choices=[ZERO, PLUS, MINUS])
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("rspr", help="rSPR distance and a maximum agreement forest of two trees")
    p.add_argument("tree1")
    p.add_argument("tree2")
    p.set_defaults(func=cmd_rspr)

    p = sub.add_parser("dsnpr-tn", help="SNPR distance between a tree and a network")
    p.add_argument("tree")
    p.add_argument("network")
    p.add_argument("--method", choices=["maf", "displayed", "both"], default="maf")
    p.add_argument("--emit-sequence", action="store_true")
    p.set_defaults(func=cmd_dsnpr_tn)

    p = sub.add_parser("oracle", help="exact distance by breadth-first search")
    p.add_argument("network1")
    p.add_argument("network2")
    p.add_argument("--class", dest="cls", choices=sorted(CLASSES), default="none")
    p.add_argument("--max-ret", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--all-geodesics", action="store_true")
    p.add_argument("--limit", type=int, help="stop listing geodesics after this many")
    p.add_argument("--trace", action="store_true", help="list geodesics as replayable move sequences")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify-paper", help="run the figure fixture battery")
    p.add_argument("--fixtures", help="directory holding figN-*.enwk files")
    p.set_defaults(func=cmd_verify_figures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (NetworkError, OSError, ValueError) as exc:
        rec = {"error": type(exc).__name__, "message": str(exc)}
        violations = getattr(exc, "violations", None)
        if violations:
            rec["violations"] = [v.to_json() for v in violations]
        print(json.dumps(rec, ensure_ascii=False))
        return 1
    if args.format == "json":
        print(json.dumps(result, ensure_ascii=False, indent=2))
    else:
        print(_text(args.command, result))
    if args.command == "verify-paper" and not result["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
