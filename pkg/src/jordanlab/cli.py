"""Command-line interface: every command prints a JSON report on stdout.

Reports that describe a color graph carry it under ``"graph"``, and every
command that reads a graph accepts either the plain text format or such a
report, so commands can be chained with pipes.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import List, Optional

from .cc import ColorGraph, classify, graph_coloring
from .errors import JordanLabError, PreconditionError
from .io import dump_report, graph_document, parse_input, save_colorgraph, write_catalog

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _read_graph(path: Optional[str]) -> ColorGraph:
    if path is None or path == "-":
        return parse_input(sys.stdin.read())
    with open(path) as fh:
        return parse_input(fh.read())


def _graph_report(cg: ColorGraph) -> dict:
    return {"graph": graph_document(cg)}


def _check_doc(cg: ColorGraph) -> dict:
    from .permgrp import automorphism_group
    from .stabilize import is_proper

    rep = classify(cg)
    doc = {"n": cg.n, "r": cg.r, "report": rep.as_dict()}
    if rep.is_jordan_scheme:
        doc["properness"] = is_proper(cg, rep).as_dict()
        aut = automorphism_group(cg)
        doc["aut_order"] = aut.order()
        doc["aut_orbits"] = [len(o) for o in aut.orbits()]
    return doc


def cmd_construct(args):
    from . import constructions as con

    name = args.name
    if name in con.BUILTIN_NAMES:
        cg = con.builtin(name)
        params = {}
    elif name == "psl2":
        cg = con.psl2_ot_scheme(_required(args.q, "--q"))
        params = {"q": args.q}
    elif name == "gunnells":
        q = _required(args.q, "--q")
        alpha = _required(args.alpha, "--alpha")
        cg = graph_coloring(con.gunnells_graph(q, alpha))
        params = {"q": q, "alpha": alpha}
    elif name == "wfdf":
        d = args.d if args.d is not None else 2
        cg = con.wfdf_scheme(con.WfdfParams(d=d))
        params = {"d": d}
    else:
        raise PreconditionError(f"unknown construction {name!r}")
    doc = {"command": "construct", "name": name, "params": params, "n": cg.n, "r": cg.r}
    doc.update(_graph_report(cg))
    return doc, cg


def _required(value, flag):
    if value is None:
        raise PreconditionError(f"{flag} is required for this construction")
    return value


def cmd_stabilize(args):
    from .stabilize import jordan_closure, wl_closure

    cg = _read_graph(args.file)
    res = wl_closure(cg) if args.mode == "wl" else jordan_closure(cg)
    doc = {"command": "stabilize", "mode": args.mode, "rank": res.rank, "rounds": res.rounds}
    doc.update(_graph_report(res.closure))
    return doc, res.closure


def cmd_check(args):
    cg = _read_graph(args.file)
    doc = {"command": "check"}
    doc.update(_check_doc(cg))
    return doc, None


def cmd_aut(args):
    from .permgrp import automorphism_group, format_cycles

    cg = _read_graph(args.file)
    g = automorphism_group(cg)
    doc = {
        "command": "aut",
        "order": g.order(),
        "orbits": [list(o) for o in g.orbits()],
        "generators": [format_cycles(p) for p in g.generators],
    }
    return doc, None


def cmd_caut(args):
    from .permgrp import color_automorphism_group, format_cycles

    cg = _read_graph(args.file)
    g = color_automorphism_group(cg)
    doc = {
        "command": "caut",
        "order": g.order(),
        "generators": [format_cycles(p) for p in g.generators],
    }
    return doc, None


def cmd_iso(args):
    from .permgrp import isomorphic

    a = _read_graph(args.a)
    b = _read_graph(args.b)
    mode = "color-permuting" if args.color_permuting else "color-preserving"
    iso = isomorphic(a, b, mode)
    doc = {"command": "iso", "mode": mode, "isomorphic": iso is not None}
    if iso is not None:
        doc["vertex_map"] = list(iso.vertex_map)
        doc["color_map"] = list(iso.color_map)
    return doc, None


def cmd_two_orbits(args):
    from .permgrp import PermutationGroup, parse_generators, two_orbits

    gens = parse_generators(args.gens, args.n)
    g = PermutationGroup(args.n, gens)
    cg = two_orbits(g)
    doc = {"command": "two-orbits", "group_order": g.order(), "rank": cg.r}
    doc.update(_graph_report(cg))
    return doc, cg


def cmd_pregraph(args):
    from .constructions import pregraph

    pre = pregraph(_read_graph(args.file), args.fiber)
    doc = {"command": "pregraph", "fiber": args.fiber, "r": pre.graph.r, "labeling": pre.labeling.as_dict()}
    doc.update(_graph_report(pre.graph))
    return doc, pre.graph


def cmd_switch(args):
    from .constructions import pregraph, switch

    out = switch(pregraph(_read_graph(args.file), args.fiber), args.keep)
    doc = {"command": "switch", "fiber": args.fiber, "keep": args.keep, "r": out.r}
    doc.update(_graph_report(out))
    return doc, out


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise PreconditionError(f"expected comma-separated integers, got {text!r}") from None


def cmd_mergings(args):
    from .enumerate import MergingConstraints, find_mergings, merging_report

    cg = _read_graph(args.file)
    vals = _int_list(args.valencies) if args.valencies else None
    found = find_mergings(cg, MergingConstraints(args.target, args.rank, vals))
    doc = {
        "command": "mergings",
        "target": args.target,
        "count": len(found),
        "mergings": [merging_report(cg, m) for m in found],
    }
    return doc, None


def cmd_enumerate(args):
    from .enumerate import EnumerationTask, enumerate_jordan_schemes

    vals = None
    if args.valencies:
        vals = tuple(_int_list(v) for v in args.valencies.split(";"))
    task = EnumerationTask(
        n=args.n,
        min_rank=args.min_rank,
        max_rank=args.max_rank,
        valencies=vals,
        proper_only=args.proper_only,
        node_limit=args.node_limit,
        time_limit=args.time_limit,
        threads=args.threads,
    )
    res = enumerate_jordan_schemes(task)
    doc = {"command": "enumerate"}
    doc.update(res.as_dict())
    records = [
        (s.graph, [f"valencies {list(s.valencies)}", f"proper {str(s.properness.proper).lower()}"])
        for s in res.schemes
    ]
    header = [f"order {res.n}", f"count {res.count}", f"status {res.status}"]
    return doc, ("catalog", write_catalog(records, header))


def cmd_intersection_array(args):
    from .stabilize import intersection_array

    cg = _read_graph(args.file)
    if not 0 <= args.color < cg.r:
        raise PreconditionError(f"color {args.color} out of range [0, {cg.r})")
    arr = intersection_array(cg.cells == args.color)
    doc = {"command": "intersection-array", "color": args.color, "distance_regular": arr is not None}
    if arr is not None:
        doc["array"] = str(arr)
        doc["b"] = list(arr.b)
        doc["c"] = list(arr.c)
    return doc, None


def _threads(value: Optional[int]) -> int:
    from .enumerate import default_threads

    return value if value is not None else default_threads()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the resulting data file here")
    common.add_argument("--verbose", action="store_true", help="human summary on stderr")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: JORDANLAB_THREADS or CPU count)")

    parser = argparse.ArgumentParser(prog="jordanlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a named color graph")
    p.add_argument("name", choices=["j15", "s12", "shah6", "petersen", "heawood", "psl2", "gunnells", "wfdf"])
    p.add_argument("--q", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--d", type=int)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("stabilize", parents=[common], help="WL or Jordan closure")
    p.add_argument("--mode", choices=["wl", "jordan"], default="wl")
    p.add_argument("file", nargs="?")
    p.set_defaults(func=cmd_stabilize)

    for name, func, text in (
        ("check", cmd_check, "classification and properness"),
        ("aut", cmd_aut, "automorphism group"),
        ("caut", cmd_caut, "color automorphism group"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file", nargs="?")
        p.set_defaults(func=func)

    p = sub.add_parser("iso", parents=[common], help="isomorphism test")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--color-permuting", action="store_true")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("two-orbits", parents=[common], help="2-orbit configuration of a group")
    p.add_argument("--gens", required=True, help='cycle notation, e.g. "(0,1,2)(3,4,5);(0,3)"')
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_two_orbits)

    p = sub.add_parser("pregraph", parents=[common], help="split a rank-2l scheme along a thin fiber")
    p.add_argument("file", nargs="?")
    p.add_argument("--fiber", type=int, default=0)
    p.set_defaults(func=cmd_pregraph)

    p = sub.add_parser("switch", parents=[common], help="bridge switching of a pregraph")
    p.add_argument("file", nargs="?")
    p.add_argument("--fiber", type=int, default=0)
    p.add_argument("--keep", type=int, default=0)
    p.set_defaults(func=cmd_switch)

    p = sub.add_parser("mergings", parents=[common], help="merging (fusion) search")
    p.add_argument("file", nargs="?")
    p.add_argument("--target", choices=["as", "js"], required=True)
    p.add_argument("--rank", type=int)
    p.add_argument("--valencies", help="comma-separated multiset, e.g. 1,2,4,4,4")
    p.set_defaults(func=cmd_mergings)

    p = sub.add_parser("enumerate", parents=[common], help="Jordan schemes of a small order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--proper-only", action="store_true")
    p.add_argument("--min-rank", type=int, default=5)
    p.add_argument("--max-rank", type=int)
    p.add_argument("--valencies", help="multisets separated by ';', e.g. 1,1,2,2,2;1,1,1,1,4")
    p.add_argument("--node-limit", type=int)
    p.add_argument("--time-limit", type=float)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("intersection-array", parents=[common], help="intersection array of one color")
    p.add_argument("file", nargs="?")
    p.add_argument("--color", type=int, required=True)
    p.set_defaults(func=cmd_intersection_array)
    return parser


def _summary(doc: dict) -> str:
    keys = ("command", "n", "r", "rank", "order", "count", "isomorphic", "array", "status")
    parts = [f"{k}={doc[k]}" for k in keys if k in doc]
    if "report" in doc:
        parts.append(f"is_jordan_scheme={doc['report']['is_jordan_scheme']}")
        parts.append(f"is_cc={doc['report']['is_cc']}")
    if "properness" in doc:
        parts.append(f"proper={doc['properness']['proper']}")
    return " ".join(parts)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        args.threads = _threads(args.threads)
        start = time.monotonic()
        doc, data = args.func(args)
        if args.output and data is not None:
            if isinstance(data, tuple):
                with open(args.output, "w") as fh:
                    fh.write(data[1])
            else:
                save_colorgraph(data, args.output, [f"jordanlab {args.command}"])
        sys.stdout.write(dump_report(doc))
        if args.verbose:
            print(f"{_summary(doc)} elapsed={time.monotonic() - start:.3f}s", file=sys.stderr)
    except JordanLabError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
