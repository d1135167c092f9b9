"""Command-line front end.

Exit codes: 0 success or accept, 1 reject or a non-confluence finding,
2 bad input or runtime error.
"""

from __future__ import annotations

import argparse
import csv
import random
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import confluence, encoding, engine, systems
from .errors import GraphError, NotFastRule, StepBudgetExceeded
from .graph import Graph, validate_graph
from .rules import apply, matches
from .textio import format_alphabet, format_graph, format_rule, format_system, load_document, parse_document

OK, REJECT, ERROR = 0, 1, 2

FAMILY_ALIASES = {
    "list": "linked_list",
    "tree": "perfect_binary_tree",
    "perfect": "perfect_binary_tree",
    "randtree": "binary_tree",
}


class CliError(Exception):
    pass


def _read(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_document(text)


def _graph(path: str) -> Graph:
    doc = _read(path)
    if not doc.graphs:
        raise CliError(f"{path}: no graph found")
    return doc.graph


def _rule(path: str, name: Optional[str]):
    doc = _read(path)
    if not doc.rules:
        raise CliError(f"{path}: no rule found")
    if name is None:
        return doc.rules[0]
    for r in doc.rules:
        if r.name == name:
            return r
    raise CliError(f"{path}: no rule named {name!r}")


def _system(name: str) -> systems.NamedSystem:
    if name in systems.SYSTEMS:
        return systems.get_system(name)
    if not Path(name).exists():
        raise CliError(f"unknown system {name!r}: not a built-in ({', '.join(systems.SYSTEMS)}) "
                       "and not a file")
    doc = load_document(name)
    return systems.NamedSystem(doc.name or Path(name).stem, doc.alphabet, doc.rules, doc.accept,
                               start=doc.start)


def _root(value: Optional[str]):
    if value is None or value == "first":
        return value
    try:
        return int(value)
    except ValueError:
        raise CliError(f"--root expects a node id or 'first', got {value!r}") from None


def _fmt_map(m: dict) -> str:
    return "{" + ", ".join(f"{k}->{v}" for k, v in sorted(m.items())) + "}"


# -- subcommands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    doc = _read(args.file)
    problems = []
    for name, g in doc.graphs.items():
        problems += [f"graph {name}: {p}" for p in validate_graph(g)]
    for p in problems:
        print(p)
    if problems:
        return ERROR
    print(f"ok: {len(doc.graphs)} graph(s), {len(doc.rules)} rule(s)")
    print(format_alphabet(doc.alphabet))
    if args.format == "full":
        for r in doc.rules:
            print(f"rule {r.name}: fast={engine.is_fast(r)} standard={r.is_standard()}")
    return OK


def cmd_match(args) -> int:
    r = _rule(args.rule, args.name)
    g = _graph(args.graph)
    found = engine.rooted_matches(r, g) if args.rooted else matches(r, g)
    print(f"{len(found)} match(es)")
    if args.format == "full":
        for i, m in enumerate(found):
            print(f"match {i}: nodes {_fmt_map(m.node_map)} edges {_fmt_map(m.edge_map)}")
    return OK


def cmd_apply(args) -> int:
    r = _rule(args.rule, args.name)
    g = _graph(args.graph)
    found = matches(r, g)
    if args.match == "all":
        chosen = found
    else:
        try:
            chosen = [found[int(args.match)]]
        except (ValueError, IndexError):
            raise CliError(f"--match {args.match}: {len(found)} match(es) available") from None
    for i, m in enumerate(chosen):
        print(format_graph(apply(r, m).result, name=f"result{i}"), end="")
    return OK


def cmd_reduce(args) -> int:
    s = _system(args.system)
    g = _graph(args.graph)
    strategy = engine.ALL_NORMAL_FORMS if args.strategy == "all" else engine.FIRST_MATCH
    cfg = engine.EngineConfig(max_steps=args.max_steps, strategy=strategy)
    red = engine.reduce(s.rules, g, cfg)
    forms = red.alternatives or [(red.normal_form, red.trace)]
    for i, (nf, tr) in enumerate(forms):
        print(f"# normal form {i} after {len(tr)} step(s)")
        if args.trace:
            for k, st in enumerate(tr.steps):
                print(f"# step {k}: {st.rule.name} at {_fmt_map(st.node_map)}")
        if args.format == "full" or i == 0:
            print(format_graph(nf, name=f"nf{i}"), end="")
    return OK


def cmd_recognize(args) -> int:
    s = _system(args.system)
    if s.accept is None:
        raise CliError(f"system {s.name} has no accepting graph")
    g = _graph(args.graph)
    if args.root is not None:
        g = systems.place_root(g, _root(args.root))
    cfg = engine.EngineConfig(max_steps=args.max_steps)
    rep = engine.recognize_report(s.rules, g, s.accept, cfg)
    print("ACCEPT" if rep.accepted else "REJECT")
    if args.format == "full":
        print(f"steps={len(rep.reduction.steps)} fast={rep.fast}")
    return OK if rep.accepted else REJECT


def cmd_pairs(args) -> int:
    s = _system(args.system)
    pred = confluence.predicate(args.garbage) if args.garbage else None
    rep = confluence.analyze(s.rules, pred, depth=args.depth)
    print(rep.render(full=args.format == "full"), end="")
    return REJECT if rep.conclusion == confluence.WITNESS else OK


def _renaming(a, rename: bool) -> encoding.Renaming:
    rn = encoding.Renaming(a)
    if not rn.identity and not rename:
        try:
            encoding.check_convention(a)
        except encoding.AlphabetClash as exc:
            raise CliError(f"{exc} (pass --rename to relabel first)") from None
    return rn


def cmd_encode(args) -> int:
    if args.graph:
        g = _graph(args.graph)
        rn = _renaming(g.alphabet, args.rename)
        print(format_graph(encoding.encode_graph(rn.graph(g))), end="")
    else:
        doc = _read(args.rule)
        if not doc.rules:
            raise CliError(f"{args.rule}: no rule found")
        rn = _renaming(doc.alphabet, args.rename)
        rules = [encoding.encode_rule(rn.rule(r)) for r in doc.rules]
        print(format_system(rules, rules[0].alphabet), end="")
    return OK


def cmd_gen(args) -> int:
    family = FAMILY_ALIASES.get(args.family, args.family)
    g = systems.generate(family, *args.size, root=_root(args.root), seed=args.seed)
    if args.mutate:
        m = systems.mutate(g, args.mutate, random.Random(args.seed))
        if m is None:
            raise CliError(f"mutation {args.mutate!r} is not possible on this graph")
        g = m
    print(format_graph(g), end="")
    return OK


def _parse_sizes(text: str) -> list[int]:
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise CliError(f"--sizes expects a:b:step or a comma list, got {text!r}") from None
    if len(nums) == 1 and "," not in text:
        return nums
    if len(nums) == 3:
        a, b, step = nums
        if step < 1 or a > b:
            raise CliError(f"bad size range {text!r}")
        return list(range(a, b + 1, step))
    raise CliError(f"--sizes expects a:b:step, got {text!r}")


def bench_one(system: str, family: str, size: int, repeats: int) -> engine.BenchRow:
    s = systems.get_system(system)
    g = systems.generate(FAMILY_ALIASES.get(family, family), size, root="first")
    runs = [engine.timed_reduce(s.rules, g) for _ in range(repeats)]
    steps, _, visited = runs[0]
    wall = int(statistics.median(r[1] for r in runs))
    return engine.BenchRow(family, g.num_nodes, steps, wall, visited)


def cmd_bench(args) -> int:
    sizes = []
    for chunk in args.sizes.split(","):
        sizes += _parse_sizes(chunk)
    jobs = [(args.system, args.family, n, args.repeats) for n in sizes]
    if args.parallel:
        with ProcessPoolExecutor() as pool:
            rows = list(pool.map(bench_one, *zip(*jobs)))
    else:
        rows = [bench_one(*j) for j in jobs]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["family", "size", "steps", "wall_ns", "visited_items"])
        for r in rows:
            w.writerow([r.family, r.size, r.steps, r.wall_ns, r.visited_items])
    finally:
        if out is not sys.stdout:
            out.close()
    return OK


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("summary", "full"), default="summary")
    p = argparse.ArgumentParser(prog="artifact", description="Rooted graph rewriting toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a graph or rule file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    for name, func, helptext in (("match", cmd_match, "list matches of a rule"),
                                 ("apply", cmd_apply, "apply a rule at a match")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--rule", required=True)
        s.add_argument("--name", help="rule name when the file holds several")
        s.add_argument("--graph", required=True)
        if name == "match":
            s.add_argument("--rooted", action="store_true", help="use the root-anchored matcher")
        else:
            s.add_argument("--match", default="0", help="match index or 'all'")
        s.set_defaults(func=func)

    s = sub.add_parser("reduce", parents=[common], help="rewrite to normal form")
    s.add_argument("--system", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--strategy", choices=("first", "all"), default="first")
    s.add_argument("--max-steps", type=int)
    s.add_argument("--trace", action="store_true")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("recognize", parents=[common], help="decide membership by reduction")
    s.add_argument("--system", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--root", help="place the single root at this node id, or 'first'")
    s.add_argument("--max-steps", type=int)
    s.set_defaults(func=cmd_recognize)

    s = sub.add_parser("pairs", parents=[common], help="critical pair analysis")
    s.add_argument("--system", required=True)
    s.add_argument("--garbage", help="built-in predicate, e.g. cycles-have-t or forest-one-root")
    s.add_argument("--depth", type=int, default=8)
    s.set_defaults(func=cmd_pairs)

    s = sub.add_parser("encode", parents=[common], help="loop-encode a graph or rules")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--rule")
    s.add_argument("--rename", action="store_true",
                   help="rename labels first when the alphabet clashes with the encoding")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("gen", parents=[common], help="generate a family member")
    s.add_argument("--family", required=True,
                   choices=sorted(set(systems.FAMILIES) | set(FAMILY_ALIASES)))
    s.add_argument("--size", required=True, type=int, nargs="+")
    s.add_argument("--root")
    s.add_argument("--seed", type=int)
    s.add_argument("--mutate", choices=systems.MUTATIONS)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", parents=[common], help="time first-match reduction over sizes")
    s.add_argument("--system", default="tree")
    s.add_argument("--family", required=True,
                   choices=sorted(set(systems.FAMILIES) | set(FAMILY_ALIASES)))
    s.add_argument("--sizes", required=True, help="a:b:step, several joined by commas")
    s.add_argument("--csv")
    s.add_argument("--repeats", type=int, default=3)
    s.add_argument("--parallel", action="store_true")
    s.set_defaults(func=cmd_bench)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        return args.func(args)
    except NotFastRule as exc:
        print(f"error: rule is not fast: {exc}", file=sys.stderr)
    except StepBudgetExceeded as exc:
        print(f"error: {exc} after {len(exc.trace)} step(s)", file=sys.stderr)
    except (GraphError, CliError, OSError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
    return ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
