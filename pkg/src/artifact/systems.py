"""Built-in rule systems, graph family generators, mutations and oracles."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence, Union

from .errors import BadSize
from .graph import BOX, SINGLETON, TREE_ALPHABET, Graph, LabelAlphabet
from .rules import Rule, invert
from .textio import parse_document


@dataclass
class NamedSystem:
    name: str
    alphabet: LabelAlphabet
    rules: list
    accept: Optional[Graph] = None
    input_contract: str = ""
    start: Optional[Graph] = None
    nonterminals: tuple = field(default_factory=lambda: (frozenset(), frozenset()))

    def inverse(self) -> "NamedSystem":
        """The recognition system of a grammar: inverted rules, start graph accepted."""
        return NamedSystem(self.name + "-inverse", self.alphabet, [invert(r) for r in self.rules],
                           accept=self.start, input_contract=f"terminally labelled graphs for {self.name}")


def _load(filename: str, contract: str) -> NamedSystem:
    text = resources.files("artifact.data").joinpath(filename).read_text(encoding="utf-8")
    doc = parse_document(text)
    return NamedSystem(doc.name or filename, doc.alphabet, doc.rules, doc.accept, contract, doc.start)


def tree_system() -> NamedSystem:
    return _load("tree.rules", "□-labelled graphs with exactly one root node")


def fbt_system() -> NamedSystem:
    return _load("fbt.rules", "□-labelled graphs with exactly one root node")


def tree_grammar() -> NamedSystem:
    return _load("tree_grammar.rules", "unrooted □-labelled graphs")


def efd_grammar() -> NamedSystem:
    return _load("efd.rules", "flow graphs over •, □, ◇ with t/f/□ edges")


SYSTEMS = {
    "tree": tree_system,
    "fbt": fbt_system,
    "tree-grammar": tree_grammar,
    "tree-grammar-inverse": lambda: tree_grammar().inverse(),
    "efd": efd_grammar,
    "efd-inverse": lambda: efd_grammar().inverse(),
}


def get_system(name: str) -> NamedSystem:
    try:
        return SYSTEMS[name]()
    except KeyError:
        raise KeyError(f"unknown system {name!r}; choose from {', '.join(SYSTEMS)}") from None


# -- generators -----------------------------------------------------------

FAMILIES = ("linked_list", "binary_tree", "perfect_binary_tree", "grid", "star", "cycle")

RootPlacement = Union[None, str, int]


def _finish(n: int, edges: list[tuple[int, int]], root: RootPlacement,
            alphabet: LabelAlphabet = SINGLETON) -> Graph:
    if root is None:
        rid = None
    elif root == "first":
        rid = 0
    elif isinstance(root, int) and 0 <= root < n:
        rid = root
    else:
        raise BadSize(f"root placement {root!r} is not a node")
    nodes = [(v, BOX, v == rid) for v in range(n)]
    return Graph(alphabet, nodes, [(i, s, t, BOX) for i, (s, t) in enumerate(edges)])


def generate(family: str, *sizes: int, root: RootPlacement = None, seed: Optional[int] = None,
             alphabet: LabelAlphabet = TREE_ALPHABET) -> Graph:
    """A member of a graph family, all labels □, optionally with one root.

    linked_list(n), binary_tree(n) (random, seeded), perfect_binary_tree(levels),
    grid(n, m), star(n satellites), cycle(n).
    """
    if not sizes or any((not isinstance(s, int)) or s < 1 for s in sizes):
        raise BadSize(f"{family}: sizes must be positive integers, got {sizes}")
    if family == "linked_list":
        n = sizes[0]
        edges = [(i, i + 1) for i in range(n - 1)]
    elif family == "binary_tree":
        n = sizes[0]
        rng = random.Random(seed)
        open_slots = [0, 0]
        edges = []
        for child in range(1, n):
            k = rng.randrange(len(open_slots))
            parent = open_slots[k]
            open_slots[k] = open_slots[-1]
            open_slots.pop()
            edges.append((parent, child))
            open_slots.extend((child, child))
    elif family == "perfect_binary_tree":
        n = 2 ** sizes[0] - 1
        edges = [((c - 1) // 2, c) for c in range(1, n)]
    elif family == "grid":
        rows, cols = sizes[0], sizes[1] if len(sizes) > 1 else sizes[0]
        n = rows * cols
        edges = []
        for i in range(rows):
            for j in range(cols):
                if j + 1 < cols:
                    edges.append((i * cols + j, i * cols + j + 1))
                if i + 1 < rows:
                    edges.append((i * cols + j, (i + 1) * cols + j))
    elif family == "star":
        k = sizes[0]
        n = k + 1
        edges = [(k, i) if i % 2 == 0 else (i, k) for i in range(k)]
    elif family == "cycle":
        n = sizes[0]
        edges = [(i, (i + 1) % n) for i in range(n)]
    else:
        raise BadSize(f"unknown family {family!r}")
    return _finish(n, edges, root, alphabet)


def place_root(g: Graph, root: RootPlacement) -> Graph:
    """Copy of g with exactly one root (or none), labels untouched."""
    ids = g.node_ids()
    rid = None if root is None else (ids[0] if root == "first" else root)
    if rid is not None and not g.has_node(rid):
        raise BadSize(f"root placement {root!r} is not a node")
    h = g.copy()
    for v in ids:
        h._set_node(v, h._label[v], v == rid)
    return h


# -- mutations ------------------------------------------------------------

MUTATIONS = ("parallel", "reverse", "cross", "disconnect")


def mutate(g: Graph, kind: str, rng: random.Random) -> Optional[Graph]:
    """One structural spoiler applied to a tree; None when the tree is too small."""
    edges = g.edge_ids()
    h = g.copy()
    fresh = g.max_edge_id() + 1
    if kind == "parallel":
        if not edges:
            return None
        e = rng.choice(edges)
        h._add_edge(fresh, g._src[e], g._tgt[e], g._elabel[e])
    elif kind == "reverse":
        # reversing an edge out of a node that has a parent gives it in-degree 2
        cands = [e for e in edges if g.indeg(g._src[e]) >= 1]
        if not cands:
            return None
        e = rng.choice(cands)
        s, t, lab = g._src[e], g._tgt[e], g._elabel[e]
        h._remove_edge(e)
        h._add_edge(e, t, s, lab)
    elif kind == "cross":
        targets = [v for v in g.node_ids() if g.indeg(v) == 1]
        if not targets:
            return None
        v = rng.choice(targets)
        parent = g._src[next(iter(g._in[v]))]
        sources = [u for u in g.node_ids() if u not in (v, parent)] or [v]
        h._add_edge(fresh, rng.choice(sources), v, BOX)
    elif kind == "disconnect":
        if not edges:
            return None
        h._remove_edge(rng.choice(edges))
    else:
        raise ValueError(f"unknown mutation {kind!r}")
    return h


# -- oracles --------------------------------------------------------------

def _connected(g: Graph) -> bool:
    if not g.num_nodes:
        return False
    start = next(iter(g._label))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e in g._out[v]:
            w = g._tgt[e]
            if w not in seen:
                seen.add(w)
                stack.append(w)
        for e in g._in[v]:
            w = g._src[e]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.num_nodes


def oracle_is_tree(g: Graph) -> bool:
    """Non-empty, connected, no undirected cycles, in-degree at most one."""
    if not g.num_nodes or g.num_edges != g.num_nodes - 1:
        return False
    if any(len(g._in[v]) > 1 for v in g._label):
        return False
    # connected with |E| = |V| - 1 rules out undirected cycles, loops and parallel edges
    return _connected(g)


def oracle_is_fbt(g: Graph) -> bool:
    return oracle_is_tree(g) and all(len(g._out[v]) in (0, 2) for v in g._label)


def oracle_cycles_have_t(g: Graph, t_label: str = "t") -> bool:
    """Every directed cycle uses a t-edge, i.e. the other edges form a DAG."""
    indeg = {v: 0 for v in g._label}
    succ: dict[int, list[int]] = {v: [] for v in g._label}
    for e in g._src:
        if g._elabel[e] != t_label:
            succ[g._src[e]].append(g._tgt[e])
            indeg[g._tgt[e]] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    done = 0
    while queue:
        v = queue.pop()
        done += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return done == len(indeg)


def strip(g: Graph) -> Graph:
    """Every node □ and unrooted, every edge □."""
    a = g.alphabet if BOX in g.alphabet.node_labels and BOX in g.alphabet.edge_labels else SINGLETON
    return Graph(a, [(v, BOX, False) for v in g.node_ids()],
                 [(e, g._src[e], g._tgt[e], BOX) for e in g.edge_ids()])


def accept_graph() -> Graph:
    return Graph(TREE_ALPHABET, [(0, BOX, True)])


def all_rules(systems: Sequence[NamedSystem]) -> list[Rule]:
    return [r for s in systems for r in s.rules]
