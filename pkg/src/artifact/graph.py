"""Graphs with partial node labels and partial rootedness.

A graph stores nodes and edges under explicit integer ids. Node labels and
rootedness may be undefined (``None``); edge labels are always defined.
Per-node incidence sets and a registry of rooted nodes keyed by label are
maintained alongside, so degree and root lookups are constant time.

Graphs are treated as values. The underscore-prefixed mutators exist for the
reduction engine, which owns a private working copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

Label = str


class NodeRec(NamedTuple):
    id: int
    label: Optional[Label] = None
    rooted: Optional[bool] = None


class EdgeRec(NamedTuple):
    id: int
    src: int
    tgt: int
    label: Label


@dataclass(frozen=True)
class LabelAlphabet:
    node_labels: frozenset
    edge_labels: frozenset

    @classmethod
    def of(cls, nodes: Iterable[Label], edges: Iterable[Label]) -> "LabelAlphabet":
        return cls(frozenset(nodes), frozenset(edges))

    def __repr__(self) -> str:
        return f"LabelAlphabet(nodes={sorted(self.node_labels)}, edges={sorted(self.edge_labels)})"


BOX = "□"
TRIANGLE = "△"

# the alphabet used for the unlabelled examples and the generated families
SINGLETON = LabelAlphabet.of([BOX], [BOX])
TREE_ALPHABET = LabelAlphabet.of([BOX, TRIANGLE], [BOX])


def _as_node(item) -> NodeRec:
    if isinstance(item, NodeRec):
        return item
    if isinstance(item, int):
        return NodeRec(item)
    return NodeRec(*item)


def _as_edge(item) -> EdgeRec:
    if isinstance(item, EdgeRec):
        return item
    return EdgeRec(*item)


class Graph:
    __slots__ = ("alphabet", "_label", "_rooted", "_src", "_tgt", "_elabel",
                 "_out", "_in", "_roots")

    def __init__(self, alphabet: LabelAlphabet, nodes: Iterable = (), edges: Iterable = ()):
        self.alphabet = alphabet
        self._label: dict[int, Optional[Label]] = {}
        self._rooted: dict[int, Optional[bool]] = {}
        self._src: dict[int, int] = {}
        self._tgt: dict[int, int] = {}
        self._elabel: dict[int, Label] = {}
        self._out: dict[int, set[int]] = {}
        self._in: dict[int, set[int]] = {}
        self._roots: dict[Optional[Label], set[int]] = {}
        for n in nodes:
            n = _as_node(n)
            if n.id in self._label:
                raise ValueError(f"duplicate node id {n.id}")
            self._add_node(n.id, n.label, n.rooted)
        for e in edges:
            e = _as_edge(e)
            if e.id in self._src:
                raise ValueError(f"duplicate edge id {e.id}")
            for end in (e.src, e.tgt):
                if end not in self._label:
                    raise ValueError(f"edge {e.id}: endpoint {end} is not a node")
            self._add_edge(e.id, e.src, e.tgt, e.label)

    # -- queries -----------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self._label)

    @property
    def num_edges(self) -> int:
        return len(self._src)

    def __len__(self) -> int:
        return len(self._label)

    def has_node(self, v: int) -> bool:
        return v in self._label

    def has_edge(self, e: int) -> bool:
        return e in self._src

    def node_ids(self) -> list[int]:
        return sorted(self._label)

    def edge_ids(self) -> list[int]:
        return sorted(self._src)

    def nodes(self) -> Iterator[NodeRec]:
        for v in sorted(self._label):
            yield NodeRec(v, self._label[v], self._rooted[v])

    def edges(self) -> Iterator[EdgeRec]:
        for e in sorted(self._src):
            yield EdgeRec(e, self._src[e], self._tgt[e], self._elabel[e])

    def node(self, v: int) -> NodeRec:
        return NodeRec(v, self._label[v], self._rooted[v])

    def edge(self, e: int) -> EdgeRec:
        return EdgeRec(e, self._src[e], self._tgt[e], self._elabel[e])

    def label(self, v: int) -> Optional[Label]:
        return self._label[v]

    def rooted(self, v: int) -> Optional[bool]:
        return self._rooted[v]

    def src(self, e: int) -> int:
        return self._src[e]

    def tgt(self, e: int) -> int:
        return self._tgt[e]

    def edge_label(self, e: int) -> Label:
        return self._elabel[e]

    def out_edges(self, v: int) -> set[int]:
        return self._out[v]

    def in_edges(self, v: int) -> set[int]:
        return self._in[v]

    def outdeg(self, v: int) -> int:
        return len(self._out[v])

    def indeg(self, v: int) -> int:
        return len(self._in[v])

    def degree(self, v: int) -> int:
        # a loop counts once in each direction
        return len(self._out[v]) + len(self._in[v])

    def incident_edges(self, v: int) -> set[int]:
        return self._out[v] | self._in[v]

    def roots(self) -> list[int]:
        out: list[int] = []
        for ids in self._roots.values():
            out.extend(ids)
        return sorted(out)

    def roots_with_label(self, label: Optional[Label]) -> set[int]:
        return self._roots.get(label, set())

    def root_count(self) -> int:
        return sum(len(s) for s in self._roots.values())

    def is_totally_labelled(self) -> bool:
        return all(lab is not None for lab in self._label.values())

    def is_totally_rooted(self) -> bool:
        return all(r is not None for r in self._rooted.values())

    def is_total(self) -> bool:
        return self.is_totally_labelled() and self.is_totally_rooted()

    def max_node_id(self) -> int:
        return max(self._label, default=-1)

    def max_edge_id(self) -> int:
        return max(self._src, default=-1)

    def neighbours(self, v: int) -> set[int]:
        out = {self._tgt[e] for e in self._out[v]}
        out.update(self._src[e] for e in self._in[v])
        return out

    # -- value semantics ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.alphabet == other.alphabet
                and self._label == other._label
                and self._rooted == other._rooted
                and self._src == other._src
                and self._tgt == other._tgt
                and self._elabel == other._elabel)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(|V|={self.num_nodes}, |E|={self.num_edges})"

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.alphabet = self.alphabet
        g._label = dict(self._label)
        g._rooted = dict(self._rooted)
        g._src = dict(self._src)
        g._tgt = dict(self._tgt)
        g._elabel = dict(self._elabel)
        g._out = {v: set(s) for v, s in self._out.items()}
        g._in = {v: set(s) for v, s in self._in.items()}
        g._roots = {k: set(s) for k, s in self._roots.items() if s}
        return g

    def with_alphabet(self, alphabet: LabelAlphabet) -> "Graph":
        g = self.copy()
        g.alphabet = alphabet
        return g

    # -- mutators (engine-private) -------------------------------------------

    def _add_node(self, v: int, label: Optional[Label], rooted: Optional[bool]) -> None:
        self._label[v] = label
        self._rooted[v] = rooted
        self._out[v] = set()
        self._in[v] = set()
        if rooted:
            self._roots.setdefault(label, set()).add(v)

    def _remove_node(self, v: int) -> None:
        if self._rooted[v]:
            self._roots[self._label[v]].discard(v)
        del self._label[v], self._rooted[v], self._out[v], self._in[v]

    def _set_node(self, v: int, label: Optional[Label], rooted: Optional[bool]) -> None:
        if self._rooted[v]:
            self._roots[self._label[v]].discard(v)
        self._label[v] = label
        self._rooted[v] = rooted
        if rooted:
            self._roots.setdefault(label, set()).add(v)

    def _add_edge(self, e: int, s: int, t: int, label: Label) -> None:
        self._src[e] = s
        self._tgt[e] = t
        self._elabel[e] = label
        if s in self._out:
            self._out[s].add(e)
        if t in self._in:
            self._in[t].add(e)

    def _remove_edge(self, e: int) -> None:
        s = self._src.pop(e)
        t = self._tgt.pop(e)
        del self._elabel[e]
        if s in self._out:
            self._out[s].discard(e)
        if t in self._in:
            self._in[t].discard(e)


def validate_graph(g: Graph, a: Optional[LabelAlphabet] = None) -> list[str]:
    """Return the list of invariant violations; an empty list means ok."""
    a = g.alphabet if a is None else a
    problems: list[str] = []
    for v in sorted(g._label):
        if not isinstance(v, int) or v < 0:
            problems.append(f"node {v}: id must be a non-negative integer")
        lab = g._label[v]
        if lab is not None and lab not in a.node_labels:
            problems.append(f"node {v}: label {lab!r} not in alphabet")
        r = g._rooted[v]
        if r is not None and not isinstance(r, bool):
            problems.append(f"node {v}: rootedness must be a boolean or undefined")
    for e in sorted(g._src):
        if not isinstance(e, int) or e < 0:
            problems.append(f"edge {e}: id must be a non-negative integer")
        if g._src[e] not in g._label:
            problems.append(f"edge {e}: source {g._src[e]} is not a node")
        if g._tgt[e] not in g._label:
            problems.append(f"edge {e}: target {g._tgt[e]} is not a node")
        if g._elabel[e] not in a.edge_labels:
            problems.append(f"edge {e}: label {g._elabel[e]!r} not in alphabet")
    return problems


class DegreeStats(NamedTuple):
    max_degree: int
    root_count: int


def degree_stats(g: Graph) -> DegreeStats:
    mx = max((g.degree(v) for v in g._label), default=0)
    return DegreeStats(mx, g.root_count())


def components(g: Graph) -> list[list[int]]:
    """Undirected connected components, each sorted, ordered by least node id."""
    seen: set[int] = set()
    comps = []
    for start in sorted(g._label):
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in g.neighbours(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def induced_edges(g: Graph, nodes: set[int]) -> list[int]:
    return [e for e in sorted(g._src) if g._src[e] in nodes and g._tgt[e] in nodes]
