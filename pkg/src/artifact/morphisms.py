"""Graph morphisms, backtracking morphism search and isomorphism."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional

from .errors import AlphabetMismatch
from .graph import Graph


@dataclass(eq=True)
class Morphism:
    source: Graph
    target: Graph
    node_map: dict = field(default_factory=dict)
    edge_map: dict = field(default_factory=dict)

    def key(self) -> tuple:
        """Lexicographic sort key: node images by ascending source id, then edges."""
        return (tuple(self.node_map[v] for v in sorted(self.node_map)),
                tuple(self.edge_map[e] for e in sorted(self.edge_map)))

    def is_injective(self) -> bool:
        return (len(set(self.node_map.values())) == len(self.node_map)
                and len(set(self.edge_map.values())) == len(self.edge_map))

    def is_surjective(self) -> bool:
        return (set(self.node_map.values()) == set(self.target._label)
                and set(self.edge_map.values()) == set(self.target._src))

    def node_image(self) -> set[int]:
        return set(self.node_map.values())

    def edge_image(self) -> set[int]:
        return set(self.edge_map.values())

    def __repr__(self) -> str:
        return f"Morphism(nodes={self.node_map}, edges={self.edge_map})"


def morphism_violations(m: Morphism) -> list[str]:
    """Check the structure/label/rootedness preservation conditions."""
    G, H = m.source, m.target
    bad = []
    if set(m.node_map) != set(G._label):
        bad.append("node map is not total")
    if set(m.edge_map) != set(G._src):
        bad.append("edge map is not total")
    for v, w in m.node_map.items():
        if w not in H._label:
            bad.append(f"node {v} maps outside target")
            continue
        lab = G._label.get(v)
        if lab is not None and H._label[w] != lab:
            bad.append(f"node {v}: label not preserved")
        r = G._rooted.get(v)
        if r is not None and H._rooted[w] != r:
            bad.append(f"node {v}: rootedness not preserved")
    for e, f in m.edge_map.items():
        if f not in H._src or e not in G._src:
            bad.append(f"edge {e} maps outside target")
            continue
        if m.node_map.get(G._src[e]) != H._src[f] or m.node_map.get(G._tgt[e]) != H._tgt[f]:
            bad.append(f"edge {e}: source/target not preserved")
        if G._elabel[e] != H._elabel[f]:
            bad.append(f"edge {e}: label not preserved")
    return bad


def identity(g: Graph) -> Morphism:
    return Morphism(g, g, {v: v for v in g._label}, {e: e for e in g._src})


def compose(second: Morphism, first: Morphism) -> Morphism:
    """second ∘ first."""
    return Morphism(first.source, second.target,
                    {v: second.node_map[w] for v, w in first.node_map.items()},
                    {e: second.edge_map[f] for e, f in first.edge_map.items()})


def inverse(m: Morphism) -> Morphism:
    return Morphism(m.target, m.source,
                    {w: v for v, w in m.node_map.items()},
                    {f: e for e, f in m.edge_map.items()})


# -- search --------------------------------------------------------------

HOM, INJ, ISO = "hom", "inj", "iso"


def _search_order(G: Graph, first: list[int]) -> list[int]:
    """Nodes ordered so that, where possible, each has an earlier neighbour."""

    def rank(v):
        return (G._rooted[v] is not True, G._label[v] is None, -G.degree(v), v)

    order: list[int] = []
    placed: set[int] = set()
    for v in first:
        if v not in placed:
            placed.add(v)
            order.append(v)
    remaining = sorted(G._label, key=rank)
    frontier: list[int] = list(order)
    while len(order) < len(G._label):
        if not frontier:
            start = next(v for v in remaining if v not in placed)
            placed.add(start)
            order.append(start)
            frontier.append(start)
        nxt = []
        for v in frontier:
            for e in sorted(G._out[v] | G._in[v]):
                w = G._tgt[e] if G._src[e] == v else G._src[e]
                if w not in placed:
                    placed.add(w)
                    order.append(w)
                    nxt.append(w)
        frontier = nxt
    return order


def iter_morphisms(G: Graph, H: Graph, mode: str = HOM,
                   fixed_nodes: Optional[dict] = None,
                   fixed_edges: Optional[dict] = None) -> Iterator[Morphism]:
    """Backtracking enumeration of morphisms G -> H.

    ``mode`` is one of hom (all), inj (injective) or iso (bijective and
    undefinedness preserving). ``fixed_nodes``/``fixed_edges`` pin images.
    """
    fixed_nodes = fixed_nodes or {}
    fixed_edges = fixed_edges or {}
    exact = mode == ISO
    distinct = mode != HOM
    if exact and (G.num_nodes != H.num_nodes or G.num_edges != H.num_edges):
        return
    if not G._label:
        if not G._src:
            yield Morphism(G, H, {}, {})
        return

    order = _search_order(G, sorted(fixed_nodes))
    pos = {v: i for i, v in enumerate(order)}
    # edges are mapped at the position of their later endpoint
    level_edges: list[list[int]] = [[] for _ in order]
    for e in sorted(G._src):
        level_edges[max(pos[G._src[e]], pos[G._tgt[e]])].append(e)
    # a placed neighbour (if any) narrows the candidate set
    anchor: list[Optional[tuple[int, bool]]] = []
    for i, v in enumerate(order):
        a = None
        for e in level_edges[i]:
            s, t = G._src[e], G._tgt[e]
            if s != t:
                a = (e, s == v)
                break
        anchor.append(a)

    nm: dict[int, int] = {}
    em: dict[int, int] = {}
    used_n: set[int] = set()
    used_e: set[int] = set()
    h_nodes = sorted(H._label)

    def node_ok(v: int, w: int) -> bool:
        if distinct and w in used_n:
            return False
        if exact:
            return (G._label[v] == H._label[w] and G._rooted[v] == H._rooted[w]
                    and len(G._out[v]) == len(H._out[w]) and len(G._in[v]) == len(H._in[w]))
        lab = G._label[v]
        if lab is not None and H._label[w] != lab:
            return False
        r = G._rooted[v]
        if r is not None and H._rooted[w] != r:
            return False
        if distinct and (len(H._out[w]) < len(G._out[v]) or len(H._in[w]) < len(G._in[v])):
            return False
        return True

    def options(i: int):
        v = order[i]
        if v in fixed_nodes:
            cands = [fixed_nodes[v]] if fixed_nodes[v] in H._label else []
        elif anchor[i] is not None:
            e, v_is_src = anchor[i]
            other = nm[G._tgt[e]] if v_is_src else nm[G._src[e]]
            lab = G._elabel[e]
            if v_is_src:
                cands = sorted({H._src[f] for f in H._in[other] if H._elabel[f] == lab})
            else:
                cands = sorted({H._tgt[f] for f in H._out[other] if H._elabel[f] == lab})
        else:
            cands = h_nodes
        for w in cands:
            if not node_ok(v, w):
                continue
            lists = []
            for e in level_edges[i]:
                s, t = G._src[e], G._tgt[e]
                hs = w if s == v else nm[s]
                ht = w if t == v else nm[t]
                lab = G._elabel[e]
                if e in fixed_edges:
                    f = fixed_edges[e]
                    ok = (f in H._src and H._src[f] == hs and H._tgt[f] == ht
                          and H._elabel[f] == lab and not (distinct and f in used_e))
                    cl = [f] if ok else []
                else:
                    cl = sorted(f for f in H._out[hs]
                                if H._tgt[f] == ht and H._elabel[f] == lab
                                and not (distinct and f in used_e))
                if not cl:
                    break
                lists.append(cl)
            else:
                for combo in product(*lists):
                    if distinct and len(set(combo)) != len(combo):
                        continue
                    yield w, combo

    n = len(order)
    stack = [options(0)]
    chosen: list[Optional[tuple]] = [None] * n

    def undo(i):
        w, combo = chosen[i]
        del nm[order[i]]
        used_n.discard(w)
        for e, f in zip(level_edges[i], combo):
            del em[e]
            used_e.discard(f)
        chosen[i] = None

    while stack:
        i = len(stack) - 1
        if chosen[i] is not None:
            undo(i)
        opt = next(stack[i], None)
        if opt is None:
            stack.pop()
            continue
        w, combo = opt
        nm[order[i]] = w
        used_n.add(w)
        for e, f in zip(level_edges[i], combo):
            em[e] = f
            used_e.add(f)
        chosen[i] = opt
        if i + 1 == n:
            yield Morphism(G, H, dict(nm), dict(em))
        else:
            stack.append(options(i + 1))


def _check_alphabets(G: Graph, H: Graph) -> None:
    if G.alphabet != H.alphabet:
        raise AlphabetMismatch(f"{G.alphabet!r} vs {H.alphabet!r}")


def find_morphisms(G: Graph, H: Graph, injective_only: bool = False) -> list[Morphism]:
    """All (injective) morphisms G -> H, sorted lexicographically by node map."""
    _check_alphabets(G, H)
    found = list(iter_morphisms(G, H, INJ if injective_only else HOM))
    found.sort(key=Morphism.key)
    return found


def invariants(g: Graph) -> tuple:
    nodes = Counter((g._label[v] or "", g._rooted[v] is None, bool(g._rooted[v]),
                     len(g._in[v]), len(g._out[v])) for v in g._label)
    edges = Counter(g._elabel.values())
    return (g.num_nodes, g.num_edges, tuple(sorted(nodes.items())), tuple(sorted(edges.items())))


def is_isomorphic(G: Graph, H: Graph, fixed_nodes: Optional[dict] = None) -> Optional[Morphism]:
    """Witness isomorphism G -> H, or None."""
    if G.alphabet != H.alphabet:
        return None
    if invariants(G) != invariants(H):
        return None
    return next(iter_morphisms(G, H, ISO, fixed_nodes=fixed_nodes), None)


def signature(g: Graph, rounds: int = 3) -> tuple:
    """Isomorphism-invariant hash key (colour refinement); equal for isomorphic graphs."""
    colour = {v: hash((g._label[v], g._rooted[v])) for v in g._label}
    for _ in range(rounds):
        colour = {
            v: hash((colour[v],
                     tuple(sorted((g._elabel[e], colour[g._tgt[e]]) for e in g._out[v])),
                     tuple(sorted((g._elabel[e], colour[g._src[e]]) for e in g._in[v]))))
            for v in g._label
        }
    return invariants(g) + (tuple(sorted(colour.values())),)
