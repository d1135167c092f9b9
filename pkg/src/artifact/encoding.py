"""Encoding partially labelled rooted graphs as totally labelled loop-decorated graphs.

Every node becomes a □ node that is not rooted. A defined label becomes a loop
carrying that label and defined rootedness becomes a loop labelled "0" or "1".
Edge ids are spaced so the kind of an encoded edge is visible from its id:
original edge e is 3e, the label loop of node v is 3v+1, the root loop 3v+2.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Optional

from .errors import AlphabetClash, NotInImage
from .graph import BOX, Graph, LabelAlphabet
from .morphisms import Morphism, is_isomorphic
from .rules import Rule, apply, matches

ROOT_LABELS = {True: "1", False: "0"}
RESERVED = frozenset({BOX, "0", "1"})


def check_convention(a: LabelAlphabet) -> None:
    problems = []
    both = a.node_labels & a.edge_labels
    if both:
        problems.append(f"labels used for nodes and edges: {sorted(both)}")
    reserved = (a.node_labels | a.edge_labels) & RESERVED
    if reserved:
        problems.append(f"reserved labels in alphabet: {sorted(reserved)}")
    if problems:
        raise AlphabetClash("; ".join(problems))


def encoded_alphabet(a: LabelAlphabet) -> LabelAlphabet:
    check_convention(a)
    return LabelAlphabet.of({BOX}, a.edge_labels | a.node_labels | {"0", "1"})


def encode_graph(g: Graph) -> Graph:
    ea = encoded_alphabet(g.alphabet)
    edges = [(3 * e, g._src[e], g._tgt[e], g._elabel[e]) for e in g._src]
    for v in g._label:
        if g._label[v] is not None:
            edges.append((3 * v + 1, v, v, g._label[v]))
        if g._rooted[v] is not None:
            edges.append((3 * v + 2, v, v, ROOT_LABELS[g._rooted[v]]))
    return Graph(ea, [(v, BOX, False) for v in sorted(g._label)], sorted(edges))


def encode_morphism(m: Morphism) -> Morphism:
    G = m.source
    em = {3 * e: 3 * f for e, f in m.edge_map.items()}
    for v, w in m.node_map.items():
        if G._label[v] is not None:
            em[3 * v + 1] = 3 * w + 1
        if G._rooted[v] is not None:
            em[3 * v + 2] = 3 * w + 2
    return Morphism(encode_graph(G), encode_graph(m.target), dict(m.node_map), em)


def encode_rule(r: Rule) -> Rule:
    return Rule(r.name, encode_graph(r.left), encode_graph(r.interface), encode_graph(r.right))


def decode_graph(g: Graph, original: LabelAlphabet) -> Graph:
    """Inverse of encode_graph up to edge ids; NotInImage on malformed input.

    Loops are classified by label, so decoding also works on encoded graphs
    produced by rewriting, whose ids no longer follow the 3e/3v+k spacing.
    """
    return decode_with_map(g, original)[0]


def decode_with_map(g: Graph, original: LabelAlphabet) -> tuple[Graph, dict]:
    """Decoded graph plus the map from encoded plain-edge ids to decoded edge ids."""
    check_convention(original)
    labels: dict[int, Optional[str]] = {}
    rooted: dict[int, Optional[bool]] = {}
    for v in sorted(g._label):
        if g._label[v] != BOX or g._rooted[v] is True:
            raise NotInImage(f"node {v} is not an unrooted □ node", v)
        labels[v] = None
        rooted[v] = None
    plain = []
    for e in sorted(g._src):
        s, t, lab = g._src[e], g._tgt[e], g._elabel[e]
        if lab in original.node_labels or lab in ("0", "1"):
            if s != t:
                raise NotInImage(f"node {s}: edge {e} labelled {lab} is not a loop", s)
            if lab in original.node_labels:
                if labels[s] is not None:
                    raise NotInImage(f"node {s} has two label loops", s)
                labels[s] = lab
            else:
                if rooted[s] is not None:
                    raise NotInImage(f"node {s} has two rootedness loops", s)
                rooted[s] = lab == "1"
        elif lab in original.edge_labels:
            plain.append(e)
        else:
            raise NotInImage(f"node {s}: edge {e} has label {lab!r} outside the encoding", s)
    spaced = all(e % 3 == 0 for e in plain)
    ids = {e: (e // 3 if spaced else e) for e in plain}
    edges = [(ids[e], g._src[e], g._tgt[e], g._elabel[e]) for e in plain]
    return Graph(original, [(v, labels[v], rooted[v]) for v in labels], edges), ids


# -- making an alphabet fit the convention ------------------------------------

class Renaming:
    """Bijective relabelling onto an alphabet that satisfies the convention."""

    def __init__(self, a: LabelAlphabet):
        try:
            check_convention(a)
            self.nodes = {x: x for x in a.node_labels}
            self.edges = {x: x for x in a.edge_labels}
        except AlphabetClash:
            self.nodes = {x: "v" + x for x in a.node_labels}
            self.edges = {x: "e" + x for x in a.edge_labels}
        self.source = a
        self.target = LabelAlphabet.of(self.nodes.values(), self.edges.values())
        self.back_nodes = {y: x for x, y in self.nodes.items()}
        self.back_edges = {y: x for x, y in self.edges.items()}

    @property
    def identity(self) -> bool:
        return self.source == self.target

    def _map(self, g: Graph, a: LabelAlphabet, nm: dict, em: dict) -> Graph:
        return Graph(a, [(v, None if g._label[v] is None else nm[g._label[v]], g._rooted[v])
                         for v in sorted(g._label)],
                     [(e, g._src[e], g._tgt[e], em[g._elabel[e]]) for e in sorted(g._src)])

    def graph(self, g: Graph) -> Graph:
        return self._map(g, self.target, self.nodes, self.edges)

    def unmap_graph(self, g: Graph) -> Graph:
        return self._map(g, self.source, self.back_nodes, self.back_edges)

    def rule(self, r: Rule) -> Rule:
        return Rule(r.name, self.graph(r.left), self.graph(r.interface), self.graph(r.right))


def encode_any_graph(g: Graph) -> tuple[Graph, Renaming]:
    rn = Renaming(g.alphabet)
    return encode_graph(rn.graph(g)), rn


# -- compatibility ------------------------------------------------------------

def _pair_up(left: list[Graph], right: list[Graph]) -> bool:
    """A one-to-one correspondence up to isomorphism between two multisets."""
    if len(left) != len(right):
        return False
    pool = list(right)
    for g in left:
        for i, h in enumerate(pool):
            if is_isomorphic(g, h) is not None:
                del pool[i]
                break
        else:
            return False
    return True


def verify_compatibility(r: Rule, G: Graph) -> bool:
    """Successors under r correspond one-to-one with successors of e(G) under e(r)."""
    rn = Renaming(r.alphabet)
    r2, G2 = rn.rule(r), rn.graph(G)
    direct = [apply(r2, m, check=False) for m in matches(r2, G2)]
    er, eG = encode_rule(r2), encode_graph(G2)
    encoded = [apply(er, m, check=False) for m in matches(er, eG)]
    if not _pair_up([encode_graph(s.result) for s in direct], [s.result for s in encoded]):
        return False
    # tracks agree node for node, matched through the shared match node maps
    by_match = defaultdict(list)
    for s in encoded:
        by_match[tuple(sorted(s.match.node_map.items()))].append(s.track)
    return all(s.track in by_match[tuple(sorted(s.match.node_map.items()))] for s in direct)
