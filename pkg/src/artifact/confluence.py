"""Independence, critical pairs, joinability and confluence up to garbage.

Independence is the lifted notion: besides nodes and edges, the label and the
rootedness of a node count as items of their own. A rule whose interface leaves
a label undefined consumes that label item, so relabelling conflicts exactly as
deletion would. This is what the loop encoding turns into plain edge overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from .encoding import Renaming, decode_with_map, encode_rule
from .errors import HostMismatch, NotInImage
from .graph import Graph
from .morphisms import Morphism, is_isomorphic, signature
from .rules import DerivationStep, Rule, apply, compose_tracks, dangling_ok, successors

STRONG = "strongly_joinable"
JOINABLE = "joinable_not_strong"
NOT_JOINABLE = "not_joinable"
UNKNOWN = "unknown"
VERDICTS = (STRONG, JOINABLE, NOT_JOINABLE, UNKNOWN)


# -- independence ---------------------------------------------------------------

def _items(pattern: Graph, node_map: dict, edge_map: dict) -> set:
    out: set = set()
    for v, w in node_map.items():
        out.add(("n", w))
        if pattern._label[v] is not None:
            out.add(("l", w))
        if pattern._rooted[v] is not None:
            out.add(("p", w))
    out.update(("e", f) for f in edge_map.values())
    return out


def _kept(r: Rule, m: Morphism) -> set:
    K = r.interface
    return _items(K, {v: m.node_map[v] for v in K._label}, {e: m.edge_map[e] for e in K._src})


def _whole(g: Graph, m: Morphism) -> set:
    return _items(g, m.node_map, m.edge_map)


def _independent(r1: Rule, m1: Morphism, r2: Rule, m2: Morphism) -> bool:
    return (_whole(m1.source, m1) & _whole(m2.source, m2)) <= (_kept(r1, m1) & _kept(r2, m2))


def parallelly_independent(s1: DerivationStep, s2: DerivationStep) -> bool:
    if s1.host != s2.host:
        raise HostMismatch("parallel independence needs two steps from the same graph")
    return _independent(s1.rule, s1.match, s2.rule, s2.match)


def sequentially_independent(s1: DerivationStep, s2: DerivationStep) -> bool:
    """Comatch image of the first step against the match image of the second."""
    if s2.host != s1.result:
        raise HostMismatch("the second step must start where the first ends")
    h1 = s1.comatch
    K1 = s1.rule.interface
    k1 = _items(K1, {v: h1.node_map[v] for v in K1._label}, {e: h1.edge_map[e] for e in K1._src})
    return (_whole(h1.source, h1) & _whole(s2.rule.left, s2.match)) <= (k1 & _kept(s2.rule, s2.match))


# -- garbage predicates -----------------------------------------------------------

@dataclass(frozen=True)
class GarbagePredicate:
    """Decides membership of a subgraph-closed set of non-garbage graphs."""
    name: str
    member: Callable[[Graph], bool]

    def __call__(self, g: Graph) -> bool:
        return self.member(g)

    def __and__(self, other: "GarbagePredicate") -> "GarbagePredicate":
        return GarbagePredicate(f"{self.name}&{other.name}", lambda g: self.member(g) and other.member(g))


def _forest(g: Graph) -> bool:
    if any(len(g._in[v]) > 1 for v in g._label):
        return False
    parent = {v: v for v in g._label}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g._src:
        a, b = find(g._src[e]), find(g._tgt[e])
        if a == b:
            return False
        parent[a] = b
    return True


def _cycles_have_t(g: Graph, t_label: str = "t") -> bool:
    # depth-first search for a back edge among the non-t edges
    colour = dict.fromkeys(g._label, 0)
    for start in sorted(g._label):
        if colour[start]:
            continue
        colour[start] = 1
        stack = [(start, iter(sorted(g._out[start])))]
        while stack:
            v, it = stack[-1]
            for e in it:
                if g._elabel[e] == t_label:
                    continue
                w = g._tgt[e]
                if colour[w] == 1:
                    return False
                if colour[w] == 0:
                    colour[w] = 1
                    stack.append((w, iter(sorted(g._out[w]))))
                    break
            else:
                colour[v] = 2
                stack.pop()
    return True


def at_most_roots(k: int) -> GarbagePredicate:
    return GarbagePredicate(f"roots<={k}", lambda g: g.root_count() <= k)


FOREST = GarbagePredicate("forest", _forest)
CYCLES_HAVE_T = GarbagePredicate("cycles-have-t", _cycles_have_t)

BUILTIN_PREDICATES = {
    "forest": FOREST,
    "one-root": at_most_roots(1),
    "forest-one-root": FOREST & at_most_roots(1),
    "cycles-have-t": CYCLES_HAVE_T,
}


def predicate(name: str) -> GarbagePredicate:
    """A built-in predicate by name; '+' joins several into their conjunction."""
    parts = [p.strip() for p in name.split("+")]
    try:
        preds = [BUILTIN_PREDICATES[p] for p in parts]
    except KeyError as exc:
        raise KeyError(f"unknown garbage predicate {exc.args[0]!r}; "
                       f"choose from {', '.join(BUILTIN_PREDICATES)}") from None
    out = preds[0]
    for p in preds[1:]:
        out = out & p
    return out


def _relabelled_copy(g: Graph, perm: dict) -> Graph:
    return Graph(g.alphabet, [(perm[v], g._label[v], g._rooted[v]) for v in g._label],
                 [(e, perm[g._src[e]], perm[g._tgt[e]], g._elabel[e]) for e in g._src])


def invariance_violations(p: GarbagePredicate, graphs: Sequence[Graph], rng) -> list[Graph]:
    """Graphs on which p changes its answer under a random renumbering of nodes."""
    bad = []
    for g in graphs:
        ids = g.node_ids()
        shuffled = list(ids)
        rng.shuffle(shuffled)
        if p(g) != p(_relabelled_copy(g, dict(zip(ids, shuffled)))):
            bad.append(g)
    return bad


# -- critical pairs ----------------------------------------------------------------

@dataclass
class CriticalPair:
    overlap: Graph
    left_step: DerivationStep
    right_step: DerivationStep
    persistent: set
    verdict: str = UNKNOWN
    left_witness: list = field(default_factory=list)
    right_witness: list = field(default_factory=list)

    @property
    def rules(self) -> tuple[str, str]:
        return self.left_step.rule.name, self.right_step.rule.name

    def __repr__(self) -> str:
        return (f"CriticalPair({self.rules[0]}/{self.rules[1]}, |V|={self.overlap.num_nodes}, "
                f"|E|={self.overlap.num_edges}, {self.verdict})")


def persistent_nodes(s1: DerivationStep, s2: DerivationStep) -> set:
    gone = {s1.match.node_map[v] for v in s1.rule.deleted_nodes()}
    gone |= {s2.match.node_map[v] for v in s2.rule.deleted_nodes()}
    return set(s1.host._label) - gone


def _loop_labels(g: Graph, v: int, kinds: tuple) -> list:
    labs = {g._elabel[e] for e in g._out[v] if g._tgt[e] == v}
    return [next((x for x in labs if x in kind), None) for kind in kinds]


def _node_identifications(L1: Graph, L2: Graph, kinds: tuple = ()) -> Iterator[dict]:
    """Partial injective maps from L2 nodes to attribute-compatible L1 nodes.

    ``kinds`` lists groups of loop labels of which a node may carry at most one
    (the encoded label and rootedness loops); identifications that would put two
    different loops of one group on a node are skipped.
    """
    n1, n2 = sorted(L1._label), sorted(L2._label)
    loops1 = {v: _loop_labels(L1, v, kinds) for v in n1}
    loops2 = {v: _loop_labels(L2, v, kinds) for v in n2}

    def compatible(v, w):
        return all(a is None or b is None or a == b for a, b in zip(loops2[v], loops1[w]))

    cur: dict = {}
    used: set = set()

    def go(i):
        if i == len(n2):
            yield dict(cur)
            return
        v = n2[i]
        yield from go(i + 1)
        for w in n1:
            if w in used or L1._label[w] != L2._label[v] or L1._rooted[w] != L2._rooted[v]:
                continue
            if kinds and not compatible(v, w):
                continue
            cur[v] = w
            used.add(w)
            yield from go(i + 1)
            del cur[v]
            used.discard(w)

    yield from go(0)


def _edge_identifications(L1: Graph, L2: Graph, nodes: dict,
                          forced: frozenset = frozenset()) -> Iterator[dict]:
    """Partial injective edge maps over a node identification.

    A loop labelled from ``forced`` must be identified with a matching loop when
    one exists, since leaving both would give a node two loops of one kind.
    """
    inner = [e for e in sorted(L2._src) if L2._src[e] in nodes and L2._tgt[e] in nodes]
    cur: dict = {}
    used: set = set()

    def go(i):
        if i == len(inner):
            yield dict(cur)
            return
        e = inner[i]
        s, t = nodes[L2._src[e]], nodes[L2._tgt[e]]
        cands = [f for f in sorted(L1._out[s])
                 if f not in used and L1._tgt[f] == t and L1._elabel[f] == L2._elabel[e]]
        if not (cands and s == t and L2._elabel[e] in forced):
            yield from go(i + 1)
        for f in cands:
            cur[e] = f
            used.add(f)
            yield from go(i + 1)
            del cur[e]
            used.discard(f)

    yield from go(0)


def _glue(L1: Graph, L2: Graph, nodes: dict, edges: dict) -> tuple[Graph, dict, dict]:
    H = L1.copy()
    nm = dict(nodes)
    nxt = L1.max_node_id() + 1
    for v in sorted(L2._label):
        if v not in nm:
            nm[v] = nxt
            H._add_node(nxt, L2._label[v], L2._rooted[v])
            nxt += 1
    em = dict(edges)
    nxt = L1.max_edge_id() + 1
    for e in sorted(L2._src):
        if e not in em:
            em[e] = nxt
            H._add_edge(nxt, nm[L2._src[e]], nm[L2._tgt[e]], L2._elabel[e])
            nxt += 1
    return H, nm, em


def _pair_isomorphism(a: tuple, b: tuple) -> bool:
    """Is there an iso of overlaps commuting with both matches? a, b = (H, g1, g2)."""
    Ha, g1a, g2a = a
    Hb, g1b, g2b = b
    if Ha.num_nodes != Hb.num_nodes or Ha.num_edges != Hb.num_edges:
        return False
    phi_n: dict = {}
    phi_e: dict = {}
    for ga, gb in ((g1a, g1b), (g2a, g2b)):
        for v, w in ga.node_map.items():
            if phi_n.setdefault(w, gb.node_map[v]) != gb.node_map[v]:
                return False
        for e, f in ga.edge_map.items():
            if phi_e.setdefault(f, gb.edge_map[e]) != gb.edge_map[e]:
                return False
    # joint surjectivity makes phi total; check it is a bijective structure match
    if len(set(phi_n.values())) != len(phi_n) or len(set(phi_e.values())) != len(phi_e):
        return False
    if any(Ha._label[v] != Hb._label[w] or Ha._rooted[v] != Hb._rooted[w] for v, w in phi_n.items()):
        return False
    return all(phi_n[Ha._src[e]] == Hb._src[f] and phi_n[Ha._tgt[e]] == Hb._tgt[f]
               and Ha._elabel[e] == Hb._elabel[f] for e, f in phi_e.items())


def _raw_pairs(r1: Rule, r2: Rule, kinds: tuple = ()) -> Iterator[tuple[Graph, Morphism, Morphism]]:
    """Conflicting jointly surjective overlaps of the two left graphs."""
    L1, L2 = r1.left, r2.left
    same = r1 is r2
    forced = frozenset().union(*kinds) if kinds else frozenset()
    kept: list[tuple] = []
    for nodes in _node_identifications(L1, L2, kinds):
        if not nodes:
            continue
        for edges in _edge_identifications(L1, L2, nodes, forced):
            H, nm, em = _glue(L1, L2, nodes, edges)
            g1 = Morphism(L1, H, {v: v for v in L1._label}, {e: e for e in L1._src})
            g2 = Morphism(L2, H, nm, em)
            if same and g1.node_map == g2.node_map and g1.edge_map == g2.edge_map:
                continue
            if not (dangling_ok(r1, g1) and dangling_ok(r2, g2)):
                continue
            if _independent(r1, g1, r2, g2):
                continue
            cand = (H, g1, g2)
            # with one rule twice, (g1, g2) and (g2, g1) are the same conflict
            if same and any(_pair_isomorphism((H, g2, g1), k) for k in kept):
                continue
            kept.append(cand)
            yield cand


def _direct(rules: Sequence[Rule]) -> list[CriticalPair]:
    out = []
    for i, r1 in enumerate(rules):
        for r2 in rules[i:]:
            for H, g1, g2 in _raw_pairs(r1, r2):
                s1, s2 = apply(r1, g1, check=False), apply(r2, g2, check=False)
                out.append(CriticalPair(H, s1, s2, persistent_nodes(s1, s2)))
    return out


def _via_encoding(rules: Sequence[Rule]) -> list[CriticalPair]:
    """Enumerate on encoded rules, keep overlaps inside the image, decode them."""
    if not rules:
        return []
    rn = Renaming(rules[0].alphabet)
    renamed = [rn.rule(r) for r in rules]
    encoded = [encode_rule(r) for r in renamed]
    kinds = (rn.target.node_labels, frozenset({"0", "1"}))
    out = []
    for i, e1 in enumerate(encoded):
        for j in range(i, len(encoded)):
            e2 = encoded[j]
            for H, g1, g2 in _raw_pairs(e1, e2, kinds):
                try:
                    D, ids = decode_with_map(H, rn.target)
                except NotInImage:
                    continue
                overlap = rn.unmap_graph(D)
                steps = []
                for r, g in ((rules[i], g1), (rules[j], g2)):
                    m = Morphism(r.left, overlap, dict(g.node_map),
                                 {e: ids[g.edge_map[3 * e]] for e in r.left._src})
                    steps.append(apply(r, m))
                out.append(CriticalPair(overlap, steps[0], steps[1], persistent_nodes(*steps)))
    return out


def enumerate_critical_pairs(rules: Sequence[Rule], via: str = "direct") -> list[CriticalPair]:
    """One representative per isomorphism class of critical pairs, in a fixed order.

    ``via="encoding"`` runs the same enumeration on the loop-encoded rules and
    keeps the overlaps that decode; both routes should agree.
    """
    rules = list(rules)
    if via == "direct":
        return _direct(rules)
    if via == "encoding":
        return _via_encoding(rules)
    raise ValueError(f"unknown route {via!r}")


def filter_non_garbage(pairs: Sequence[CriticalPair], p: Optional[GarbagePredicate]) -> list[CriticalPair]:
    if p is None:
        return list(pairs)
    return [c for c in pairs if p(c.overlap)]


# -- joinability --------------------------------------------------------------------

@dataclass
class _State:
    graph: Graph
    track: dict
    path: list


class _Side:
    """Breadth-first successor exploration with duplicate states merged."""

    def __init__(self, rules: Sequence[Rule], graph: Graph, track: dict, persistent: set):
        self.rules = rules
        self.persistent = sorted(persistent)
        self.states: list[_State] = []
        self._buckets: dict = {}
        first = _State(graph, dict(track), [])
        self._add(first)
        self.frontier = [first]
        self.exhausted = False

    def _key(self, s: _State) -> tuple:
        alive = tuple(p in s.track for p in self.persistent)
        return signature(s.graph), alive

    def _add(self, s: _State) -> bool:
        bucket = self._buckets.setdefault(self._key(s), [])
        for old in bucket:
            fixed = {old.track[p]: s.track[p] for p in self.persistent if p in old.track}
            if is_isomorphic(old.graph, s.graph, fixed) is not None:
                return False
        bucket.append(s)
        self.states.append(s)
        return True

    def expand(self) -> list[_State]:
        new = []
        for s in self.frontier:
            for step in successors(self.rules, s.graph):
                t = _State(step.result, compose_tracks(s.track, step.track), s.path + [step])
                if self._add(t):
                    new.append(t)
        self.frontier = new
        if not new:
            self.exhausted = True
        return new


def _strong_witness(a: _State, b: _State, persistent: set) -> bool:
    if any(p not in a.track or p not in b.track for p in persistent):
        return False
    return is_isomorphic(a.graph, b.graph, {a.track[p]: b.track[p] for p in persistent}) is not None


def join_search(rules: Sequence[Rule], left: Graph, right: Graph, depth: int = 8,
                persistent: set = frozenset(), left_track: Optional[dict] = None,
                right_track: Optional[dict] = None) -> tuple[str, list, list]:
    """Verdict and witness paths for two graphs that diverged from a common ancestor.

    persistent holds ancestor node ids; the tracks send them into left and right.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    ident = lambda g: {v: v for v in g._label}
    a = _Side(rules, left, ident(left) if left_track is None else left_track, persistent)
    b = _Side(rules, right, ident(right) if right_track is None else right_track, persistent)
    for _ in range(depth):
        if a.exhausted and b.exhausted:
            break
        if not a.exhausted:
            a.expand()
        if not b.exhausted:
            b.expand()
    plain = None
    for x in a.states:
        for y in b.states:
            if is_isomorphic(x.graph, y.graph) is None:
                continue
            if _strong_witness(x, y, persistent):
                return STRONG, x.path, y.path
            if plain is None:
                plain = (x, y)
    if plain is not None:
        return JOINABLE, plain[0].path, plain[1].path
    # a side whose frontier is empty has every reachable graph in its state list
    if a.exhausted and b.exhausted:
        return NOT_JOINABLE, [], []
    return UNKNOWN, [], []


def check_joinability(pair: CriticalPair, rules: Sequence[Rule], depth: int = 8) -> str:
    """Verdict for one pair; also stores witness derivations on the pair."""
    verdict, lw, rw = join_search(rules, pair.left_step.result, pair.right_step.result, depth,
                                  pair.persistent, pair.left_step.track, pair.right_step.track)
    pair.verdict, pair.left_witness, pair.right_witness = verdict, lw, rw
    return verdict


def replay_strong(pair: CriticalPair) -> bool:
    """Recheck a strong verdict from its witness derivations alone."""
    ends = []
    for step, wit in ((pair.left_step, pair.left_witness), (pair.right_step, pair.right_witness)):
        g, tr = step.result, dict(step.track)
        for w in wit:
            if w.host != g:
                return False
            g, tr = w.result, compose_tracks(tr, w.track)
        ends.append(_State(g, tr, []))
    return _strong_witness(ends[0], ends[1], pair.persistent)


# -- whole-system analysis ----------------------------------------------------------

LOCALLY_CONFLUENT = "locally_confluent"
UP_TO_GARBAGE = "locally_confluent_up_to_garbage"
WITNESS = "non_confluent_witness"
INCONCLUSIVE = "inconclusive"


@dataclass
class AnalysisReport:
    all_pairs: list
    pairs: list
    predicate: Optional[str]
    conclusion: str
    size_reducing: dict
    encoded_count: Optional[int] = None

    def count(self, verdict: str) -> int:
        return sum(1 for c in self.pairs if c.verdict == verdict)

    @property
    def terminating_evidence(self) -> bool:
        return bool(self.size_reducing) and all(self.size_reducing.values())

    def summary_line(self) -> str:
        return (f"pairs={len(self.all_pairs)} strong={self.count(STRONG)} "
                f"joinable={self.count(JOINABLE)} nonjoinable={self.count(NOT_JOINABLE)} "
                f"unknown={self.count(UNKNOWN)} conclusion={self.conclusion}")

    def render(self, full: bool = True) -> str:
        from .textio import format_body
        lines = []
        if full:
            dropped = len(self.all_pairs) - len(self.pairs)
            lines.append(f"garbage predicate: {self.predicate or 'none'} (dropped {dropped})")
            if self.encoded_count is not None:
                lines.append(f"pairs via encoding: {self.encoded_count}")
            for name, ok in self.size_reducing.items():
                lines.append(f"rule {name}: {'size reducing' if ok else 'not size reducing'}")
            for i, c in enumerate(self.pairs):
                lines.append(f"pair {i} {c.rules[0]} / {c.rules[1]}: {c.verdict}")
                lines.append(f"  persistent: {sorted(c.persistent)}")
                lines.append("  overlap {")
                lines += format_body(c.overlap, "    ")
                lines.append("  }")
                for side, wit in (("left", c.left_witness), ("right", c.right_witness)):
                    if wit:
                        lines.append(f"  {side} witness: {' '.join(s.rule.name for s in wit)}")
            lines.append(f"conclusion: {self.conclusion}")
        lines.append(self.summary_line())
        return "\n".join(lines) + "\n"


def size_reducing(r: Rule) -> bool:
    return r.left.num_nodes + r.left.num_edges > r.right.num_nodes + r.right.num_edges


def analyze(rules: Sequence[Rule], p: Optional[GarbagePredicate] = None, depth: int = 8,
            cross_check: bool = True) -> AnalysisReport:
    rules = list(rules)
    every = enumerate_critical_pairs(rules)
    encoded_count = len(enumerate_critical_pairs(rules, via="encoding")) if cross_check else None
    kept = filter_non_garbage(every, p)
    for c in kept:
        check_joinability(c, rules, depth)
    verdicts = [c.verdict for c in kept]
    if NOT_JOINABLE in verdicts:
        conclusion = WITNESS
    elif all(v == STRONG for v in verdicts):
        conclusion = UP_TO_GARBAGE if p is not None else LOCALLY_CONFLUENT
    else:
        conclusion = INCONCLUSIVE
    return AnalysisReport(every, kept, p.name if p else None, conclusion,
                          {r.name: size_reducing(r) for r in rules}, encoded_count)
