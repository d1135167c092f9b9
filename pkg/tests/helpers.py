"""Example graphs, random builders and brute-force oracles shared by the tests."""

from __future__ import annotations

import random
from itertools import product

from artifact import BOX, SINGLETON, TREE_ALPHABET, TRIANGLE, Graph, LabelAlphabet, Rule

AB = LabelAlphabet.of(["a", "b"], ["x", "y"])


def g(nodes, edges=(), alphabet=TREE_ALPHABET) -> Graph:
    return Graph(alphabet, nodes, edges)


def box(v, root=False):
    return (v, BOX, root)


def tri(v, root=False):
    return (v, TRIANGLE, root)


def edges(*pairs, label=BOX):
    return [(i, s, t, label) for i, (s, t) in enumerate(pairs)]


# -- example graphs ------------------------------------------------------------

def concrete_g() -> Graph:
    # node 1 with a loop, edge 2 -> 1
    return g([(1, BOX, None), (2, BOX, None)], [(1, 1, 1, BOX), (2, 2, 1, BOX)], SINGLETON)


def concrete_h() -> Graph:
    # two parallel edges 1 -> 3, edge 2 -> 3, loop at 3
    return g([(v, BOX, None) for v in (1, 2, 3)],
             [(1, 1, 3, BOX), (2, 1, 3, BOX), (3, 2, 3, BOX), (4, 3, 3, BOX)], SINGLETON)


def tree_input() -> Graph:
    # a -> b (rooted), a -> c, b -> d, c -> e
    return g([box(0), box(1, True), box(2), box(3), box(4)], edges((0, 1), (0, 2), (1, 3), (2, 4)))


def tree_second() -> Graph:
    return g([box(0), tri(1), box(2), box(3, True), box(4)], edges((0, 1), (0, 2), (1, 3), (2, 4)))


def three_cycle() -> Graph:
    return g([box(0), box(1, True), box(2)], edges((0, 1), (1, 2), (2, 0)))


def forest() -> Graph:
    return g([box(0, True), box(1), box(2), box(3)], edges((0, 2), (1, 3)))


def single_root() -> Graph:
    return g([box(0, True)])


def root_cherry() -> Graph:
    return g([box(1, True), box(2), box(3)], edges((1, 2), (1, 3)))


def rooted_path(n: int) -> Graph:
    return g([box(v, v == 0) for v in range(n)], edges(*[(v, v + 1) for v in range(n - 1)]))


# -- brute-force oracles -------------------------------------------------------

def _node_ok(G, H, v, w, iso=False):
    lg, lh = G._label[v], H._label[w]
    rg, rh = G._rooted[v], H._rooted[w]
    if lg is not None and lg != lh or rg is not None and rg != rh:
        return False
    if iso and ((lg is None) != (lh is None) or (rg is None) != (rh is None)):
        return False
    return True


def brute_morphisms(G: Graph, H: Graph, iso: bool = False) -> list[tuple[dict, dict]]:
    """Every morphism G -> H by exhaustive product over node and edge images."""
    gv, hv = sorted(G._label), sorted(H._label)
    ge, he = sorted(G._src), sorted(H._src)
    found = []
    for images in product(hv, repeat=len(gv)):
        nm = dict(zip(gv, images))
        if not all(_node_ok(G, H, v, nm[v], iso) for v in gv):
            continue
        choices = [[f for f in he if H._src[f] == nm[G._src[e]] and H._tgt[f] == nm[G._tgt[e]]
                    and H._elabel[f] == G._elabel[e]] for e in ge]
        for eimg in product(*choices):
            found.append((nm, dict(zip(ge, eimg))))
    return found


def brute_injective_count(G: Graph, H: Graph) -> int:
    return sum(len(set(nm.values())) == len(nm) and len(set(em.values())) == len(em)
               for nm, em in brute_morphisms(G, H))


def brute_isomorphic(G: Graph, H: Graph) -> bool:
    if G.num_nodes != H.num_nodes or G.num_edges != H.num_edges:
        return False
    for nm, em in brute_morphisms(G, H, iso=True):
        if len(set(nm.values())) == len(nm) and len(set(em.values())) == len(em):
            return True
    return False


def brute_is_tree(G: Graph) -> bool:
    """Some node reaches every node by exactly one directed path."""
    nodes = sorted(G._label)
    if not nodes:
        return False
    for r in nodes:
        count = {v: 0 for v in nodes}
        count[r] = 1
        # longest simple path is |V|-1 edges; relax that many rounds, counting walks
        layer = {r: 1}
        ok = True
        for _ in range(len(nodes)):
            nxt: dict = {}
            for v, c in layer.items():
                for e in G._out[v]:
                    w = G._tgt[e]
                    nxt[w] = nxt.get(w, 0) + c
            for w, c in nxt.items():
                count[w] += c
            layer = nxt
        if layer:
            ok = False   # walks of length |V| exist, so there is a cycle
        if ok and all(c == 1 for c in count.values()):
            return True
    return False


def unlabelled_trees(n: int) -> list[Graph]:
    """Directed rooted trees with n nodes up to isomorphism, by leaf addition."""
    level = [g([(0, BOX, False)], alphabet=TREE_ALPHABET)]
    for k in range(1, n):
        nxt: list[Graph] = []
        for t in level:
            for parent in sorted(t._label):
                c = Graph(t.alphabet, list(t.nodes()) + [(k, BOX, False)],
                          list(t.edges()) + [(k - 1 + 100, parent, k, BOX)])
                if not any(brute_isomorphic(c, d) for d in nxt):
                    nxt.append(c)
        level = nxt
    return level


# -- random builders -----------------------------------------------------------

def random_graph(rng: random.Random, alphabet: LabelAlphabet = AB, max_nodes: int = 4,
                 max_edges: int = 4, partial: bool = True, roots: bool = True) -> Graph:
    n = rng.randint(0, max_nodes)
    nl, el = sorted(alphabet.node_labels), sorted(alphabet.edge_labels)
    nodes = []
    for v in range(n):
        label = None if partial and rng.random() < 0.25 else rng.choice(nl)
        rooted = (None if partial and rng.random() < 0.25 else
                  (rng.random() < 0.3 if roots else False))
        nodes.append((v, label, rooted))
    es = []
    if n:
        for e in range(rng.randint(0, max_edges)):
            es.append((e, rng.randrange(n), rng.randrange(n), rng.choice(el)))
    return Graph(alphabet, nodes, es)


def random_rule(rng: random.Random, alphabet: LabelAlphabet = AB, name: str = "r",
                max_nodes: int = 3) -> Rule:
    L = random_graph(rng, alphabet, max_nodes, 3, partial=False)
    kept = sorted(v for v in L._label if rng.random() < 0.6)
    nl, el = sorted(alphabet.node_labels), sorted(alphabet.edge_labels)
    k_nodes = []
    for v in kept:
        relabel = rng.random() < 0.3
        k_nodes.append((v, None if relabel else L._label[v], None if relabel else L._rooted[v]))
    k_edges = [(e, L._src[e], L._tgt[e], L._elabel[e]) for e in sorted(L._src)
               if L._src[e] in kept and L._tgt[e] in kept and rng.random() < 0.6]
    K = Graph(alphabet, k_nodes, k_edges)
    r_nodes = [(v, l if l is not None else rng.choice(nl),
                rr if rr is not None else rng.random() < 0.3) for v, l, rr in k_nodes]
    fresh = max([v for v in L._label] + [-1]) + 1
    for i in range(rng.randint(0, 2)):
        r_nodes.append((fresh + i, rng.choice(nl), rng.random() < 0.2))
    ids = [v for v, _, _ in r_nodes]
    r_edges = list(k_edges)
    e_fresh = max([e for e in L._src] + [-1]) + 1
    if ids:
        for i in range(rng.randint(0, 2)):
            r_edges.append((e_fresh + i, rng.choice(ids), rng.choice(ids), rng.choice(el)))
    R = Graph(alphabet, r_nodes, r_edges)
    return Rule(name, L, K, R)


def total_host(rng: random.Random, alphabet: LabelAlphabet = AB, max_nodes: int = 4,
               max_edges: int = 5) -> Graph:
    return random_graph(rng, alphabet, max_nodes, max_edges, partial=False)


def relabel_ids(G: Graph, rng: random.Random) -> Graph:
    """Same graph under a random renaming of node and edge ids."""
    vs, es = sorted(G._label), sorted(G._src)
    nv = dict(zip(vs, rng.sample(range(10 * len(vs) + 5), len(vs))))
    ne = dict(zip(es, rng.sample(range(10 * len(es) + 5), len(es))))
    return Graph(G.alphabet, [(nv[v], G._label[v], G._rooted[v]) for v in vs],
                 [(ne[e], nv[G._src[e]], nv[G._tgt[e]], G._elabel[e]) for e in es])
