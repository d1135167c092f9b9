import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from artifact import (BOX, AlphabetClash, Graph, LabelAlphabet, NotInImage, compose,
                      find_morphisms, identity, is_isomorphic)
from artifact.encoding import (Renaming, decode_graph, encode_graph, encode_morphism,
                               encode_rule, encoded_alphabet, verify_compatibility)
from artifact.rules import apply, matches
from artifact.systems import tree_system

from helpers import (AB, forest, random_graph, random_rule, single_root, three_cycle,
                     total_host, tree_input, tree_second)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
XYZ = LabelAlphabet.of(["x"], ["y", "z"])


def xyz_graph():
    return Graph(XYZ, [(1, "x", False), (2, "x", None), (3, None, True)],
                 [(0, 1, 2, "y"), (1, 2, 2, "z")])


def loops(h, v):
    return sorted(h.edge_label(e) for e in h.out_edges(v) if h.tgt(e) == v)


def test_xyz_encoding():
    e = encode_graph(xyz_graph())
    assert e.num_nodes == 3 and e.num_edges == 6
    assert all(e.node(v) == (v, BOX, False) for v in e.node_ids())
    assert loops(e, 1) == ["0", "x"]
    assert loops(e, 2) == ["x", "z"]
    assert loops(e, 3) == ["1"]
    assert Counter(e.edge_label(x) for x in e.edge_ids()) == Counter("y x 0 x z 1".split())
    assert decode_graph(e, XYZ) == xyz_graph()


def test_empty_graph():
    assert encode_graph(Graph(AB)).num_nodes == 0
    assert encoded_alphabet(AB).node_labels == {BOX}


def test_clash_is_reported():
    with pytest.raises(AlphabetClash):
        encode_graph(tree_input())
    with pytest.raises(AlphabetClash):
        encoded_alphabet(LabelAlphabet.of(["a"], ["a"]))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_edge_count(seed):
    G = random_graph(random.Random(seed))
    defined = sum(G.label(v) is not None for v in G.node_ids())
    rooted = sum(G.rooted(v) is not None for v in G.node_ids())
    assert encode_graph(G).num_edges == G.num_edges + defined + rooted


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_round_trip(seed):
    G = random_graph(random.Random(seed))
    assert is_isomorphic(decode_graph(encode_graph(G), AB), G) is not None


def test_identity_encodes_to_identity():
    G = xyz_graph()
    e = encode_morphism(identity(G))
    assert e.node_map == identity(encode_graph(G)).node_map
    assert e.edge_map == identity(encode_graph(G)).edge_map


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_functor_laws_and_hom_sets(seed):
    rng = random.Random(seed)
    G, H, K = (random_graph(rng, AB, 3, 3) for _ in range(3))
    gh, hk = find_morphisms(G, H), find_morphisms(H, K)
    assert len(find_morphisms(encode_graph(G), encode_graph(H))) == len(gh)
    for f in gh[:4]:
        for h in hk[:4]:
            lhs = encode_morphism(compose(h, f))
            rhs = compose(encode_morphism(h), encode_morphism(f))
            assert (lhs.node_map, lhs.edge_map) == (rhs.node_map, rhs.edge_map)


def test_encoded_r2_carries_root_loops():
    rn = Renaming(tree_system().alphabet)
    assert not rn.identity
    r2 = rn.rule(tree_system().rules[2])
    er = encode_rule(r2)
    assert loops(er.left, 1) == ["1", "v□"] and loops(er.left, 2) == ["0", "v□"]
    assert er.interface.num_edges == 0
    assert decode_graph(er.left, rn.target) == r2.left


def test_renaming_round_trip():
    rn = Renaming(tree_system().alphabet)
    assert rn.unmap_graph(rn.graph(tree_second())) == tree_second()


def test_decode_rejects_two_label_loops():
    bad = Graph(encoded_alphabet(AB), [(4, BOX, False)], [(0, 4, 4, "a"), (1, 4, 4, "b")])
    with pytest.raises(NotInImage) as err:
        decode_graph(bad, AB)
    assert err.value.node == 4


def test_decode_rejects_both_root_loops():
    bad = Graph(encoded_alphabet(AB), [(2, BOX, False)], [(0, 2, 2, "0"), (1, 2, 2, "1")])
    with pytest.raises(NotInImage):
        decode_graph(bad, AB)


def test_decode_rejects_label_on_non_loop():
    bad = Graph(encoded_alphabet(AB), [(1, BOX, False), (2, BOX, False)], [(0, 1, 2, "a")])
    with pytest.raises(NotInImage) as err:
        decode_graph(bad, AB)
    assert err.value.node == 1


def test_compatibility_on_worked_reduction():
    rules = tree_system().rules
    for G in (tree_input(), tree_second(), three_cycle(), forest(), single_root()):
        assert all(verify_compatibility(r, G) for r in rules)


def test_compatibility_when_nothing_applies():
    r0 = tree_system().rules[0]
    assert matches(r0, tree_input()) == []
    assert verify_compatibility(r0, tree_input())


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_compatibility_on_random_rules(seed):
    rng = random.Random(seed)
    assert verify_compatibility(random_rule(rng), total_host(rng))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_tracks_agree(seed):
    rng = random.Random(seed)
    r, G = random_rule(rng), total_host(rng)
    er, eG = encode_rule(r), encode_graph(G)
    for m in matches(r, G):
        step = apply(r, m)
        em = encode_morphism(m)
        estep = apply(er, em)
        assert estep.track == step.track
        assert is_isomorphic(encode_graph(step.result), estep.result) is not None


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_root_count_transfers(seed):
    # "at most one root" on a graph is "at most one 1-loop" on its encoding
    G = random_graph(random.Random(seed))
    e = encode_graph(G)
    ones = sum(e.edge_label(x) == "1" for x in e.edge_ids())
    assert (G.root_count() <= 1) == (ones <= 1)
