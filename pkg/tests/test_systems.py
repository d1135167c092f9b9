import random

import pytest
from hypothesis import given, settings, strategies as st

from artifact import BadSize, Graph, is_isomorphic
from artifact.confluence import size_reducing
from artifact.engine import EngineConfig, is_fast, preserves_bounds, recognize
from artifact.rules import successors
from artifact.systems import (MUTATIONS, SYSTEMS, efd_grammar, fbt_system, generate, get_system,
                              mutate, oracle_cycles_have_t, oracle_is_fbt, oracle_is_tree,
                              place_root, strip, tree_grammar, tree_system)

from helpers import brute_is_tree, forest, three_cycle, tree_input, tree_second, unlabelled_trees

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_registry():
    for name in SYSTEMS:
        s = get_system(name)
        assert s.rules
    with pytest.raises(KeyError):
        get_system("nope")


def test_tree_system_shape():
    s = tree_system()
    assert [r.name for r in s.rules] == ["r0", "r1", "r2"]
    assert s.accept.num_nodes == 1 and s.accept.root_count() == 1
    cfg = EngineConfig(degree_bound=2, root_bound=1)
    for r in s.rules:
        assert is_fast(r)
        b = preserves_bounds(r, cfg)
        assert b.degree_ok and b.roots_ok


def test_fbt_has_five_rules():
    assert [r.name for r in fbt_system().rules] == ["r0", "r1", "r2", "r3", "r4"]


def test_tree_grammar_generates_small_trees():
    s = tree_grammar()
    seen = [s.start]
    level = [s.start]
    for _ in range(3):
        nxt = []
        for h in level:
            for step in successors(s.rules, h):
                if not any(is_isomorphic(step.result, k) for k in seen):
                    seen.append(step.result)
                    nxt.append(step.result)
        level = nxt
    expected = [t for n in range(1, 5) for t in unlabelled_trees(n)]
    assert [len(unlabelled_trees(n)) for n in range(1, 5)] == [1, 1, 2, 4]
    assert len(seen) == len(expected)
    for t in expected:
        assert any(is_isomorphic(t.with_alphabet(s.alphabet), h) for h in seen)


def test_efd_grammar():
    s = efd_grammar()
    assert [r.name for r in s.rules] == ["seq", "while", "ddec", "dec1", "dec2"]
    assert s.start.num_nodes == 3 and s.start.num_edges == 2
    assert sorted(s.start.label(v) for v in s.start.node_ids()) == ["•", "•", "□"]
    assert all(size_reducing(r) for r in s.inverse().rules)
    assert s.inverse().accept == s.start


# -- generators -----------------------------------------------------------------

def test_grid():
    h = generate("grid", 3, 3)
    assert (h.num_nodes, h.num_edges) == (9, 12)


def test_star_alternates():
    h = generate("star", 8)
    assert (h.num_nodes, h.num_edges) == (9, 8)
    assert h.outdeg(8) == 4 and h.indeg(8) == 4


def test_small_families():
    assert (generate("linked_list", 1).num_nodes, generate("linked_list", 1).num_edges) == (1, 0)
    assert generate("perfect_binary_tree", 4).num_nodes == 15
    assert generate("cycle", 5).num_edges == 5
    assert generate("binary_tree", 20, seed=1) == generate("binary_tree", 20, seed=1)


@pytest.mark.parametrize("args", [("linked_list", 0), ("grid", 3, -1), ("blob", 3)])
def test_bad_sizes(args):
    with pytest.raises(BadSize):
        generate(*args)


def test_root_placement():
    h = generate("linked_list", 4, root="first")
    assert h.roots() == [0]
    assert place_root(h, 3).roots() == [3]
    with pytest.raises(BadSize):
        place_root(h, 99)


# -- oracles ----------------------------------------------------------------------

def test_oracles_on_examples():
    assert oracle_is_tree(tree_input())
    assert not oracle_is_tree(forest())
    assert not oracle_is_tree(three_cycle())
    parallel = Graph(tree_input().alphabet, [(0, "□", False), (1, "□", False)],
                     [(0, 0, 1, "□"), (1, 0, 1, "□")])
    assert not oracle_is_tree(parallel)


def test_fbt_oracle():
    assert oracle_is_fbt(generate("perfect_binary_tree", 3))
    assert not oracle_is_fbt(generate("linked_list", 3))


def test_cycles_have_t_oracle():
    s = efd_grammar()
    a = s.alphabet
    loop = Graph(a, [(0, "•", False), (1, "□", False)], [(0, 0, 1, "□"), (1, 1, 0, "□")])
    assert not oracle_cycles_have_t(loop)
    tloop = Graph(a, [(0, "•", False), (1, "◇", False)], [(0, 0, 1, "□"), (1, 1, 0, "t")])
    assert oracle_cycles_have_t(tloop)
    assert oracle_cycles_have_t(s.start)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_tree_oracle_agrees_with_path_counting(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    es = [(i, rng.randrange(n), rng.randrange(n), "□") for i in range(rng.randint(0, 6))]
    h = Graph(tree_system().alphabet, [(v, "□", False) for v in range(n)], es)
    assert oracle_is_tree(h) == brute_is_tree(h)


def test_strip():
    s1, s2 = strip(tree_input()), strip(tree_second())
    assert strip(s1) == s1
    assert s1.root_count() == 0 and all(s1.label(v) == "□" for v in s1.node_ids())
    assert is_isomorphic(s1, s2) is not None


# -- recognition against the oracles ---------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seeds)
def test_tree_recognition_matches_oracle(seed):
    rng = random.Random(seed)
    family = rng.choice(("linked_list", "binary_tree", "perfect_binary_tree"))
    size = rng.randint(1, 5) if family == "perfect_binary_tree" else rng.randint(1, 60)
    G = generate(family, size, seed=seed)
    G = place_root(G, rng.choice(G.node_ids()))
    s = tree_system()
    assert recognize(s.rules, G, s.accept) == oracle_is_tree(strip(G))
    for kind in MUTATIONS:
        h = mutate(G, kind, rng)
        if h is not None:
            assert not oracle_is_tree(h)
            assert not recognize(s.rules, h, s.accept)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_fbt_recognition_matches_oracle(seed):
    rng = random.Random(seed)
    G = generate("binary_tree", rng.randint(1, 25), root="first", seed=seed)
    s = fbt_system()
    assert recognize(s.rules, G, s.accept) == oracle_is_fbt(G)
