import random

import pytest
from hypothesis import given, settings, strategies as st

from artifact import (BOX, TREE_ALPHABET, TRIANGLE, DanglingViolation, Graph, InvalidMatch,
                      LabelAlphabet, ParseError, Morphism, Rule, apply, check_dangling,
                      find_morphisms, invert, is_isomorphic, normalize, rule_isomorphic,
                      successors)
from artifact.rules import matches
from artifact.systems import tree_grammar, tree_system
from artifact.textio import format_system, parse_document

from helpers import (AB, box, brute_morphisms, edges, g, random_rule, single_root, three_cycle,
                     total_host, tree_input, tree_second)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
TREE = tree_system().rules
R0, R1, R2 = TREE


def match_at(r, G, node_map):
    for m in find_morphisms(r.left, G, injective_only=True):
        if m.node_map == node_map:
            return m
    raise AssertionError(f"no morphism with {node_map}")


# -- dangling -----------------------------------------------------------------

def test_r0_at_a_leaf_is_fine():
    G = g([box(0), box(1, True)], edges((0, 1)))
    assert check_dangling(R0, match_at(R0, G, {1: 0, 2: 1}))


def test_r0_with_extra_edge_dangles():
    G = g([box(0), box(1, True), box(2)], edges((0, 1), (1, 2)))
    m = match_at(R0, G, {1: 0, 2: 1})
    assert not check_dangling(R0, m)
    with pytest.raises(DanglingViolation):
        apply(R0, m)


def test_nothing_deleted_never_dangles():
    for m in find_morphisms(R2.left, tree_input(), injective_only=True):
        assert check_dangling(R2, m)


def test_non_injective_match_rejected():
    G = g([box(0, True)], [(0, 0, 0, BOX)])
    lhs = g([box(1, True), box(2, True)], edges((1, 2)))
    r = Rule("two", lhs, g([box(1, True), box(2, True)]), g([box(1, True), box(2, True)]))
    m = Morphism(lhs, G, {1: 0, 2: 0}, {0: 0})
    with pytest.raises(InvalidMatch):
        check_dangling(r, m)


def test_rule_loader_rejects_non_inclusion():
    text = """
    rule bad {
      left { node 1 [label=□, root=0] }
      interface { node 1 [] node 2 [] }
      right { node 1 [label=□, root=0] node 2 [label=□, root=0] }
    }
    """
    with pytest.raises(ParseError) as err:
        parse_document(text)
    assert "node 2" in str(err.value)


# -- apply ---------------------------------------------------------------------

def test_r2_gives_second_tree():
    step = apply(R2, match_at(R2, tree_input(), {1: 1, 2: 3}))
    assert is_isomorphic(step.result, tree_second()) is not None


def test_identity_relabel_rule():
    node = g([box(1)])
    r = Rule("same", node, g([(1, None, None)]), node)
    host = tree_input()
    G = Graph(TREE_ALPHABET, [(v, BOX, False) for v in host.node_ids()], host.edges())
    for m in matches(r, G):
        assert is_isomorphic(apply(r, m).result, G) is not None


def test_r0_on_two_nodes():
    G = g([box(0), box(1, True)], edges((0, 1)))
    step = apply(R0, match_at(R0, G, {1: 0, 2: 1}))
    # delete node 1 and its edge, then node 0 becomes the root
    assert step.intermediate.node_ids() == [0]
    assert step.intermediate.node(0) == (0, None, None)
    assert is_isomorphic(step.result, single_root()) is not None
    assert step.track == {0: 0}


def test_fresh_ids_are_max_plus_one():
    G = g([box(0, True), box(5)], [(9, 0, 5, BOX)])
    step = apply(R2, match_at(R2, G, {1: 0, 2: 5}))
    assert step.result.edge_ids() == [10]
    assert step.comatch.edge_map == {2: 10}


def test_apply_is_deterministic():
    m = match_at(R2, tree_input(), {1: 1, 2: 3})
    assert apply(R2, m) == apply(R2, m)


# -- invert / normalize / isomorphism -------------------------------------------

def test_invert_is_an_involution():
    for r in TREE:
        back = invert(invert(r))
        assert (back.name, back.left, back.interface, back.right) == (r.name, r.left, r.interface, r.right)


def test_inverted_grammar_rule_prunes_leaves():
    (grow,) = tree_grammar().rules
    prune = invert(grow)
    assert prune.left.num_nodes == 2 and prune.right.num_nodes == 1
    assert prune.left.num_edges == 1


SQ_TRI = LabelAlphabet.of([BOX, TRIANGLE], [BOX, TRIANGLE])


def loop_rule(name, a, b, k_loop=True, k_undefined=False):
    left = Graph(SQ_TRI, [(a, BOX, False), (b, TRIANGLE, False)],
                 [(0, a, b, TRIANGLE), (1, a, a, BOX)])
    if k_undefined:
        k = Graph(SQ_TRI, [(a, None, None)])
    else:
        k = Graph(SQ_TRI, [(a, BOX, False)], [(1, a, a, BOX)] if k_loop else [])
    right = Graph(SQ_TRI, [(a, BOX, False)], [(1, a, a, BOX)] if k_loop or k_undefined else [])
    return Rule(name, left, k, right)


def test_example_rule_isomorphisms():
    r1 = loop_rule("r1", 1, 2)
    r2 = loop_rule("r2", 7, 4)
    r3 = loop_rule("r3", 1, 2, k_loop=False)
    assert rule_isomorphic(r1, r2) and rule_isomorphic(r2, r1)
    assert not rule_isomorphic(r1, r3) and not rule_isomorphic(r2, r3)
    assert rule_isomorphic(r3, r3)


def test_example_normal_form():
    r1 = loop_rule("r1", 1, 2)
    expected = loop_rule("r1", 1, 2, k_undefined=True)
    n = normalize(r1)
    assert n.interface == expected.interface
    assert rule_isomorphic(n, expected)
    assert normalize(n).interface == n.interface


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_normal_form_has_same_successors(seed):
    rng = random.Random(seed)
    r = random_rule(rng)
    G = total_host(rng)
    a = [s.result for s in successors([r], G)]
    b = [s.result for s in successors([normalize(r)], G)]
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert is_isomorphic(x, y) is not None


# -- successors -----------------------------------------------------------------

def test_singleton_is_normal():
    assert successors(TREE, single_root()) == []


def test_three_cycle_has_one_step():
    steps = successors(TREE, three_cycle())
    assert [s.rule.name for s in steps] == ["r2"]
    assert steps[0].match.node_map == {1: 1, 2: 2}
    # oracle: injective morphisms of each left side, filtered by degree at deleted nodes
    expected = 0
    for r in TREE:
        for nm, em in brute_morphisms(r.left, three_cycle()):
            if len(set(nm.values())) < len(nm):
                continue
            if all(three_cycle().degree(nm[v]) == r.left.degree(v) for v in r.deleted_nodes()):
                expected += 1
    assert expected == 1


def test_empty_host_has_no_successors():
    assert successors(TREE, Graph(TREE_ALPHABET)) == []


# -- properties -----------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(seeds)
def test_derivations_invert(seed):
    rng = random.Random(seed)
    r = random_rule(rng)
    G = total_host(rng)
    for step in successors([r], G):
        back = apply(invert(r), step.comatch)
        assert is_isomorphic(back.result, G) is not None


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_totality_and_roots_preserved(seed):
    rng = random.Random(seed)
    r = random_rule(rng)
    G = total_host(rng)
    same_roots = r.left.root_count() == r.right.root_count()
    for step in successors([r], G):
        assert step.result.is_total()
        if same_roots:
            assert step.result.root_count() == G.root_count()
        kept = set(G.node_ids()) - {step.match.node_map[v] for v in r.deleted_nodes()}
        assert set(step.track) == kept
        assert len(set(step.track.values())) == len(step.track)


def test_rule_text_round_trip():
    back_rules = parse_document(format_system(TREE, TREE_ALPHABET)).rules
    for r, back in zip(TREE, back_rules):
        assert (back.left, back.interface, back.right) == (r.left, r.interface, r.right)
