"""Rules with interface inclusions, the dangling condition and rule application."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import DanglingViolation, InvalidMatch, InvalidRule
from .graph import Graph
from .morphisms import (ISO, Morphism, find_morphisms, is_isomorphic, iter_morphisms,
                        morphism_violations)

INV_SUFFIX = "^-1"


def inclusion_violations(k: Graph, host: Graph, side: str) -> list[str]:
    """Why the id-identity map K -> host is not an inclusion morphism."""
    bad = []
    for v in sorted(k._label):
        if v not in host._label:
            bad.append(f"interface node {v} missing from {side}")
            continue
        if k._label[v] is not None and k._label[v] != host._label[v]:
            bad.append(f"interface node {v}: label differs in {side}")
        if k._rooted[v] is not None and k._rooted[v] != host._rooted[v]:
            bad.append(f"interface node {v}: rootedness differs in {side}")
    for e in sorted(k._src):
        if e not in host._src:
            bad.append(f"interface edge {e} missing from {side}")
            continue
        if (k._src[e], k._tgt[e], k._elabel[e]) != (host._src[e], host._tgt[e], host._elabel[e]):
            bad.append(f"interface edge {e}: endpoints or label differ in {side}")
    return bad


@dataclass(eq=True)
class Rule:
    name: str
    left: Graph
    interface: Graph
    right: Graph

    def __post_init__(self):
        bad = self.violations()
        if bad:
            raise InvalidRule(f"rule {self.name}: " + "; ".join(bad), bad)

    def violations(self) -> list[str]:
        bad = inclusion_violations(self.interface, self.left, "left")
        bad += inclusion_violations(self.interface, self.right, "right")
        for side, g in (("left", self.left), ("right", self.right)):
            if not g.is_totally_labelled():
                bad.append(f"{side} graph is not totally labelled")
            if not g.is_totally_rooted():
                bad.append(f"{side} graph is not totally rooted")
        return bad

    @property
    def alphabet(self):
        return self.left.alphabet

    def size(self) -> int:
        return max(self.left.num_nodes + self.left.num_edges,
                   self.right.num_nodes + self.right.num_edges)

    def deleted_nodes(self) -> list[int]:
        return [v for v in sorted(self.left._label) if v not in self.interface._label]

    def deleted_edges(self) -> list[int]:
        return [e for e in sorted(self.left._src) if e not in self.interface._src]

    def created_nodes(self) -> list[int]:
        return [v for v in sorted(self.right._label) if v not in self.interface._label]

    def created_edges(self) -> list[int]:
        return [e for e in sorted(self.right._src) if e not in self.interface._src]

    def is_standard(self) -> bool:
        """Interface totally labelled and nothing rooted anywhere."""
        k = self.interface
        return (k.is_totally_labelled() and k.is_totally_rooted()
                and all(r is False for g in (self.left, k, self.right) for r in g._rooted.values()))

    def __repr__(self) -> str:
        return f"Rule({self.name!r})"


@dataclass(eq=True)
class DerivationStep:
    rule: Rule
    match: Morphism
    host: Graph
    intermediate: Graph
    result: Graph
    comatch: Morphism
    track: dict = field(default_factory=dict)


def invert(r: Rule) -> Rule:
    name = r.name[:-len(INV_SUFFIX)] if r.name.endswith(INV_SUFFIX) else r.name + INV_SUFFIX
    return Rule(name, r.right, r.interface, r.left)


def normalize(r: Rule) -> Rule:
    k = Graph(r.interface.alphabet, [(v, None, None) for v in sorted(r.interface._label)])
    return Rule(r.name, r.left, k, r.right)


def _check_match(r: Rule, m: Morphism) -> None:
    if m.source != r.left:
        raise InvalidMatch(f"match source is not the left graph of {r.name}")
    if not m.is_injective():
        raise InvalidMatch("match is not injective")
    bad = morphism_violations(m)
    if bad:
        raise InvalidMatch("; ".join(bad))


def dangling_ok(r: Rule, m: Morphism) -> bool:
    G = m.target
    for v in r.left._label:
        if v not in r.interface._label:
            # an injective match covers exactly deg_L(v) edges at the image
            if G.degree(m.node_map[v]) != r.left.degree(v):
                return False
    return True


def check_dangling(r: Rule, m: Morphism) -> bool:
    _check_match(r, m)
    return dangling_ok(r, m)


def apply(r: Rule, m: Morphism, check: bool = True) -> DerivationStep:
    """Delete, un-define, add: the constructive direct derivation."""
    if check:
        _check_match(r, m)
    if not dangling_ok(r, m):
        raise DanglingViolation(f"rule {r.name}: dangling condition fails")
    G = m.target
    L, K, R = r.left, r.interface, r.right
    D = G.copy()
    for e in r.deleted_edges():
        D._remove_edge(m.edge_map[e])
    for v in r.deleted_nodes():
        D._remove_node(m.node_map[v])
    for v in K._label:
        w = m.node_map[v]
        lab = D._label[w] if K._label[v] is not None else None
        rt = D._rooted[w] if K._rooted[v] is not None else None
        if lab != D._label[w] or rt != D._rooted[w]:
            D._set_node(w, lab, rt)

    H = D.copy()
    node_img = {v: m.node_map[v] for v in K._label}
    next_node = G.max_node_id() + 1
    for v in r.created_nodes():
        node_img[v] = next_node
        H._add_node(next_node, R._label[v], R._rooted[v])
        next_node += 1
    for v in K._label:
        w = node_img[v]
        lab = R._label[v] if K._label[v] is None else H._label[w]
        rt = R._rooted[v] if K._rooted[v] is None else H._rooted[w]
        if lab != H._label[w] or rt != H._rooted[w]:
            H._set_node(w, lab, rt)
    edge_img = {e: m.edge_map[e] for e in K._src}
    next_edge = G.max_edge_id() + 1
    for e in r.created_edges():
        edge_img[e] = next_edge
        H._add_edge(next_edge, node_img[R._src[e]], node_img[R._tgt[e]], R._elabel[e])
        next_edge += 1
    gone = {m.node_map[v] for v in r.deleted_nodes()}
    track = {v: v for v in sorted(G._label) if v not in gone}
    comatch = Morphism(R, H, node_img, edge_img)
    return DerivationStep(r, m, G, D, H, comatch, track)


def matches(r: Rule, G: Graph) -> list[Morphism]:
    """Injective matches of r into G satisfying the dangling condition, sorted."""
    return [m for m in find_morphisms(r.left, G, injective_only=True) if dangling_ok(r, m)]


def successors(rules: Sequence[Rule], G: Graph) -> list[DerivationStep]:
    out = []
    for r in rules:
        for m in matches(r, G):
            out.append(apply(r, m, check=False))
    return out


def rule_isomorphic(r1: Rule, r2: Rule) -> bool:
    K1, K2 = r1.interface, r2.interface
    if K1.num_nodes != K2.num_nodes or K1.num_edges != K2.num_edges:
        return False
    if r1.left.alphabet != r2.left.alphabet:
        return False
    for f in iter_morphisms(r1.left, r2.left, ISO):
        kn = {v: f.node_map[v] for v in K1._label}
        ke = {e: f.edge_map[e] for e in K1._src}
        if set(kn.values()) != set(K2._label) or set(ke.values()) != set(K2._src):
            continue
        # the restriction to K must itself be an isomorphism K1 -> K2
        if any(K1._label[v] != K2._label[w] or K1._rooted[v] != K2._rooted[w]
               for v, w in kn.items()):
            continue
        if next(iter_morphisms(r1.right, r2.right, ISO, kn, ke), None) is not None:
            return True
    return False


def compose_tracks(*tracks: dict) -> dict:
    """Compose partial node maps left to right."""
    out = dict(tracks[0]) if tracks else {}
    for t in tracks[1:]:
        out = {v: t[w] for v, w in out.items() if w in t}
    return out


def step_roots_invariant(step: DerivationStep) -> bool:
    return step.host.root_count() == step.result.root_count()


def inverse_step(step: DerivationStep) -> DerivationStep:
    """The step H => G by the inverted rule at the comatch, reusing G's own ids."""
    back = {w: v for v, w in step.track.items()}
    return DerivationStep(invert(step.rule), step.comatch, step.result, step.intermediate,
                          step.host, step.match, back)


def is_inverse_step(step: DerivationStep) -> Optional[DerivationStep]:
    """Apply the inverse rule at the comatch; returns the step if it yields G back up to iso."""
    back = apply(invert(step.rule), step.comatch)
    if is_isomorphic(back.result, step.host) is None:
        return None
    return back


def make_rule(name: str, left: Graph, interface: Graph, right: Graph) -> Rule:
    return Rule(name, left, interface, right)


def rules_by_name(rules: Iterable[Rule]) -> dict[str, Rule]:
    return {r.name: r for r in rules}
