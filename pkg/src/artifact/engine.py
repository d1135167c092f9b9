"""Root-anchored matching and the reduction/recognition drivers.

Matching a fast rule starts from the host's rooted nodes (looked up by label
in the root registry) and grows outward only along incident edges of nodes
already matched. On hosts of bounded degree and bounded root count the work
per call is therefore independent of the host's size.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import NotFastRule, StepBudgetExceeded
from .graph import EdgeRec, Graph, NodeRec, components
from .morphisms import Morphism, is_isomorphic, signature
from .rules import DerivationStep, Rule, apply, matches

FIRST_MATCH = "first_match"
ALL_NORMAL_FORMS = "all_normal_forms"


@dataclass(frozen=True)
class EngineConfig:
    degree_bound: Optional[int] = None
    root_bound: Optional[int] = None
    max_steps: Optional[int] = None
    strategy: str = FIRST_MATCH
    snapshot_every: int = 0   # 0 disables periodic snapshots in traces

    def __post_init__(self):
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.strategy not in (FIRST_MATCH, ALL_NORMAL_FORMS):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        for name in ("degree_bound", "root_bound"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise ValueError(f"{name} must be positive")


class VisitCounter:
    """Counts host nodes and edges inspected by the rooted matcher."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


# -- static checks ------------------------------------------------------------

def is_fast(r: Rule) -> bool:
    L = r.left
    return all(any(L._rooted[v] is True for v in comp) for comp in components(L))


@dataclass(frozen=True)
class BoundsReport:
    degree_ok: Optional[bool]
    roots_ok: bool


def preserves_bounds(r: Rule, cfg: EngineConfig) -> BoundsReport:
    L, K, R = r.left, r.interface, r.right
    degree_ok = None
    if cfg.degree_bound is not None:
        n = cfg.degree_bound
        degree_ok = all(R.degree(v) <= n for v in r.created_nodes()) and \
            all(R.degree(v) <= L.degree(v) for v in K._label)
    roots_ok = R.root_count() <= L.root_count()
    return BoundsReport(degree_ok, roots_ok)


# -- rooted matching -----------------------------------------------------------

class _Plan:
    """Search plan for a fast rule: per component, an anchor and edge walk."""

    def __init__(self, r: Rule):
        if not is_fast(r):
            raise NotFastRule(f"rule {r.name} has a component without a root")
        L = r.left
        self.rule = r
        kept = r.interface._label
        # (label, rooted, outdeg, indeg, deleted)
        self.info = {v: (L._label[v], L._rooted[v], len(L._out[v]), len(L._in[v]), v not in kept)
                     for v in L._label}
        self.comps = []
        for comp in components(L):
            root = min(v for v in comp if L._rooted[v] is True)
            steps = []
            seen_n = {root}
            seen_e: set[int] = set()
            frontier = [root]
            while frontier:
                nxt = []
                for a in frontier:
                    for e in sorted(L._out[a] | L._in[a]):
                        if e in seen_e:
                            continue
                        seen_e.add(e)
                        out = L._src[e] == a
                        b = L._tgt[e] if out else L._src[e]
                        steps.append((e, a, out, b, b not in seen_n))
                        if b not in seen_n:
                            seen_n.add(b)
                            nxt.append(b)
                frontier = nxt
            self.comps.append((root, L._label[root], steps))


def _iter_plan(plan: _Plan, G: Graph, counter: Optional[VisitCounter]) -> Iterator[tuple[dict, dict]]:
    info = plan.info
    comps = plan.comps
    elabel = plan.rule.left._elabel
    nm: dict[int, int] = {}
    em: dict[int, int] = {}
    used_n: set[int] = set()
    used_e: set[int] = set()
    g_label, g_rooted, g_out, g_in = G._label, G._rooted, G._out, G._in
    g_src, g_tgt, g_elabel = G._src, G._tgt, G._elabel
    visits = [0]

    def node_ok(v: int, w: int) -> bool:
        lab, rt, od, idg, deleted = info[v]
        if w in used_n or g_label[w] != lab or g_rooted[w] != rt:
            return False
        ho, hi = len(g_out[w]), len(g_in[w])
        if deleted:
            return ho == od and hi == idg
        return ho >= od and hi >= idg

    def walk(ci: int, si: int):
        if ci == len(comps):
            yield
            return
        root, root_label, steps = comps[ci]
        if si == 0:
            for w in sorted(G.roots_with_label(root_label)):
                visits[0] += 1
                if not node_ok(root, w):
                    continue
                nm[root] = w
                used_n.add(w)
                yield from walk(ci, 1)
                del nm[root]
                used_n.discard(w)
            return
        if si > len(steps):
            yield from walk(ci + 1, 0)
            return
        le, a, out, b, fresh = steps[si - 1]
        ha = nm[a]
        lab = elabel[le]
        for he in sorted(g_out[ha] if out else g_in[ha]):
            visits[0] += 1
            if he in used_e or g_elabel[he] != lab:
                continue
            hb = g_tgt[he] if out else g_src[he]
            if fresh:
                visits[0] += 1
                if not node_ok(b, hb):
                    continue
                nm[b] = hb
                used_n.add(hb)
            elif nm[b] != hb:
                continue
            em[le] = he
            used_e.add(he)
            yield from walk(ci, si + 1)
            del em[le]
            used_e.discard(he)
            if fresh:
                del nm[b]
                used_n.discard(hb)

    try:
        for _ in walk(0, 0):
            yield dict(nm), dict(em)
    finally:
        if counter is not None:
            counter.count += visits[0]


def iter_rooted_matches(r: Rule, G: Graph, counter: Optional[VisitCounter] = None,
                        plan: Optional[_Plan] = None) -> Iterator[tuple[dict, dict]]:
    """Lazily yield (node_map, edge_map) pairs in tie-break order."""
    return _iter_plan(plan or _Plan(r), G, counter)


def rooted_matches(r: Rule, G: Graph, counter: Optional[VisitCounter] = None) -> list[Morphism]:
    """All dangling-respecting injective matches of a fast rule, found from the roots."""
    return [Morphism(r.left, G, nm, em) for nm, em in iter_rooted_matches(r, G, counter)]


# -- traces -------------------------------------------------------------------

@dataclass
class TraceStep:
    """Compact record of one step: the match and the applied delta."""
    rule: Rule
    node_map: dict
    edge_map: dict
    deleted_nodes: list        # NodeRec as they were in the host
    deleted_edges: list        # EdgeRec
    relabelled: list           # (node, (old label, old rooted), (new label, new rooted))
    added_nodes: list          # NodeRec
    added_edges: list          # EdgeRec

    def track(self, host_nodes) -> dict:
        gone = {n.id for n in self.deleted_nodes}
        return {v: v for v in host_nodes if v not in gone}

    def replay(self, g: Graph) -> None:
        for e in self.deleted_edges:
            g._remove_edge(e.id)
        for n in self.deleted_nodes:
            g._remove_node(n.id)
        for v, _, new in self.relabelled:
            g._set_node(v, *new)
        for n in self.added_nodes:
            g._add_node(n.id, n.label, n.rooted)
        for e in self.added_edges:
            g._add_edge(e.id, e.src, e.tgt, e.label)

    @classmethod
    def from_derivation(cls, step: DerivationStep) -> "TraceStep":
        G, H = step.host, step.result
        r = step.rule
        dn = [G.node(step.match.node_map[v]) for v in r.deleted_nodes()]
        de = [G.edge(step.match.edge_map[e]) for e in r.deleted_edges()]
        rel = []
        for v in sorted(step.track):
            w = step.track[v]
            old = (G._label[v], G._rooted[v])
            new = (H._label[w], H._rooted[w])
            if old != new:
                rel.append((w, old, new))
        an = [H.node(step.comatch.node_map[v]) for v in r.created_nodes()]
        ae = [H.edge(step.comatch.edge_map[e]) for e in r.created_edges()]
        return cls(r, dict(step.match.node_map), dict(step.match.edge_map), dn, de, rel, an, ae)


@dataclass
class Trace:
    initial: Graph
    steps: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)   # step index -> graph after that many steps

    def __len__(self) -> int:
        return len(self.steps)

    def graphs(self) -> Iterator[Graph]:
        """Yield the graph before the first step and after every step.

        The same working object is mutated between yields; copy it to keep it.
        """
        g = self.initial.copy()
        yield g
        for s in self.steps:
            s.replay(g)
            yield g

    def graph_at(self, i: int) -> Graph:
        base = max((k for k in self.snapshots if k <= i), default=0)
        g = (self.snapshots[base] if base else self.initial).copy()
        for s in self.steps[base:i]:
            s.replay(g)
        return g

    def derivation_step(self, i: int) -> DerivationStep:
        host = self.graph_at(i)
        s = self.steps[i]
        return apply(s.rule, Morphism(s.rule.left, host, dict(s.node_map), dict(s.edge_map)))

    def track(self) -> dict:
        alive = {v: v for v in self.initial._label}
        for s in self.steps:
            gone = {n.id for n in s.deleted_nodes}
            alive = {v: w for v, w in alive.items() if w not in gone}
        return alive


# -- reduction ----------------------------------------------------------------

class _Reducer:
    def __init__(self, rules: Sequence[Rule], G: Graph, cfg: EngineConfig,
                 counter: Optional[VisitCounter]):
        self.rules = list(rules)
        self.plans = [(_Plan(r) if is_fast(r) else None) for r in self.rules]
        self.cfg = cfg
        self.counter = counter
        self.g = G.copy()
        self.trace = Trace(G.copy())
        self.next_node = G.max_node_id() + 1
        self.next_edge = G.max_edge_id() + 1

    def first_match(self):
        for r, plan in zip(self.rules, self.plans):
            if plan is not None:
                found = next(_iter_plan(plan, self.g, self.counter), None)
            else:
                ms = matches(r, self.g)
                found = (ms[0].node_map, ms[0].edge_map) if ms else None
            if found is not None:
                return r, found
        return None

    def step(self, r: Rule, nm: dict, em: dict) -> TraceStep:
        g = self.g
        K, R = r.interface, r.right
        de = [EdgeRec(em[e], g._src[em[e]], g._tgt[em[e]], g._elabel[em[e]]) for e in r.deleted_edges()]
        dn = [NodeRec(nm[v], g._label[nm[v]], g._rooted[nm[v]]) for v in r.deleted_nodes()]
        for e in de:
            g._remove_edge(e.id)
        for n in dn:
            g._remove_node(n.id)
        rel = []
        for v in K._label:
            w = nm[v]
            old = (g._label[w], g._rooted[w])
            new = (R._label[v] if K._label[v] is None else old[0],
                   R._rooted[v] if K._rooted[v] is None else old[1])
            if new != old:
                g._set_node(w, *new)
                rel.append((w, old, new))
        img = dict((v, nm[v]) for v in K._label)
        an = []
        for v in r.created_nodes():
            img[v] = self.next_node
            n = NodeRec(self.next_node, R._label[v], R._rooted[v])
            g._add_node(*n)
            an.append(n)
            self.next_node += 1
        ae = []
        for e in r.created_edges():
            rec = EdgeRec(self.next_edge, img[R._src[e]], img[R._tgt[e]], R._elabel[e])
            g._add_edge(*rec)
            ae.append(rec)
            self.next_edge += 1
        return TraceStep(r, nm, em, dn, de, rel, an, ae)

    def run(self) -> "Reduction":
        limit = self.cfg.max_steps
        snap = self.cfg.snapshot_every
        while True:
            found = self.first_match()
            if found is None:
                break
            if limit is not None and len(self.trace.steps) >= limit:
                raise StepBudgetExceeded(f"step budget of {limit} exhausted", self.trace)
            r, (nm, em) = found
            self.trace.steps.append(self.step(r, nm, em))
            if snap and len(self.trace.steps) % snap == 0:
                self.trace.snapshots[len(self.trace.steps)] = self.g.copy()
        return Reduction(self.g, self.trace, FIRST_MATCH, all(p is not None for p in self.plans))


@dataclass
class Reduction:
    normal_form: Graph
    trace: Trace
    strategy: str
    fast: bool
    alternatives: list = field(default_factory=list)  # (normal form, trace) per distinct normal form

    @property
    def steps(self) -> list:
        return self.trace.steps


def _all_successors(rules: Sequence[Rule], G: Graph) -> list[DerivationStep]:
    out = []
    for r in rules:
        if is_fast(r):
            ms = rooted_matches(r, G)
        else:
            ms = matches(r, G)
        out.extend(apply(r, m, check=False) for m in ms)
    return out


def _reduce_all(rules: Sequence[Rule], G: Graph, cfg: EngineConfig) -> Reduction:
    forms: list[tuple[Graph, list]] = []
    seen: dict[tuple, list[Graph]] = {}

    def visited(g: Graph) -> bool:
        bucket = seen.setdefault(signature(g), [])
        if any(is_isomorphic(g, h) is not None for h in bucket):
            return True
        bucket.append(g)
        return False

    stack = [(G, [])]
    visited(G)
    while stack:
        g, path = stack.pop()
        succ = _all_successors(rules, g)
        if not succ:
            if not any(is_isomorphic(g, f) is not None for f, _ in forms):
                forms.append((g, path))
            continue
        if cfg.max_steps is not None and len(path) >= cfg.max_steps:
            raise StepBudgetExceeded(f"step budget of {cfg.max_steps} exhausted",
                                     Trace(G.copy(), [TraceStep.from_derivation(s) for s in path]))
        for s in reversed(succ):
            if not visited(s.result):
                stack.append((s.result, path + [s]))
    # canonical order: shortest trace first, then discovery order
    forms.sort(key=lambda f: len(f[1]))
    alts = [(g, Trace(G.copy(), [TraceStep.from_derivation(s) for s in p])) for g, p in forms]
    nf, tr = alts[0]
    return Reduction(nf, tr, ALL_NORMAL_FORMS, all(is_fast(r) for r in rules), alts)


def reduce(rules: Sequence[Rule], G: Graph, cfg: EngineConfig = EngineConfig(),
           counter: Optional[VisitCounter] = None) -> Reduction:
    if cfg.strategy == ALL_NORMAL_FORMS:
        return _reduce_all(rules, G, cfg)
    return _Reducer(rules, G, cfg, counter).run()


@dataclass
class Recognition:
    accepted: bool
    strategy: str
    fast: bool
    reduction: Reduction


def recognize_report(rules: Sequence[Rule], G: Graph, accept: Graph,
                     cfg: EngineConfig = EngineConfig()) -> Recognition:
    red = reduce(rules, G, cfg)
    forms = [f for f, _ in red.alternatives] or [red.normal_form]
    ok = any(is_isomorphic(f, accept) is not None for f in forms)
    return Recognition(ok, red.strategy, red.fast, red)


def recognize(rules: Sequence[Rule], G: Graph, accept: Graph,
              cfg: EngineConfig = EngineConfig()) -> bool:
    return recognize_report(rules, G, accept, cfg).accepted


@dataclass(frozen=True)
class BenchRow:
    family: str
    size: int
    steps: int
    wall_ns: int
    visited_items: int


def timed_reduce(rules: Sequence[Rule], G: Graph, cfg: EngineConfig = EngineConfig()) -> tuple[int, int, int]:
    """(steps, wall_ns, visited_items) for one first-match reduction."""
    counter = VisitCounter()
    t0 = time.perf_counter_ns()
    red = _Reducer(rules, G, cfg, counter).run()
    wall = time.perf_counter_ns() - t0
    return len(red.steps), wall, counter.count
