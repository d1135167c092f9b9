"""Reading and writing the plain-text graph, rule and system formats.

    alphabet { nodes: a, b; edges: x, y }
    graph {
      node 1 [label=a, root=1]
      node 2 []
      edge 10: 1 -> 2 [label=x]
    }
    rule name { left { ... } interface { ... } right { ... } }
    accept { ... }     # optional accepting graph of a system
    start { ... }      # optional start graph of a grammar

``#`` starts a comment. A missing alphabet is inferred from the labels used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import InvalidRule, ParseError
from .graph import BOX, EdgeRec, Graph, LabelAlphabet, NodeRec
from .rules import Rule

PUNCT = set("{}[],;:=")


@dataclass
class Token:
    kind: str   # word, punct, arrow, eof
    text: str
    line: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        i, n = 0, len(line)
        while i < n:
            c = line[i]
            if c.isspace():
                i += 1
            elif line.startswith("->", i):
                toks.append(Token("arrow", "->", lineno))
                i += 2
            elif c in PUNCT:
                toks.append(Token("punct", c, lineno))
                i += 1
            else:
                j = i
                while j < n and not line[j].isspace() and line[j] not in PUNCT \
                        and not line.startswith("->", j):
                    j += 1
                toks.append(Token("word", line[i:j], lineno))
                i = j
    last = len(text.splitlines()) or 1
    toks.append(Token("eof", "", last))
    return toks


@dataclass
class _RawGraph:
    nodes: list[NodeRec] = field(default_factory=list)
    edges: list[tuple] = field(default_factory=list)  # (id, src, tgt, label-or-None, line)
    line: int = 0


@dataclass
class Document:
    alphabet: Optional[LabelAlphabet] = None
    name: Optional[str] = None
    graphs: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)
    accept: Optional[Graph] = None
    start: Optional[Graph] = None

    @property
    def graph(self) -> Graph:
        if not self.graphs:
            raise ValueError("document contains no graph")
        return next(iter(self.graphs.values()))


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text or t.kind == "eof":
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line)
        return t

    def word(self, what: str) -> Token:
        t = self.next()
        if t.kind != "word":
            raise ParseError(f"expected {what}, found {t.text or 'end of input'!r}", t.line)
        return t

    def integer(self, what: str) -> int:
        t = self.word(what)
        try:
            val = int(t.text)
        except ValueError:
            raise ParseError(f"expected integer {what}, found {t.text!r}", t.line) from None
        if val < 0:
            raise ParseError(f"{what} must be non-negative", t.line)
        return val

    def labels(self) -> list[str]:
        out = []
        while self.peek().kind == "word":
            out.append(self.next().text)
            if self.peek().text == ",":
                self.next()
        return out

    def alphabet(self) -> LabelAlphabet:
        self.expect("{")
        nodes: list[str] = []
        edges: list[str] = []
        while self.peek().text != "}":
            key = self.word("'nodes' or 'edges'")
            self.expect(":")
            labs = self.labels()
            if key.text == "nodes":
                nodes = labs
            elif key.text == "edges":
                edges = labs
            else:
                raise ParseError(f"unknown alphabet section {key.text!r}", key.line)
            if self.peek().text == ";":
                self.next()
        self.expect("}")
        return LabelAlphabet.of(nodes, edges)

    def attrs(self) -> dict:
        self.expect("[")
        out: dict = {}
        while self.peek().text != "]":
            key = self.word("attribute name")
            self.expect("=")
            val = self.word("attribute value")
            if key.text in out:
                raise ParseError(f"duplicate attribute {key.text!r}", key.line)
            if key.text == "root":
                if val.text not in ("0", "1"):
                    raise ParseError("root must be 0 or 1", val.line)
                out["root"] = val.text == "1"
            elif key.text == "label":
                out["label"] = val.text
            else:
                raise ParseError(f"unknown attribute {key.text!r}", key.line)
            if self.peek().text == ",":
                self.next()
        self.expect("]")
        return out

    def body(self) -> _RawGraph:
        start = self.expect("{")
        raw = _RawGraph(line=start.line)
        seen_n: set[int] = set()
        seen_e: set[int] = set()
        while self.peek().text != "}":
            t = self.word("'node' or 'edge'")
            if t.text == "node":
                v = self.integer("node id")
                if v in seen_n:
                    raise ParseError(f"duplicate node id {v}", t.line)
                seen_n.add(v)
                a = self.attrs() if self.peek().text == "[" else {}
                raw.nodes.append(NodeRec(v, a.get("label"), a.get("root")))
            elif t.text == "edge":
                e = self.integer("edge id")
                if e in seen_e:
                    raise ParseError(f"duplicate edge id {e}", t.line)
                seen_e.add(e)
                self.expect(":")
                s = self.integer("source id")
                arrow = self.next()
                if arrow.kind != "arrow":
                    raise ParseError("expected '->'", arrow.line)
                tg = self.integer("target id")
                a = self.attrs() if self.peek().text == "[" else {}
                if "root" in a:
                    raise ParseError("edges have no rootedness", t.line)
                raw.edges.append((e, s, tg, a.get("label"), t.line))
            else:
                raise ParseError(f"expected 'node' or 'edge', found {t.text!r}", t.line)
        self.expect("}")
        return raw

    def document(self) -> tuple[Document, list]:
        doc = Document()
        pending: list = []  # (kind, name, raws, line)
        while self.peek().kind != "eof":
            t = self.word("a declaration")
            if t.text == "alphabet":
                if doc.alphabet is not None:
                    raise ParseError("alphabet declared twice", t.line)
                doc.alphabet = self.alphabet()
            elif t.text == "system":
                doc.name = self.word("system name").text
                if self.peek().text == ";":
                    self.next()
            elif t.text == "graph":
                name = self.next().text if self.peek().kind == "word" else f"graph{len(pending)}"
                pending.append(("graph", name, [self.body()], t.line))
            elif t.text in ("accept", "start"):
                pending.append((t.text, t.text, [self.body()], t.line))
            elif t.text == "rule":
                name = self.word("rule name").text
                self.expect("{")
                parts = {}
                for part in ("left", "interface", "right"):
                    self.expect(part)
                    parts[part] = self.body()
                self.expect("}")
                pending.append(("rule", name, [parts["left"], parts["interface"], parts["right"]], t.line))
            else:
                raise ParseError(f"unknown declaration {t.text!r}", t.line)
        return doc, pending


def _infer_alphabet(pending: list) -> LabelAlphabet:
    nl, el = set(), set()
    for _, _, raws, _ in pending:
        for raw in raws:
            nl.update(n.label for n in raw.nodes if n.label is not None)
            el.update(e[3] for e in raw.edges if e[3] is not None)
            if not el and any(e[3] is None for e in raw.edges):
                el.add(BOX)
    return LabelAlphabet.of(nl, el)


def _build(raw: _RawGraph, a: LabelAlphabet) -> Graph:
    known = {n.id for n in raw.nodes}
    for n in raw.nodes:
        if n.label is not None and n.label not in a.node_labels:
            raise ParseError(f"node {n.id}: label {n.label!r} not in alphabet", raw.line)
    edges = []
    for e, s, t, lab, line in raw.edges:
        if s not in known or t not in known:
            raise ParseError(f"edge {e}: endpoint is not a declared node", line)
        if lab is None:
            if len(a.edge_labels) != 1:
                raise ParseError(f"edge {e}: label required", line)
            lab = next(iter(a.edge_labels))
        if lab not in a.edge_labels:
            raise ParseError(f"edge {e}: label {lab!r} not in alphabet", line)
        edges.append(EdgeRec(e, s, t, lab))
    return Graph(a, raw.nodes, edges)


def parse_document(text: str) -> Document:
    doc, pending = _Parser(text).document()
    a = doc.alphabet or _infer_alphabet(pending)
    doc.alphabet = a
    for kind, name, raws, line in pending:
        gs = [_build(r, a) for r in raws]
        if kind == "graph":
            doc.graphs[name] = gs[0]
        elif kind == "accept":
            doc.accept = gs[0]
        elif kind == "start":
            doc.start = gs[0]
        else:
            try:
                doc.rules.append(Rule(name, *gs))
            except InvalidRule as exc:
                raise ParseError(str(exc), line) from None
    return doc


def parse_graph(text: str) -> Graph:
    return parse_document(text).graph


def load_document(path) -> Document:
    return parse_document(Path(path).read_text(encoding="utf-8"))


# -- writing ---------------------------------------------------------------

def format_alphabet(a: LabelAlphabet) -> str:
    return (f"alphabet {{ nodes: {', '.join(sorted(a.node_labels))}; "
            f"edges: {', '.join(sorted(a.edge_labels))} }}")


def format_body(g: Graph, indent: str = "  ") -> list[str]:
    lines = []
    for n in g.nodes():
        attrs = []
        if n.label is not None:
            attrs.append(f"label={n.label}")
        if n.rooted is not None:
            attrs.append(f"root={int(n.rooted)}")
        lines.append(f"{indent}node {n.id} [{', '.join(attrs)}]")
    for e in g.edges():
        lines.append(f"{indent}edge {e.id}: {e.src} -> {e.tgt} [label={e.label}]")
    return lines


def format_graph(g: Graph, name: Optional[str] = None, alphabet: bool = True) -> str:
    lines = [format_alphabet(g.alphabet)] if alphabet else []
    lines.append(f"graph {name} {{" if name else "graph {")
    lines += format_body(g)
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_rule(r: Rule) -> str:
    lines = [f"rule {r.name} {{"]
    for part, g in (("left", r.left), ("interface", r.interface), ("right", r.right)):
        lines.append(f"  {part} {{")
        lines += format_body(g, "    ")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_system(rules, alphabet: LabelAlphabet, name: Optional[str] = None,
                  accept: Optional[Graph] = None, start: Optional[Graph] = None) -> str:
    out = [format_alphabet(alphabet) + "\n"]
    if name:
        out.append(f"system {name}\n")
    for r in rules:
        out.append(format_rule(r))
    for key, g in (("accept", accept), ("start", start)):
        if g is not None:
            out.append("\n".join([f"{key} {{"] + format_body(g) + ["}"]) + "\n")
    return "".join(out)
