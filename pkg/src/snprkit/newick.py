"""
Extended Newick input and output.

Reticulations are written with hybrid tags ``#Hk``: the occurrence that
carries children defines the vertex, every other occurrence is a bare
reference.  The outermost parenthesis pair stands for the pendant root,
so a cherry on two leaves reads ``((1,2));``.  Branch lengths, support
values and bracketed comments are accepted and discarded.
"""

from __future__ import annotations

import re

from .network import Network, NetworkError, label_sort_key, validate

__all__ = ["ENewickError", "parse_enewick", "write_enewick", "read_enewick_file"]


class ENewickError(NetworkError):
    """Malformed extended Newick text."""

    def __init__(self, message: str, position: int | None = None, violations=None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message, violations)
        self.position = position


_NAME = re.compile(r"[^()\[\],:;#\s']+")
_HYBRID = re.compile(r"#([A-Za-z]*)(\d+)")
_LENGTH = re.compile(r":[^(),:;\[\]]*")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.children: dict[int, list[int]] = {}
        self.labels: dict[int, str] = {}
        self.hybrids: dict[str, int] = {}
        self.defined: set[str] = set()

    def error(self, message: str):
        raise ENewickError(message, self.pos)

    def skip(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                end = text.find("]", self.pos)
                if end < 0:
                    self.error("unterminated comment")
                self.pos = end + 1
            else:
                return

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def new_vertex(self) -> int:
        v = len(self.children)
        self.children[v] = []
        return v

    def parse(self) -> Network:
        if self.peek() != "(":
            self.error("expected '(' at start of network")
        top = self.subtree()
        if self.peek() != ";":
            self.error("expected ';' at end of network" if self.pos >= len(self.text) else "unexpected character")
        self.pos += 1
        if self.peek():
            self.error("trailing text after ';'")
        missing = sorted(tag for tag in self.hybrids if tag not in self.defined)
        if missing:
            raise ENewickError(f"hybrid tag(s) {missing} are referenced but never defined")
        if len(self.children[top]) != 1 or top in self.labels:
            # tolerate the out-degree-two root convention by adding the pendant edge
            root = self.new_vertex()
            self.children[root].append(top)
            top = root
        net = Network({v: tuple(k) for v, k in self.children.items()}, self.labels, top)
        problems = validate(net)
        if problems:
            raise ENewickError("; ".join(p.message for p in problems), None, problems)
        return net

    def subtree(self) -> int:
        kids: list[int] = []
        has_group = False
        if self.peek() == "(":
            has_group = True
            self.pos += 1
            while True:
                if self.peek() in (")", ","):
                    self.error("empty subtree")
                kids.append(self.subtree())
                ch = self.peek()
                if ch == ",":
                    self.pos += 1
                elif ch == ")":
                    self.pos += 1
                    break
                elif ch == "":
                    self.error("unexpected end of input, missing ')'")
                else:
                    self.error(f"unexpected character {ch!r}")
        self.skip()
        name = None
        m = _NAME.match(self.text, self.pos)
        if m:
            name = m.group()
            self.pos = m.end()
        tag = None
        m = _HYBRID.match(self.text, self.pos)
        if m:
            tag = m.group(1).upper() + m.group(2)
            self.pos = m.end()
        elif self.pos < len(self.text) and self.text[self.pos] == "#":
            self.error("malformed hybrid tag")
        self.skip()
        m = _LENGTH.match(self.text, self.pos)
        while m:
            self.pos = m.end()
            m = _LENGTH.match(self.text, self.pos)
        if not has_group and name is None and tag is None:
            self.error("expected a leaf label, '(' or a hybrid tag" if self.pos < len(self.text) else "unexpected end of input")
        if tag is not None:
            v = self.hybrids.get(tag)
            if v is None:
                v = self.hybrids[tag] = self.new_vertex()
            if has_group:
                if tag in self.defined:
                    self.error(f"hybrid {tag} defined twice")
                self.defined.add(tag)
                self.children[v].extend(kids)
            elif name is not None:
                # "A#H1" names a leaf hanging below the reticulation
                if tag in self.defined:
                    self.error(f"hybrid {tag} defined twice")
                self.defined.add(tag)
                self.children[v].append(self.leaf(name))
            return v
        if has_group:
            v = self.new_vertex()
            self.children[v].extend(kids)
            return v
        return self.leaf(name)

    def leaf(self, name: str) -> int:
        if name in self.labels.values():
            self.error(f"duplicate leaf label {name!r}")
        v = self.new_vertex()
        self.labels[v] = name
        return v


def parse_enewick(text: str) -> Network:
    """Parse one network; raises :class:`ENewickError` on any problem.

    >>> net = parse_enewick("((1,2));")
    >>> sorted(net.labels.values()), len(net.reticulations)
    (['1', '2'], 0)
    """
    return _Parser(text.strip()).parse()


def read_enewick_file(path) -> list[Network]:
    """All networks in a file, one per line; ``//`` and blank lines are skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("//"):
                out.append(parse_enewick(line))
    return out


def write_enewick(net: Network) -> str:
    """Deterministic text form; isomorphic networks produce the same string."""
    ch = net.children
    ranks = net.canonical_ranks
    min_label: dict[int, tuple] = {}
    for v in reversed(net.order):
        if v in net.labels:
            min_label[v] = label_sort_key(net.labels[v])
        else:
            min_label[v] = min((min_label[c] for c in ch[v]), default=(2, 0, ""))
    pa = net.parents
    tags: dict[int, int] = {}
    out: list[str] = []

    def emit(v: int):
        if len(pa[v]) >= 2:
            if v in tags:
                out.append(f"#H{tags[v]}")
                return
            tags[v] = len(tags) + 1
            out.append("(")
            emit_kids(v)
            out.append(f")#H{tags[v]}")
            return
        if v in net.labels:
            out.append(net.labels[v])
            return
        out.append("(")
        emit_kids(v)
        out.append(")")

    def emit_kids(v: int):
        kids = sorted(ch[v], key=lambda c: (min_label[c], ranks[c]))
        for i, c in enumerate(kids):
            if i:
                out.append(",")
            emit(c)

    out.append("(")
    emit_kids(net.root)
    out.append(");")
    return "".join(out)
