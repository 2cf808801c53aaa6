"""
Rooted binary phylogenetic networks with a pendant root.

A :class:`Network` is stored as a child map ``vertex -> tuple of children``
(a child appears twice when two parallel edges join the same pair), a map
from leaf vertices to their labels, and the id of the root.  Instances are
treated as immutable; every derived quantity is computed lazily and cached.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator

__all__ = [
    "Network",
    "NetworkError",
    "VertexKind",
    "Violation",
    "label_sort_key",
    "validate",
    "reticulation_count",
    "is_tree",
    "is_tree_child",
    "is_reticulation_visible",
    "is_tree_based",
    "is_isomorphic",
    "isomorphism",
    "canonical_key",
]


class VertexKind(enum.Enum):
    ROOT = "root"
    LEAF = "leaf"
    TREE = "inner-tree"
    RETICULATION = "reticulation"

    @property
    def is_tree_vertex(self) -> bool:
        return self is not VertexKind.RETICULATION


class NetworkError(ValueError):
    """Raised when a graph fails the phylogenetic network invariants."""

    def __init__(self, message: str, violations: list["Violation"] | None = None):
        super().__init__(message)
        self.violations = violations or []


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    vertices: tuple[int, ...] = ()
    edges: tuple[tuple[int, int], ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "message": self.message,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
        }


_NUM = re.compile(r"^-?\d+$")


def label_sort_key(label: str):
    """Natural order: numeric labels by value, then everything else."""
    if _NUM.match(label):
        return (0, int(label), label)
    return (1, 0, label)


def _replace_one(tup: tuple, old, new) -> tuple:
    i = tup.index(old)
    return tup[:i] + (new,) + tup[i + 1:]


def _remove_one(tup: tuple, old) -> tuple:
    i = tup.index(old)
    return tup[:i] + tup[i + 1:]


class Network:
    """A rooted binary phylogenetic network on a set of leaf labels.

    Construct through :func:`snprkit.newick.parse_enewick`,
    :meth:`from_edges` or the rewrite operations in :mod:`snprkit.moves`.
    The constructor does not validate; call :func:`validate` (or
    :meth:`checked`) when the input is untrusted.
    """

    __slots__ = (
        "children",
        "labels",
        "root",
        "_parents",
        "_order",
        "_desc",
        "_key",
        "_ranks",
        "_leaf_of",
    )

    def __init__(self, children: dict[int, tuple[int, ...]], labels: dict[int, str], root: int):
        self.children = children
        self.labels = labels
        self.root = root
        self._parents = None
        self._order = None
        self._desc = None
        self._key = None
        self._ranks = None
        self._leaf_of = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]],
        labels: dict[int, str],
        root: int | None = None,
    ) -> "Network":
        """Build a network from an edge list (parallel edges listed twice)."""
        children: dict[int, list[int]] = {}
        for u, v in edges:
            children.setdefault(u, []).append(v)
            children.setdefault(v, [])
        for leaf in labels:
            children.setdefault(leaf, [])
        if root is None:
            heads = {v for kids in children.values() for v in kids}
            sources = [v for v in children if v not in heads]
            if len(sources) != 1:
                raise NetworkError(f"expected exactly one source vertex, found {sorted(sources)}")
            root = sources[0]
        return cls({u: tuple(kids) for u, kids in children.items()}, dict(labels), root)

    def checked(self) -> "Network":
        """Return ``self`` after validation; raise :class:`NetworkError` otherwise."""
        problems = validate(self)
        if problems:
            raise NetworkError("; ".join(p.message for p in problems), problems)
        return self

    def copy(self) -> "Network":
        return Network(dict(self.children), dict(self.labels), self.root)

    def relabel(self, mapping: dict[str, str]) -> "Network":
        """Return a copy with leaf labels renamed by ``mapping`` (missing keys kept)."""
        return Network(
            dict(self.children),
            {v: mapping.get(lab, lab) for v, lab in self.labels.items()},
            self.root,
        )

    # -- basic structure --------------------------------------------------

    @property
    def vertices(self) -> list[int]:
        return list(self.children)

    @property
    def parents(self) -> dict[int, tuple[int, ...]]:
        if self._parents is None:
            pa: dict[int, list[int]] = {v: [] for v in self.children}
            for u, kids in self.children.items():
                for v in kids:
                    pa.setdefault(v, []).append(u)
            self._parents = {v: tuple(p) for v, p in pa.items()}
        return self._parents

    @property
    def edges(self) -> list[tuple[int, int]]:
        """All edges, parallel edges listed with multiplicity."""
        return [(u, v) for u, kids in self.children.items() for v in kids]

    def edge_descriptors(self) -> list[tuple[int, int, int]]:
        """Edges as ``(tail, head, index)``; the index separates parallel copies."""
        out = []
        for u, kids in self.children.items():
            if len(kids) == 2 and kids[0] == kids[1]:
                out.append((u, kids[0], 0))
                out.append((u, kids[0], 1))
            else:
                out.extend((u, v, 0) for v in kids)
        return out

    def distinct_edges(self) -> list[tuple[int, int]]:
        out = []
        for u, kids in self.children.items():
            if len(kids) == 2 and kids[0] == kids[1]:
                out.append((u, kids[0]))
            else:
                out.extend((u, v) for v in kids)
        return out

    def multiplicity(self, u: int, v: int) -> int:
        return self.children.get(u, ()).count(v)

    def kind(self, v: int) -> VertexKind:
        if v == self.root:
            return VertexKind.ROOT
        if not self.children[v]:
            return VertexKind.LEAF
        if len(self.parents[v]) == 2:
            return VertexKind.RETICULATION
        return VertexKind.TREE

    @property
    def leaves(self) -> list[int]:
        return [v for v, kids in self.children.items() if not kids and v != self.root]

    @property
    def reticulations(self) -> list[int]:
        pa = self.parents
        return [v for v in self.children if len(pa[v]) >= 2]

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(self.labels.values())

    def sorted_labels(self) -> tuple[str, ...]:
        return tuple(sorted(self.labels.values(), key=label_sort_key))

    def leaf(self, label: str) -> int:
        if self._leaf_of is None:
            self._leaf_of = {lab: v for v, lab in self.labels.items()}
        return self._leaf_of[label]

    def __len__(self) -> int:
        return len(self.children)

    def __repr__(self) -> str:
        from .newick import write_enewick

        try:
            text = write_enewick(self)
        except Exception:  # invalid graphs still need a repr
            text = f"<{len(self.edges)} edges>"
        return f"Network({text!r})"

    # -- orders and reachability ------------------------------------------

    @property
    def order(self) -> list[int]:
        """Topological order, root first (assumes acyclicity)."""
        if self._order is None:
            pa = self.parents
            missing = {v: len(pa[v]) for v in self.children}
            stack = [v for v, d in missing.items() if d == 0]
            out = []
            while stack:
                u = stack.pop()
                out.append(u)
                for v in self.children[u]:
                    missing[v] -= 1
                    if missing[v] == 0:
                        stack.append(v)
            self._order = out
        return self._order

    @property
    def descendant_masks(self) -> dict[int, int]:
        """Bit mask over vertex ids of every vertex reachable from ``v`` (``v`` included)."""
        if self._desc is None:
            desc: dict[int, int] = {}
            for v in reversed(self.order):
                m = 1 << v
                for c in self.children[v]:
                    m |= desc[c]
                desc[v] = m
            self._desc = desc
        return self._desc

    def is_descendant(self, a: int, v: int) -> bool:
        """True when ``a`` is ``v`` or reachable from ``v``."""
        return bool(self.descendant_masks[v] >> a & 1)

    def leaf_labels_below(self, v: int) -> frozenset[str]:
        mask = self.descendant_masks[v]
        return frozenset(lab for leaf, lab in self.labels.items() if mask >> leaf & 1)

    # -- canonical form ---------------------------------------------------

    @property
    def key(self) -> bytes:
        """Canonical byte string; equal keys iff the networks are isomorphic."""
        if self._key is None:
            self._key, self._ranks = _canonical(self)
        return self._key

    @property
    def canonical_ranks(self) -> dict[int, int]:
        if self._ranks is None:
            self._key, self._ranks = _canonical(self)
        return self._ranks

    @classmethod
    def from_key(cls, key: bytes, labels: tuple[str, ...]) -> "Network":
        """Inverse of :attr:`key` given the sorted label tuple of the network."""
        nv = key[0]
        codes = key[1 : 1 + nv]
        children: dict[int, list[int]] = {i: [] for i in range(nv)}
        body = key[1 + nv :]
        for i in range(0, len(body), 2):
            children[body[i]].append(body[i + 1])
        leaf_labels = {}
        root = -1
        for i, c in enumerate(codes):
            if c == _ROOT_CODE:
                root = i
            elif c >= _LEAF_CODE:
                leaf_labels[i] = labels[c - _LEAF_CODE]
        return cls({u: tuple(k) for u, k in children.items()}, leaf_labels, root)

    def __eq__(self, other) -> bool:  # isomorphism, not identity of ids
        if not isinstance(other, Network):
            return NotImplemented
        return self.label_set == other.label_set and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


# ---------------------------------------------------------------------------
# canonical labelling


_ROOT_CODE, _TREE_CODE, _RET_CODE, _LEAF_CODE = 0, 1, 2, 3


def _vertex_codes(net: Network) -> dict[int, int]:
    index = {lab: i for i, lab in enumerate(net.sorted_labels())}
    pa = net.parents
    codes = {}
    for v, kids in net.children.items():
        if v == net.root:
            codes[v] = _ROOT_CODE
        elif v in net.labels:
            codes[v] = _LEAF_CODE + index[net.labels[v]]
        elif len(pa[v]) >= 2:
            codes[v] = _RET_CODE
        else:
            codes[v] = _TREE_CODE
    return codes


def _encode(net: Network, codes: dict[int, int], colour: dict[int, int]) -> tuple[bytes, dict[int, int]]:
    ranked = sorted(net.children, key=colour.__getitem__)
    rank = {v: i for i, v in enumerate(ranked)}
    if len(ranked) > 255 or max(codes.values()) > 255:
        raise NetworkError("canonical keys support at most 255 vertices")
    edges = sorted((rank[u], rank[v]) for u, kids in net.children.items() for v in kids)
    out = bytearray([len(ranked)])
    out.extend(codes[v] for v in ranked)
    for a, b in edges:
        out.append(a)
        out.append(b)
    return bytes(out), rank


def _refine(net: Network, colour: dict[int, int]) -> dict[int, int]:
    ch, pa = net.children, net.parents
    cells = len(set(colour.values()))
    while True:
        new = {
            v: hash((colour[v], tuple(sorted(colour[c] for c in ch[v])), tuple(sorted(colour[p] for p in pa[v]))))
            for v in ch
        }
        n = len(set(new.values()))
        colour = new
        if n == cells:
            return colour
        cells = n


def _canonical(net: Network) -> tuple[bytes, dict[int, int]]:
    codes = _vertex_codes(net)
    ch, pa = net.children, net.parents
    order = net.order
    up: dict[int, int] = {}
    for v in reversed(order):
        kids = ch[v]
        if len(kids) == 2:
            a, b = up[kids[0]], up[kids[1]]
            up[v] = hash((codes[v], a, b) if a <= b else (codes[v], b, a))
        elif kids:
            up[v] = hash((codes[v], up[kids[0]]))
        else:
            up[v] = hash((codes[v],))
    colour: dict[int, int] = {}
    for v in order:
        ps = pa[v]
        if len(ps) == 2:
            a, b = colour[ps[0]], colour[ps[1]]
            colour[v] = hash((up[v], a, b) if a <= b else (up[v], b, a))
        elif ps:
            colour[v] = hash((up[v], colour[ps[0]]))
        else:
            colour[v] = up[v]
    if len(set(colour.values())) == len(colour):
        return _encode(net, codes, colour)
    return _individualise(net, codes, _refine(net, colour))


def _individualise(net, codes, colour) -> tuple[bytes, dict[int, int]]:
    cells: dict[int, list[int]] = {}
    for v, c in colour.items():
        cells.setdefault(c, []).append(v)
    ties = [c for c, members in cells.items() if len(members) > 1]
    if not ties:
        return _encode(net, codes, colour)
    target = min(ties)
    best = None
    for v in sorted(cells[target]):
        trial = dict(colour)
        trial[v] = hash((colour[v], -1))
        result = _individualise(net, codes, _refine(net, trial))
        if best is None or result[0] < best[0]:
            best = result
    return best


def canonical_key(net: Network) -> bytes:
    return net.key


# ---------------------------------------------------------------------------
# validation


def validate(net: Network) -> list[Violation]:
    """Check every network invariant; an empty list means ``net`` is valid."""
    out: list[Violation] = []
    ch = net.children
    indeg = {v: 0 for v in ch}
    for u, kids in ch.items():
        for v in kids:
            if v not in indeg:
                out.append(Violation("vertex", f"edge ({u}, {v}) points to an unknown vertex", (v,), ((u, v),)))
                continue
            indeg[v] += 1
    if out:
        return out
    root = net.root
    if root not in ch:
        return [Violation("root", f"root {root} is not a vertex", (root,))]
    if indeg[root] != 0 or len(ch[root]) != 1:
        out.append(
            Violation(
                "root-degree",
                f"root {root} has in-degree {indeg[root]} and out-degree {len(ch[root])}; expected 0 and 1",
                (root,),
            )
        )
    for v, kids in ch.items():
        if v == root:
            continue
        d = (indeg[v], len(kids))
        if indeg[v] == 0:
            out.append(Violation("single-root", f"vertex {v} has in-degree 0 but is not the root", (v,)))
        elif d not in ((1, 0), (1, 2), (2, 1)):
            out.append(
                Violation(
                    "degree",
                    f"vertex {v} has in-degree {d[0]} and out-degree {d[1]}",
                    (v,),
                    tuple((u, v) for u in ch if v in ch[u]),
                )
            )
        if len(kids) > len(set(kids)) and len(kids) > 2:
            out.append(Violation("multiplicity", f"more than two parallel edges leave {v}", (v,)))
    for v, kids in ch.items():
        for c in set(kids):
            if kids.count(c) > 2:
                out.append(Violation("multiplicity", f"edge ({v}, {c}) has multiplicity {kids.count(c)}", (v, c), ((v, c),)))
    # labels
    seen: dict[str, int] = {}
    for v, lab in net.labels.items():
        if v not in ch:
            out.append(Violation("labels", f"label {lab!r} attached to unknown vertex {v}", (v,)))
            continue
        if ch[v] or v == root:
            out.append(Violation("labels", f"label {lab!r} attached to non-leaf vertex {v}", (v,)))
        if lab in seen:
            out.append(Violation("labels", f"duplicate leaf label {lab!r}", (seen[lab], v)))
        seen[lab] = v
    for v, kids in ch.items():
        if not kids and v != root and v not in net.labels:
            out.append(Violation("labels", f"leaf {v} has no label", (v,)))
    # acyclicity (Kahn)
    remaining = dict(indeg)
    stack = [v for v, d in remaining.items() if d == 0]
    done = 0
    while stack:
        u = stack.pop()
        done += 1
        for v in ch[u]:
            remaining[v] -= 1
            if remaining[v] == 0:
                stack.append(v)
    if done != len(ch):
        cyc = tuple(sorted(v for v, d in remaining.items() if d > 0))
        out.append(
            Violation(
                "acyclic",
                f"directed cycle through vertices {list(cyc)}",
                cyc,
                tuple((u, v) for u in cyc for v in ch[u] if v in cyc),
            )
        )
    # reachability
    seen_v = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in ch[u]:
            if v not in seen_v:
                seen_v.add(v)
                stack.append(v)
    lost = tuple(sorted(set(ch) - seen_v))
    if lost:
        out.append(Violation("reachable", f"vertices {list(lost)} are unreachable from the root", lost))
    return out


# ---------------------------------------------------------------------------
# counts and classes


def reticulation_count(net: Network) -> int:
    return len(net.reticulations)


def is_tree(net: Network) -> bool:
    return not net.reticulations


def is_tree_child(net: Network) -> bool:
    """Every non-leaf vertex has a child that is a tree vertex."""
    pa = net.parents
    for v, kids in net.children.items():
        if kids and all(len(pa[c]) == 2 for c in kids):
            return False
    return True


def _reachable_without(net: Network, blocked: int) -> set[int]:
    seen = {net.root}
    stack = [net.root]
    while stack:
        u = stack.pop()
        for v in net.children[u]:
            if v != blocked and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def is_visible(net: Network, v: int) -> bool:
    """Some leaf is cut off from the root once ``v`` is removed."""
    reach = _reachable_without(net, v)
    return any(leaf not in reach for leaf in net.labels)


def is_reticulation_visible(net: Network) -> bool:
    return all(is_visible(net, v) for v in net.reticulations)


def switchings(net: Network) -> Iterator[dict[int, int]]:
    """Every map reticulation -> index (0 or 1) of its kept incoming edge."""
    rets = sorted(net.reticulations)
    for choice in product((0, 1), repeat=len(rets)):
        yield dict(zip(rets, choice))


def _switched_children(net: Network, keep: dict[int, int]) -> dict[int, list[int]]:
    pa = net.parents
    ch: dict[int, list[int]] = {v: [] for v in net.children}
    for v in net.children:
        ps = pa[v]
        if len(ps) == 2:
            ch[ps[keep[v]]].append(v)
        elif ps:
            ch[ps[0]].append(v)
    return ch


def is_tree_based(net: Network) -> bool:
    """Some switching leaves no non-leaf vertex without children."""
    for keep in switchings(net):
        ch = _switched_children(net, keep)
        if all(ch[v] or v in net.labels for v in ch):
            return True
    return False


# ---------------------------------------------------------------------------
# isomorphism by backtracking (independent of the canonical key)


def isomorphism(a: Network, b: Network) -> dict[int, int] | None:
    """A vertex bijection a -> b fixing labels and root, or ``None``.

    Leaves are pinned by label; every other vertex is reached by walking up
    from already matched vertices.  Only the two parents of a reticulation
    leave a choice, so the search branches at most twice per reticulation.
    """
    if a.label_set != b.label_set:
        raise NetworkError("label sets differ")
    if len(a.children) != len(b.children) or len(a.edges) != len(b.edges):
        return None
    pa_a, pa_b = a.parents, b.parents

    def kind_ok(x: int, y: int) -> bool:
        return (
            len(pa_a[x]) == len(pa_b[y])
            and len(a.children[x]) == len(b.children[y])
            and (x == a.root) == (y == b.root)
        )

    start = {}
    for leaf, lab in a.labels.items():
        start[leaf] = b.leaf(lab)
    if not all(kind_ok(x, y) for x, y in start.items()):
        return None

    def extend(fwd: dict[int, int], bwd: dict[int, int], todo: list[int]) -> dict[int, int] | None:
        while todo:
            x = todo.pop()
            y = fwd[x]
            px, py = pa_a[x], pa_b[y]
            if len(px) == 2 and px[0] != px[1]:
                for q0, q1 in ((py[0], py[1]), (py[1], py[0])):
                    f, g, t = dict(fwd), dict(bwd), list(todo)
                    if _bind(px[0], q0, f, g, t, kind_ok) and _bind(px[1], q1, f, g, t, kind_ok):
                        res = extend(f, g, t)
                        if res is not None:
                            return res
                return None
            for p, q in zip(px, py):
                if not _bind(p, q, fwd, bwd, todo, kind_ok):
                    return None
        if len(fwd) != len(a.children):
            return None
        for u, kids in a.children.items():
            if sorted(fwd[c] for c in kids) != sorted(b.children[fwd[u]]):
                return None
        return fwd

    fwd = dict(start)
    bwd = {y: x for x, y in fwd.items()}
    return extend(fwd, bwd, list(fwd))


def _bind(x, y, fwd, bwd, todo, kind_ok) -> bool:
    if x in fwd:
        return fwd[x] == y
    if y in bwd or not kind_ok(x, y):
        return False
    fwd[x] = y
    bwd[y] = x
    todo.append(x)
    return True


def is_isomorphic(a: Network, b: Network) -> bool:
    return isomorphism(a, b) is not None
