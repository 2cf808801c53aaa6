"""
The three SNPR rewrites and one-move neighbourhoods.

Edges are addressed by descriptors ``(tail, head)`` or ``(tail, head, index)``;
the index only matters for the two copies of a parallel pair.

* SNPR0 ``apply_snpr0(N, e, f)``: prune ``e = (u, v)`` at its tail and
  regraft onto ``f``, an edge of the graph left after deleting ``e`` and
  suppressing ``u``.  That graph has every edge of ``N`` not incident to
  ``u`` plus the edge ``(p, w)`` joining the parent and other child of ``u``.
  The new vertex reuses the id ``u``.
* SNPR+ ``apply_snpr_plus(N, e, g)``: subdivide ``e`` with ``v'``, subdivide
  ``g`` with ``u'`` and add ``(u', v')``.  Passing ``g == e`` selects the
  upper half ``(u, v')`` of the subdivided edge, which creates a parallel
  pair.  New ids are ``max + 1`` for ``v'`` and ``max + 2`` for ``u'``.
* SNPR- ``apply_snpr_minus(N, e)``: delete ``e`` and suppress both ends.

An edge counts as a descendant of ``v`` when its tail is ``v`` or lies below
``v``; regrafting anywhere else keeps the graph acyclic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .network import Network, NetworkError

__all__ = [
    "MoveError",
    "SnprMove",
    "SnprSequence",
    "apply_snpr0",
    "apply_snpr_plus",
    "apply_snpr_minus",
    "apply_move",
    "iter_moves",
    "neighbors",
    "neighbor_items",
    "random_move",
]

ZERO, PLUS, MINUS = "zero", "plus", "minus"


class MoveError(NetworkError):
    """A rewrite was requested whose preconditions do not hold."""


@dataclass(frozen=True)
class SnprMove:
    """One rewrite.  ``pruned`` is ``e`` for SNPR0/SNPR-; for SNPR+ it is the
    new reticulation edge ``(u', v')`` and ``source`` is the subdivided ``e``."""

    kind: str
    pruned: tuple
    target: tuple | None = None
    source: tuple | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "pruned": list(self.pruned)}
        if self.source is not None:
            out["source"] = list(self.source)
        if self.target is not None:
            out["target"] = list(self.target)
        return out

    @property
    def reticulation_delta(self) -> int:
        return {ZERO: 0, PLUS: 1, MINUS: -1}[self.kind]


@dataclass
class SnprSequence:
    start: Network
    moves: list[SnprMove] = field(default_factory=list)

    @property
    def networks(self) -> list[Network]:
        nets = [self.start]
        for mv in self.moves:
            nets.append(apply_move(nets[-1], mv))
        return nets

    def __len__(self) -> int:
        return len(self.moves)

    @property
    def end(self) -> Network:
        return self.networks[-1]

    def to_json(self) -> list[dict]:
        from .newick import write_enewick

        out = []
        nets = self.networks
        for mv, net in zip(self.moves, nets[1:]):
            rec = mv.to_json()
            rec["network"] = write_enewick(net)
            out.append(rec)
        return out


# ---------------------------------------------------------------------------
# low level helpers on plain dicts


def _edge(e) -> tuple[int, int, int]:
    if len(e) == 2:
        return (e[0], e[1], 0)
    return (e[0], e[1], e[2])


def _replace(tup: tuple, old: int, new: int) -> tuple:
    i = tup.index(old)
    return tup[:i] + (new,) + tup[i + 1:]


def _drop(tup: tuple, old: int) -> tuple:
    i = tup.index(old)
    return tup[:i] + tup[i + 1:]


def _has_edge(ch: dict, a: int, b: int, idx: int = 0) -> bool:
    return a in ch and ch[a].count(b) > idx


def _parent_of(net: Network, u: int) -> int:
    return net.parents[u][0]


def _other_child(net: Network, u: int, v: int) -> int:
    kids = net.children[u]
    return kids[1] if kids[0] == v else kids[0]


def _snpr0_raw(ch: dict, u: int, v: int, p: int, w: int, a: int, b: int) -> dict:
    ch = dict(ch)
    ch[p] = _replace(ch[p], u, w)
    ch[a] = _replace(ch[a], b, u)
    ch[u] = (b, v)
    return ch


def _snpr_plus_raw(ch: dict, u: int, v: int, a: int, b: int, upper: bool, vp: int, up: int) -> dict:
    ch = dict(ch)
    ch[u] = _replace(ch[u], v, vp)
    ch[vp] = (v,)
    if upper:
        a, b = u, vp
    ch[a] = _replace(ch[a], b, up)
    ch[up] = (b, vp)
    return ch


# ---------------------------------------------------------------------------
# the rewrites


def apply_snpr0(net: Network, e, f) -> Network:
    """Prune ``e`` at its tail and regraft it onto ``f``."""
    u, v, idx = _edge(e)
    a, b, fidx = _edge(f)
    ch = net.children
    if not _has_edge(ch, u, v, idx):
        raise MoveError(f"({u}, {v}) is not an edge")
    if u == net.root or len(ch[u]) != 2 or len(net.parents[u]) != 1:
        raise MoveError(f"tail {u} of the pruned edge must be an inner tree vertex")
    p, w = _parent_of(net, u), _other_child(net, u, v)
    inter = dict(ch)
    del inter[u]
    inter[p] = _replace(ch[p], u, w)
    if not _has_edge(inter, a, b, fidx):
        raise MoveError(f"({a}, {b}) is not an edge once ({u}, {v}) is pruned")
    if net.is_descendant(a, v):
        raise MoveError(f"regraft edge ({a}, {b}) lies below {v}")
    return Network(_snpr0_raw(ch, u, v, p, w, a, b), net.labels, net.root)


def apply_snpr_plus(net: Network, e, g) -> Network:
    """Add a reticulation edge from ``g`` to a new vertex on ``e``."""
    u, v, idx = _edge(e)
    a, b, gidx = _edge(g)
    ch = net.children
    if not _has_edge(ch, u, v, idx):
        raise MoveError(f"({u}, {v}) is not an edge")
    if not _has_edge(ch, a, b, gidx):
        raise MoveError(f"({a}, {b}) is not an edge")
    upper = (a, b, gidx) == (u, v, idx)
    if not upper and net.is_descendant(a, v):
        raise MoveError(f"edge ({a}, {b}) lies below the new reticulation")
    top = max(ch)
    return Network(_snpr_plus_raw(ch, u, v, a, b, upper, top + 1, top + 2), net.labels, net.root)


def apply_snpr_minus(net: Network, e) -> Network:
    """Delete the reticulation edge ``e`` and suppress both of its ends."""
    u, v, idx = _edge(e)
    ch = net.children
    if not _has_edge(ch, u, v, idx):
        raise MoveError(f"({u}, {v}) is not an edge")
    if len(net.parents[v]) != 2:
        raise MoveError(f"head {v} is not a reticulation")
    if u == net.root or len(net.parents[u]) != 1:
        raise MoveError(f"tail {u} is not an inner tree vertex")
    return Network(_snpr_minus_raw(net, u, v), net.labels, net.root)


def _snpr_minus_raw(net: Network, u: int, v: int) -> dict:
    ch = dict(net.children)
    pa = dict(net.parents)
    ch[u] = _drop(ch[u], v)
    pa[v] = _drop(pa[v], u)
    for x in (u, v):
        (p,) = pa[x]
        (c,) = ch[x]
        ch[p] = _replace(ch[p], x, c)
        pa[c] = _replace(pa[c], x, p)
        del ch[x], pa[x]
    return ch


def apply_move(net: Network, mv: SnprMove) -> Network:
    if mv.kind == ZERO:
        return apply_snpr0(net, mv.pruned, mv.target)
    if mv.kind == PLUS:
        return apply_snpr_plus(net, mv.source, mv.target)
    if mv.kind == MINUS:
        return apply_snpr_minus(net, mv.pruned)
    raise MoveError(f"unknown move kind {mv.kind!r}")


# ---------------------------------------------------------------------------
# enumeration


def _descriptors(ch: dict) -> list[tuple[int, int, int]]:
    out = []
    for a, kids in ch.items():
        if len(kids) == 2 and kids[0] == kids[1]:
            out.append((a, kids[0], 0))
            out.append((a, kids[0], 1))
        else:
            out.extend((a, b, 0) for b in kids)
    return out


def iter_moves(net: Network, kinds: Sequence[str] = (ZERO, PLUS, MINUS)) -> Iterator[tuple[SnprMove, dict]]:
    """Every applicable move with its raw result (a child map sharing ``net``'s labels).

    Moves that regraft onto the spot just vacated are skipped.  Only one
    copy of a parallel pair is used as pruned or subdivided edge, since the
    two copies are interchangeable.
    """
    ch = net.children
    pa = net.parents
    desc = net.descendant_masks
    root = net.root
    edges = _descriptors(ch)
    distinct = [(a, b) for a, b, i in edges if i == 0]
    top = max(ch)
    if ZERO in kinds:
        for u, v in distinct:
            if u == root or len(pa[u]) != 1:
                continue
            p = pa[u][0]
            w = _other_child(net, u, v)
            below = desc[v]
            for a, b, i in edges:
                # copies of a parallel pair give the same result; (p, w) is the vacated spot
                if i or a == u or b == u or below >> a & 1 or (a == p and b == w):
                    continue
                yield SnprMove(ZERO, (u, v), (a, b)), _snpr0_raw(ch, u, v, p, w, a, b)
    if PLUS in kinds:
        for u, v in distinct:
            below = desc[v]
            vp, up = top + 1, top + 2
            for a, b, i in edges:
                upper = a == u and b == v and i == 0
                if not upper and below >> a & 1:
                    continue
                target = (a, b) if ch[a].count(b) == 1 else (a, b, i)
                yield (
                    SnprMove(PLUS, (up, vp), target, (u, v)),
                    _snpr_plus_raw(ch, u, v, a, b, upper, vp, up),
                )
    if MINUS in kinds:
        for u, v in distinct:
            if len(pa[v]) == 2 and u != root and len(pa[u]) == 1:
                yield SnprMove(MINUS, (u, v)), _snpr_minus_raw(net, u, v)


def neighbor_items(net: Network, kinds: Sequence[str] = (ZERO, PLUS, MINUS)) -> dict[bytes, tuple[Network, SnprMove]]:
    """Distinct one-move neighbours keyed by canonical key, each with one witness move."""
    own = net.key
    out: dict[bytes, tuple[Network, SnprMove]] = {}
    labels, root = net.labels, net.root
    for mv, ch in iter_moves(net, kinds):
        m = Network(ch, labels, root)
        k = m.key
        if k != own and k not in out:
            out[k] = (m, mv)
    return out


def neighbors(net: Network, kinds: Sequence[str] = (ZERO, PLUS, MINUS)) -> list[tuple[Network, SnprMove]]:
    """All networks one SNPR away from ``net`` (up to isomorphism), in canonical order."""
    items = neighbor_items(net, kinds)
    return [items[k] for k in sorted(items)]


def random_move(net: Network, rng: random.Random, kinds: Sequence[str] = (ZERO, PLUS, MINUS)) -> tuple[SnprMove, Network] | None:
    """A uniformly chosen applicable move (regrafts onto the vacated spot excluded), or ``None``."""
    moves = [mv for mv, _ in iter_moves(net, kinds)]
    if not moves:
        return None
    mv = rng.choice(moves)
    return mv, apply_move(net, mv)
