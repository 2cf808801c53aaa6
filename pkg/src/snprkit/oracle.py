"""
Exact SNPR distances by bidirectional breadth-first search.

Both searches grow whole layers, always extending the smaller frontier.
Once a new layer touches the other side's visited set the distance is
exact, and the touching vertices are precisely the geodesic vertices at that
position.  Predecessor links kept on both sides then give the full geodesic
DAG (networks up to isomorphism), from which per-sequence facts are read off.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .display import displayed_trees
from .moves import MINUS, PLUS, ZERO, SnprMove, SnprSequence, apply_move, iter_moves
from .network import (
    Network,
    NetworkError,
    is_reticulation_visible,
    is_tree_based,
    is_tree_child,
)
from .rspr import rspr_distance

__all__ = [
    "CLASSES",
    "SearchConfig",
    "SearchReport",
    "bfs_distance",
    "upper_bound",
    "geodesic_sequences",
    "moves_between",
    "realise",
    "track_edges",
    "verify_tier_lemma",
    "verify_tree_passage",
    "verify_upward_passage",
    "verify_class_gap",
    "verify_upper_bound",
    "double_prune_check",
]


def _no_parallel(net: Network) -> bool:
    return all(len(k) < 2 or k[0] != k[1] for k in net.children.values())


CLASSES: dict[str, Callable[[Network], bool] | None] = {
    "none": None,
    "tree-child": is_tree_child,
    "reticulation-visible": is_reticulation_visible,
    "tree-based": is_tree_based,
    "tree-based-parallel-free": lambda net: _no_parallel(net) and is_tree_based(net),
}

# class flags recorded for every network on a geodesic
_FLAGS = ("tree-child", "reticulation-visible", "tree-based")


def threads() -> int:
    """Worker count requested through ``SNPRKIT_THREADS`` (the search itself is serial)."""
    try:
        return max(1, int(os.environ.get("SNPRKIT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SearchConfig:
    """Restrictions on the search space.

    ``max_reticulations=None`` selects ``max(r, r') + d_ub`` where ``d_ub`` is
    the displayed-tree upper bound.  ``min_reticulations`` confines the search
    to tiers at or above the given one (``fixed_tier`` sets both caps).
    """

    max_reticulations: int | None = None
    min_reticulations: int = 0
    class_restriction: str = "none"
    max_depth: int | None = None

    @classmethod
    def fixed_tier(cls, r: int, **kw) -> "SearchConfig":
        return cls(max_reticulations=r, min_reticulations=r, **kw)

    def __post_init__(self):
        if self.class_restriction not in CLASSES:
            raise ValueError(f"unknown class {self.class_restriction!r}; choose from {sorted(CLASSES)}")


@dataclass
class SearchReport:
    """Outcome of one search.

    ``status`` is ``"exact"``, ``"unknown"`` (depth cap hit; the distance is
    at least ``lower_bound``) or ``"unreachable"`` (no admissible path).
    Each geodesic profile is a tuple with one ``(r, flags)`` entry per network,
    ``flags`` holding the class names the network belongs to.
    """

    status: str
    distance: int | None
    lower_bound: int
    max_reticulations: int
    class_restriction: str
    expanded: int = 0
    visited: int = 0
    geodesic_count: int = 0
    profiles: set = field(default_factory=set)
    layers: list[list[bytes]] = field(default_factory=list)
    edges: dict = field(default_factory=dict)
    labels: tuple = ()
    class_counts: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status == "exact"

    # -- facts over all geodesics -----------------------------------------

    def tier_profiles(self) -> set[tuple[int, ...]]:
        return {tuple(r for r, _ in p) for p in self.profiles}

    def horizontal_tier_sets(self) -> set[frozenset[int]]:
        out = set()
        for prof in self.tier_profiles():
            out.add(frozenset(a for a, b in zip(prof, prof[1:]) if a == b))
        return out

    def every_geodesic_contains_tree(self) -> bool:
        return bool(self.profiles) and all(0 in prof for prof in self.tier_profiles())

    def middle_reticulations(self) -> set[int]:
        if self.distance is None or self.distance % 2:
            return set()
        return {prof[self.distance // 2] for prof in self.tier_profiles()}

    def reticulation_range(self) -> tuple[int, int] | None:
        profs = self.tier_profiles()
        if not profs:
            return None
        return min(min(p) for p in profs), max(max(p) for p in profs)

    def geodesics_within(self, cls: str) -> int:
        """Number of geodesics whose networks all lie in ``cls``."""
        return self.class_counts.get(cls, 0)

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "distance": self.distance,
            "lower_bound": self.lower_bound,
            "max_reticulations": self.max_reticulations,
            "class": self.class_restriction,
            "expanded": self.expanded,
            "visited": self.visited,
        }
        if self.exact:
            rng = self.reticulation_range()
            out.update(
                {
                    "geodesic_count": self.geodesic_count,
                    "tier_profiles": sorted(list(p) for p in self.tier_profiles()),
                    "horizontal_tier_sets": sorted(sorted(s) for s in self.horizontal_tier_sets()),
                    "every_geodesic_contains_tree": self.every_geodesic_contains_tree(),
                    "min_reticulations": rng[0] if rng else None,
                    "max_reticulations_on_geodesics": rng[1] if rng else None,
                    "geodesics_within_class": {c: self.geodesics_within(c) for c in _FLAGS},
                }
            )
        return out


def upper_bound(a: Network, b: Network) -> int:
    """min over displayed tree pairs of the rSPR distance, plus r + r'."""
    ta, tb = displayed_trees(a), displayed_trees(b)
    best = min(rspr_distance(x, y) for x in ta for y in tb)
    return best + len(a.reticulations) + len(b.reticulations)


class _Space:
    """Neighbour generation under the configured restrictions, memoised per key."""

    def __init__(self, labels: tuple, cfg: SearchConfig, max_ret: int):
        self.labels = labels
        self.pred = CLASSES[cfg.class_restriction]
        self.min_ret = cfg.min_reticulations
        self.max_ret = max_ret
        self.admissible: dict[bytes, bool] = {}
        self.ret: dict[bytes, int] = {}

    def decode(self, key: bytes) -> Network:
        return Network.from_key(key, self.labels)

    def neighbours(self, key: bytes) -> Iterator[tuple[bytes, int]]:
        net = self.decode(key)
        r = len(net.reticulations)
        kinds = [ZERO]
        if r < self.max_ret:
            kinds.append(PLUS)
        if r > self.min_ret:
            kinds.append(MINUS)
        own = key
        seen = set()
        labels, root = net.labels, net.root
        for mv, ch in iter_moves(net, kinds):
            m = Network(ch, labels, root)
            k = m.key
            if k == own or k in seen:
                continue
            seen.add(k)
            rk = r + mv.reticulation_delta
            ok = self.admissible.get(k)
            if ok is None:
                ok = self.pred is None or self.pred(m)
                self.admissible[k] = ok
                self.ret[k] = rk
            if ok:
                yield k, rk


def bfs_distance(a: Network, b: Network, cfg: SearchConfig | None = None) -> SearchReport:
    """Exact (restricted) SNPR distance with the geodesic DAG."""
    cfg = cfg or SearchConfig()
    if a.label_set != b.label_set:
        raise NetworkError("label sets differ")
    ra, rb = len(a.reticulations), len(b.reticulations)
    pred = CLASSES[cfg.class_restriction]
    for net in (a, b):
        if pred is not None and not pred(net):
            raise NetworkError(f"input network is not in class {cfg.class_restriction}")
    unrestricted = pred is None and cfg.min_reticulations <= 0
    d_ub = upper_bound(a, b) if unrestricted or cfg.max_reticulations is None else None
    max_ret = cfg.max_reticulations
    if max_ret is None:
        max_ret = max(ra, rb) + (d_ub if d_ub is not None else 0)
    if max_ret < max(ra, rb) or cfg.min_reticulations > min(ra, rb):
        raise NetworkError("reticulation caps exclude an input network")
    # with the caps admitting both inputs, the displayed-tree sequence stays
    # inside them, so d_ub bounds the distance and prunes hopeless networks
    envelope = d_ub if unrestricted else None
    labels = a.sorted_labels()
    space = _Space(labels, cfg, max_ret)
    ka, kb = a.key, b.key
    report = SearchReport("exact", 0, 0, max_ret, cfg.class_restriction, labels=labels)
    if ka == kb:
        report.geodesic_count = 1
        report.layers = [[ka]]
        report.profiles = {((ra, _flags(a)),)}
        report.class_counts = {c: int(c in _flags(a)) for c in _FLAGS}
        return report
    dist = ({ka: 0}, {kb: 0})
    preds: tuple[dict, dict] = ({ka: []}, {kb: []})
    front = ([ka], [kb])
    depth = [0, 0]
    goal_r = (rb, ra)
    expanded = 0
    while True:
        if cfg.max_depth is not None and depth[0] + depth[1] >= cfg.max_depth:
            report.status = "unknown"
            report.distance = None
            report.lower_bound = depth[0] + depth[1] + 1
            break
        if not front[0] or not front[1]:
            report.status = "unreachable"
            report.distance = None
            report.lower_bound = depth[0] + depth[1] + 1
            break
        side = 0 if len(front[0]) <= len(front[1]) else 1
        mine, other = dist[side], dist[1 - side]
        pr = preds[side]
        nd = depth[side] + 1
        layer = []
        for x in front[side]:
            expanded += 1
            for y, ry in space.neighbours(x):
                if envelope is not None and abs(ry - goal_r[side]) > envelope - nd:
                    continue
                got = mine.get(y)
                if got is None:
                    mine[y] = nd
                    pr[y] = [x]
                    layer.append(y)
                elif got == nd:
                    pr[y].append(x)
        depth[side] = nd
        front = (layer, front[1]) if side == 0 else (front[0], layer)
        meet = [y for y in layer if y in other]
        if meet:
            report.distance = report.lower_bound = depth[0] + depth[1]
            _build_dag(report, meet, depth[0], preds, space)
            break
    report.expanded = expanded
    report.visited = len(dist[0]) + len(dist[1])
    return report


def _flags(net: Network) -> frozenset:
    return frozenset(c for c in _FLAGS if CLASSES[c](net))


def _build_dag(report: SearchReport, meet: list, pos: int, preds, space: _Space) -> None:
    d = report.distance
    layers: list[list[bytes]] = [[] for _ in range(d + 1)]
    edges: dict[bytes, set] = {}
    layers[pos] = sorted(set(meet))
    for i in range(pos, 0, -1):
        nxt = set()
        for y in layers[i]:
            for x in preds[0][y]:
                edges.setdefault(x, set()).add(y)
                nxt.add(x)
        layers[i - 1] = sorted(nxt)
    for j in range(pos, d):
        nxt = set()
        for x in layers[j]:
            for y in preds[1][x]:
                edges.setdefault(x, set()).add(y)
                nxt.add(y)
        layers[j + 1] = sorted(nxt)
    report.layers = layers
    report.edges = {k: sorted(v) for k, v in edges.items()}
    info = {}
    for layer in layers:
        for k in layer:
            net = space.decode(k)
            info[k] = (len(net.reticulations), _flags(net))
    # profile sets and path counts, forward along the layers
    start, end = layers[0][0], layers[d][0]
    profs = {start: {(info[start],)}}
    count = {start: 1}
    within = {c: {start: int(c in info[start][1])} for c in _FLAGS}
    for i in range(d):
        for x in layers[i]:
            for y in report.edges.get(x, ()):
                profs.setdefault(y, set()).update(p + (info[y],) for p in profs[x])
                count[y] = count.get(y, 0) + count[x]
                for c, cnt in within.items():
                    cnt[y] = cnt.get(y, 0) + (cnt[x] if c in info[y][1] else 0)
    report.profiles = profs[end]
    report.geodesic_count = count[end]
    report.class_counts = {c: cnt[end] for c, cnt in within.items()}


def geodesic_sequences(report: SearchReport, limit: int | None = None) -> Iterator[list[Network]]:
    """Every geodesic as a list of networks (up to isomorphism of each network)."""
    if not report.exact:
        return
    labels = report.labels
    d = report.distance
    produced = 0
    stack = [[report.layers[0][0]]]
    while stack:
        path = stack.pop()
        if len(path) == d + 1:
            yield [Network.from_key(k, labels) for k in path]
            produced += 1
            if limit is not None and produced >= limit:
                return
            continue
        for y in reversed(report.edges.get(path[-1], ())):
            stack.append(path + [y])


def moves_between(a: Network, b: Network) -> list[SnprMove]:
    """All single moves turning ``a`` into a network isomorphic to ``b``."""
    target = b.key
    out = []
    for mv, ch in iter_moves(a):
        if Network(ch, a.labels, a.root).key == target:
            out.append(mv)
    return out


def realise(nets: list[Network]) -> SnprSequence:
    """Concrete moves along a list of networks, replayable from ``nets[0]``."""
    cur = nets[0]
    moves = []
    for nxt in nets[1:]:
        target = nxt.key
        for mv, ch in iter_moves(cur):
            m = Network(ch, cur.labels, cur.root)
            if m.key == target:
                moves.append(mv)
                cur = m
                break
        else:
            raise NetworkError("consecutive networks are not one move apart")
    return SnprSequence(nets[0], moves)


def _edge_set(ch: dict) -> set:
    return {(t, h) for t, kids in ch.items() for h in kids}


def track_edges(net: Network, mv: SnprMove, tokens: dict, fresh) -> tuple[Network, dict]:
    """Apply ``mv`` and carry edge identities across it.

    ``tokens`` maps each ``(tail, head)`` of ``net`` to an identity.  Edges
    the move leaves alone keep theirs, the edge moved by an SNPR0 keeps its
    own, and every edge created by subdividing or by suppressing a vertex
    draws a new one from ``fresh``.  The two copies of a parallel pair share
    one identity.
    """
    res = apply_move(net, mv)
    old = _edge_set(net.children)
    if mv.kind == ZERO:
        u, v = mv.pruned[:2]
        a, b = mv.target[:2]
        p = net.parents[u][0]
        kids = net.children[u]
        w = kids[1] if kids[0] == v else kids[0]
        created = {(a, u), (u, b), (p, w)}
    elif mv.kind == PLUS:
        up, vp = mv.pruned
        created = {e for e in _edge_set(res.children) if up in e or vp in e}
    else:
        created = _edge_set(res.children) - old
    out = {}
    for e in _edge_set(res.children):
        if e in tokens and e not in created:
            out[e] = tokens[e]
        else:
            out[e] = next(fresh)
    return res, out


def _realisations_all_double(nets: list[Network]) -> bool:
    """True iff every concrete realisation of ``nets`` prunes some edge twice."""
    fresh = iter(range(10**9))
    keys = [n.key for n in nets]
    start = nets[0]
    tokens = {e: next(fresh) for e in _edge_set(start.children)}

    def walk(i: int, net: Network, tokens: dict, pruned: frozenset) -> bool:
        if i == len(keys) - 1:
            return False
        for mv, ch in iter_moves(net):
            if Network(ch, net.labels, net.root).key != keys[i + 1]:
                continue
            if mv.kind == ZERO:
                tok = tokens[mv.pruned[:2]]
                if tok in pruned:
                    continue
                nxt_pruned = pruned | {tok}
            else:
                nxt_pruned = pruned
            res, nxt = track_edges(net, mv, tokens, fresh)
            if not walk(i + 1, res, nxt, nxt_pruned):
                return False
        return True

    return walk(0, start, tokens, frozenset())


# ---------------------------------------------------------------------------
# checks on the fixture pairs


def verify_tier_lemma(a: Network, b: Network, cfg: SearchConfig | None = None) -> bool:
    """True iff every geodesic horizontally traverses at least two tiers."""
    rep = bfs_distance(a, b, cfg)
    if not rep.exact or rep.distance == 0:
        return False
    return all(len(s) >= 2 for s in rep.horizontal_tier_sets())


def verify_tree_passage(a: Network, b: Network, cfg: SearchConfig | None = None) -> bool:
    """True iff the distance is ``2r`` and every geodesic visits a tree.

    For ``r >= 2`` each geodesic must also consist of ``r`` SNPR- moves followed
    by ``r`` SNPR+ moves.
    """
    r = len(a.reticulations)
    if len(b.reticulations) != r or r == 0:
        return False
    rep = bfs_distance(a, b, cfg)
    if not rep.exact or rep.distance != 2 * r or not rep.every_geodesic_contains_tree():
        return False
    if r >= 2:
        shape = tuple(list(range(r, -1, -1)) + list(range(1, r + 1)))
        return rep.tier_profiles() == {shape}
    return True


def verify_upward_passage(a: Network, b: Network, cfg: SearchConfig | None = None) -> bool:
    """True iff the distance is 2 and every geodesic's middle network has r + 1 reticulations."""
    r = len(a.reticulations)
    rep = bfs_distance(a, b, cfg)
    if not rep.exact or rep.distance != 2:
        return False
    return rep.middle_reticulations() == {r + 1}


def verify_class_gap(a: Network, b: Network, cls: str, max_depth: int | None = None) -> tuple[SearchReport, SearchReport]:
    """Class-restricted and unrestricted reports; the gap holds when the first exceeds the second."""
    pred = CLASSES[cls]
    for net in (a, b):
        if pred is not None and not pred(net):
            raise NetworkError(f"fixture network is not in class {cls}")
    free = bfs_distance(a, b)
    caps = free.max_reticulations
    restricted = bfs_distance(a, b, SearchConfig(max_reticulations=caps, class_restriction=cls, max_depth=max_depth))
    return restricted, free


def verify_upper_bound(a: Network, b: Network) -> tuple[bool, bool, int, int]:
    """(bound holds, bound tight, distance, bound)."""
    bound = upper_bound(a, b)
    rep = bfs_distance(a, b)
    return rep.distance <= bound, rep.distance == bound, rep.distance, bound


def double_prune_check(a: Network, b: Network, cfg: SearchConfig | None = None) -> bool:
    """True iff every geodesic, however its steps are realised, prunes some edge twice.

    Only SNPR0 moves prune.  Edges are followed through each concrete
    realisation with :func:`track_edges`.
    """
    rep = bfs_distance(a, b, cfg)
    if not rep.exact or rep.distance < 2:
        return False
    return all(_realisations_all_double(nets) for nets in geodesic_sequences(rep))
