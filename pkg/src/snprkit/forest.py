"""
Agreement forests between a phylogenetic tree and a network.

A forest ``{T_ρ, T_1..T_k, E_1..E_r}`` is stored with explicit embeddings:
edge lists into the tree for the tree components and edge lists into the
network for every component.  The search for a maximum forest walks the
network in topological order and decides, for every vertex, how the pieces
arriving on its in-edges continue:

* at the root, ρ either keeps the root edge or stays an isolated component;
* at an inner tree vertex the arriving piece branches, or runs on along one
  child while a new piece starts on the other child;
* at a reticulation one arriving piece runs on and the other ends there.

With exactly ``r`` disagreement edges every reticulation is the head of
exactly one of them, which is what makes this case split complete.  Each
finished decomposition is accepted when its tree pieces agree with ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .display import displayed_trees
from .moves import SnprMove, SnprSequence, apply_snpr0, apply_snpr_minus, apply_snpr_plus, iter_moves
from .network import Network, NetworkError, isomorphism
from .rspr import RHO, _rho_clusters, restricted_clusters, rspr_distance, TreeAgreementForest

__all__ = [
    "AgreementForest",
    "ForestSize",
    "is_agreement_forest",
    "maf_tree_network",
    "dsnpr_via_maf",
    "dsnpr_via_displayed",
    "snpr_sequence_from_forest",
    "tree_sequence",
]

Edge = tuple[int, int, int]


@dataclass(frozen=True)
class ForestSize:
    k: int
    r: int

    @property
    def m(self) -> int:
        return self.k + self.r


@dataclass(frozen=True)
class AgreementForest:
    """Tree components (ρ block first) and disagreement edges with their embeddings.

    ``network_embedding[i]`` and ``tree_embedding[i]`` are the edges used by
    component ``components[i]``; ``disagreement_edges[j]`` is the directed
    path of the network that ``E_j`` is mapped to.
    """

    components: tuple[tuple[str, ...], ...]
    network_embedding: tuple[tuple[Edge, ...], ...]
    tree_embedding: tuple[tuple[tuple[int, int], ...], ...]
    disagreement_edges: tuple[tuple[Edge, ...], ...]

    @property
    def size(self) -> ForestSize:
        return ForestSize(len(self.components) - 1, len(self.disagreement_edges))

    @property
    def rho_isolated(self) -> bool:
        return self.components[0] == (RHO,)

    def without_disagreement(self, j: int) -> "AgreementForest":
        rest = self.disagreement_edges[:j] + self.disagreement_edges[j + 1:]
        return AgreementForest(self.components, self.network_embedding, self.tree_embedding, rest)

    def to_json(self) -> dict:
        return {
            "components": [list(c) for c in self.components],
            "disagreement_edges": [[list(e) for e in path] for path in self.disagreement_edges],
            "network_embedding": [[list(e) for e in es] for es in self.network_embedding],
            "tree_embedding": [[list(e) for e in es] for es in self.tree_embedding],
            "k": self.size.k,
            "r": self.size.r,
            "m": self.size.m,
        }


# ---------------------------------------------------------------------------
# helpers shared by the search and the checker


def _check_inputs(tree: Network, net: Network) -> None:
    if tree.label_set != net.label_set:
        raise NetworkError("label sets differ")
    if tree.reticulations:
        raise NetworkError("first argument must be a phylogenetic tree")


def _descriptor(net: Network, a: int, pos: int) -> Edge:
    kids = net.children[a]
    b = kids[pos]
    return (a, b, kids[:pos].count(b))


def _position(net: Network, e) -> tuple[int, int]:
    a, b = e[0], e[1]
    idx = e[2] if len(e) > 2 else 0
    kids = net.children[a]
    seen = -1
    for pos, x in enumerate(kids):
        if x == b:
            seen += 1
            if seen == idx:
                return (a, pos)
    raise NetworkError(f"({a}, {b}) is not an edge")


def _subtree_clusters(net: Network, edges, block: frozenset) -> frozenset | None:
    """Clusters of the tree formed by ``edges`` in ``net``, or ``None`` if they
    do not form a subdivided phylogenetic tree on ``block``."""
    ch: dict[int, list[int]] = {}
    indeg: dict[int, int] = {}
    for a, b, *_ in edges:
        ch.setdefault(a, []).append(b)
        ch.setdefault(b, [])
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, 0)
    if not ch:
        return None
    tops = [x for x, d in indeg.items() if d == 0]
    if len(tops) != 1 or any(d > 1 for d in indeg.values()) or len(ch[tops[0]]) != 1:
        return None
    top = tops[0]
    if RHO in block and top != net.root:
        return None
    ends = [x for x, kids in ch.items() if not kids]
    if any(x not in net.labels for x in ends):
        return None
    labels = frozenset(net.labels[x] for x in ends)
    if labels != block - {RHO}:
        return None
    below: dict[int, frozenset] = {}
    order = [top]
    for x in order:
        order.extend(ch[x])
    if len(order) != len(ch):
        return None
    for x in reversed(order):
        below[x] = frozenset((net.labels[x],)) if not ch[x] else frozenset().union(*(below[c] for c in ch[x]))
    out = set(below.values())
    if RHO in block:
        out.add(block)
        out.add(frozenset((RHO,)))
    return frozenset(out)


def _is_path(edges) -> bool:
    if not edges:
        return False
    nxt = {}
    heads = set()
    for a, b, *_ in edges:
        if a in nxt:
            return False
        nxt[a] = b
        heads.add(b)
    starts = [a for a in nxt if a not in heads]
    if len(starts) != 1:
        return False
    x, n = starts[0], 0
    while x in nxt:
        x = nxt[x]
        n += 1
    return n == len(edges)


def is_agreement_forest(forest: AgreementForest, tree: Network, net: Network) -> bool:
    """Verify the partition, tree-cover and network-cover conditions from the embeddings."""
    _check_inputs(tree, net)
    blocks = [frozenset(c) for c in forest.components]
    universe = set(tree.label_set) | {RHO}
    if not blocks or RHO not in blocks[0]:
        return False
    if sum(len(b) for b in blocks) != len(universe) or set().union(*blocks) != universe:
        return False
    if len(forest.disagreement_edges) != len(net.reticulations):
        return False
    if len(forest.network_embedding) != len(blocks) or len(forest.tree_embedding) != len(blocks):
        return False
    # network side: every edge used exactly once
    used = [tuple(e) for es in forest.network_embedding for e in es]
    used += [tuple(e) for es in forest.disagreement_edges for e in es]
    if sorted(used) != sorted(net.edge_descriptors()):
        return False
    if not all(_is_path(p) for p in forest.disagreement_edges):
        return False
    tree_used = sorted(tuple(e) for es in forest.tree_embedding for e in es)
    if tree_used != sorted(tree.edges):
        return False
    for b, n_edges, t_edges in zip(blocks, forest.network_embedding, forest.tree_embedding):
        if b == frozenset((RHO,)):
            if n_edges or t_edges:
                return False
            continue
        want = restricted_clusters(tree, b)
        if _subtree_clusters(net, n_edges, b) != want:
            return False
        if _subtree_clusters(tree, [(x, y, 0) for x, y in t_edges], b) != want:
            return False
    return True


# ---------------------------------------------------------------------------
# tree-side embedding of a block partition


class _TreeIndex:
    """Cluster data of ``T`` used to accept or reject block partitions quickly."""

    def __init__(self, tree: Network):
        self.tree = tree
        self.clusters = _rho_clusters(tree)
        self.cache: dict[frozenset, frozenset] = {}
        self.span_cache: dict[frozenset, frozenset] = {}

    def restricted(self, block: frozenset) -> frozenset:
        got = self.cache.get(block)
        if got is None:
            got = self.cache[block] = frozenset(c & block for _, c in self.clusters if c & block)
        return got

    def span(self, block: frozenset) -> frozenset:
        got = self.span_cache.get(block)
        if got is None:
            lowest = min((c for _, c in self.clusters if block <= c), key=len)
            got = self.span_cache[block] = frozenset(v for v, c in self.clusters if c & block and c <= lowest)
        return got

    def disjoint(self, blocks) -> bool:
        seen: set[int] = set()
        for b in blocks:
            s = self.span(b)
            if seen & s:
                return False
            seen |= s
        return True

    def embedding(self, blocks: list[frozenset]) -> list[tuple[tuple[int, int], ...]]:
        """Edge sets of ``T`` per block: spanned subtrees plus upward root paths."""
        tree = self.tree
        pa = tree.parents
        owner: dict[int, int] = {}
        for i, b in enumerate(blocks):
            for v in self.span(b):
                if v >= 0:
                    owner[v] = i
        out: list[list[tuple[int, int]]] = [[] for _ in blocks]
        for v in tree.order:
            if v == tree.root:
                continue
            (p,) = pa[v]
            if owner.get(v) is not None and owner.get(p) == owner[v]:
                out[owner[v]].append((p, v))
        for i, b in enumerate(blocks):
            if RHO in b:
                continue
            top = max((v for v in self.span(b) if v >= 0), key=lambda v: len(tree.leaf_labels_below(v)))
            cur = top
            while True:
                (p,) = pa[cur]
                out[i].append((p, cur))
                if p in owner or p == tree.root or tree.children[p][0] != cur:
                    break
                cur = p
        return [tuple(sorted(es)) for es in out]


# ---------------------------------------------------------------------------
# maximum forest search


class _Search:
    def __init__(self, tree: Network, net: Network):
        self.tree = tree
        self.net = net
        self.index = _TreeIndex(tree)
        self.order = net.order
        pa = net.parents
        # in-edges of every vertex as (tail, position) keys
        self.in_edges: dict[int, list[tuple[int, int]]] = {v: [] for v in net.children}
        for a in self.order:
            for pos, b in enumerate(net.children[a]):
                self.in_edges[b].append((a, pos))
        self.pa = pa
        self.r = len(net.reticulations)

    def run(self, budget: int):
        """First decomposition with at most ``budget`` new pieces, or ``None``."""
        net = self.net
        self.piece: dict[tuple[int, int], int] = {}
        self.heads: list[int] = []
        self.branch: list[bool] = []
        self.leaves: list[list[str]] = []
        self.rho_piece = -1
        self.rho_isolated = False
        root = net.root
        # ρ keeps the root edge
        self._new_piece()
        self.piece[(root, 0)] = 0
        self.rho_piece = 0
        res = self._walk(1, 0, budget)
        if res is not None:
            return res
        if budget >= 1:
            self.rho_piece = -1
            self.rho_isolated = True
            res = self._walk(1, 1, budget)
            self.rho_isolated = False
            if res is not None:
                return res
        return None

    def _new_piece(self) -> int:
        self.heads.append(0)
        self.branch.append(False)
        self.leaves.append([])
        return len(self.heads) - 1

    def _drop_piece(self) -> None:
        self.heads.pop()
        self.branch.pop()
        self.leaves.pop()

    def _walk(self, i: int, cost: int, budget: int):
        order = self.order
        if i == len(order):
            return self._finish()
        v = order[i]
        net = self.net
        kids = net.children[v]
        ins = self.in_edges[v]
        if not kids:
            (e,) = ins
            p = self.piece[e]
            if self.heads[p]:
                return None
            self.leaves[p].append(net.labels[v])
            res = self._walk(i + 1, cost, budget)
            self.leaves[p].pop()
            return res
        if len(ins) == 2:
            p0, p1 = self.piece[ins[0]], self.piece[ins[1]]
            if p0 == p1:
                return None
            for keep, stop in ((p0, p1), (p1, p0)):
                if self.branch[stop] or self.leaves[stop] or self.heads[stop] or stop == self.rho_piece:
                    continue
                self.heads[stop] = 1
                self.piece[(v, 0)] = keep
                res = self._walk(i + 1, cost, budget)
                self.heads[stop] = 0
                if res is not None:
                    return res
            return None
        (e,) = ins
        p = self.piece[e]
        parallel = kids[0] == kids[1]
        if not parallel and not self.heads[p]:
            was = self.branch[p]
            self.branch[p] = True
            self.piece[(v, 0)] = p
            self.piece[(v, 1)] = p
            res = self._walk(i + 1, cost, budget)
            self.branch[p] = was
            if res is not None:
                return res
        if cost < budget:
            for stay in ((0,) if parallel else (0, 1)):
                q = self._new_piece()
                self.piece[(v, stay)] = p
                self.piece[(v, 1 - stay)] = q
                res = self._walk(i + 1, cost + 1, budget)
                self._drop_piece()
                if res is not None:
                    return res
        return None

    def _finish(self):
        blocks: list[frozenset] = []
        owners: list[int] = []
        for p in range(len(self.heads)):
            if self.heads[p]:
                continue
            b = frozenset(self.leaves[p])
            if p == self.rho_piece:
                b = b | {RHO}
            blocks.append(b)
            owners.append(p)
        if self.rho_isolated:
            blocks.insert(0, frozenset((RHO,)))
            owners.insert(0, -1)
        idx = self.index
        # each tree piece must induce the same clusters as T on its block
        for b, p in zip(blocks, owners):
            if p < 0:
                continue
            if self._piece_clusters(p, b) != idx.restricted(b):
                return None
        if not idx.disjoint(blocks):
            return None
        return blocks, owners, dict(self.piece)

    def _piece_clusters(self, p: int, block: frozenset) -> frozenset:
        edges = [(a, self.net.children[a][pos]) for (a, pos), q in self.piece.items() if q == p]
        return _subtree_clusters(self.net, edges, block)


def _order_components(blocks, owners):
    """ρ block first, the rest by their sorted label lists."""
    forest = TreeAgreementForest.from_blocks(blocks)
    pos = {frozenset(b): i for i, b in enumerate(blocks)}
    return [(c, owners[pos[frozenset(c)]]) for c in forest.components]


def _build_forest(tree: Network, net: Network, index: _TreeIndex, blocks, owners, piece) -> AgreementForest:
    ordered = _order_components(blocks, owners)
    n_emb = []
    for _, p in ordered:
        n_emb.append(tuple(sorted(_descriptor(net, a, pos) for (a, pos), q in piece.items() if q == p)) if p >= 0 else ())
    tree_owned = index.embedding([frozenset(c) for c, _ in ordered])
    tree_emb = [es if c != (RHO,) else () for (c, _), es in zip(ordered, tree_owned)]
    tree_pieces = {p for _, p in ordered}
    paths: dict[int, list[Edge]] = {}
    for (a, pos), q in piece.items():
        if q not in tree_pieces:
            paths.setdefault(q, []).append(_descriptor(net, a, pos))
    # order disagreement edges by the reticulation they end at
    heads = {}
    for q, es in paths.items():
        tails = {e[0] for e in es}
        heads[q] = next(e[1] for e in es if e[1] not in tails)
    rank = {v: i for i, v in enumerate(net.order)}
    e_paths = [tuple(_path_order(paths[q])) for q in sorted(paths, key=lambda q: rank[heads[q]])]
    return AgreementForest(
        tuple(c for c, _ in ordered),
        tuple(n_emb),
        tuple(tree_emb),
        tuple(e_paths),
    )


def _path_order(edges: list[Edge]) -> list[Edge]:
    by_tail = {e[0]: e for e in edges}
    heads = {e[1] for e in edges}
    (start,) = [e for e in edges if e[0] not in heads]
    out = [start]
    while out[-1][1] in by_tail:
        out.append(by_tail[out[-1][1]])
    return out


def maf_tree_network(tree: Network, net: Network) -> tuple[AgreementForest, ForestSize]:
    """A maximum agreement forest for ``tree`` and ``net`` with its size."""
    _check_inputs(tree, net)
    search = _Search(tree, net)
    budget = search.r
    while True:
        res = search.run(budget)
        if res is not None:
            forest = _build_forest(tree, net, search.index, *res)
            return forest, forest.size
        budget += 1


def dsnpr_via_maf(tree: Network, net: Network) -> int:
    return maf_tree_network(tree, net)[1].m


def dsnpr_via_displayed(tree: Network, net: Network) -> int:
    """Minimum rSPR distance from ``tree`` to a displayed tree of ``net``, plus r."""
    _check_inputs(tree, net)
    return min(rspr_distance(tree, t) for t in displayed_trees(net)) + len(net.reticulations)


# ---------------------------------------------------------------------------
# from a forest to an explicit sequence


def tree_sequence(start: Network, goal: Network) -> list[SnprMove]:
    """A shortest rSPR sequence between two trees, found by distance descent."""
    moves = []
    cur = start
    d = rspr_distance(cur, goal)
    while d:
        for mv, _ in iter_moves(cur, ("zero",)):
            nxt = apply_snpr0(cur, mv.pruned, mv.target)
            if rspr_distance(nxt, goal) == d - 1:
                break
        else:  # pragma: no cover - the distance always drops along some move
            raise RuntimeError("no improving rSPR move found")
        moves.append(mv)
        cur = nxt
        d -= 1
    return moves


def _edge_key(e) -> tuple[int, int, int]:
    return (e[0], e[1], e[2] if len(e) > 2 else 0)


def snpr_sequence_from_forest(forest: AgreementForest, tree: Network, net: Network) -> SnprSequence:
    """An SNPR sequence from ``tree`` to ``net`` of length at most ``|F| - 1``.

    Reticulations are removed top-down: the disagreement edge ending at the
    highest reticulation is deleted, its other edges join the component that
    owns the sibling edge, and the reverse SNPR+ is recorded.  The remaining
    tree is reached by a shortest rSPR sequence.
    """
    if not is_agreement_forest(forest, tree, net):
        raise NetworkError("not an agreement forest for these inputs")
    piece: dict[tuple[int, int], int] = {}
    for i, es in enumerate(forest.network_embedding):
        for e in es:
            piece[_position(net, e)] = i
    base = len(forest.network_embedding)
    for j, es in enumerate(forest.disagreement_edges):
        for e in es:
            piece[_position(net, e)] = base + j
    moves, _ = _peel(tree, net, piece)
    return SnprSequence(tree, moves)


def _peel(tree: Network, net: Network, piece: dict[tuple[int, int], int]) -> tuple[list[SnprMove], Network]:
    rets = [v for v in net.order if len(net.parents[v]) == 2]
    if not rets:
        moves = tree_sequence(tree, net)
        cur = tree
        for mv in moves:
            cur = apply_snpr0(cur, mv.pruned, mv.target)
        return moves, cur
    v = rets[0]
    ch = net.children
    ins = [(a, pos) for a in net.parents[v] for pos, b in enumerate(ch[a]) if b == v]
    ins = sorted(set(ins))
    out_piece = piece[(v, 0)]
    (head,) = [e for e in ins if piece[e] != out_piece]
    (other,) = [e for e in ins if e != head]
    u, upos = head
    p = net.parents[u][0]
    ppos = ch[p].index(u)
    wpos = 1 - upos
    cj = piece[(u, wpos)]
    ei = piece[head]
    merged = {e: (cj if q == ei else q) for e, q in piece.items()}
    smaller = apply_snpr_minus(net, _descriptor(net, u, upos))
    new_piece: dict[tuple[int, int], int] = {}
    for a, kids in smaller.children.items():
        for pos in range(len(kids)):
            new_piece[(a, pos)] = merged[(a, pos)]
    moves, cur = _peel(tree, smaller, new_piece)
    # reverse step: SNPR+ on the rebuilt copy of the smaller network
    phi = isomorphism(smaller, cur)
    q, qpos = other
    parallel = q == u
    e_tail, e_pos = (p, ppos) if parallel else (q, qpos)
    e_head = smaller.children[e_tail][e_pos]
    e_desc = (phi[e_tail], phi[e_head], 0)
    if parallel:
        g_desc = e_desc
    else:
        g_head = smaller.children[p][ppos]
        g_desc = (phi[p], phi[g_head], 0)
        if (p, ppos) != (e_tail, e_pos) and g_desc[:2] == e_desc[:2]:
            g_desc = (phi[p], phi[g_head], 1)
    nxt = apply_snpr_plus(cur, e_desc, g_desc)
    top = max(cur.children)
    mv = SnprMove("plus", (top + 2, top + 1), _short(cur, g_desc), _short(cur, e_desc))
    return moves + [mv], nxt


def _short(net: Network, e: Edge) -> tuple:
    return e[:2] if net.children[e[0]].count(e[1]) == 1 else e
