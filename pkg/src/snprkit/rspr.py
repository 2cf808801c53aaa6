"""
Rooted SPR distance between two phylogenetic trees via maximum agreement forests.

The root is adjoined as an extra leaf ``ρ`` (sibling of the top of each tree)
and the forest is grown by branching on cherries of the first tree, with
iterative deepening on the number of cut edges:

* a cherry whose leaves are also siblings in the forest is contracted into
  one super-leaf;
* a leaf that is already an isolated component of the forest is final and is
  dropped from the first tree;
* otherwise either leaf is cut off, or, when both sit in one forest
  component, every subtree hanging off the path between them is cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .network import Network, NetworkError, label_sort_key

__all__ = [
    "RHO",
    "TreeAgreementForest",
    "rspr_distance",
    "maximum_agreement_forest",
    "is_tree_agreement_forest",
    "restricted_clusters",
]

RHO = "ρ"


def _sort_block(block) -> tuple:
    return tuple(sorted(block, key=lambda x: (x != RHO, label_sort_key(x))))


@dataclass(frozen=True)
class TreeAgreementForest:
    """Leaf-label blocks partitioning X ∪ {ρ}; the block holding ρ comes first."""

    components: tuple[tuple[str, ...], ...]

    @classmethod
    def from_blocks(cls, blocks) -> "TreeAgreementForest":
        blocks = [_sort_block(b) for b in blocks]
        rho = [b for b in blocks if RHO in b]
        rest = sorted((b for b in blocks if RHO not in b), key=lambda b: [label_sort_key(x) for x in b])
        return cls(tuple(rho + rest))

    @property
    def size(self) -> int:
        return len(self.components)

    def to_json(self) -> list[list[str]]:
        return [list(c) for c in self.components]


# ---------------------------------------------------------------------------
# forest state: super-leaves are frozensets of labels, inner vertices are ints


class _Forest:
    __slots__ = ("ch", "par")

    def __init__(self, ch: dict, par: dict):
        self.ch = ch
        self.par = par

    def copy(self) -> "_Forest":
        return _Forest({k: list(v) for k, v in self.ch.items()}, dict(self.par))

    def root_of(self, x):
        par = self.par
        while par[x] is not None:
            x = par[x]
        return x

    def detach(self, x) -> None:
        """Cut the edge above ``x`` and suppress the old parent."""
        p = self.par[x]
        if p is None:
            return
        self.ch[p].remove(x)
        self.par[x] = None
        (y,) = self.ch.pop(p)
        gp = self.par.pop(p)
        self.par[y] = gp
        if gp is not None:
            kids = self.ch[gp]
            kids[kids.index(p)] = y

    def drop_leaf(self, x) -> None:
        """Remove a leaf from a single tree, suppressing its parent."""
        self.detach(x)
        del self.par[x]

    def contract(self, a, c) -> frozenset:
        p = self.par[a]
        merged = a | c
        del self.par[a], self.par[c], self.ch[p]
        gp = self.par.pop(p)
        self.par[merged] = gp
        if gp is not None:
            kids = self.ch[gp]
            kids[kids.index(p)] = merged
        return merged


def _as_forest(tree: Network) -> _Forest:
    if tree.reticulations:
        raise NetworkError("expected a phylogenetic tree")
    ch: dict = {}
    par: dict = {}

    def node(v):
        if v in tree.labels:
            return frozenset((tree.labels[v],))
        return v

    (top,) = tree.children[tree.root]
    top_node = node(top)
    ch[tree.root] = [top_node, frozenset((RHO,))]
    par[tree.root] = None
    par[frozenset((RHO,))] = tree.root
    par[top_node] = tree.root
    for v in tree.order:
        if v == tree.root or v in tree.labels:
            continue
        kids = [node(c) for c in tree.children[v]]
        ch[v] = kids
        for c in kids:
            par[c] = v
    return _Forest(ch, par)


def _find_cherry(t: _Forest):
    for p, kids in t.ch.items():
        a, c = kids
        if isinstance(a, frozenset) and isinstance(c, frozenset):
            return a, c
    return None


def _path_pendants(f: _Forest, a, c) -> list:
    anc = []
    x = a
    while x is not None:
        anc.append(x)
        x = f.par[x]
    on_a = set(anc)
    path_c = []
    x = c
    while x not in on_a:
        path_c.append(x)
        x = f.par[x]
    lca = x
    path = anc[: anc.index(lca)] + path_c
    on_path = set(path) | {lca}
    out = []
    for x in path:
        p = f.par[x]
        if p == lca:
            continue
        for s in f.ch[p]:
            if s not in on_path:
                out.append(s)
    return out


def _search(t: _Forest, f: _Forest, budget: int, done: list):
    while True:
        cherry = _find_cherry(t)
        if cherry is None:
            # a single super-leaf remains in both
            leaves = [x for x in t.par if isinstance(x, frozenset)]
            return done + leaves
        a, c = cherry
        if f.par[a] is None and a not in f.ch:
            t.drop_leaf(a)
            f.par.pop(a)
            done = done + [a]
            continue
        if f.par[c] is None and c not in f.ch:
            t.drop_leaf(c)
            f.par.pop(c)
            done = done + [c]
            continue
        if f.par[a] is not None and f.par[a] == f.par[c]:
            t.contract(a, c)
            f.contract(a, c)
            continue
        break
    if budget == 0:
        return None
    same = f.root_of(a) == f.root_of(c)
    options = [[a], [c]]
    if same:
        pend = _path_pendants(f, a, c)
        if len(pend) <= budget:
            options.append(pend)
    for cuts in options:
        if len(cuts) > budget:
            continue
        t2, f2 = t.copy(), f.copy()
        for x in cuts:
            f2.detach(x)
        res = _search(t2, f2, budget - len(cuts), done)
        if res is not None:
            return res
    return None


def _check_pair(t: Network, u: Network) -> None:
    if t.label_set != u.label_set:
        raise NetworkError("label sets differ")
    if t.reticulations or u.reticulations:
        raise NetworkError("both inputs must be phylogenetic trees")


def maximum_agreement_forest(t: Network, u: Network) -> TreeAgreementForest:
    """A maximum agreement forest, found by iterative deepening on the cut count."""
    _check_pair(t, u)
    k = 0
    while True:
        res = _search(_as_forest(t), _as_forest(u), k, [])
        if res is not None:
            return TreeAgreementForest.from_blocks(res)
        k += 1


def rspr_distance(t: Network, u: Network) -> int:
    return maximum_agreement_forest(t, u).size - 1


# ---------------------------------------------------------------------------
# independent checker


def _rho_clusters(tree: Network) -> list[tuple[int, frozenset]]:
    """(vertex, cluster) pairs of the tree with ρ hung beside its top."""
    out = []
    below: dict[int, frozenset] = {}
    for v in reversed(tree.order):
        if v in tree.labels:
            below[v] = frozenset((tree.labels[v],))
        elif v == tree.root:
            below[v] = below[tree.children[v][0]] | {RHO}
        else:
            below[v] = frozenset().union(*(below[c] for c in tree.children[v]))
        out.append((v, below[v]))
    out.append((-1, frozenset((RHO,))))
    return out


def restricted_clusters(tree: Network, block) -> frozenset:
    """Clusters of the tree (with ρ adjoined) restricted to ``block``."""
    block = frozenset(block)
    return frozenset(c & block for _, c in _rho_clusters(tree) if c & block)


def _spanned(tree: Network, block: frozenset) -> set[int]:
    """Vertices of the smallest subtree connecting ``block`` (ρ maps to the root)."""
    clusters = _rho_clusters(tree)
    top = [c for v, c in clusters if block <= c]
    # the lowest cluster containing the whole block
    lowest = min(top, key=len)
    return {v for v, c in clusters if c & block and c <= lowest}


def is_tree_agreement_forest(blocks, t: Network, u: Network) -> bool:
    """Check that ``blocks`` is an agreement forest for the two trees.

    Both restrictions of each block must have the same clusters, and in each
    tree the subtrees spanned by different blocks must share no vertex.
    """
    _check_pair(t, u)
    blocks = [frozenset(b) for b in blocks]
    universe = set(t.label_set) | {RHO}
    if sum(len(b) for b in blocks) != len(universe) or set().union(*blocks) != universe:
        return False
    for b in blocks:
        if restricted_clusters(t, b) != restricted_clusters(u, b):
            return False
    for tree in (t, u):
        spans = [_spanned(tree, b) for b in blocks]
        for x, y in combinations(spans, 2):
            if x & y:
                return False
    return True
