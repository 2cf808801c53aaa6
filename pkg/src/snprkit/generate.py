"""Random and exhaustive network generation for tests and sweeps."""

from __future__ import annotations

import random

from .moves import PLUS, ZERO, neighbor_items, random_move
from .network import Network

__all__ = ["caterpillar", "random_tree", "random_network", "enumerate_networks"]


def _labels(n: int) -> list[str]:
    return [str(i) for i in range(1, n + 1)]


def caterpillar(n: int) -> Network:
    """The tree ((..((1,2),3)..),n) below a pendant root."""
    ch: dict[int, tuple[int, ...]] = {}
    labels = {}
    for i, name in enumerate(_labels(n), start=1):
        labels[i] = name
        ch[i] = ()
    nxt = n + 1
    top = 1
    for leaf in range(2, n + 1):
        ch[nxt] = (top, leaf)
        top = nxt
        nxt += 1
    ch[0] = (top,)
    return Network(ch, labels, 0)


def random_tree(n: int, rng: random.Random) -> Network:
    """Uniform sequential leaf insertion onto a random edge."""
    ch: dict[int, list[int]] = {0: [1], 1: []}
    labels = {1: "1"}
    nxt = 2
    for name in _labels(n)[1:]:
        edges = [(u, i) for u, kids in ch.items() for i in range(len(kids))]
        u, i = rng.choice(edges)
        v = ch[u][i]
        mid, leaf = nxt, nxt + 1
        nxt += 2
        ch[u][i] = mid
        ch[mid] = [v, leaf] if rng.random() < 0.5 else [leaf, v]
        ch[leaf] = []
        labels[leaf] = name
    return Network({v: tuple(k) for v, k in ch.items()}, labels, 0)


def random_network(n: int, r: int, rng: random.Random) -> Network:
    """A random tree with ``r`` random SNPR+ moves applied."""
    net = random_tree(n, rng)
    for _ in range(r):
        _, net = random_move(net, rng, [PLUS])
    return net


def enumerate_networks(n: int, max_ret: int) -> dict[int, list[Network]]:
    """All networks on leaves 1..n with at most ``max_ret`` reticulations, by tier.

    Tier 0 is the SNPR0 closure of a caterpillar.  Every network with
    ``r > 0`` reticulations loses one by some SNPR-, so tier ``r`` is the set
    of SNPR+ images of tier ``r - 1``.
    """
    start = caterpillar(n)
    tier = {start.key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for k, (m, _) in neighbor_items(x, [ZERO]).items():
                if k not in tier:
                    tier[k] = m
                    nxt.append(m)
        frontier = nxt
    out = {0: [tier[k] for k in sorted(tier)]}
    for r in range(1, max_ret + 1):
        up: dict[bytes, Network] = {}
        for x in out[r - 1]:
            for k, (m, _) in neighbor_items(x, [PLUS]).items():
                up.setdefault(k, m)
        out[r] = [up[k] for k in sorted(up)]
    return out
