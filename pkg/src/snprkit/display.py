"""Displayed trees of a network, enumerated through switchings."""

from __future__ import annotations

from .network import Network, NetworkError, switchings

__all__ = ["tree_for_switching", "displayed_trees", "displayed_tree_items", "displays"]


def tree_for_switching(net: Network, keep: dict[int, int]) -> Network:
    """The tree left after keeping in-edge ``keep[v]`` of each reticulation ``v``.

    Non-leaf vertices that lose all children are removed repeatedly, then
    vertices with one parent and one child are suppressed.
    """
    pa = net.parents
    ch: dict[int, list[int]] = {v: [] for v in net.children}
    for v in net.children:
        ps = pa[v]
        if len(ps) == 2:
            ch[ps[keep[v]]].append(v)
        elif ps:
            ch[ps[0]].append(v)
    par = {c: p for p, kids in ch.items() for c in kids}
    labels = net.labels
    stack = [v for v, kids in ch.items() if not kids and v not in labels and v != net.root]
    while stack:
        v = stack.pop()
        p = par.pop(v)
        del ch[v]
        ch[p].remove(v)
        if not ch[p] and p not in labels and p != net.root:
            stack.append(p)
    for v in list(ch):
        if v != net.root and len(ch[v]) == 1:
            (c,) = ch[v]
            p = par[v]
            kids = ch[p]
            kids[kids.index(v)] = c
            par[c] = p
            del ch[v], par[v]
    return Network({v: tuple(k) for v, k in ch.items()}, labels, net.root)


def displayed_tree_items(net: Network) -> dict[bytes, tuple[Network, dict[int, int]]]:
    """Distinct displayed trees keyed canonically, each with one switching producing it."""
    out: dict[bytes, tuple[Network, dict[int, int]]] = {}
    for keep in switchings(net):
        tree = tree_for_switching(net, keep)
        out.setdefault(tree.key, (tree, keep))
    return out


def displayed_trees(net: Network) -> list[Network]:
    """D(N) up to isomorphism, in canonical order."""
    items = displayed_tree_items(net)
    return [items[k][0] for k in sorted(items)]


def displays(net: Network, tree: Network) -> bool:
    if net.label_set != tree.label_set:
        raise NetworkError("label sets differ")
    if tree.reticulations:
        raise NetworkError("second argument must be a tree")
    return tree.key in displayed_tree_items(net)
