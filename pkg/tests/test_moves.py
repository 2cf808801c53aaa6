import random

import pytest
from hypothesis import given, settings, strategies as st

from snprkit.figures import load_fixture
from snprkit.moves import (
    MINUS,
    PLUS,
    ZERO,
    MoveError,
    SnprMove,
    SnprSequence,
    apply_move,
    apply_snpr0,
    apply_snpr_minus,
    apply_snpr_plus,
    iter_moves,
    neighbor_items,
    neighbors,
    random_move,
)
from snprkit.network import Network, validate
from snprkit.newick import parse_enewick

from conftest import networks


def witness(a, b, kinds):
    hit = neighbor_items(a, kinds).get(b.key)
    return None if hit is None else hit[1]


def test_fig1_moves():
    n1, n2, n3 = (load_fixture(f"fig1-{x}") for x in ("N1", "N2", "N3"))
    mv = witness(n1, n2, [ZERO])
    assert mv is not None and mv.kind == ZERO
    assert apply_move(n1, mv) == n2
    mv = witness(n2, n3, [MINUS])
    assert mv is not None and mv.reticulation_delta == -1
    assert witness(n3, n2, [PLUS]) is not None
    assert witness(n2, n1, [ZERO]) is not None


def test_sequence_replays():
    n1, n2, n3 = (load_fixture(f"fig1-{x}") for x in ("N1", "N2", "N3"))
    seq = SnprSequence(n1, [witness(n1, n2, [ZERO]), witness(n2, n3, [MINUS])])
    assert len(seq) == 2 and seq.end == n3
    assert [rec["kind"] for rec in seq.to_json()] == [ZERO, MINUS]


def test_snpr0_rejects_bad_edges():
    net = parse_enewick("((1,(2,3)));")
    with pytest.raises(MoveError):
        apply_snpr0(net, (net.root, net.children[net.root][0]), (0, 0))
    top = net.children[net.root][0]
    inner = [c for c in net.children[top] if c not in net.labels][0]
    below = net.children[inner][0]
    with pytest.raises(MoveError):
        apply_snpr0(net, (top, inner), (inner, below))


def test_snpr_minus_needs_reticulation():
    net = parse_enewick("((1,(2,3)));")
    top = net.children[net.root][0]
    with pytest.raises(MoveError):
        apply_snpr_minus(net, (top, net.children[top][0]))


def test_snpr_plus_same_edge_makes_parallel_pair():
    net = parse_enewick("((1,2));")
    e = [(u, v) for u, v in net.edges if v == net.leaf("1")][0]
    res = apply_snpr_plus(net, e, e)
    assert validate(res) == [] and len(res.reticulations) == 1
    (h,) = res.reticulations
    assert len(set(res.parents[h])) == 1


def test_snpr_plus_rejects_target_below():
    net = parse_enewick("((1,(2,3)));")
    top = net.children[net.root][0]
    inner = [c for c in net.children[top] if c not in net.labels][0]
    leaf_edge = (inner, net.children[inner][0])
    with pytest.raises(MoveError):
        apply_snpr_plus(net, (top, inner), leaf_edge)


def test_neighbours_of_two_leaf_tree():
    net = parse_enewick("((1,2));")
    assert neighbor_items(net, [ZERO]) == {}
    ups = neighbors(net, [PLUS])
    assert ups and all(len(m.reticulations) == 1 for m, _ in ups)


def test_neighbours_exclude_self_and_are_distinct():
    net = load_fixture("fig5-N")
    items = neighbors(net)
    keys = [m.key for m, _ in items]
    assert net.key not in keys and len(keys) == len(set(keys))
    for m, mv in items:
        assert apply_move(net, mv) == m


@settings(max_examples=80, deadline=None)
@given(networks(max_leaves=6, max_ret=3), st.integers(0, 2**31))
def test_moves_are_valid_and_reversible(net, seed):
    picked = random_move(net, random.Random(seed))
    if picked is None:
        return
    mv, res = picked
    assert validate(res) == []
    assert len(res.reticulations) == len(net.reticulations) + mv.reticulation_delta
    back = {ZERO: [ZERO], PLUS: [MINUS], MINUS: [PLUS]}[mv.kind]
    assert res.key == net.key or any(Network(ch, res.labels, res.root).key == net.key for _, ch in iter_moves(res, back))


def test_move_json():
    mv = SnprMove(PLUS, (7, 6), (1, 2), (3, 4))
    assert mv.to_json() == {"kind": "plus", "pruned": [7, 6], "source": [3, 4], "target": [1, 2]}
