import itertools
import random
from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from snprkit.figures import load_fixture
from snprkit.generate import random_network
from snprkit.moves import PLUS, ZERO, neighbor_items
from snprkit.network import NetworkError
from snprkit.newick import parse_enewick
from snprkit.oracle import (
    SearchConfig,
    bfs_distance,
    double_prune_check,
    geodesic_sequences,
    moves_between,
    realise,
    track_edges,
    upper_bound,
    verify_tier_lemma,
    verify_tree_passage,
)


def plain_bfs(a, b, cap):
    """Unidirectional BFS with a reticulation cap, for cross-checking."""
    seen = {a.key: 0}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x.key == b.key:
            return seen[x.key]
        for k, (m, _) in neighbor_items(x).items():
            if k not in seen and len(m.reticulations) <= cap:
                seen[k] = seen[x.key] + 1
                queue.append(m)
    return None


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 2**31))
def test_matches_plain_bfs(r1, r2, seed):
    rng = random.Random(seed)
    a, b = random_network(3, r1, rng), random_network(3, r2, rng)
    rep = bfs_distance(a, b, SearchConfig(max_reticulations=2))
    assert rep.exact and rep.distance == plain_bfs(a, b, 2)


def test_distance_zero_and_symmetry():
    a, b = load_fixture("fig1-N1"), load_fixture("fig1-N3")
    assert bfs_distance(a, a).distance == 0
    assert bfs_distance(a, b).distance == bfs_distance(b, a).distance == 2


def test_geodesics_enumerated_and_realised():
    a, b = load_fixture("fig1-N1"), load_fixture("fig1-N3")
    rep = bfs_distance(a, b)
    paths = list(geodesic_sequences(rep))
    assert len(paths) == rep.geodesic_count
    for nets in paths:
        assert nets[0] == a and nets[-1] == b and len(nets) == rep.distance + 1
        seq = realise(nets)
        assert seq.end == b and len(seq) == rep.distance
    assert len(list(geodesic_sequences(rep, limit=1))) == 1


def test_moves_between():
    n1, n2 = load_fixture("fig1-N1"), load_fixture("fig1-N2")
    mvs = moves_between(n1, n2)
    assert mvs and all(mv.kind == ZERO for mv in mvs)
    assert moves_between(n1, load_fixture("fig5-N")) == []


def test_report_json():
    rep = bfs_distance(load_fixture("fig2-T"), load_fixture("fig2-Tprime"))
    rec = rep.to_json()
    assert rec["status"] == "exact" and rec["distance"] == 2
    assert rec["every_geodesic_contains_tree"] is True
    assert rec["tier_profiles"] == [[0, 0, 0]]


def test_depth_cap_gives_unknown():
    rep = bfs_distance(load_fixture("fig2-T"), load_fixture("fig2-Tprime"), SearchConfig(max_depth=1))
    assert rep.status == "unknown" and rep.distance is None and rep.lower_bound >= 1


def test_fixed_tier_can_be_unreachable():
    a = parse_enewick("((1,2));")
    b = parse_enewick("((((1)#H1,#H1),2));")
    with pytest.raises(NetworkError):
        bfs_distance(a, b, SearchConfig.fixed_tier(0))


def test_inputs_checked():
    with pytest.raises(NetworkError):
        bfs_distance(parse_enewick("((1,2));"), parse_enewick("((1,3));"))
    with pytest.raises(NetworkError):
        bfs_distance(load_fixture("fig8-M"), load_fixture("fig8-N"), SearchConfig(class_restriction="tree-child"))
    with pytest.raises(ValueError):
        SearchConfig(class_restriction="galled")


def test_class_restricted_search_stays_in_class():
    a, b = load_fixture("fig8-N"), load_fixture("fig8-Nprime")
    rep = bfs_distance(a, b, SearchConfig(class_restriction="tree-child"))
    assert rep.exact
    assert all("tree-child" in flags for prof in rep.profiles for _, flags in prof)
    assert rep.geodesics_within("tree-child") == rep.geodesic_count


def test_upper_bound_holds():
    for x, y in [("fig1-N1", "fig1-N3"), ("fig5-N", "fig5-Nprime"), ("fig2-T", "fig2-Tprime")]:
        a, b = load_fixture(x), load_fixture(y)
        assert bfs_distance(a, b).distance <= upper_bound(a, b)


def test_verifiers_reject_wrong_shapes():
    t, u = load_fixture("fig2-T"), load_fixture("fig2-Tprime")
    assert not verify_tree_passage(t, u)
    assert not verify_tier_lemma(t, t)
    assert verify_tree_passage(load_fixture("fig6-r1-N"), load_fixture("fig6-r1-Nprime"))


def test_track_edges_keeps_moved_edge():
    net = parse_enewick("(((1,2),3));")
    tokens = {e: i for i, e in enumerate(sorted(set(net.edges)))}
    fresh = itertools.count(100)
    one = net.leaf("1")
    (mv, *_) = [mv for mv in moves_between(net, parse_enewick("(((2,3),1));")) if mv.pruned[1] == one]
    res, out = track_edges(net, mv, tokens, fresh)
    assert out[mv.pruned[:2]] == tokens[mv.pruned[:2]]
    assert sum(1 for t in out.values() if t >= 100) == 3
    assert len(out) == len(set(res.edges))


def test_track_edges_fresh_for_new_reticulation():
    net = parse_enewick("((1,2));")
    tokens = {e: i for i, e in enumerate(sorted(set(net.edges)))}
    item = next(iter(neighbor_items(net, [PLUS]).values()))
    res, out = track_edges(net, item[1], tokens, itertools.count(100))
    up, vp = item[1].pruned
    assert all(out[e] >= 100 for e in out if up in e or vp in e)


def test_double_prune_negative_cases():
    assert not double_prune_check(load_fixture("fig1-N1"), load_fixture("fig1-N3"))
    assert not double_prune_check(load_fixture("fig2-T"), load_fixture("fig2-Tprime"))
    t = parse_enewick("((1,(2,3)));")
    assert not double_prune_check(t, t)
