"""Acceptance criteria 1-10.

Each test carries ``@pytest.mark.criterion(n)``; the conftest prints one
PASS/FAIL line per criterion at the end of the run.  Distances are compared
exactly.  Wall-clock budgets are asserted with the limits below.
"""

import itertools
import random
import time
from collections import deque

import pytest

from snprkit.display import displayed_trees
from snprkit.figures import all_fixtures, load_fixture
from snprkit.forest import dsnpr_via_displayed, dsnpr_via_maf
from snprkit.generate import enumerate_networks, random_network
from snprkit.moves import MINUS, PLUS, ZERO, iter_moves, neighbor_items, random_move
from snprkit.network import Network, validate
from snprkit.newick import parse_enewick, write_enewick
from snprkit.oracle import (
    SearchConfig,
    bfs_distance,
    upper_bound,
    verify_class_gap,
)
from snprkit.rspr import RHO, is_tree_agreement_forest, rspr_distance

MINUTE = 60.0
BUDGET = {1: 5, 2: 30, 3: 10, 4: 60, 5: 10, 6: 10, 7: 10, 8: 15, 9: 2, 10: 1}


class Clock:
    def __init__(self, criterion):
        self.limit = BUDGET[criterion] * MINUTE
        self.start = time.perf_counter()

    def check(self):
        spent = time.perf_counter() - self.start
        assert spent < self.limit, f"took {spent:.0f} s, budget {self.limit:.0f} s"


@pytest.mark.criterion(1)
def test_displayed_tree_distance_equals_reticulation_number():
    clock = Clock(1)
    checked = 0
    for name, net in sorted(all_fixtures().items()):
        n, r = len(net.leaves), len(net.reticulations)
        if n > 6 or r > 3:
            continue
        for tree in displayed_trees(net):
            via_maf = dsnpr_via_maf(tree, net)
            via_display = dsnpr_via_displayed(tree, net)
            assert via_maf == via_display == r, (name, write_enewick(tree), via_maf, via_display)
            if n <= 4 and r <= 2:
                rep = bfs_distance(tree, net)
                assert rep.exact and rep.distance == r, (name, write_enewick(tree), rep.status, rep.distance)
            checked += 1
    assert checked > 0
    clock.check()


@pytest.mark.criterion(2)
def test_exhaustive_three_leaf_agreement():
    clock = Clock(2)
    space = enumerate_networks(3, 2)
    assert [len(space[r]) for r in range(3)] == [3, 36, 507]
    trees = space[0]
    for r in range(3):
        for net in space[r]:
            for tree in trees:
                rep = bfs_distance(tree, net)
                assert rep.exact
                via_maf = dsnpr_via_maf(tree, net)
                via_display = dsnpr_via_displayed(tree, net)
                assert via_maf == via_display == rep.distance, (
                    write_enewick(tree),
                    write_enewick(net),
                    via_maf,
                    via_display,
                    rep.distance,
                )
    clock.check()


@pytest.mark.criterion(3)
def test_two_tiers_traversed():
    clock = Clock(3)
    a, b = load_fixture("fig5-N"), load_fixture("fig5-Nprime")
    rep = bfs_distance(a, b, SearchConfig(max_reticulations=3))
    assert rep.exact and rep.distance == 3
    tier_sets = rep.horizontal_tier_sets()
    assert tier_sets and all(len(s) >= 2 for s in tier_sets), tier_sets
    clock.check()


@pytest.mark.criterion(4)
def test_tree_on_every_geodesic_and_sharp_bound():
    clock = Clock(4)
    a, b = load_fixture("fig6-N"), load_fixture("fig6-Nprime")
    assert len(a.leaves) == 6 and len(a.reticulations) == len(b.reticulations) == 2
    rep = bfs_distance(a, b)
    assert rep.exact and rep.distance == 4
    assert rep.geodesic_count > 0
    assert rep.every_geodesic_contains_tree()
    assert upper_bound(a, b) == rep.distance == 4
    clock.check()


@pytest.mark.criterion(5)
def test_upward_passage():
    clock = Clock(5)
    a, b = load_fixture("fig7-N"), load_fixture("fig7-Nprime")
    assert len(a.reticulations) == len(b.reticulations) == 3
    free = bfs_distance(a, b)
    assert free.exact and free.distance == 2
    capped = bfs_distance(a, b, SearchConfig(max_reticulations=3))
    assert capped.exact and capped.distance > 2
    at_four = bfs_distance(a, b, SearchConfig(max_reticulations=4))
    assert at_four.exact and at_four.distance == 2
    assert at_four.middle_reticulations() == {4}
    clock.check()


@pytest.mark.parametrize(
    "prefix, cls",
    [("fig8", "tree-child"), ("fig9", "tree-based"), ("fig9-pf", "tree-based-parallel-free")],
)
@pytest.mark.criterion(6)
def test_class_gap(prefix, cls):
    clock = Clock(6)
    a, b = load_fixture(f"{prefix}-N"), load_fixture(f"{prefix}-Nprime")
    restricted, free = verify_class_gap(a, b, cls)
    assert free.exact and free.distance == 2
    assert restricted.exact and restricted.distance >= 3, (restricted.status, restricted.distance)
    clock.check()


def _tier0_distances(trees):
    index = {t.key: i for i, t in enumerate(trees)}
    dist = []
    for t in trees:
        row = {t.key: 0}
        queue = deque([t])
        while queue:
            x = queue.popleft()
            for k, (m, _) in neighbor_items(x, [ZERO]).items():
                if k not in row:
                    row[k] = row[x.key] + 1
                    queue.append(m)
        assert set(row) == set(index)
        dist.append([row[s.key] for s in trees])
    return dist


@pytest.mark.criterion(7)
def test_rspr_matches_tree_space_search():
    clock = Clock(7)
    for n in range(2, 6):
        trees = enumerate_networks(n, 0)[0]
        dist = _tier0_distances(trees)
        for i, j in itertools.product(range(len(trees)), repeat=2):
            assert rspr_distance(trees[i], trees[j]) == dist[i][j], (n, write_enewick(trees[i]), write_enewick(trees[j]))
        if n <= 4:
            for i, j in itertools.combinations(range(len(trees)), 2):
                rep = bfs_distance(trees[i], trees[j], SearchConfig.fixed_tier(0))
                assert rep.distance == dist[i][j]
    t, u = load_fixture("fig2-T"), load_fixture("fig2-Tprime")
    assert rspr_distance(t, u) == 2
    drawn = [{RHO, "1", "2"}, {"3"}, {"4"}]
    assert is_tree_agreement_forest(drawn, t, u) and len(drawn) == 3
    clock.check()


@pytest.mark.criterion(8)
def test_metric_on_small_space():
    clock = Clock(8)
    space = enumerate_networks(3, 1)
    nets = space[0] + space[1]
    assert len(nets) == 39
    size = len(nets)
    d = [[0] * size for _ in range(size)]
    for i, j in itertools.product(range(size), repeat=2):
        rep = bfs_distance(nets[i], nets[j])
        assert rep.exact
        d[i][j] = rep.distance
    for i in range(size):
        assert d[i][i] == 0
        for j in range(size):
            assert (d[i][j] == 0) == (i == j)
            assert d[i][j] == d[j][i]
            for k in range(size):
                assert d[i][k] <= d[i][j] + d[j][k]
    clock.check()


@pytest.mark.criterion(9)
def test_random_moves_reverse_and_shift_tiers():
    clock = Clock(9)
    rng = random.Random(20261016)
    done = 0
    while done < 1000:
        net = random_network(rng.randint(2, 8), rng.randint(0, 4), rng)
        picked = random_move(net, rng)
        if picked is None:
            continue
        mv, res = picked
        assert validate(res) == []
        assert len(res.reticulations) - len(net.reticulations) == mv.reticulation_delta
        assert res.label_set == net.label_set
        back = {ZERO: [ZERO], PLUS: [MINUS], MINUS: [PLUS]}[mv.kind]
        goal = net.key
        assert res.key == goal or any(Network(ch, res.labels, res.root).key == goal for _, ch in iter_moves(res, back))
        done += 1
    clock.check()


@pytest.mark.criterion(10)
def test_round_trip():
    clock = Clock(10)
    for name, net in all_fixtures().items():
        assert parse_enewick(write_enewick(net)) == net, name
    rng = random.Random(10_000)
    for _ in range(10_000):
        net = random_network(rng.randint(2, 8), rng.randint(0, 4), rng)
        again = parse_enewick(write_enewick(net))
        assert again.key == net.key, write_enewick(net)
    clock.check()
