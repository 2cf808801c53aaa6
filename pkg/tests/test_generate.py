import random

from snprkit.generate import caterpillar, enumerate_networks, random_network, random_tree
from snprkit.network import validate
from snprkit.newick import parse_enewick


def test_caterpillar():
    assert caterpillar(4) == parse_enewick("((((1,2),3),4));")


def test_tree_counts():
    # (2n-3)!! rooted binary trees
    assert [len(enumerate_networks(n, 0)[0]) for n in (2, 3, 4, 5)] == [1, 3, 15, 105]


def test_three_leaf_space():
    space = enumerate_networks(3, 2)
    assert [len(space[r]) for r in range(3)] == [3, 36, 507]
    for r, nets in space.items():
        assert all(len(n.reticulations) == r for n in nets)
        assert len({n.key for n in nets}) == len(nets)


def test_random_generators_are_valid():
    rng = random.Random(5)
    for _ in range(100):
        n, r = rng.randint(2, 9), rng.randint(0, 4)
        tree = random_tree(n, rng)
        net = random_network(n, r, rng)
        assert validate(tree) == [] and validate(net) == []
        assert len(net.reticulations) == r and len(net.leaves) == n


def test_random_is_seeded():
    a = random_network(6, 3, random.Random(1))
    b = random_network(6, 3, random.Random(1))
    assert a.key == b.key
