import pytest
from hypothesis import given, settings

from snprkit.figures import all_fixtures
from snprkit.network import (
    Network,
    NetworkError,
    VertexKind,
    is_isomorphic,
    is_reticulation_visible,
    is_tree,
    is_tree_based,
    is_tree_child,
    isomorphism,
    validate,
)
from snprkit.newick import parse_enewick

from conftest import networks


def rules(net):
    return {v.rule for v in validate(net)}


def test_fixture_edge_and_vertex_counts():
    for name, net in all_fixtures().items():
        n, r = len(net.leaves), len(net.reticulations)
        assert validate(net) == [], name
        assert len(net.edges) == 2 * n + 3 * r - 1, name
        assert len(net.children) == 2 * n + 2 * r, name


def test_vertex_kinds():
    net = parse_enewick("((((1)#H1,2),#H1));")
    kinds = [net.kind(v) for v in net.children]
    assert kinds.count(VertexKind.ROOT) == 1
    assert kinds.count(VertexKind.RETICULATION) == 1
    assert kinds.count(VertexKind.LEAF) == 2


def test_validate_reports_bad_degree():
    net = Network({0: (1,), 1: (2, 3, 4), 2: (), 3: (), 4: ()}, {2: "a", 3: "b", 4: "c"}, 0)
    assert "degree" in rules(net)
    with pytest.raises(NetworkError) as err:
        net.checked()
    assert err.value.violations


def test_validate_reports_root_and_labels():
    net = Network({0: (1, 2), 1: (), 2: ()}, {1: "a", 2: "a"}, 0)
    assert {"root-degree", "labels"} <= rules(net)


def test_validate_rejects_triple_parallel_and_cycles():
    cyc = Network({0: (1,), 1: (2, 3), 2: (1,), 3: ()}, {3: "a"}, 0)
    assert rules(cyc)
    lost = Network({0: (1,), 1: (), 5: (6,), 6: (5,)}, {1: "a"}, 0)
    assert rules(lost)


def test_from_edges_finds_root():
    net = Network.from_edges([(9, 0), (0, 1), (0, 2)], {1: "a", 2: "b"})
    assert net.root == 9 and validate(net) == []
    with pytest.raises(NetworkError):
        Network.from_edges([(0, 1), (2, 3)], {1: "a", 3: "b"})


def test_classes_nest():
    tree = parse_enewick("((1,(2,3)));")
    assert is_tree(tree) and is_tree_child(tree) and is_reticulation_visible(tree) and is_tree_based(tree)
    parallel = parse_enewick("((((1)#H1,#H1),2));")
    # both children of the split are the reticulation, yet leaf 1 still sees it
    assert not is_tree_child(parallel)
    assert is_reticulation_visible(parallel)
    assert is_tree_based(parallel)


def test_stacked_reticulations_are_not_tree_child():
    net = parse_enewick("(((((1)#H2)#H1,#H1),(2,#H2)));")
    assert not is_tree_child(net)
    assert not is_reticulation_visible(net)


@settings(max_examples=60, deadline=None)
@given(networks(max_leaves=6, max_ret=3))
def test_class_hierarchy(net):
    assert validate(net) == []
    if is_tree_child(net):
        assert is_reticulation_visible(net)
    if is_reticulation_visible(net):
        assert is_tree_based(net)


@settings(max_examples=60, deadline=None)
@given(networks(max_leaves=6, max_ret=3))
def test_key_is_invariant_under_vertex_renaming(net):
    shift = {v: 1000 - v for v in net.children}
    ch = {shift[v]: tuple(shift[c] for c in kids) for v, kids in net.children.items()}
    other = Network(ch, {shift[v]: lab for v, lab in net.labels.items()}, shift[net.root])
    assert other.key == net.key
    assert other == net
    iso = isomorphism(net, other)
    assert iso is not None and all(iso[v] == shift[v] for v in net.leaves)


@settings(max_examples=60, deadline=None)
@given(networks(max_leaves=6, max_ret=3))
def test_from_key_round_trip(net):
    back = Network.from_key(net.key, net.sorted_labels())
    assert back.key == net.key and is_isomorphic(back, net)


def test_relabel_changes_key():
    net = parse_enewick("((1,(2,3)));")
    swapped = net.relabel({"1": "2", "2": "1"})
    assert swapped != net and swapped.label_set == net.label_set


def test_descendants():
    net = parse_enewick("(((1)#H1,(#H1,2)));")
    one = net.leaf("1")
    assert net.is_descendant(one, net.root)
    assert not net.is_descendant(net.leaf("2"), one)
