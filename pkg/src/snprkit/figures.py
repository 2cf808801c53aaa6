"""Figure fixtures and the check battery run by ``snprkit verify-paper``."""

from __future__ import annotations

from pathlib import Path

from .forest import dsnpr_via_displayed, is_agreement_forest, maf_tree_network, snpr_sequence_from_forest
from .moves import MINUS, ZERO, neighbor_items
from .network import Network, NetworkError
from .newick import read_enewick_file
from .oracle import (
    SearchConfig,
    bfs_distance,
    double_prune_check,
    verify_class_gap,
    verify_tier_lemma,
    verify_tree_passage,
    verify_upper_bound,
    verify_upward_passage,
)
from .rspr import RHO, is_tree_agreement_forest, rspr_distance

FIXTURE_DIR = Path(__file__).with_name("fixtures")


def fixture_paths(directory=None) -> list[Path]:
    return sorted(Path(directory or FIXTURE_DIR).glob("fig*-*.enwk"))


def load_fixture(name: str, directory=None) -> Network:
    """The network in ``<name>.enwk``, e.g. ``load_fixture("fig8-N")``."""
    path = Path(directory or FIXTURE_DIR) / f"{name}.enwk"
    nets = read_enewick_file(path)
    if len(nets) != 1:
        raise NetworkError(f"{path}: expected one network, found {len(nets)}")
    return nets[0]


def all_fixtures(directory=None) -> dict[str, Network]:
    return {p.stem: load_fixture(p.stem, directory) for p in fixture_paths(directory)}


REQUIRED = tuple(
    f"{fig}-{part}"
    for fig, parts in (
        ("fig1", ("N1", "N2", "N3")),
        ("fig2", ("T", "Tprime")),
        ("fig3", ("T", "N")),
        ("fig5", ("N", "Nprime")),
        ("fig6-r1", ("N", "Nprime")),
        ("fig6", ("N", "Nprime")),
        ("fig7", ("N", "Nprime")),
        ("fig8", ("N", "Nprime")),
        ("fig9", ("N", "Nprime")),
        ("fig9-pf", ("N", "Nprime")),
    )
    for part in parts
)


def _row(check: str, ok: bool, detail: str) -> dict:
    return {"check": check, "pass": bool(ok), "detail": detail}


def run_battery(directory=None) -> list[dict]:
    """One row per figure claim; each row is independent of the others."""
    fx = all_fixtures(directory)
    missing = [name for name in REQUIRED if name not in fx]
    if missing:
        raise NetworkError(f"missing fixtures in {directory or FIXTURE_DIR}: {', '.join(missing)}")
    rows = []

    n1, n2, n3 = fx["fig1-N1"], fx["fig1-N2"], fx["fig1-N3"]
    ok = n2.key in neighbor_items(n1, [ZERO]) and n3.key in neighbor_items(n2, [MINUS])
    rows.append(_row("fig1 SNPR0 then SNPR-", ok, "N2 is an SNPR0 neighbour of N1, N3 an SNPR- neighbour of N2"))
    rows.append(_row("fig1 no two-tier traversal", not verify_tier_lemma(n1, n3), "some geodesic N1 -> N3 is at most one tier horizontal"))

    t, u = fx["fig2-T"], fx["fig2-Tprime"]
    d = rspr_distance(t, u)
    drawn = [{RHO, "1", "2"}, {"3"}, {"4"}]
    ok = d == 2 and is_tree_agreement_forest(drawn, t, u)
    rows.append(_row("fig2 rSPR distance and forest", ok, f"d = {d}; {{rho,1,2}},{{3}},{{4}} is a maximum agreement forest"))

    t, n = fx["fig3-T"], fx["fig3-N"]
    forest, size = maf_tree_network(t, n)
    seq = snpr_sequence_from_forest(forest, t, n)
    ok = (
        size.m == dsnpr_via_displayed(t, n) == 3
        and is_agreement_forest(forest, t, n)
        and len(seq) == size.m
        and seq.end == n
    )
    rows.append(_row("fig3 tree-network forest", ok, f"m = k + r = {size.k} + {size.r}; sequence of length {len(seq)} ends at N"))

    a, b = fx["fig5-N"], fx["fig5-Nprime"]
    rep = bfs_distance(a, b, SearchConfig(max_reticulations=3))
    ok = rep.distance == 3 and verify_tier_lemma(a, b)
    rows.append(_row("fig5 two tiers traversed", ok, f"d = {rep.distance}; profiles {sorted(rep.tier_profiles())}"))

    a, b = fx["fig6-r1-N"], fx["fig6-r1-Nprime"]
    rows.append(_row("fig6 r=1 tree on every geodesic", verify_tree_passage(a, b), "d = 2r and tier 0 visited"))
    a, b = fx["fig6-N"], fx["fig6-Nprime"]
    holds, tight, d, bound = verify_upper_bound(a, b)
    rows.append(_row("fig6 r=2 tree on every geodesic", verify_tree_passage(a, b), "r SNPR- then r SNPR+, d = 4"))
    rows.append(_row("fig6 upper bound sharp", holds and tight, f"d = {d}, bound = {bound}"))

    a, b = fx["fig7-N"], fx["fig7-Nprime"]
    capped = bfs_distance(a, b, SearchConfig(max_reticulations=3))
    rows.append(_row("fig7 four reticulations mid-way", verify_upward_passage(a, b), "d = 2 and every middle network has r = 4"))
    rows.append(_row("fig7 cap 3 lengthens", capped.distance is not None and capped.distance > 2, f"capped d = {capped.distance}"))

    for fig, classes in (("fig8", ("tree-child", "reticulation-visible")), ("fig9", ("tree-based",)), ("fig9-pf", ("tree-based-parallel-free",))):
        a, b = fx[f"{fig}-N"], fx[f"{fig}-Nprime"]
        for cls in classes:
            restricted, free = verify_class_gap(a, b, cls)
            lb = restricted.distance if restricted.exact else restricted.lower_bound
            ok = free.distance == 2 and lb >= 3
            rows.append(_row(f"{fig} {cls} gap", ok, f"restricted {restricted.distance} ({restricted.status}), unrestricted {free.distance}"))

    if "fig10-N" in fx:
        a, b = fx["fig10-N"], fx["fig10-Nprime"]
        rows.append(_row("fig10 edge pruned twice", double_prune_check(a, b), "every geodesic prunes some edge twice"))
    return rows
