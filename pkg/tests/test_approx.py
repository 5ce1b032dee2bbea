import pytest
from hypothesis import given, settings, strategies as st

from subflip.approx import matching_diameter_report, transfer_refinement, verify_transfer
from subflip.flips import FlipSpec, flip, relations, subflip
from subflip.graph import INF, PreconditionError, bipartite_complement_between, build_graph, distance
from subflip.partition import Partition
from subflip.patterns import PatternKind, clique, co_matching, matching, path, pattern_order

from strategies import graph_and_partition, graphs

SINGLE_EDGE = build_graph(4, [(0, 2)])  # a1=0 a2=1 b1=2 b2=3
SIDES = Partition.of([[0, 1], [2, 3]])


def test_report_examples():
    assert matching_diameter_report(matching(3)) == {'big_components': 3, 'max_diameter': 1}
    assert matching_diameter_report(path(7)) == {'big_components': 1, 'max_diameter': 6}
    assert pattern_order(path(7), PatternKind.INDUCED_MATCHING) == 2
    assert matching_diameter_report(build_graph(5)) == {'big_components': 0, 'max_diameter': 0}


def test_transfer_examples():
    for n in range(1, 5):
        K = clique(n, reflexive=True)
        for P in [Partition.whole(range(n)), Partition.discrete(range(n))]:
            res = transfer_refinement(K, P, 1)
            assert res.refinement == P
            assert verify_transfer(K, P, res)
    res = transfer_refinement(SINGLE_EDGE, SIDES, 2)
    assert res.refinement == SIDES
    cross = flip(SINGLE_EDGE, FlipSpec.of(SIDES, [(0, 1)]))
    assert distance(cross, 0, 2) == 3
    assert verify_transfer(SINGLE_EDGE, SIDES, res)
    assert transfer_refinement(build_graph(4), Partition.whole(range(4)), 2).refinement == Partition.whole(range(4))


def test_transfer_rejects_large_co_matching():
    G = co_matching(3)
    with pytest.raises(PreconditionError):
        transfer_refinement(G, Partition.whole(range(6)), 2, check=True)


@given(graph_and_partition(max_n=6, max_parts=3), st.integers(1, 4))
@settings(max_examples=80, deadline=None)
def test_transfer_guarantee(gp, t):
    G, P = gp
    if pattern_order(G, PatternKind.CO_MATCHING) >= t:
        return
    res = transfer_refinement(G, P, t)
    k = len(P)
    assert res.refinement.is_refinement_of(P)
    assert len(res.refinement) <= k * t ** k
    assert all(len(X) <= t for X in res.per_pair_parts.values())
    assert verify_transfer(G, P, res)
    Hq = subflip(G, res.refinement)
    for rel in relations(k):
        H = flip(G, FlipSpec(P, rel))
        for u in G.vertex_list:
            for v in G.vertex_list:
                assert 3 * t * distance(Hq, u, v) >= distance(H, u, v) or distance(Hq, u, v) == INF


@given(graphs(max_n=6), st.data())
@settings(max_examples=80, deadline=None)
def test_induced_vs_semi_induced(G, data):
    c = pattern_order(G, PatternKind.CO_MATCHING)
    labels = data.draw(st.lists(st.integers(0, 2), min_size=G.n, max_size=G.n))
    A = {v for v, lab in enumerate(labels) if lab == 0}
    B = {v for v, lab in enumerate(labels) if lab == 1}
    Bc = bipartite_complement_between(G, A, B)
    assert pattern_order(Bc, PatternKind.INDUCED_MATCHING) <= c
