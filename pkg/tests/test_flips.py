from hypothesis import given, settings, strategies as st

from subflip.flips import (
    FlipSpec, compose_specs, flip, flip_specs, fully_adjacent, is_pure_flip, m_similar,
    max_flip_relation, relation_between, relations, subflip,
)
from subflip.graph import build_graph
from subflip.partition import Partition, partition_ops, refinements, rgs_partitions
from subflip.patterns import clique, co_matching, matching, path

import oracles
from strategies import graph_and_partition, graphs, partitions_of


def test_flip_examples():
    G = path(4)
    P = Partition.of([[0, 1], [2, 3]])
    assert flip(G, FlipSpec.of(P)) == G
    k2 = clique(2)
    assert flip(k2, FlipSpec.of(Partition.discrete(range(2)), [(0, 1)])) == build_graph(2)


def test_fully_adjacent_examples():
    k2 = clique(2)
    assert fully_adjacent(k2, {0}, {0})
    assert fully_adjacent(k2, {0, 1}, {0, 1})
    assert not fully_adjacent(co_matching(2), {0, 1}, {2, 3})


def test_max_flip_relation_examples():
    P = Partition.of([[0, 1], [2], [3]])
    spec = max_flip_relation(build_graph(4), P)
    assert spec.relation == {(1, 1), (2, 2)}
    assert max_flip_relation(clique(4, reflexive=True), Partition.whole(range(4))).relation == {(0, 0)}
    assert max_flip_relation(matching(2), Partition.whole(range(4))).relation == frozenset()


def test_subflip_examples():
    G = matching(2)
    assert subflip(G, Partition.whole(range(4))) == G
    R = build_graph(4, [(0, 1), (1, 2), (2, 3)], {0, 3})
    out = subflip(R, Partition.discrete(range(4)))
    assert not out.edges and out.loops == R.loops
    for n in range(1, 6):
        assert not subflip(clique(n), Partition.whole(range(n))).edges


def test_partition_ops_examples():
    P = Partition.of([[0, 1], [2, 3]])
    Q = Partition.of([[0, 2], [1, 3]])
    ops = partition_ops(P, Q, {0, 2})
    assert ops['restrict'] == Partition.of([[0], [2]])
    assert ops['refine'] == Partition.discrete(range(4))
    assert partition_ops(P, Partition.discrete(range(4)), set())['is_refinement']
    assert not ops['is_refinement']


def test_pure_flip_examples():
    G = path(4)
    P = Partition.of([[0, 1], [2, 3]])
    assert not is_pure_flip(G, FlipSpec.of(P, [(0, 1)]))
    assert is_pure_flip(G, FlipSpec.of(P))
    assert is_pure_flip(G, max_flip_relation(G, P))


def test_similarity_examples():
    G = path(4)
    V = Partition.whole(range(4))
    assert m_similar(G, G, V) is not None
    M = Partition.of([[0, 1], [2, 3]])
    w = m_similar(G, subflip(G, M), M)
    assert w is not None and w.common == subflip(G, M)
    w = m_similar(clique(2), build_graph(2), Partition.discrete(range(2)))
    assert w is not None and not w.common.edges


def test_rgs_enumeration_counts():
    bell = [1, 1, 2, 5, 15, 52, 203]
    for n in range(7):
        parts = list(rgs_partitions(range(n)))
        assert len(parts) == bell[n]
        assert len(set(parts)) == bell[n]
    assert next(iter(rgs_partitions(range(4)))) == Partition.whole(range(4))
    # Stirling numbers S(5,1) + S(5,2) = 1 + 15
    assert len(list(rgs_partitions(range(5), 2))) == 16


def test_rgs_matches_labeling_oracle():
    for n in range(1, 6):
        for k in range(1, 4):
            ours = {P for P in rgs_partitions(range(n), k)}
            theirs = {Partition.of(b) for b in oracles.set_partitions(list(range(n)), k)}
            assert ours == theirs


def test_refinements_are_refinements():
    P = Partition.of([[0, 1, 2], [3, 4]])
    refs = list(refinements(P))
    assert len(refs) == 5 * 2
    assert all(R.is_refinement_of(P) for R in refs)


@given(graph_and_partition(max_n=7, max_parts=4))
@settings(max_examples=200, deadline=None)
def test_subflip_matches_oracle(gp):
    G, P = gp
    H = subflip(G, P)
    assert {frozenset(e) for e in H.edges} == oracles.subflip_edges(G, P.blocks)
    assert H.is_subgraph_of(G) and H.loops == G.loops


@given(graph_and_partition(max_n=6, max_parts=3), st.data())
@settings(max_examples=150, deadline=None)
def test_flip_symmetry_transitivity_heredity(gp, data):
    G, P1 = gp
    P2 = data.draw(partitions_of(G.n, 3))
    F1 = data.draw(st.sampled_from(list(relations(len(P1)))))
    F2 = data.draw(st.sampled_from(list(relations(len(P2)))))
    s1, s2 = FlipSpec(P1, F1), FlipSpec(P2, F2)
    H1 = flip(G, s1)
    assert flip(H1, s1) == G
    assert flip(G, compose_specs(s1, s2)) == flip(H1, s2)
    S = data.draw(st.sets(st.integers(0, G.n - 1), min_size=1))
    assert H1.induced(S) == flip(G.induced(S), s1.restrict(S))


@given(graph_and_partition(max_n=6, max_parts=3))
@settings(max_examples=100, deadline=None)
def test_relation_between_recovers_spec(gp):
    G, P = gp
    for spec in flip_specs(P):
        found = relation_between(G, flip(G, spec), P)
        assert found is not None and flip(G, found) == flip(G, spec)


@given(graph_and_partition(max_n=6, max_parts=3))
@settings(max_examples=100, deadline=None)
def test_subflip_is_pure_both_ways(gp):
    G, P = gp
    spec = max_flip_relation(G, P)
    H = subflip(G, P)
    assert flip(G, spec) == H
    assert is_pure_flip(G, spec) and is_pure_flip(H, spec)
    assert flip(H, spec) == G


@given(graphs(max_n=6))
@settings(max_examples=50, deadline=None)
def test_budget_clamp_and_identity_partition(G):
    V = Partition.whole(G.vertices)
    H = subflip(G, V)
    assert H == G or not H.edges
