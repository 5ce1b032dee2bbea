import math

import networkx as nx
import pytest
from hypothesis import given, settings

from subflip.graph import (
    ColoredGraph, PreconditionError, ball, bipartite_complement_between, build_graph,
    components_and_diameters, distance, format_colored, format_graph, parse_colored,
    parse_graph, tree_depth,
)
from subflip.patterns import co_matching, clique, matching, path

import oracles
from strategies import graphs


def test_build_examples():
    k1 = build_graph(1, [], ())
    assert k1.order == 1 and k1.is_irreflexive() and not k1.edges
    k2 = build_graph(2, [(0, 1)], {0, 1})
    assert k2.is_reflexive() and k2.edges == {(0, 1)}
    with pytest.raises(PreconditionError):
        build_graph(2, [(0, 0)], ())


def test_distance_examples():
    assert distance(path(3), 0, 2) == 2
    assert distance(build_graph(2), 0, 1) == math.inf
    # a1 = 0, b1 = 3 in co_matching(3)
    assert distance(co_matching(3), 0, 3) == 3


def test_ball_examples():
    G = build_graph(3, [(0, 1)], {2})
    S, H = ball(G, 0, 2)
    assert S == {2} and H.loop_set == {2} and H.order == 1
    S, H = ball(path(4), 1, 1)
    assert S == {0, 1, 2} and H.edges == {(0, 1), (1, 2)}
    S, _ = ball(co_matching(3), 2, 0)
    assert S == set(range(6)) - {3}


def test_component_examples():
    assert [d for _, d in components_and_diameters(matching(2))] == [1, 1]
    assert components_and_diameters(path(7)) == [(frozenset(range(7)), 6)]
    assert [d for _, d in components_and_diameters(co_matching(3))] == [3]


def test_tree_depth_examples():
    assert tree_depth(build_graph(1)) == 0
    for n in range(1, 7):
        assert tree_depth(clique(n)) == n - 1
    assert tree_depth(path(4)) == 2
    with pytest.raises(PreconditionError):
        tree_depth(build_graph(0))


def test_bipartite_complement_examples():
    G = build_graph(4, [(0, 2)])  # a1=0, a2=1, b1=2, b2=3
    H = bipartite_complement_between(G, {0, 1}, {2, 3})
    assert H.edges == {(0, 3), (1, 2), (1, 3)}
    full = build_graph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert not bipartite_complement_between(full, {0, 1}, {2, 3}).edges
    assert len(bipartite_complement_between(build_graph(4), {0, 1}, {2, 3}).edges) == 4


@given(graphs())
@settings(max_examples=150, deadline=None)
def test_distance_matches_networkx(G):
    g = oracles.to_nx(G)
    lengths = dict(nx.all_pairs_shortest_path_length(g))
    for u in G.vertex_list:
        for v in G.vertex_list:
            assert distance(G, u, v) == lengths[u].get(v, math.inf)


@given(graphs(max_n=6))
@settings(max_examples=100, deadline=None)
def test_triangle_inequality(G):
    vs = G.vertex_list
    for u in vs:
        for v in vs:
            for w in vs:
                assert distance(G, u, w) <= distance(G, u, v) + distance(G, v, w)


@given(graphs())
@settings(max_examples=100, deadline=None)
def test_components_match_networkx(G):
    g = oracles.to_nx(G)
    ours = components_and_diameters(G)
    theirs = sorted((frozenset(c) for c in nx.connected_components(g)), key=min)
    assert [c for c, _ in ours] == theirs
    for c, d in ours:
        assert d == nx.diameter(g.subgraph(c))


@given(graphs(max_n=6))
@settings(max_examples=60, deadline=None)
def test_tree_depth_matches_elimination_orders(G):
    assert tree_depth(G) == oracles.tree_depth(G)


def test_tree_depth_elimination_oracle_n7_samples():
    for G in [path(7), clique(6), co_matching(3), build_graph(7, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3)])]:
        assert tree_depth(G) == oracles.tree_depth(G)


@given(graphs())
@settings(max_examples=100, deadline=None)
def test_symmetry_and_text_round_trip(G):
    for u, v in G.edges:
        assert G.has_edge(u, v) and G.has_edge(v, u)
    assert parse_graph(format_graph(G)) == G


def test_text_format_is_exact():
    G = build_graph(3, [(1, 2), (0, 1)], {2})
    assert format_graph(G) == 'graph 3\nloops 2\nedges\n0 1\n1 2\n'
    assert format_graph(build_graph(2, [], 'all')).splitlines()[1] == 'loops all'
    assert format_graph(build_graph(2)).splitlines()[1] == 'loops none'
    assert parse_graph('# comment\ngraph 2  # two\nloops none\nedges\n0 1\n') == build_graph(2, [(0, 1)])
    with pytest.raises(ValueError):
        parse_graph('graph 2\nloops none\nedges\n0 5\n')
    with pytest.raises(ValueError):
        parse_graph('graph 2\nedges\n')


def test_colored_round_trip():
    cg = ColoredGraph.of(path(3), {'Red': {0, 2}, 'Blue': set()})
    assert parse_colored(format_colored(cg)) == cg
    assert cg.color('Red') == {0, 2}
