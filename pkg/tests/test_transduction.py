import pytest
from hypothesis import given, settings, strategies as st

from subflip.catalog import atlas_upto, colored_graphs, labeled_graphs
from subflip.flips import FlipSpec, flip, flip_specs, is_pure_flip, max_flip_relation, subflip
from subflip.graph import ColoredGraph, Graph, PreconditionError, build_graph
from subflip.logic import parse_formula
from subflip.logic.syntax import TRUE, Color, Edge
from subflip.partition import Partition, rgs_partitions
from subflip.patterns import clique, cycle, matching, path, star
from subflip.transduction import (
    Transduction, Witness, add_one, add_one_witness, apply, choice, choice_piece, compose, compose_witness,
    format_transduction, glue, glue_witness, identity, irreflexive_clique, member_check, parallel,
    parallel_witness, parse_transduction, pure_flip_transduction, subflip_recover, vc_edit, vc_partition,
)

from strategies import graph_and_partition, graphs

SQUARE = Transduction.build((), TRUE, parse_formula('E(x,y) | exists z (E(x,z) & E(z,y))'))


def W(G, colors=None):
    return Witness(ColoredGraph.of(G, colors or {}))


def test_apply_examples():
    G = build_graph(3, [(0, 1)], [2])
    assert apply(identity(), W(G)) == G
    out = apply(SQUARE, W(star(3)))
    assert out == clique(4, reflexive=True)
    red = Transduction.build(('Red',), parse_formula('Red(x)'), Edge('x', 'y'))
    P = path(4)
    assert apply(red, W(P, {'Red': {1, 2, 3}})) == P.induced({1, 2, 3})
    with pytest.raises(PreconditionError):
        apply(identity(), W(P, {'Blue': {0}}))
    with pytest.raises(PreconditionError):
        Transduction((), TRUE, Color('Red', 'x'))


def test_build_symmetrizes():
    T = Transduction.build(('A',), TRUE, parse_formula('A(x) & E(x,y)'))
    G = path(3)
    out = apply(T, W(G, {'A': {0}}))
    assert out.edges == {(0, 1)}
    assert Transduction.build((), TRUE, Edge('x', 'y')).eta == Edge('x', 'y')


def test_serialization_round_trip():
    T, _ = pure_flip_transduction(path(3, reflexive=True), FlipSpec.of(Partition.discrete(7), [(0, 1)]))
    text = format_transduction(T)
    assert text.startswith('colors: P1 P2 P3 ')
    assert parse_transduction(text) == T
    with pytest.raises(ValueError):
        parse_transduction('colors: A\nnu: top\n')


def test_member_check():
    G = path(3)
    T = Transduction.build(('A',), parse_formula('A(x)'), Edge('x', 'y'))
    w = member_check(T, G, G.induced({0, 1}))
    assert w is not None and w.coloring.color('A') == {0, 1}
    assert member_check(T, G, clique(3)) is None


def test_compose_examples():
    TT = compose(identity(), identity())
    for n in range(1, 5):
        for G in labeled_graphs(n, loops=n & 1):
            assert apply(TT, W(G)) == G
    # recovery of K_2 from its subflip, then squaring
    T1, w1 = subflip_recover(clique(2), Partition.whole(3), 3)
    H = apply(T1, w1)
    K = apply(SQUARE, W(H))
    assert apply(compose(T1, SQUARE), compose_witness(w1, W(H))) == K
    assert compose(T1, SQUARE).ep
    with pytest.raises(PreconditionError):
        compose(Transduction(('A',), Color('A', 'x'), Edge('x', 'y')), identity())
    with pytest.raises(PreconditionError):
        compose(T1, T1)


def test_glue_examples():
    P = path(4)
    T1 = glue(identity(), 1)
    assert apply(T1, glue_witness(P, [P.vertices], [W(P)], identity())) == P
    T2 = glue(identity(), 2)
    w = glue_witness(P, [{0, 1}, {2, 3}], [W(P.induced({0, 1})), W(P.induced({2, 3}))], identity())
    assert apply(T2, w).edges == {(0, 1), (2, 3)}
    K = clique(3)
    w = glue_witness(K, [{0, 1}, {1, 2}], [W(K.induced({0, 1})), W(K.induced({1, 2}))], identity())
    assert apply(T2, w).edges == {(0, 1), (1, 2)}
    with pytest.raises(PreconditionError):
        glue_witness(K, [{0, 1}], [W(K)], identity())
    assert T2.ep


def test_glue_matches_pieces_with_quantifiers():
    # square of each piece, pieces overlap in vertex 2
    G = path(5)
    sets = [{0, 1, 2}, {2, 3, 4}]
    w = glue_witness(G, sets, [W(G.induced(s)) for s in sets], SQUARE)
    out = apply(glue(SQUARE, 2), w)
    expect = apply(SQUARE, W(G.induced(sets[0]))).union(apply(SQUARE, W(G.induced(sets[1]))))
    assert out == expect
    # a universal formula relativizes to the piece as well
    T = Transduction.build((), parse_formula('forall z (E(x,z) | x = z)'), Edge('x', 'y'))
    w = glue_witness(G, sets, [W(G.induced(s)) for s in sets], T)
    out = apply(glue(T, 2), w)
    assert out.vertex_set == {1, 3}


def test_parallel_examples():
    G = path(3)
    d = 2
    T = parallel(SQUARE, d)
    assert apply(T, parallel_witness(G, [W(G)], d)) == apply(SQUARE, W(G))
    # the existential domain formula only looks inside the component of x
    has_red = Transduction.build(('Red',), parse_formula('exists z Red(z)'), Edge('x', 'y'))
    M = matching(2)
    w = parallel_witness(M, [W(M.induced({0, 1}), {'Red': {0}}), W(M.induced({2, 3}))], 1)
    assert apply(has_red, w).vertex_set == {0, 1, 2, 3}
    assert apply(parallel(has_red, 1), w).vertex_set == {0, 1}
    with pytest.raises(PreconditionError):
        parallel_witness(path(3), [W(path(3))], 1)


def test_parallel_two_components_recovered():
    # two K_2 components, each carrying the recovery coloring of its own subflip
    T, _ = subflip_recover(clique(2), Partition.whole(3), 3)
    M = matching(2)
    pieces = []
    for comp in ({0, 1}, {2, 3}):
        C = M.induced(comp)
        _, wc = subflip_recover(C, Partition.whole(C.vertices), 3)
        pieces.append(W(C, dict(wc.coloring.colors)))
    out = apply(parallel(T, 1), parallel_witness(M, pieces, 1))
    assert out == M


def test_choice_acts_per_piece():
    M = matching(2)
    T, sel, maps = choice([identity(), SQUARE])
    pieces = [choice_piece(W(M.induced({0, 1})), 0, sel, maps), choice_piece(W(M.induced({2, 3})), 1, sel, maps)]
    out = apply(parallel(T, 1), parallel_witness(M, pieces, 1))
    assert out.edges == {(0, 1), (2, 3)} and out.loop_set == {2, 3}


def test_vc_edit_examples():
    G = path(4, reflexive=True)
    T, w = vc_edit(G, [], [], 'remove')
    assert apply(T, w) == G
    P3 = path(3, reflexive=True)
    T, w = vc_edit(P3, [(0, 1)], [1], 'remove')
    out = apply(T, w)
    assert out.edges == {(1, 2)} and out.is_reflexive()
    K3 = clique(3, reflexive=True)
    T, w = vc_edit(K3, [(0, 1), (0, 2)], [0], 'remove')
    assert apply(T, w) == build_graph(3, [(1, 2)], 'all')
    assert T.quantifier_free_positive
    with pytest.raises(PreconditionError):
        vc_edit(path(3), [(0, 1)], [1])
    with pytest.raises(PreconditionError):
        vc_edit(P3, [(0, 1)], [2])


@given(graphs(max_n=6), st.data())
@settings(max_examples=150, deadline=None)
def test_vc_edit_round_trip(G, data):
    G = G.reflexive()
    E = G.edge_list()
    X = data.draw(st.lists(st.sampled_from(E), unique=True, max_size=4)) if E else []
    S = set()
    for u, v in X:
        if u not in S and v not in S:
            S.add(data.draw(st.sampled_from((u, v))))
    assert len(vc_partition(G, X, S)) <= 3 ** len(S)
    T, w = vc_edit(G, X, S, 'remove')
    H = apply(T, w)
    assert H.edges == G.edges - set(X) and H.is_reflexive()
    T2, w2 = vc_edit(H, X, S, 'add')
    assert apply(T2, w2) == G


def test_pure_flip_examples():
    G = path(4, reflexive=True)
    T, w = pure_flip_transduction(G, FlipSpec.of(Partition.whole(G.vertices)))
    assert apply(T, w) == G
    K2 = clique(2, reflexive=True)
    T, w = pure_flip_transduction(K2, FlipSpec.of(Partition.discrete(3), [(0, 1)]))
    assert w.coloring.graph == build_graph(2, [], 'all')
    assert apply(T, w) == K2
    with pytest.raises(PreconditionError):
        pure_flip_transduction(clique(2), FlipSpec.of(Partition.whole(3), [(0, 0)]))
    with pytest.raises(PreconditionError):
        pure_flip_transduction(path(3, reflexive=True), FlipSpec.of(Partition.of([[0, 1], [2]]), [(0, 1)]))


def test_pure_flip_round_trip_n4():
    for G in atlas_upto(4, reflexive=True):
        for P in rgs_partitions(G.vertices, 3):
            for spec in flip_specs(P):
                if is_pure_flip(G, spec):
                    T, w = pure_flip_transduction(G, spec)
                    assert w.coloring.graph == flip(G, spec)
                    assert apply(T, w) == G
                    assert T.quantifier_free_positive


@given(graph_and_partition(max_n=6, max_parts=3), st.data())
@settings(max_examples=100, deadline=None)
def test_pure_flip_random(GP, data):
    G, P = GP
    spec = max_flip_relation(G.reflexive(), P)
    rel = data.draw(st.sets(st.sampled_from(sorted(spec.relation)))) if spec.relation else set()
    s = FlipSpec.of(P, rel)
    T, w = pure_flip_transduction(G.reflexive(), s)
    assert apply(T, w) == G.reflexive()


def test_add_one_examples():
    base = identity()
    G = path(3)
    # isolated new vertex
    T = add_one(base, 3)
    H = Graph(4, G.adj + (0,), 0, 0b1111)
    w = add_one_witness(T, W(G), H, 3, set())
    assert apply(T, w) == H
    # dominating new vertex
    w = add_one_witness(T, W(G), H, 3, {0, 1, 2})
    out = apply(T, w)
    assert out.neighbors(3) == {0, 1, 2} and out.induced({0, 1, 2}).edges == G.edges
    with pytest.raises(PreconditionError):
        add_one(SQUARE, 3)
    with pytest.raises(PreconditionError):
        add_one(Transduction(('A',), TRUE, Edge('x', 'y')), 3, ('A', 'C', 'N'))


def test_add_one_chain_order_independent():
    G = path(2)
    target = build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    H4 = Graph(4, G.adj + (0, 0), 0, 0b1111)
    results = []
    for first, second in ((2, 3), (3, 2)):
        T1 = add_one(identity(), first)
        n1 = target.adj[first] & (0b11 | 1 << first)
        w1 = add_one_witness(T1, W(G), H4.induced(0b11 | 1 << first), first, n1)
        T2 = add_one(T1, second)
        w2 = add_one_witness(T2, w1, H4, second, target.adj[second])
        results.append(apply(T2, w2))
    assert results[0] == results[1] == target


def test_subflip_recover_examples():
    G = cycle(4, reflexive=True)
    P = Partition.of([[0, 2], [1, 3]])
    T, w = subflip_recover(G, P, 2)
    assert w.coloring.graph == subflip(G, P) and apply(T, w) == G
    K2 = clique(2)
    T, w = subflip_recover(K2, Partition.whole(3), 3)
    assert w.coloring.graph == build_graph(2)
    assert apply(T, w) == K2 and T.quantifier_free_positive
    with pytest.raises(PreconditionError):
        subflip_recover(clique(4), Partition.whole(15), 3)
    assert irreflexive_clique(clique(4), 3) == (0, 1, 2)


def _clique_bound(G):
    t = 1
    while irreflexive_clique(G, t) is not None:
        t += 1
    return t


def test_subflip_recover_exhaustive_n4():
    for cg in colored_graphs(4, ()):
        G = cg.graph
        t = _clique_bound(G)
        for P in rgs_partitions(G.vertices, 3):
            T, w = subflip_recover(G, P, t)
            assert w.coloring.graph == subflip(G, P)
            assert apply(T, w) == G


@given(graph_and_partition(max_n=5, max_parts=3))
@settings(max_examples=150, deadline=None)
def test_subflip_recover_random(GP):
    G, P = GP
    T, w = subflip_recover(G, P, _clique_bound(G))
    assert apply(T, w) == G
    assert T.quantifier_free_positive


def test_ep_flag_preserved():
    T, _ = subflip_recover(path(3), Partition.whole(7), 3)
    assert T.ep and compose(T, SQUARE).ep and glue(T, 2).ep and parallel(T, 2).ep and add_one(T, 5).ep
    assert not glue(Transduction.build((), parse_formula('forall z E(x,z)'), Edge('x', 'y')), 2).ep
