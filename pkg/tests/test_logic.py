import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from subflip.catalog import colored_graphs as all_colored
from subflip.formula_suites import ep_suite, mso_suite
from subflip.graph import ColoredGraph, Graph, PreconditionError, build_graph
from subflip.logic import (
    And, Bot, Color, Edge, Eq, Exists, ExistsSet, Forall, FormulaSyntaxError, Not, Or, Top,
    TableEvaluator, classify, clique_family, clique_formula_check, co_matching_family, disjointify,
    ep_normal_form, evaluate, free_vars, half_graph_search, is_positive_in, mso_collapse, nep_check,
    parse_formula, qrank, render, sunflower_tuples,
)
from subflip.logic.classify import NotPositiveError
from subflip.logic.evaluate import naive_satisfying, satisfying_assignments
from subflip.logic.nep import NEPInstance, disjoint_tuples, shared_coordinate_family
from subflip.logic.normal_form import NotEPError, check_normal_form
from subflip.logic.syntax import InSet, ScopeError, check_scope, rename_free
from subflip.patterns import clique, matching, path, star

from strategies import colored_graphs, formulas

SQUARE = 'E(x,y) | exists z (E(x,z) & E(z,y))'
ISO_GRAPHS = all_colored(4)


def test_parse_examples():
    f = parse_formula(SQUARE)
    assert f == Or((Edge('x', 'y'), Exists('z', And((Edge('x', 'z'), Edge('z', 'y'))))))
    assert parse_formula('dist<=2(x,y)') == parse_formula('exists z1 (E(x,z1) & E(z1,y))')
    assert parse_formula('dist<=1(x,y)') == Edge('x', 'y')
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula('E(x,')
    assert err.value.offset == 4


def test_parse_precedence_and_scope():
    f = parse_formula('~A(x) & B(x) | C(x)')
    assert f == Or((And((Not(Color('A', 'x')), Color('B', 'x'))), Color('C', 'x')))
    f = parse_formula('exists x A(x) | B(x)')
    assert isinstance(f, Exists) and isinstance(f.body, Or)
    assert parse_formula('existsS Y Y(x)') == ExistsSet('Y', InSet('Y', 'x'))
    assert parse_formula('Y(x)') == Color('Y', 'x')
    with pytest.raises(FormulaSyntaxError):
        parse_formula('E(x,y)', free=['x'])
    with pytest.raises(FormulaSyntaxError):
        parse_formula('exists E E(x,y)')
    with pytest.raises(FormulaSyntaxError):
        parse_formula('A(x) B(x)')


@given(formulas(depth=4, set_quantifiers=True))
@settings(max_examples=500, deadline=None)
def test_render_parse_round_trip(f):
    assert parse_formula(render(f)) == f


def test_classify_examples():
    c = classify(parse_formula('~x = y'))
    assert not c.positive and c.existential and not c.ep
    c = classify(parse_formula(SQUARE))
    assert c.ep and c.qrank == 1
    for r in range(1, 6):
        assert classify(parse_formula(f'dist<={r}(x,y)')).qrank == r - 1
    assert not classify(parse_formula('forall x E(x,x)')).existential
    assert not classify(parse_formula('~exists z E(x,z)')).existential
    c = classify(parse_formula('existsS Y (~~Y(x) & ~Z(x))', set_vars=['Z']))
    assert c.positive_in == {'Y'}
    with pytest.raises(ScopeError):
        classify(parse_formula('E(x,y)'), free=['x'])


def test_evaluate_examples():
    G = build_graph(2, [(0, 1)])
    assert evaluate(G, Edge('x', 'y'), {'x': 0, 'y': 1})
    S = star(3)
    sq = parse_formula(SQUARE)
    for leaf in (1, 2, 3):
        assert evaluate(S, sq, {'x': leaf, 'y': leaf})
    assert evaluate(S, parse_formula('existsS Y forall x Y(x)'))
    assert evaluate(build_graph(1, [], [0]), Edge('x', 'x'), {'x': 0})
    assert not evaluate(build_graph(1), Edge('x', 'x'), {'x': 0})


def test_evaluate_errors():
    from subflip.logic import EvaluationError
    with pytest.raises(EvaluationError):
        evaluate(path(2), Edge('x', 'y'), {'x': 0})
    with pytest.raises(EvaluationError):
        TableEvaluator(path(2)).table(Edge('x', 'y'), ['x'])


@given(formulas(depth=3, free=('x', 'y')), colored_graphs(max_n=4))
@settings(max_examples=200, deadline=None)
def test_table_evaluator_matches_naive(f, cg):
    assert satisfying_assignments(cg, f, ('x', 'y')) == naive_satisfying(cg, f, ('x', 'y'))


@given(formulas(depth=3, free=('x',), sets=('Y',), set_quantifiers=True), colored_graphs(max_n=3), st.data())
@settings(max_examples=200, deadline=None)
def test_monotonicity_in_positive_set(f, cg, data):
    assume(is_positive_in(f, 'Y'))
    vs = sorted(cg.graph.vertex_list)
    Y = data.draw(st.sets(st.sampled_from(vs)))
    Y2 = Y | data.draw(st.sets(st.sampled_from(vs)))
    x = data.draw(st.sampled_from(vs))
    if evaluate(cg, f, {'x': x}, {'Y': Y}):
        assert evaluate(cg, f, {'x': x}, {'Y': Y2})


def test_normal_form_examples():
    nf = ep_normal_form(Edge('x', 'y'))
    assert nf.radius == 1 and len(nf.disjuncts) == 1 and len(nf.disjuncts[0]) == 1
    nf = ep_normal_form(parse_formula(SQUARE))
    assert nf.radius == 2
    assert [[c.formula for c in d] for d in nf.disjuncts] == [
        [Edge('x', 'y')], [parse_formula('exists z (E(x,z) & E(z,y))')]]
    nf = ep_normal_form(parse_formula('exists y (E(x1,y) & Red(x2))'))
    assert [(c.formula, c.vars) for c in nf.disjuncts[0]] == [
        (Color('Red', 'x2'), ('x2',)), (parse_formula('exists y E(x1,y)'), ('x1',))]
    with pytest.raises(NotEPError):
        ep_normal_form(parse_formula('~E(x,y)'))


def test_normal_form_suite_on_iso_classes():
    for f in ep_suite():
        nf = ep_normal_form(f)
        assert classify(nf.formula()).ep
        assert all(set(c.vars) <= set(free_vars(f)) and qrank(c.formula) <= qrank(f) for c in nf.conjuncts())
        assert check_normal_form(f, ISO_GRAPHS)
        for c in nf.conjuncts():
            assert clique_formula_check(c.formula, nf.radius, ISO_GRAPHS)


@given(formulas(depth=3, free=('x', 'y', 'z'), positive=True, existential=True, colors=('C',)))
@settings(max_examples=60, deadline=None)
def test_normal_form_random_ep(f):
    iso = ISO_GRAPHS[::7]
    assert check_normal_form(f, iso)
    nf = ep_normal_form(f)
    for c in nf.conjuncts():
        assert clique_formula_check(c.formula, nf.radius, iso)


def test_clique_formula_check_examples():
    suite = [ColoredGraph(path(4)), ColoredGraph(matching(2))]
    assert clique_formula_check(Edge('x', 'y'), 1, suite)
    assert clique_formula_check(And((Eq('x', 'y'), Color('Red', 'x'))), 0, suite)
    far = ColoredGraph.of(build_graph(2), {'Red': {0, 1}})
    assert not clique_formula_check(parse_formula('Red(x) & Red(y)'), 1, suite + [far])


def test_mso_collapse_examples():
    assert mso_collapse(parse_formula('existsS Y forall x Y(x)')) == Forall('x', Top())
    assert mso_collapse(parse_formula('forallS Y (Y(x) | E(x,y))')) == Or((Bot(), Edge('x', 'y')))
    with pytest.raises(NotPositiveError):
        mso_collapse(parse_formula('existsS Y ~Y(x)'))


def test_mso_collapse_suite():
    for f in mso_suite():
        g = mso_collapse(f)
        assert not any(isinstance(n, (ExistsSet,)) for n in [g])
        if classify(f).existential:
            assert classify(g).existential
        if classify(f).positive:
            assert classify(g).positive
        fv = free_vars(f)
        for cg in ISO_GRAPHS:
            ev = TableEvaluator(cg)
            assert np.array_equal(ev.table(f, fv), ev.table(g, fv))


def test_nep_examples():
    for ell in range(1, 7):
        assert nep_check(co_matching_family(ell))
        assert nep_check(clique_family(ell))
        found = half_graph_search(ell)
        assert found is not None and nep_check(found[2])
    # the identity formula never has the property on two or more tuples
    inst = co_matching_family(3)
    bad = NEPInstance(parse_formula('x1 = y1'), inst.xs, inst.ys, inst.colored, inst.tuples)
    assert not nep_check(bad)
    with pytest.raises(PreconditionError):
        NEPInstance(inst.formula, inst.xs, inst.ys, inst.colored, ((0,),))


def test_nep_reflexive_clique_fails():
    G = clique(4, reflexive=True)
    inst = NEPInstance(Edge('x', 'y'), ('x',), ('y',), ColoredGraph(G), tuple((v,) for v in range(4)))
    assert not nep_check(inst)


def test_sunflower_examples():
    same = [(1, 2, 3)] * 4
    chosen, core = sunflower_tuples(same, 4)
    assert len(chosen) == 4 and core == {1, 2, 3}
    disjoint = [(0, 1), (2, 3), (4, 5)]
    assert sunflower_tuples(disjoint, 3) == (disjoint, frozenset())
    c = 9
    chosen, core = sunflower_tuples([(c, 1), (c, 2), (c, 3)], 3)
    assert core == {1}
    assert sunflower_tuples([(0, 1), (1, 2), (2, 0)], 2) is None
    mixed = [(0, 1), (1, 2), (5, 6), (7, 8)]
    chosen, core = sunflower_tuples(mixed, 3)
    assert core == frozenset() and disjoint_tuples(chosen)


def test_disjointify_examples():
    inst = co_matching_family(4)
    out = disjointify(inst)
    assert out.formula == inst.formula and out.tuples == inst.tuples
    # irreflexive clique plus a shared vertex c in coordinate 2
    K = clique(4)
    c = 4
    G = Graph(5, K.adj + (0,), 0, 0b11111)
    phi = parse_formula('E(x1,y1) & x2 = y2')
    inst = NEPInstance(phi, ('x1', 'x2'), ('y1', 'y2'), ColoredGraph(G), tuple((v, c) for v in range(4)))
    assert nep_check(inst)
    out = disjointify(inst)
    assert out.tuples == tuple((v,) for v in range(4))
    assert out.colored.color('X2') == {c}
    assert out.formula == parse_formula('exists z1 (X2(z1) & E(x1,y1) & z1 = z1)')
    assert nep_check(out)
    same = NEPInstance(phi, ('x1', 'x2'), ('y1', 'y2'), ColoredGraph(G), ((0, c), (0, c)))
    with pytest.raises(PreconditionError):
        disjointify(same)


def test_disjointify_shared_family():
    for ell in range(2, 7):
        inst = shared_coordinate_family(ell)
        assert nep_check(inst)
        out = disjointify(inst)
        assert out.t < inst.t and disjoint_tuples(out.tuples) and nep_check(out)
        assert classify(out.formula).ep == classify(inst.formula).ep


def test_rename_free_avoids_capture():
    f = parse_formula('exists y E(x,y)')
    g = rename_free(f, {'x': 'y'})
    assert free_vars(g) == ('y',)
    G = path(3)
    for v in G.vertex_list:
        assert evaluate(G, f, {'x': v}) == evaluate(G, g, {'y': v})


def test_check_scope():
    check_scope(parse_formula('exists y E(x,y)'), ['x'])
    with pytest.raises(ScopeError):
        check_scope(parse_formula('existsS Y Z(x)', set_vars=['Z']), ['x'])
