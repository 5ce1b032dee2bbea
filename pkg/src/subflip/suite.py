'''The invariant battery behind ``subflip verify-suite`` and the acceptance gate.

Every check is a function returning a list of violation strings (empty means
it holds).  The instance sets are passed in, so the same code runs at quick
scale from the CLI and at full scale from the acceptance tests.
'''

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .approx import matching_diameter_report, transfer_refinement, verify_transfer
from .catalog import atlas_upto, colored_graphs
from .depth import RankQuery, flip_depth, rank, sc_depth
from .flips import (
    FlipSpec, compose_specs, flip, is_pure_flip, m_similar, relation_between, relations, subflip,
)
from .formula_suites import ep_suite, mso_suite
from .graph import INF, ColoredGraph, Graph, bits, build_graph, tree_depth
from .logic import (
    TableEvaluator, classify, clique_formula_check, clique_family, co_matching_family, disjointify,
    ep_normal_form, free_vars, half_graph_search, mso_collapse, nep_check, qrank,
)
from .logic.nep import shared_coordinate_family
from .logic.normal_form import check_normal_form
from .partition import Partition, common_refinement, refinements, rgs_partitions
from .patterns import PatternKind, co_matching, matching, path, pattern_order
from .sparsify import build_transductions, decompose, recover, sparsify
from .transduction import apply, pure_flip_transduction

Violations = list[str]


def _submasks(mask: int) -> Iterable[int]:
    s = mask
    while s:
        yield s
        s = (s - 1) & mask


def _some_relations(k: int, rng: random.Random, limit: int) -> list[frozenset]:
    every = list(relations(k)) if k <= 3 else None
    if every is not None and len(every) <= limit:
        return every
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    out = [frozenset(), frozenset(pairs)]
    while len(out) < limit:
        out.append(frozenset(p for p in pairs if rng.random() < 0.5))
    return out


def loop_cycled(graphs: Sequence[Graph]) -> list[Graph]:
    '''Each graph with no loops, all loops, and one mixed loop set chosen by position.'''
    out = []
    for i, G in enumerate(graphs):
        masks = {0, G.vertices, (i * 0x9E5) & G.vertices}
        out.extend(G.with_loops(m) for m in sorted(masks))
    return out


# -- criterion 1

def example_violations() -> Violations:
    G = matching(2)
    P = Partition.whole(G.vertices)
    S = 0b0011
    out = []
    left = subflip(G.induced(S), P.restrict(S))
    right = subflip(G, P).induced(S)
    if left.edges or left.order != 2:
        out.append(f'G[S] ⊖ P|S should be 2K_1, got {left}')
    if right.edges != {(0, 1)}:
        out.append(f'(G ⊖ P)[S] should be K_2, got {right}')
    return out


# -- criterion 2

def identity_violations(G: Graph, max_relations: int = 8, seed: int = 0) -> Violations:
    '''Lemmas on refinement, induced subgraphs, flip basics and similarity for one graph.'''
    rng = random.Random(seed)
    out: Violations = []
    parts = list(rgs_partitions(G.vertices))
    subsets = list(_submasks(G.vertices))
    whole = Partition.whole(G.vertices)
    if m_similar(G, G, whole) is None:
        out.append('G is not 1-similar to itself')
    for P in parts:
        H = subflip(G, P)
        if not H.is_subgraph_of(G) or H.loops != G.loops:
            out.append(f'subflip by {P} is not a subgraph')
        for R in refinements(P):
            if subflip(H, R) != subflip(G, R):
                out.append(f'refine fails for P={P} R={R}')
        for S in subsets:
            PS = P.restrict(S)
            if subflip(G.induced(S), PS) != subflip(H.induced(S), PS):
                out.append(f'induce fails for P={P} S={sorted(bits(S))}')
        if m_similar(G, H, P) is None:
            out.append(f'G and its subflip are not {P}-similar')
        back = relation_between(H, G, P)
        if back is None or not is_pure_flip(H, back):
            out.append(f'G is not a pure flip of its subflip for P={P}')
        for rel in _some_relations(len(P), rng, max_relations):
            spec = FlipSpec(P, rel)
            F = flip(G, spec)
            if flip(F, spec) != G:
                out.append(f'flip symmetry fails for {spec}')
            similar = m_similar(G, F, P) is not None
            if similar and relation_between(G, F, P) is None:
                out.append(f'similar graphs are not flips of each other for {spec}')
            for S in subsets:
                if F.induced(S) != flip(G.induced(S), spec.restrict(S)):
                    out.append(f'flip heredity fails for {spec} S={sorted(bits(S))}')
                if similar and m_similar(G.induced(S), F.induced(S), P.restrict(S)) is None:
                    out.append(f'similarity heredity fails for {spec} S={sorted(bits(S))}')
    for P1 in parts:
        for P2 in parts:
            s1 = FlipSpec(P1, rng.choice(_some_relations(len(P1), rng, 4)))
            s2 = FlipSpec(P2, rng.choice(_some_relations(len(P2), rng, 4)))
            H2 = flip(flip(G, s1), s2)
            meet = common_refinement([P1, P2])
            if relation_between(G, H2, meet) is None or flip(G, compose_specs(s1, s2)) != H2:
                out.append(f'flip transitivity fails for {s1} then {s2}')
    return out


# -- criterion 3

def preserve_cmi_violations(G: Graph, cmi: Callable[[Graph], int], max_parts: int = 3) -> Violations:
    out = []
    c1 = cmi(G)
    for P in rgs_partitions(G.vertices, max_parts):
        c2 = cmi(subflip(G, P))
        k2 = len(P) ** 2
        for t in range(0, G.order + 1):
            if t > 1 and c2 >= t * k2 and c1 < t:
                out.append(f'cmi(G ⊖ P)={c2} but cmi(G)={c1} < {t} for P={P}')
            if c1 >= t * k2 and c2 < t:
                out.append(f'cmi(G)={c1} but cmi(G ⊖ P)={c2} < {t} for P={P}')
    return out


# -- criterion 4

def random_transfer_instance(rng: random.Random, max_n: int = 6, max_parts: int = 3) -> tuple[Graph, Partition, int]:
    n = rng.randint(1, max_n)
    edges = [e for e in combinations(range(n), 2) if rng.random() < 0.5]
    G = build_graph(n, edges, [v for v in range(n) if rng.random() < 0.5])
    labels = [rng.randrange(min(max_parts, n)) for _ in range(n)]
    blocks = [[v for v in range(n) if labels[v] == b] for b in sorted(set(labels))]
    c = pattern_order(G, PatternKind.CO_MATCHING)
    return G, Partition.of(blocks), c + rng.randint(1, 2)


def transfer_check(G: Graph, P: Partition, t: int, seed: int = 0) -> Violations:
    res = transfer_refinement(G, P, t)
    out = []
    k = len(P)
    if len(res.refinement) > k * t ** k:
        out.append(f'|Q|={len(res.refinement)} exceeds {k}*{t}^{k}')
    if not verify_transfer(G, P, res, seed):
        out.append(f'transfer guarantee fails for P={P} t={t}')
    return out


# -- criterion 5

def matching_diam_violations(G: Graph) -> Violations:
    t = pattern_order(G, PatternKind.INDUCED_MATCHING) + 1
    rep = matching_diameter_report(G)
    out = []
    if rep['big_components'] >= t:
        out.append(f'{rep["big_components"]} big components with t={t}')
    if rep['max_diameter'] >= 3 * t:
        out.append(f'diameter {rep["max_diameter"]} with t={t}')
    return out


# -- criterion 6

def sandwich_violations(G: Graph, k: int = 2) -> Violations:
    fd = flip_depth(G, k)
    sc = sc_depth(G)
    if fd <= sc <= 3 * k * k * fd:
        return []
    return [f'flip-depth {fd}, SC-depth {sc} for {G}']


# -- criterion 7

def sparsify_violations(G: Graph, k: int) -> tuple[bool, Violations]:
    '''(decomposable, violations) for the sparsify-recover round trip.'''
    tree = decompose(G, k)
    if tree is None:
        return False, []
    d = tree.depth
    w = sparsify(G, tree, k)
    Gs = w.result
    out = []
    if tree_depth(Gs) > k * d:
        out.append(f'tree-depth {tree_depth(Gs)} > {k}*{d}')
    if not Gs.is_subgraph_of(G) or Gs.loops != G.loops:
        out.append('G* is not a subgraph of G')
    if recover(w) != G:
        out.append('recover does not return G')
    ts = build_transductions(w, G)
    if apply(*ts['sparsify']) != Gs:
        out.append('sparsify transduction disagrees')
    if apply(*ts['recover']) != G:
        out.append('recover transduction disagrees')
    if not (ts['sparsify'][0].ep and ts['recover'][0].ep):
        out.append('a transduction is not existential positive')
    return True, [f'{G} k={k}: {v}' for v in out]


# -- criterion 8

def pure_flip_violations(G: Graph, max_parts: int = 3) -> tuple[int, Violations]:
    count = 0
    out = []
    for P in rgs_partitions(G.vertices, max_parts):
        for rel in relations(len(P)):
            spec = FlipSpec(P, rel)
            if not is_pure_flip(G, spec):
                continue
            H = flip(G, spec)
            T, w = pure_flip_transduction(G, spec)
            count += 1
            if not T.quantifier_free_positive:
                out.append(f'formula not quantifier-free positive for {spec}')
            if w.coloring.graph != H or apply(T, w) != G:
                out.append(f'{G}: pure flip {spec} not recovered')
    return count, out


# -- criterion 9

def normal_form_violations(graphs: Sequence[ColoredGraph]) -> Violations:
    out = []
    for f in ep_suite():
        nf = ep_normal_form(f)
        if not classify(nf.formula()).ep:
            out.append(f'normal form of {f} is not EP')
        if nf.radius != 2 ** qrank(f):
            out.append(f'radius {nf.radius} != 2^{qrank(f)} for {f}')
        if not check_normal_form(f, graphs):
            out.append(f'normal form of {f} disagrees')
        for c in nf.conjuncts():
            if not clique_formula_check(c.formula, nf.radius, graphs):
                out.append(f'conjunct {c.formula} is not a {nf.radius}-clique formula')
    return out


# -- criterion 10

def mso_violations(graphs: Sequence[ColoredGraph]) -> Violations:
    out = []
    for f in mso_suite():
        g = mso_collapse(f)
        cf, cg = classify(f), classify(g)
        if cf.existential and not cg.existential:
            out.append(f'collapse of existential {f} is not existential')
        fv = free_vars(f)
        for G in graphs:
            ev = TableEvaluator(G)
            if not (ev.table(f, fv) == ev.table(g, fv)).all():
                out.append(f'collapse of {f} disagrees on {G.graph}')
                break
    return out


# -- criterion 11

def nep_violations(max_ell: int = 6) -> Violations:
    out = []
    for ell in range(1, max_ell + 1):
        if not nep_check(co_matching_family(ell)):
            out.append(f'co-matching family fails at {ell}')
        if not nep_check(clique_family(ell)):
            out.append(f'clique family fails at {ell}')
        found = half_graph_search(ell)
        if found is None or not nep_check(found[2]):
            out.append(f'no half-graph assignment found at {ell}')
    for ell in range(2, max_ell + 1):
        inst = shared_coordinate_family(ell)
        res = disjointify(inst)
        if not (nep_check(inst) and nep_check(res)):
            out.append(f'disjointify breaks the property at {ell}')
    return out


# -- criterion 12

RANK_GRAPHS = {
    'K1': build_graph(1),
    '2K2': matching(2),
    'P4': path(4),
    'co_matching(2)': co_matching(2),
    'co_matching(3)': co_matching(3),
    'co_matching(4)': co_matching(4),
}


def rank_table(mode: str = 'subflip', radii=(3, INF), budgets=(1, 2)) -> dict[tuple[str, int | float, int], int | float]:
    return {(name, r, k): rank(G, RankQuery(r, k, mode))
            for name, G in RANK_GRAPHS.items() for r in radii for k in budgets}


def rank_violations(oracle: Callable[[Graph, int | float, int], int | float], mode: str = 'subflip') -> Violations:
    out = []
    for (name, r, k), value in rank_table(mode).items():
        expect = oracle(RANK_GRAPHS[name], r, k)
        if value != expect:
            out.append(f'{name} r={r} k={k}: {value} != {expect}')
    return out


KNOWN_RANKS = {('K1', 3, 1): 0, ('K1', INF, 2): 0, ('2K2', 3, 2): 1, ('P4', INF, 2): 2}


def _known_rank(G: Graph, r, k):
    name = next(n for n, H in RANK_GRAPHS.items() if H == G)
    return KNOWN_RANKS.get((name, r, k), rank(G, RankQuery(r, k, 'subflip')))


# -- the battery

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _summ(v: Violations, what: str) -> tuple[bool, str]:
    return (not v, f'{what}' if not v else f'{len(v)} violations; first: {v[0]}')


def _check_identities(n):
    graphs = loop_cycled(atlas_upto(n))
    return _summ([x for G in graphs for x in identity_violations(G)], f'{len(graphs)} graphs')


def _check_cmi(n):
    cache: dict = {}

    def cmi(H):
        key = H.edges
        if key not in cache:
            cache[key] = pattern_order(H, PatternKind.CO_MATCHING)
        return cache[key]
    graphs = atlas_upto(n)
    return _summ([x for G in graphs for x in preserve_cmi_violations(G, cmi)], f'{len(graphs)} graphs')


def _check_transfer(trials, seed):
    rng = random.Random(seed)
    v = []
    for _ in range(trials):
        v += transfer_check(*random_transfer_instance(rng, 5), seed=seed)
    return _summ(v, f'{trials} instances')


def _check_sparsify(n):
    count, v = 0, []
    for G in atlas_upto(n, connected=True, reflexive=True):
        for k in (1, 2):
            ok, vs = sparsify_violations(G, k)
            count += ok
            v += vs
    return _summ(v, f'{count} decomposable instances')


def _check_pure(n):
    count, v = 0, []
    for G in atlas_upto(n, reflexive=True):
        c, vs = pure_flip_violations(G)
        count += c
        v += vs
    return _summ(v, f'{count} pure flips')


def battery(scale: str = 'quick', seed: int = 0) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    full = scale == 'full'
    n_small = 5 if full else 4
    colored = colored_graphs(4 if full else 3)
    return [
        ('example 2K_2', lambda: _summ(example_violations(), 'printed example')),
        ('identity lemmas', lambda: _check_identities(n_small)),
        ('preserve co-matching index', lambda: _check_cmi(6 if full else 5)),
        ('transfer guarantee', lambda: _check_transfer(200 if full else 25, seed)),
        ('matching diameter', lambda: _summ([x for G in atlas_upto(7 if full else 6) for x in matching_diam_violations(G)],
                                            'atlas graphs')),
        ('depth sandwich', lambda: _summ([x for G in atlas_upto(n_small) for x in sandwich_violations(G)], 'atlas graphs')),
        ('sparsification', lambda: _check_sparsify(6 if full else 5)),
        ('pure flip transduction', lambda: _check_pure(n_small)),
        ('normal form', lambda: _summ(normal_form_violations(colored), f'{len(colored)} colored graphs')),
        ('positive MSO collapse', lambda: _summ(mso_violations(colored), f'{len(colored)} colored graphs')),
        ('non-equality property', lambda: _summ(nep_violations(6 if full else 4), 'witness families')),
        ('rank values', lambda: _summ(rank_violations(_known_rank), 'rank table')),
    ]


def run_suite(scale: str = 'quick', seed: int = 0) -> list[CheckResult]:
    out = []
    for name, fn in battery(scale, seed):
        start = time.perf_counter()
        passed, detail = fn()
        out.append(CheckResult(name, passed, detail, time.perf_counter() - start))
    return out


def format_results(results: Sequence[CheckResult], timings: bool = False) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        line = f'{"PASS" if r.passed else "FAIL"}  {r.name:<{width}}  {r.detail}'
        if timings:
            line += f'  ({r.seconds:.1f}s)'
        lines.append(line)
    return '\n'.join(lines) + '\n'
