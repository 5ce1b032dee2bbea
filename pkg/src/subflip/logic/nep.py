'''The monadic non-equality property: checking, witness families, disjointification.'''

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

from ..graph import ColoredGraph, Graph, PreconditionError
from ..patterns import clique, co_matching, half_graph
from .evaluate import TableEvaluator
from .parser import parse_formula
from .syntax import (
    Color, Exists, Formula, colors_used, conj, free_vars, rename_free, all_var_names, fresh_names,
)


@dataclass(frozen=True)
class NEPInstance:
    formula: Formula
    xs: tuple[str, ...]
    ys: tuple[str, ...]
    colored: ColoredGraph
    tuples: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.ys):
            raise PreconditionError('x and y tuples differ in length')
        t = len(self.xs)
        for a in self.tuples:
            if len(a) != t:
                raise PreconditionError(f'tuple {a} does not have length {t}')
        extra = set(free_vars(self.formula)) - set(self.xs) - set(self.ys)
        if extra:
            raise PreconditionError(f'free variables {sorted(extra)} are not in the tuple pair')

    @property
    def t(self) -> int:
        return len(self.xs)


def nep_matrix(inst: NEPInstance) -> list[list[bool]]:
    ev = TableEvaluator(inst.colored)
    order = inst.xs + inst.ys
    table = ev.table(inst.formula, order)
    idx = ev.index
    return [[bool(table[tuple(idx[v] for v in a + b)]) for b in inst.tuples] for a in inst.tuples]


def nep_check(inst: NEPInstance) -> bool:
    '''phi(a_i, a_j) holds exactly when i != j, for all i, j (diagonal included).'''
    m = nep_matrix(inst)
    return all(m[i][j] == (i != j) for i in range(len(m)) for j in range(len(m)))


# -- witness families

def co_matching_family(ell: int) -> NEPInstance:
    '''phi(x1x2, y1y2) = E(x1,y2) on the co-matching with tuples (a_i, b_i).'''
    G = co_matching(ell)
    tuples = tuple((i, ell + i) for i in range(ell))
    return NEPInstance(parse_formula('E(x1,y2)'), ('x1', 'x2'), ('y1', 'y2'), ColoredGraph(G), tuples)


def clique_family(ell: int) -> NEPInstance:
    '''E(x,y) on the irreflexive clique with singleton tuples.'''
    G = clique(ell)
    return NEPInstance(parse_formula('E(x,y)'), ('x',), ('y',), ColoredGraph(G), tuple((v,) for v in range(ell)))


HALF_GRAPH_FORMULA = 'E(x1,y2) | E(y1,x2)'


def half_graph_search(ell: int, max_offset: int = 2) -> tuple[int, int, NEPInstance] | None:
    '''Find offsets (p, q) such that tuples (a_{i+p}, b_{i+q}) witness the property.

    The half-graph has a_i ~ b_j iff i <= j; it is built with enough vertices
    for the largest offset.  Offsets are tried in lexicographic order.
    '''
    phi = parse_formula(HALF_GRAPH_FORMULA)
    order = ell + max_offset
    G = half_graph(order)
    cg = ColoredGraph(G)
    for p, q in product(range(max_offset + 1), repeat=2):
        tuples = tuple((i + p, order + i + q) for i in range(ell))
        inst = NEPInstance(phi, ('x1', 'x2'), ('y1', 'y2'), cg, tuples)
        if nep_check(inst):
            return p, q, inst
    return None


def half_graph_family(ell: int) -> NEPInstance:
    found = half_graph_search(ell)
    if found is None:
        raise PreconditionError(f'no offset assignment found for ell = {ell}')
    return found[2]


# -- sunflowers of tuples

def _sunflower_core(chosen: Sequence[tuple[int, ...]]) -> tuple[int, ...] | None:
    '''1-based coordinates I where all chosen tuples agree, if J is pairwise disjoint.'''
    t = len(chosen[0])
    I = tuple(k for k in range(t) if len({a[k] for a in chosen}) == 1)
    J = [k for k in range(t) if k not in I]
    if len(chosen) > 1:
        for a, b in combinations(chosen, 2):
            if {a[k] for k in J} & {b[k] for k in J}:
                return None
    return tuple(k + 1 for k in I)


def _greedy(tuples: Sequence[tuple[int, ...]], m: int) -> tuple[list[int], tuple[int, ...]] | None:
    # seed with each tuple and add compatible tuples in order
    for s in range(len(tuples)):
        picked = [s]
        for i in range(len(tuples)):
            if i == s:
                continue
            trial = [tuples[j] for j in picked] + [tuples[i]]
            core = _sunflower_core(trial)
            if core is not None and (len(picked) < 2 or core == _sunflower_core([tuples[j] for j in picked])):
                picked.append(i)
            if len(picked) == m:
                return sorted(picked), _sunflower_core([tuples[j] for j in sorted(picked)])
    return None


def sunflower_tuples(tuples: Sequence[Sequence[int]], m: int) -> tuple[list[tuple[int, ...]], frozenset[int]] | None:
    '''m tuples equal on a coordinate set I and pairwise disjoint outside it.

    Coordinates are 1-based.  A greedy pass runs first; then every m-subset is
    tried in lexicographic order.
    '''
    if m < 1:
        raise PreconditionError('m must be at least 1')
    tuples = [tuple(a) for a in tuples]
    if len(tuples) < m:
        return None
    if m == 1:
        return [tuples[0]], frozenset(range(1, len(tuples[0]) + 1))
    if len({len(a) for a in tuples}) > 1:
        raise PreconditionError('tuples have different lengths')
    hit = _greedy(tuples, m)
    if hit is not None:
        idx, core = hit
        return [tuples[i] for i in idx], frozenset(core)
    for combo in combinations(range(len(tuples)), m):
        chosen = [tuples[i] for i in combo]
        core = _sunflower_core(chosen)
        if core is not None:
            return chosen, frozenset(core)
    return None


def disjointify(inst: NEPInstance, m: int | None = None) -> NEPInstance:
    '''Shorter, pairwise disjoint tuples with the shared coordinates fixed by colors.

    The shared coordinates I (1-based) are marked by fresh colors X<i>, each
    holding the common vertex, and the formula becomes
    exists z_i (X_i(z_i) & ...) phi(x'z, y'z).
    '''
    if not nep_check(inst):
        raise PreconditionError('the instance does not have the non-equality property')
    m = len(inst.tuples) if m is None else m
    found = sunflower_tuples(inst.tuples, m)
    if found is None or m < 2:
        raise PreconditionError('no sunflower of size at least 2 among the tuples')
    chosen, core = found
    I = sorted(core)
    if len(I) == inst.t:
        raise PreconditionError('all chosen tuples are equal')
    if not I:
        return NEPInstance(inst.formula, inst.xs, inst.ys, inst.colored, tuple(chosen))
    J = [k for k in range(1, inst.t + 1) if k not in core]
    taken = all_var_names(inst.formula) | set(inst.xs) | set(inst.ys)
    zs = dict(zip(I, fresh_names(taken, 'z')))
    mapping = {}
    for k, z in zs.items():
        mapping[inst.xs[k - 1]] = z
        mapping[inst.ys[k - 1]] = z
    body = rename_free(inst.formula, mapping)
    used = set(colors_used(inst.formula)) | set(inst.colored.color_map)
    names = {}
    for k in I:
        name = f'X{k}'
        while name in used:
            name += '_'
        names[k] = name
        used.add(name)
    for k in reversed(I):
        body = Exists(zs[k], conj(Color(names[k], zs[k]), body))
    colors = {names[k]: 1 << chosen[0][k - 1] for k in I}
    colored = inst.colored.with_colors(colors)
    xs = tuple(inst.xs[k - 1] for k in J)
    ys = tuple(inst.ys[k - 1] for k in J)
    tuples = tuple(tuple(a[k - 1] for k in J) for a in chosen)
    return NEPInstance(body, xs, ys, colored, tuples)


def disjoint_tuples(tuples: Sequence[Sequence[int]]) -> bool:
    return all(not set(a) & set(b) for a, b in combinations(tuples, 2))


def shared_coordinate_family(ell: int) -> NEPInstance:
    '''Toy instance: co-matching tuples (a_i, b_i) extended by one shared vertex c.

    The graph is the co-matching of order ell plus an isolated vertex c, the
    tuples are (a_i, b_i, c) and the formula E(x1,y2) & x3 = y3 ignores the
    shared coordinate except for checking that it agrees.
    '''
    G = co_matching(ell)
    c = 2 * ell
    H = Graph(c + 1, G.adj + (0,), 0, (1 << (c + 1)) - 1)
    tuples = tuple((i, ell + i, c) for i in range(ell))
    phi = parse_formula('E(x1,y2) & x3 = y3')
    return NEPInstance(phi, ('x1', 'x2', 'x3'), ('y1', 'y2', 'y3'), ColoredGraph(H), tuples)
