'''Semi-induced patterns and the standard pattern generators.'''

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .graph import Graph, PreconditionError, bits, build_graph


class PatternKind(str, Enum):
    CO_MATCHING = 'co-matching'
    HALF_GRAPH = 'half-graph'
    BICLIQUE = 'biclique'
    INDUCED_MATCHING = 'induced-matching'
    SEMI_INDUCED_MATCHING = 'semi-induced-matching'
    IRREFLEXIVE_CLIQUE = 'irreflexive-clique'


Witness = tuple[tuple[int, ...], tuple[int, ...]]


def _pair_ok(G: Graph, kind: PatternKind, A: list[int], B: list[int], a: int, b: int) -> bool:
    '''Can (a, b) be appended as the next index of the pattern?'''
    adj = G.adj
    if kind is PatternKind.CO_MATCHING:
        if adj[a] >> b & 1:
            return False
        return all(adj[a] >> y & 1 and adj[b] >> x & 1 for x, y in zip(A, B))
    if kind is PatternKind.HALF_GRAPH:
        # a_i b_j adjacent iff i <= j; the new pair takes the largest index
        if not adj[a] >> b & 1:
            return False
        return all(adj[b] >> x & 1 and not adj[a] >> y & 1 for x, y in zip(A, B))
    if kind is PatternKind.BICLIQUE:
        if not adj[a] >> b & 1:
            return False
        return all(adj[a] >> y & 1 and adj[b] >> x & 1 for x, y in zip(A, B))
    # matchings
    if not adj[a] >> b & 1:
        return False
    for x, y in zip(A, B):
        if adj[a] >> y & 1 or adj[b] >> x & 1:
            return False
        if kind is PatternKind.INDUCED_MATCHING and (adj[a] >> x & 1 or adj[b] >> y & 1):
            return False
    return True


def _search(G: Graph, kind: PatternKind, target: int | None) -> tuple[int, Witness]:
    '''Depth-first search over pattern sequences.

    With ``target`` set, stops at the first witness of that order.  Otherwise
    returns the maximum order found together with a witness of that order.
    Symmetry is broken by requiring increasing a-vertices where the pattern
    allows it (all kinds except the half-graph, whose order is rigid).
    '''
    vs = G.vertex_list
    best: list = [0, ((), ())]
    if kind is PatternKind.IRREFLEXIVE_CLIQUE:
        pool = [v for v in vs if not G.loops >> v & 1]

        def grow(clique: list[int], cand: int) -> bool:
            if len(clique) > best[0]:
                best[0], best[1] = len(clique), (tuple(clique), ())
                if target is not None and best[0] >= target:
                    return True
            if target is None and len(clique) + cand.bit_count() <= best[0]:
                return False
            for v in bits(cand):
                if grow(clique + [v], cand & G.adj[v] & ~((1 << (v + 1)) - 1)):
                    return True
            return False

        grow([], sum(1 << v for v in pool))
        return best[0], best[1]

    pairs = [(a, b) for a in vs for b in vs if a != b]
    ordered = kind is not PatternKind.HALF_GRAPH

    def grow_pairs(A: list[int], B: list[int], used: int) -> bool:
        if len(A) > best[0]:
            best[0], best[1] = len(A), (tuple(A), tuple(B))
            if target is not None and best[0] >= target:
                return True
        remaining = (len(vs) - 2 * len(A)) // 2
        if target is None and len(A) + remaining <= best[0]:
            return False
        for a, b in pairs:
            if used >> a & 1 or used >> b & 1:
                continue
            if ordered and A and a <= A[-1]:
                continue
            if kind is PatternKind.BICLIQUE and (b <= B[-1] if B else b < a):
                continue
            if _pair_ok(G, kind, A, B, a, b):
                if grow_pairs(A + [a], B + [b], used | 1 << a | 1 << b):
                    return True
        return False

    grow_pairs([], [], 0)
    return best[0], best[1]


def pattern_order(G: Graph, kind: PatternKind | str) -> int:
    '''Largest order of a semi-induced occurrence of the pattern (0 if none).

    Sides are disjoint and loops are ignored, except that the vertices of an
    irreflexive clique must be loopless.
    '''
    return _search(G, PatternKind(kind), None)[0]


def find_pattern(G: Graph, kind: PatternKind | str, t: int) -> Witness | None:
    '''Ordered sides (a_1..a_t), (b_1..b_t) of an order-t occurrence, or None.'''
    if t <= 0:
        return ((), ())
    order, wit = _search(G, PatternKind(kind), t)
    return wit if order >= t else None


def co_matching_index(G: Graph) -> int:
    return pattern_order(G, PatternKind.CO_MATCHING)


# -- generators

def _flagged(n: int, edges: list[tuple[int, int]], reflexive: bool) -> Graph:
    return build_graph(n, edges, 'all' if reflexive else ())


def clique(n: int, reflexive: bool = False) -> Graph:
    return _flagged(n, [(u, v) for u in range(n) for v in range(u + 1, n)], reflexive)


def independent(n: int, reflexive: bool = False) -> Graph:
    return _flagged(n, [], reflexive)


def path(n: int, reflexive: bool = False) -> Graph:
    return _flagged(n, [(i, i + 1) for i in range(n - 1)], reflexive)


def cycle(n: int, reflexive: bool = False) -> Graph:
    if n < 3:
        raise PreconditionError('a cycle needs at least 3 vertices')
    return _flagged(n, [(i, (i + 1) % n) for i in range(n)], reflexive)


def matching(m: int, reflexive: bool = False) -> Graph:
    '''m disjoint edges (2i, 2i+1).'''
    return _flagged(2 * m, [(2 * i, 2 * i + 1) for i in range(m)], reflexive)


def _bipartite(t: int, rule, reflexive: bool) -> Graph:
    # a_i has id i-1 and b_j has id t+j-1
    edges = [(i, t + j) for i in range(t) for j in range(t) if rule(i, j)]
    return _flagged(2 * t, edges, reflexive)


def co_matching(t: int, reflexive: bool = False) -> Graph:
    return _bipartite(t, lambda i, j: i != j, reflexive)


def half_graph(t: int, reflexive: bool = False) -> Graph:
    return _bipartite(t, lambda i, j: i <= j, reflexive)


def biclique(t: int, reflexive: bool = False) -> Graph:
    return _bipartite(t, lambda i, j: True, reflexive)


def star(leaves: int, reflexive: bool = False) -> Graph:
    return _flagged(leaves + 1, [(0, i) for i in range(1, leaves + 1)], reflexive)


@dataclass(frozen=True)
class CrossingLayers:
    graph: Graph
    layers: tuple[frozenset[int], ...]
    t: int
    r: int

    def root_a(self, i: int) -> int:
        return i

    def root_b(self, j: int) -> int:
        return self.t + self.r * self.t * self.t + j

    def path_vertex(self, i: int, j: int, level: int) -> int:
        '''The level-th vertex (1-based) of the path from a_i to b_j.'''
        return self.t + (level - 1) * self.t * self.t + i * self.t + j


def _crossing(r: int, t: int, cliques: bool, reflexive: bool) -> CrossingLayers:
    if r < 1 or t < 1:
        raise PreconditionError('crossings need r >= 1 and t >= 1')
    n = 2 * t + r * t * t

    def pv(i: int, j: int, level: int) -> int:
        return t + (level - 1) * t * t + i * t + j

    def b(j: int) -> int:
        return t + r * t * t + j

    edges = set()
    for i in range(t):
        for j in range(t):
            edges.add((i, pv(i, j, 1)))
            for level in range(1, r):
                edges.add((pv(i, j, level), pv(i, j, level + 1)))
            edges.add((pv(i, j, r), b(j)))
    if cliques:
        for i in range(t):
            around = [pv(i, j, 1) for j in range(t)]
            edges.update((u, v) for u in around for v in around if u < v)
        for j in range(t):
            around = [pv(i, j, r) for i in range(t)]
            edges.update((u, v) for u in around for v in around if u < v)
    G = _flagged(n, sorted(tuple(sorted(e)) for e in edges), reflexive)
    layers = [frozenset(range(t))]
    for level in range(1, r + 1):
        layers.append(frozenset(range(pv(0, 0, level), pv(0, 0, level) + t * t)))
    layers.append(frozenset(range(b(0), b(0) + t)))
    return CrossingLayers(G, tuple(layers), t, r)


def star_crossing(r: int, t: int, reflexive: bool = False) -> CrossingLayers:
    '''The r-subdivided biclique K_{t,t} with roots a_i and b_j.'''
    return _crossing(r, t, False, reflexive)


def clique_crossing(r: int, t: int, reflexive: bool = False) -> CrossingLayers:
    '''Star crossing with each root neighbourhood turned into a clique.'''
    return _crossing(r, t, True, reflexive)


GENERATORS = {
    'clique': clique,
    'independent': independent,
    'path': path,
    'cycle': cycle,
    'matching': matching,
    'co-matching': co_matching,
    'half-graph': half_graph,
    'biclique': biclique,
    'star': star,
    'star-crossing': star_crossing,
    'clique-crossing': clique_crossing,
}


def generate(kind: str, *params: int, reflexive: bool = False) -> Graph | CrossingLayers:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise PreconditionError(f'unknown generator {kind!r}') from None
    return fn(*params, reflexive=reflexive)
