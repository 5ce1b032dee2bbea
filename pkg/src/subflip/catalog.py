'''Enumerations of small graphs used by the verification suites.'''

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator

from .graph import ColoredGraph, Graph, build_graph, is_connected


def labeled_graphs(n: int, loops: int | str = 0) -> Iterator[Graph]:
    '''All 2^(n choose 2) labeled edge sets on n vertices with a fixed loop set.'''
    pairs = list(combinations(range(n), 2))
    loop_ids = range(n) if loops == 'all' else [v for v in range(n) if int(loops) >> v & 1]
    for code in range(1 << len(pairs)):
        yield build_graph(n, [p for i, p in enumerate(pairs) if code >> i & 1], loop_ids)


def labeled_partially_reflexive(n: int) -> Iterator[Graph]:
    '''Every labeled graph on n vertices with every possible loop set.'''
    for loops in range(1 << n):
        yield from labeled_graphs(n, loops)


@lru_cache(maxsize=None)
def _atlas() -> tuple[Graph, ...]:
    import networkx as nx

    out = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n == 0:
            continue
        out.append(build_graph(n, [tuple(sorted(e)) for e in g.edges()]))
    return tuple(out)


def atlas_graphs(n: int) -> list[Graph]:
    '''One representative per isomorphism class of loopless graphs on n ≤ 7 vertices.'''
    if not 1 <= n <= 7:
        raise ValueError('the graph atlas covers 1 to 7 vertices')
    return [G for G in _atlas() if G.n == n]


def atlas_upto(n_max: int, connected: bool = False, reflexive: bool = False) -> list[Graph]:
    out = []
    for n in range(1, n_max + 1):
        for G in atlas_graphs(n):
            if connected and not is_connected(G):
                continue
            out.append(G.reflexive() if reflexive else G)
    return out


def _canonical(n: int, pairs: list[tuple[int, int]], edges: int, loops: int, colors: tuple[int, ...]) -> tuple:
    best = None
    for perm in permutations(range(n)):
        e = frozenset(tuple(sorted((perm[u], perm[v]))) for i, (u, v) in enumerate(pairs) if edges >> i & 1)
        key = (tuple(sorted(e)),
               sum(1 << perm[v] for v in range(n) if loops >> v & 1),
               tuple(sum(1 << perm[v] for v in range(n) if c >> v & 1) for c in colors))
        if best is None or key < best:
            best = key
    return best


def colored_graphs(n_max: int, palette: tuple[str, ...] = ('C',), up_to_iso: bool = True) -> list[ColoredGraph]:
    '''Every partially reflexive graph on 1..n_max vertices with every coloring from ``palette``.

    With ``up_to_iso`` one representative per isomorphism class is kept (the
    first in enumeration order), which is enough for isomorphism-invariant checks.
    '''
    out = []
    for n in range(1, n_max + 1):
        pairs = list(combinations(range(n), 2))
        seen = set()
        for edges in range(1 << len(pairs)):
            for loops in range(1 << n):
                for colors in product(range(1 << n), repeat=len(palette)):
                    if up_to_iso:
                        key = _canonical(n, pairs, edges, loops, colors)
                        if key in seen:
                            continue
                        seen.add(key)
                    G = build_graph(n, [p for i, p in enumerate(pairs) if edges >> i & 1],
                                    [v for v in range(n) if loops >> v & 1])
                    out.append(ColoredGraph.of(G, dict(zip(palette, colors))))
    return out
