'''Partially reflexive labeled graphs and their basic metrics.

Vertices are integer ids below ``n``.  Adjacency is stored as one bitmask per
vertex, which keeps the exhaustive solvers elsewhere in the package fast.
Self-loops live in a separate bitmask and never count as edges.
'''

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator


class PreconditionError(ValueError):
    '''Raised when an operation is called outside of its contract.'''


class InstanceTooLarge(ValueError):
    '''Raised when an exhaustive search would exceed the desk-scale caps.'''


INF = math.inf


def bits(mask: int) -> Iterator[int]:
    '''Yield the positions of the set bits of mask in increasing order.'''
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def as_mask(vs: int | Iterable[int]) -> int:
    return vs if isinstance(vs, int) else to_mask(vs)


def mask_set(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


@dataclass(frozen=True)
class Graph:
    '''A graph on a subset of the ids ``0..n-1``.

    ``adj[v]`` is the neighbourhood bitmask of ``v`` (never containing ``v``),
    ``loops`` the bitmask of looped vertices and ``vertices`` the bitmask of
    vertices actually present.  Induced subgraphs keep the original ids, so
    their ``vertices`` mask is a proper subset of the host range.
    '''
    n: int
    adj: tuple[int, ...]
    loops: int = 0
    vertices: int = field(default=-1)

    def __post_init__(self) -> None:
        if self.vertices == -1:
            object.__setattr__(self, 'vertices', (1 << self.n) - 1)

    # -- views

    @property
    def order(self) -> int:
        return self.vertices.bit_count()

    @property
    def vertex_list(self) -> list[int]:
        return list(bits(self.vertices))

    @property
    def vertex_set(self) -> frozenset[int]:
        return mask_set(self.vertices)

    @property
    def loop_set(self) -> frozenset[int]:
        return mask_set(self.loops)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edge_list())

    def edge_list(self) -> list[tuple[int, int]]:
        '''Edges as sorted (u, v) pairs with u < v.'''
        out = []
        for u in bits(self.vertices):
            for v in bits(self.adj[u] >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    @property
    def edge_count(self) -> int:
        return sum(self.adj[v].bit_count() for v in bits(self.vertices)) // 2

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return bool(self.loops >> u & 1)
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> frozenset[int]:
        return mask_set(self.adj[v])

    def is_reflexive(self) -> bool:
        return self.loops == self.vertices

    def is_irreflexive(self) -> bool:
        return self.loops == 0

    def is_full(self) -> bool:
        return self.vertices == (1 << self.n) - 1

    # -- derived graphs

    def induced(self, vs: int | Iterable[int]) -> Graph:
        s = as_mask(vs) & self.vertices
        adj = tuple(self.adj[v] & s if s >> v & 1 else 0 for v in range(self.n))
        return Graph(self.n, adj, self.loops & s, s)

    def with_loops(self, loops: int | Iterable[int]) -> Graph:
        return Graph(self.n, self.adj, as_mask(loops) & self.vertices, self.vertices)

    def reflexive(self) -> Graph:
        return Graph(self.n, self.adj, self.vertices, self.vertices)

    def union(self, other: Graph) -> Graph:
        if other.n != self.n:
            raise PreconditionError('graphs live on different id ranges')
        adj = tuple(a | b for a, b in zip(self.adj, other.adj))
        return Graph(self.n, adj, self.loops | other.loops, self.vertices | other.vertices)

    def is_subgraph_of(self, other: Graph) -> bool:
        if self.vertices & ~other.vertices or self.loops & ~other.loops:
            return False
        return all(self.adj[v] & ~other.adj[v] == 0 for v in bits(self.vertices))

    def relabeled(self) -> tuple[Graph, list[int]]:
        '''Dense copy on ids 0..order-1, plus the list mapping new id to old id.'''
        old = self.vertex_list
        index = {v: i for i, v in enumerate(old)}
        edges = [(index[u], index[v]) for u, v in self.edge_list()]
        loops = [index[v] for v in bits(self.loops)]
        return build_graph(len(old), edges, loops), old

    def __repr__(self) -> str:
        vs = '' if self.is_full() else f', vertices={sorted(self.vertex_set)}'
        return f'Graph(n={self.n}, edges={self.edge_list()}, loops={sorted(self.loop_set)}{vs})'


def build_graph(n: int, edge_list: Iterable[tuple[int, int]] = (), loops: Iterable[int] | str = ()) -> Graph:
    '''Build a graph on vertices 0..n-1.  ``loops`` may also be ``"all"``.'''
    if n < 0:
        raise PreconditionError('negative vertex count')
    adj = [0] * n
    for u, v in edge_list:
        if not (0 <= u < n and 0 <= v < n):
            raise PreconditionError(f'edge ({u},{v}) out of range for n={n}')
        if u == v:
            raise PreconditionError(f'self-pair ({u},{v}) in edge list; use loops')
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    if loops == 'all':
        loop_mask = (1 << n) - 1
    else:
        loop_mask = 0
        for v in loops:
            if not 0 <= v < n:
                raise PreconditionError(f'loop {v} out of range for n={n}')
            loop_mask |= 1 << v
    return Graph(n, tuple(adj), loop_mask)


def complement(G: Graph) -> Graph:
    '''Complement of the edge relation among present vertices; loops kept.'''
    adj = tuple((G.vertices & ~G.adj[v] & ~(1 << v)) if G.vertices >> v & 1 else 0
                for v in range(G.n))
    return Graph(G.n, adj, G.loops, G.vertices)


# -- distances

def bfs_levels(G: Graph, v: int) -> list[int]:
    '''Distance layers from v as bitmasks; layer i holds vertices at distance i.'''
    seen = 1 << v
    frontier = seen
    levels = [frontier]
    adj = G.adj
    while True:
        nxt = 0
        for u in bits(frontier):
            nxt |= adj[u]
        nxt &= ~seen
        if not nxt:
            return levels
        seen |= nxt
        levels.append(nxt)
        frontier = nxt


def distances_from(G: Graph, v: int) -> dict[int, int]:
    return {u: d for d, layer in enumerate(bfs_levels(G, v)) for u in bits(layer)}


def distance(G: Graph, u: int, v: int) -> int | float:
    '''Shortest-path distance ignoring loops; ``math.inf`` across components.'''
    for vs in (u, v):
        if not G.vertices >> vs & 1:
            raise PreconditionError(f'vertex {vs} not in graph')
    for d, layer in enumerate(bfs_levels(G, u)):
        if layer >> v & 1:
            return d
    return INF


def distance_matrix(G: Graph) -> dict[tuple[int, int], int | float]:
    out: dict[tuple[int, int], int | float] = {}
    for u in bits(G.vertices):
        found = distances_from(G, u)
        for v in bits(G.vertices):
            out[u, v] = found.get(v, INF)
    return out


def ball_mask(G: Graph, r: int | float, v: int) -> int:
    levels = bfs_levels(G, v)
    stop = len(levels) if r == INF else min(len(levels), int(r) + 1)
    mask = 0
    for layer in levels[:stop]:
        mask |= layer
    return mask


def ball(G: Graph, r: int | float, v: int) -> tuple[frozenset[int], Graph]:
    '''Closed r-neighbourhood of v and the subgraph it induces.'''
    if r < 0:
        raise PreconditionError('negative radius')
    if not G.vertices >> v & 1:
        raise PreconditionError(f'vertex {v} not in graph')
    mask = ball_mask(G, r, v)
    return mask_set(mask), G.induced(mask)


def component_masks(G: Graph) -> list[int]:
    '''Connected components as bitmasks, ordered by smallest vertex.'''
    rest = G.vertices
    out = []
    adj = G.adj
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for u in bits(frontier):
                nxt |= adj[u]
            frontier = nxt & ~comp
            comp |= frontier
        out.append(comp)
        rest &= ~comp
    return out


def components(G: Graph) -> list[frozenset[int]]:
    return [mask_set(c) for c in component_masks(G)]


def is_connected(G: Graph) -> bool:
    return len(component_masks(G)) <= 1


def eccentricity(G: Graph, v: int) -> int:
    return len(bfs_levels(G, v)) - 1


def diameter_of_mask(G: Graph, comp: int) -> int:
    return max(eccentricity(G, v) for v in bits(comp))


def components_and_diameters(G: Graph) -> list[tuple[frozenset[int], int]]:
    return [(mask_set(c), diameter_of_mask(G, c)) for c in component_masks(G)]


def bipartite_complement_between(G: Graph, A: Iterable[int] | int, B: Iterable[int] | int) -> Graph:
    '''Graph on A ∪ B whose edges are the non-adjacent pairs (a, b).

    A and B must be disjoint; loops are dropped.
    '''
    a, b = as_mask(A), as_mask(B)
    if a & b:
        raise PreconditionError('sides must be disjoint')
    adj = [0] * G.n
    for u in bits(a):
        miss = b & ~G.adj[u]
        adj[u] |= miss
        for w in bits(miss):
            adj[w] |= 1 << u
    return Graph(G.n, tuple(adj), 0, a | b)


# -- tree-depth

def tree_depth(G: Graph) -> int:
    '''Tree-depth with the convention that K_1 has depth 0.

    Evaluates td(G) = 1 + min over v of the max tree-depth of the components
    of G - v, memoized on vertex subsets.
    '''
    if G.order == 0:
        raise PreconditionError('tree-depth of the empty graph is undefined')
    adj = G.adj

    def comps(mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            comp = frontier = low
            while frontier:
                nxt = 0
                for u in bits(frontier):
                    nxt |= adj[u]
                frontier = nxt & mask & ~comp
                comp |= frontier
            out.append(comp)
            mask &= ~comp
        return out

    @lru_cache(maxsize=None)
    def td(mask: int) -> int:
        size = mask.bit_count()
        if size == 1:
            return 0
        best = size - 1
        for v in bits(mask):
            worst = 0
            for c in comps(mask & ~(1 << v)):
                worst = max(worst, td(c))
                if 1 + worst >= best:
                    break
            best = min(best, 1 + worst)
            if best == 1:
                break
        return best

    return td(G.vertices)


# -- text format

def _strip(line: str) -> str:
    return line.split('#', 1)[0].strip()


def _content_lines(text: str) -> list[tuple[int, str]]:
    return [(i + 1, s) for i, raw in enumerate(text.splitlines()) if (s := _strip(raw))]


def format_graph(G: Graph) -> str:
    if not G.is_full():
        raise PreconditionError('text format needs dense vertex ids; relabel first')
    if G.n and G.is_reflexive():
        loops = 'all'
    elif G.loops == 0:
        loops = 'none'
    else:
        loops = ' '.join(map(str, bits(G.loops)))
    lines = [f'graph {G.n}', f'loops {loops}', 'edges']
    lines += [f'{u} {v}' for u, v in G.edge_list()]
    return '\n'.join(lines) + '\n'


def _parse_graph_lines(lines: list[tuple[int, str]]) -> tuple[Graph, list[tuple[int, str]]]:
    if len(lines) < 3:
        raise ValueError('graph text needs header, loops and edges lines')
    (ln, head), (ll, loop_line), (le, edges_kw) = lines[:3]
    parts = head.split()
    if len(parts) != 2 or parts[0] != 'graph' or not parts[1].isdigit():
        raise ValueError(f'line {ln}: expected "graph <n>"')
    n = int(parts[1])
    lp = loop_line.split()
    if not lp or lp[0] != 'loops':
        raise ValueError(f'line {ll}: expected "loops all|none|<ids>"')
    if lp[1:] == ['all']:
        loops: Iterable[int] | str = 'all'
    elif lp[1:] == ['none']:
        loops = ()
    else:
        try:
            loops = [int(x) for x in lp[1:]]
        except ValueError:
            raise ValueError(f'line {ll}: bad loop ids') from None
    if edges_kw != 'edges':
        raise ValueError(f'line {le}: expected "edges"')
    edges = []
    extra = []
    for num, s in lines[3:]:
        if s.startswith('color'):
            extra.append((num, s))
            continue
        pair = s.split()
        if len(pair) != 2 or not all(p.isdigit() for p in pair):
            raise ValueError(f'line {num}: expected "u v"')
        edges.append((int(pair[0]), int(pair[1])))
    try:
        G = build_graph(n, edges, loops)
    except PreconditionError as exc:
        raise ValueError(str(exc)) from None
    return G, extra


def parse_graph(text: str) -> Graph:
    G, extra = _parse_graph_lines(_content_lines(text))
    if extra:
        raise ValueError(f'line {extra[0][0]}: color line in a plain graph file')
    return G


# -- colored graphs

@dataclass(frozen=True)
class ColoredGraph:
    '''A graph together with named vertex colors (bitmasks).'''
    graph: Graph
    colors: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def of(graph: Graph, colors: dict[str, Iterable[int] | int] | None = None) -> ColoredGraph:
        items = []
        for name, vs in sorted((colors or {}).items()):
            mask = as_mask(vs)
            if mask & ~graph.vertices:
                raise PreconditionError(f'color {name} leaves the vertex set')
            items.append((name, mask))
        return ColoredGraph(graph, tuple(items))

    @property
    def color_map(self) -> dict[str, int]:
        return dict(self.colors)

    def color(self, name: str) -> frozenset[int]:
        return mask_set(self.color_map.get(name, 0))

    def with_colors(self, extra: dict[str, int]) -> ColoredGraph:
        merged = self.color_map
        for name, mask in extra.items():
            merged[name] = merged.get(name, 0) | mask
        return ColoredGraph.of(self.graph, merged)


def format_colored(cg: ColoredGraph) -> str:
    out = format_graph(cg.graph)
    for name, mask in cg.colors:
        out += f'color {name}: ' + ' '.join(map(str, bits(mask))) + '\n'
    return out


def parse_colored(text: str) -> ColoredGraph:
    G, extra = _parse_graph_lines(_content_lines(text))
    colors: dict[str, int] = {}
    for num, s in extra:
        head, sep, rest = s.partition(':')
        words = head.split()
        if not sep or len(words) != 2 or words[0] != 'color':
            raise ValueError(f'line {num}: expected "color <name>: <ids>"')
        try:
            ids = [int(x) for x in rest.split()]
        except ValueError:
            raise ValueError(f'line {num}: bad color ids') from None
        if any(not 0 <= v < G.n for v in ids):
            raise ValueError(f'line {num}: color id out of range')
        colors[words[1]] = colors.get(words[1], 0) | to_mask(ids)
    return ColoredGraph.of(G, colors)
