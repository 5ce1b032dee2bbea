'''Exact flipper/subflipper rank, flip-depth, subflip-depth and SC-depth.

Every solver works on induced subgraphs that keep the original vertex ids;
states are memoized on (vertex mask, adjacency tuple) inside one root call.
'''

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .flips import FlipSpec, flip, relations, subflip
from .graph import (
    INF, Graph, InstanceTooLarge, PreconditionError, ball_mask, bits, component_masks,
    distances_from,
)
from .partition import Partition, rgs_partitions

SUBFLIP_CAP = 8
FLIP_CAP = 5
SC_CAP = 7


def size_cap(default: int) -> int:
    env = os.environ.get('SUBFLIP_MAX_N')
    return int(env) if env else default


def _check_size(G: Graph, default: int) -> None:
    if G.order == 0:
        raise PreconditionError('empty graph')
    cap = size_cap(default)
    if G.order > cap:
        raise InstanceTooLarge(f'{G.order} vertices exceeds the cap of {cap} (set SUBFLIP_MAX_N)')


def parse_radius(text: str | int | float) -> int | float:
    if isinstance(text, (int, float)):
        return text
    if text.strip().lower() in ('inf', 'infinity', '∞'):
        return INF
    r = int(text)
    if r < 0:
        raise ValueError('radius must be nonnegative')
    return r


@dataclass(frozen=True)
class RankQuery:
    r: int | float
    k: int
    mode: str = 'subflip'

    def __post_init__(self) -> None:
        if self.k < 1:
            raise PreconditionError('budget must be at least 1')
        if self.mode not in ('flip', 'subflip'):
            raise PreconditionError(f'unknown mode {self.mode!r}')
        if self.r != INF and (self.r < 0 or int(self.r) != self.r):
            raise PreconditionError('radius must be a natural number or inf')


def _key(G: Graph) -> tuple:
    return (G.vertices, tuple(G.adj[v] for v in bits(G.vertices)))


def _pieces(H: Graph, r: int | float) -> list[Graph]:
    '''Distinct r-balls of H as induced subgraphs (components when r = inf).'''
    if r == INF:
        masks = component_masks(H)
    else:
        masks = sorted({ball_mask(H, r, v) for v in bits(H.vertices)})
    return [H.induced(m) for m in masks]


def _moves(G: Graph, k: int, mode: str) -> Iterator[tuple[Partition, FlipSpec | None, Graph]]:
    seen = set()
    for P in rgs_partitions(G.vertices, min(k, G.order)):
        if mode == 'subflip':
            H = subflip(G, P)
            specs = [(None, H)]
        else:
            specs = []
            for rel in relations(len(P)):
                spec = FlipSpec(P, rel)
                specs.append((spec, flip(G, spec)))
        for spec, H in specs:
            key = _key(H)
            if key in seen:
                continue
            seen.add(key)
            yield P, spec, H


class _SubflipSolver:
    '''sfrk by direct recursion.

    Each move produces a subgraph, so the children of a state are either
    smaller or equal to it; a move returning the state itself is useless and
    is scored as infinite.  This keeps the recursion well founded.
    '''

    def __init__(self, r: int | float, k: int):
        self.r = r
        self.k = k
        self.memo: dict[tuple, tuple[float, Partition | None]] = {}

    def solve(self, G: Graph) -> tuple[float, Partition | None]:
        key = _key(G)
        if key in self.memo:
            return self.memo[key]
        if G.order == 1:
            self.memo[key] = (0, None)
            return 0, None
        self.memo[key] = (INF, None)  # guards against revisiting along a cycle
        best: float = INF
        best_p = None
        for P, _, H in _moves(G, self.k, 'subflip'):
            worst: float = 0
            for C in _pieces(H, self.r):
                if _key(C) == key:
                    worst = INF
                    break
                worst = max(worst, self.solve(C)[0])
                if worst + 1 >= best:
                    break
            if worst + 1 < best:
                best, best_p = worst + 1, P
                if best == 1:
                    break
        self.memo[key] = (best, best_p)
        return best, best_p


class _FlipSolver:
    '''frk by depth-bounded search.

    ``within(G, d)`` decides frk(G) <= d.  Flips can return to earlier states,
    so the value is found by iterative deepening up to a proven bound.
    '''

    def __init__(self, r: int | float, k: int, complement_moves: bool = False):
        self.r = r
        self.k = k
        self.sc = complement_moves
        self.memo: dict[tuple, int] = {}   # key -> largest d known to fail
        self.ok: dict[tuple, int] = {}     # key -> smallest d known to succeed
        self.move_cache: dict[tuple, list[list[Graph]]] = {}

    def moves(self, G: Graph) -> list[list[Graph]]:
        key = _key(G)
        if key not in self.move_cache:
            out = []
            if self.sc:
                seen = set()
                for A in _subsets(G.vertices):
                    H = _complement_within(G, A)
                    hk = _key(H)
                    if hk in seen:
                        continue
                    seen.add(hk)
                    out.append(_pieces(H, INF))
            else:
                for _, _, H in _moves(G, self.k, 'flip'):
                    out.append(_pieces(H, self.r))
            # cheap moves first: fewer vertices in the largest piece
            out.sort(key=lambda ps: max(p.order for p in ps))
            self.move_cache[key] = out
        return self.move_cache[key]

    def within(self, G: Graph, d: int) -> bool:
        if G.order == 1:
            return True
        if d == 0:
            return False
        key = _key(G)
        if self.ok.get(key, math.inf) <= d:
            return True
        if self.memo.get(key, -1) >= d:
            return False
        for pieces in self.moves(G):
            if all(self.within(C, d - 1) for C in pieces):
                self.ok[key] = min(self.ok.get(key, math.inf), d)
                return True
        self.memo[key] = max(self.memo.get(key, -1), d)
        return False

    def first_move(self, G: Graph, d: int) -> list[Graph] | None:
        for pieces in self.moves(G):
            if all(self.within(C, d - 1) for C in pieces):
                return pieces
        return None


def _subsets(mask: int) -> Iterator[int]:
    # the empty set stands for every move that changes nothing
    yield 0
    vs = list(bits(mask))
    for size in range(2, len(vs) + 1):
        for combo in combinations(vs, size):
            yield sum(1 << v for v in combo)


def _complement_within(G: Graph, A: int) -> Graph:
    adj = list(G.adj)
    for v in bits(A):
        adj[v] ^= A & ~(1 << v)
    return Graph(G.n, tuple(adj), G.loops, G.vertices)


def _flip_cap(order: int, k: int) -> int:
    # With two parts one can isolate any vertex (flip its closed neighbourhood
    # against itself), so frk <= order - 1.  With one part there are at most
    # 2 * 2^order reachable states, which bounds every finite value.
    return order - 1 if k >= 2 else 2 ** (order + 1)


def rank(G: Graph, q: RankQuery) -> int | float:
    '''frk_{r,k}(G) or sfrk_{r,k}(G); ``math.inf`` when no finite value exists.'''
    if q.mode == 'subflip':
        _check_size(G, SUBFLIP_CAP)
        value = _SubflipSolver(q.r, q.k).solve(G)[0]
        return value if value == INF else int(value)
    _check_size(G, FLIP_CAP)
    solver = _FlipSolver(q.r, q.k)
    for d in range(_flip_cap(G.order, min(q.k, G.order)) + 1):
        if solver.within(G, d):
            return d
    return INF


def flip_depth(G: Graph, k: int) -> int | float:
    return rank(G, RankQuery(INF, k, 'flip'))


def subflip_depth(G: Graph, k: int) -> int | float:
    return rank(G, RankQuery(INF, k, 'subflip'))


def sc_depth(G: Graph) -> int:
    '''Depth of the game whose moves complement the edges inside one vertex subset.'''
    _check_size(G, SC_CAP)
    solver = _FlipSolver(INF, 0, complement_moves=True)
    # complementing a closed neighbourhood isolates its centre: depth <= n - 1
    for d in range(G.order):
        if solver.within(G, d):
            return d
    raise AssertionError('unreachable: SC-depth is at most n - 1')


def first_subflip_move(G: Graph, k: int, r: int | float = INF) -> Partition | None:
    '''The first partition in enumeration order attaining the subflip rank.'''
    return _SubflipSolver(r, k).solve(G)[1]


def bound_f(t: int, m: int, k: int, d: int, cap: int | None = None) -> int:
    '''f(t,m,k,0) = m and f(t,m,k,d+1) = f(t, m·k·t^(mk), m·k²·t^(mk), d).

    With ``cap`` the result is min(cap, f); since m never decreases along the
    unfolding this stops before the numbers explode.
    '''
    if min(t, m, k) < 1 or d < 0:
        raise PreconditionError('need t, m, k >= 1 and d >= 0')
    for _ in range(d):
        if cap is not None and m >= cap:
            return cap
        m, k = m * k * t ** (m * k), m * k * k * t ** (m * k)
    return m if cap is None else min(m, cap)


# -- flatness

@dataclass(frozen=True)
class FlatnessQuery:
    r: int | float
    k: int
    m: int
    ell: int = 1
    mode: str = 'subflip'

    def __post_init__(self) -> None:
        if self.m < 1 or self.ell < 1 or self.k < 1:
            raise PreconditionError('m, ell and k must be at least 1')


@dataclass(frozen=True)
class FlatnessWitness:
    selected: tuple[tuple[int, ...], ...]
    partition: Partition
    relation: frozenset | None = field(default=None)


def _tuple_distance(dist: dict[int, dict[int, int]], a: Sequence[int], b: Sequence[int]) -> float:
    return min(dist[u].get(v, INF) for u in a for v in b)


def _far(d: float, r: int | float) -> bool:
    # at r = inf "far" means lying in different components
    return d == INF if r == INF else d > r


def flat_witness(G: Graph, W: Sequence[Sequence[int]], q: FlatnessQuery) -> FlatnessWitness | None:
    '''Lexicographically least (A, flip) making the tuples of A pairwise r-far.

    A ranges over m-subsets of W in lexicographic index order; for each A the
    flips are tried in enumeration order.
    '''
    W = [tuple(w) for w in W]
    if any(len(w) != q.ell for w in W):
        raise PreconditionError(f'every tuple must have length {q.ell}')
    if q.ell > 1:
        for a, b in combinations(W, 2):
            if set(a) & set(b):
                raise PreconditionError('tuples must be pairwise disjoint')
    _check_size(G, SUBFLIP_CAP if q.mode == 'subflip' else FLIP_CAP + 1)
    candidates = []
    for P in rgs_partitions(G.vertices, min(q.k, G.order)):
        if q.mode == 'subflip':
            candidates.append((P, None, subflip(G, P)))
        else:
            for rel in relations(len(P)):
                candidates.append((P, rel, flip(G, FlipSpec(P, rel))))
    dists = [{v: distances_from(H, v) for v in bits(G.vertices)} for _, _, H in candidates]
    for combo in combinations(range(len(W)), q.m):
        chosen = [W[i] for i in combo]
        for (P, rel, _), dist in zip(candidates, dists):
            if all(_far(_tuple_distance(dist, a, b), q.r) for a, b in combinations(chosen, 2)):
                return FlatnessWitness(tuple(chosen), P, rel)
    return None


def labeled_subflip_search(G: Graph, H: Graph, k: int) -> Partition | None:
    '''First partition with at most k parts such that G ⊖ P = H.'''
    if G.vertices != H.vertices:
        raise PreconditionError('graphs have different vertex sets')
    _check_size(G, SUBFLIP_CAP + 4)
    if not H.is_subgraph_of(G) or H.loops != G.loops:
        return None
    for P in rgs_partitions(G.vertices, min(k, G.order)):
        if subflip(G, P) == H:
            return P
    return None
