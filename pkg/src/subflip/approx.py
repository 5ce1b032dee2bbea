'''Approximating arbitrary flips by subflips of a bounded refinement.'''

from __future__ import annotations

import random
from dataclasses import dataclass

from .flips import FlipSpec, flip, relations, subflip
from .graph import (
    INF, Graph, PreconditionError, ball_mask, bipartite_complement_between, bits,
    complement, component_masks, components_and_diameters, distances_from,
)
from .partition import Partition, common_refinement
from .patterns import PatternKind, pattern_order


def matching_diameter_report(G: Graph) -> dict[str, int]:
    '''Number of components with at least two vertices and their largest diameter.'''
    big = [(c, d) for c, d in components_and_diameters(G) if len(c) >= 2]
    return {'big_components': len(big), 'max_diameter': max((d for _, d in big), default=0)}


@dataclass(frozen=True)
class TransferResult:
    refinement: Partition
    per_pair_parts: dict[tuple[int, int], Partition]
    t: int
    k: int

    @property
    def bound(self) -> int:
        return self.k * self.t ** self.k


def _pair_split(G: Graph, p: int, q: int) -> Partition:
    '''X(P, Q): the isolation part of P plus the traces of the bigger components.

    For P != Q the components are taken in the bipartite complement between P
    and Q; for P = Q in the complement of G[P].
    '''
    if p == q:
        comp_graph = complement(G.induced(p))
    else:
        comp_graph = bipartite_complement_between(G, p, q)
    isolated = 0
    blocks = []
    for c in component_masks(comp_graph):
        if c.bit_count() == 1:
            isolated |= c & p
        elif c & p:
            blocks.append(c & p)
    if isolated:
        blocks.append(isolated)
    return Partition(tuple(blocks))


def transfer_refinement(G: Graph, P: Partition, t: int, check: bool = False) -> TransferResult:
    '''Refinement Q of P such that G ⊖ Q approximates every P-flip of G.

    Requires that G has no semi-induced co-matching of order t; pass
    ``check=True`` to verify this (exponential) precondition first.
    '''
    if t < 1:
        raise PreconditionError('t must be at least 1')
    if P.host != G.vertices:
        raise PreconditionError('partition does not cover the vertex set')
    if check and pattern_order(G, PatternKind.CO_MATCHING) >= t:
        raise PreconditionError(f'co-matching index is at least {t}')
    parts = P.parts
    per_pair: dict[tuple[int, int], Partition] = {}
    for i, p in enumerate(parts):
        for j, q in enumerate(parts):
            X = _pair_split(G, p, q)
            if len(X) > t:
                raise PreconditionError(
                    f'parts {i},{j} split into {len(X)} > t pieces; co-matching index is at least t')
            per_pair[i, j] = X
    lifted = []
    for (i, _), X in per_pair.items():
        lifted.append(Partition(X.parts + ((G.vertices & ~parts[i],) if G.vertices & ~parts[i] else ())))
    Q = common_refinement(lifted) if lifted else P
    return TransferResult(Q, per_pair, t, len(parts))


def _relations_to_check(k: int, seed: int, samples: int):
    if k <= 3:
        yield from relations(k)
        return
    rng = random.Random(seed)
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    for _ in range(samples):
        yield frozenset(p for p in pairs if rng.random() < 0.5)


def transfer_violations(G: Graph, P: Partition, result: TransferResult, seed: int = 0,
                        samples: int = 500, radii: tuple[int, ...] = (1, 2)) -> list[str]:
    '''Describe every way the transfer guarantee fails (empty when it holds).'''
    problems = []
    t = result.t
    H0 = subflip(G, result.refinement)
    if not result.refinement.is_refinement_of(P):
        problems.append('not a refinement')
    if len(result.refinement) > result.bound:
        problems.append('size bound exceeded')
    edges0 = H0.edge_list()
    balls0 = {(r, v): ball_mask(H0, r, v) for r in radii for v in bits(G.vertices)}
    for rel in _relations_to_check(len(P), seed, samples):
        H = flip(G, FlipSpec(P, rel))
        dist = {v: distances_from(H, v) for v in bits(G.vertices)}
        for u, v in edges0:
            if dist[u].get(v, INF) >= 3 * t:
                problems.append(f'edge {u}-{v} has distance >= {3 * t} in the flip {sorted(rel)}')
        for (r, v), mask in balls0.items():
            if mask & ~ball_mask(H, 3 * t * r, v):
                problems.append(f'ball of radius {r} around {v} escapes for {sorted(rel)}')
    return problems


def verify_transfer(G: Graph, P: Partition, result: TransferResult, seed: int = 0) -> bool:
    return not transfer_violations(G, P, result, seed)
