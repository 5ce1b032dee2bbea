'''Flips, subflips, pure flips and similarity of graphs.'''

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator

from .graph import Graph, PreconditionError, as_mask, bits
from .partition import Partition

Pair = tuple[int, int]


def _canon(pairs: Iterable[Pair]) -> frozenset[Pair]:
    return frozenset((min(a, b), max(a, b)) for a, b in pairs)


@dataclass(frozen=True)
class FlipSpec:
    '''A partition together with a symmetric relation on its part ids.

    The relation is stored as canonical (i, j) pairs with i <= j.
    '''
    partition: Partition
    relation: frozenset[Pair]

    def __post_init__(self) -> None:
        rel = _canon(self.relation)
        k = len(self.partition)
        for a, b in rel:
            if not (0 <= a < k and 0 <= b < k):
                raise PreconditionError(f'pair ({a},{b}) refers to a missing part')
        object.__setattr__(self, 'relation', rel)

    @staticmethod
    def of(partition: Partition, pairs: Iterable[Pair] = ()) -> FlipSpec:
        return FlipSpec(partition, frozenset(pairs))

    def related(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.relation

    def restrict(self, S: int | Iterable[int]) -> FlipSpec:
        '''The flip spec induced on S: parts intersected, relation carried over.'''
        s = as_mask(S)
        kept = [i for i, p in enumerate(self.partition.parts) if p & s]
        sub = self.partition.restrict(s)
        new_id = {old: sub.parts.index(self.partition.parts[old] & s) for old in kept}
        rel = {(new_id[a], new_id[b]) for a, b in self.relation if a in new_id and b in new_id}
        return FlipSpec(sub, frozenset(rel))


def flip(G: Graph, spec: FlipSpec) -> Graph:
    '''G ⊕ (P, F): complement every pair across related parts.  Loops stay.'''
    parts = spec.partition.parts
    if spec.partition.host != G.vertices:
        raise PreconditionError('partition does not cover the vertex set')
    toggle = [0] * len(parts)
    for a, b in spec.relation:
        toggle[a] |= parts[b]
        toggle[b] |= parts[a]
    adj = list(G.adj)
    for i, p in enumerate(parts):
        if toggle[i]:
            for v in bits(p):
                adj[v] ^= toggle[i] & ~(1 << v)
    return Graph(G.n, tuple(adj), G.loops, G.vertices)


def fully_adjacent(G: Graph, A: int | Iterable[int], B: int | Iterable[int]) -> bool:
    '''Every pair of distinct a in A, b in B is an edge (loops ignored).'''
    a, b = as_mask(A), as_mask(B)
    adj = G.adj
    for v in bits(a):
        need = b & ~(1 << v)
        if adj[v] & need != need:
            return False
    return True


def fully_non_adjacent(G: Graph, A: int | Iterable[int], B: int | Iterable[int]) -> bool:
    a, b = as_mask(A), as_mask(B)
    return all(G.adj[v] & b == 0 for v in bits(a))


def max_flip_relation(G: Graph, P: Partition) -> FlipSpec:
    '''The flip spec whose relation is every fully adjacent pair of parts.'''
    parts = P.parts
    rel = set()
    for i in range(len(parts)):
        for j in range(i, len(parts)):
            if fully_adjacent(G, parts[i], parts[j]):
                rel.add((i, j))
    return FlipSpec(P, frozenset(rel))


def subflip(G: Graph, P: Partition) -> Graph:
    '''G ⊖ P, always a subgraph of G with the same loops.'''
    if P.host != G.vertices:
        raise PreconditionError('partition does not cover the vertex set')
    parts = P.parts
    adj = G.adj
    # parts whose members all see the whole other part; computed per part
    removed = [0] * len(parts)
    for i, p in enumerate(parts):
        for j in range(i, len(parts)):
            q = parts[j]
            ok = True
            for v in bits(p):
                need = q & ~(1 << v)
                if adj[v] & need != need:
                    ok = False
                    break
            if ok:
                removed[i] |= q
                if j != i:
                    removed[j] |= p
    out = list(adj)
    for i, p in enumerate(parts):
        if removed[i]:
            for v in bits(p):
                out[v] &= ~removed[i]
    return Graph(G.n, tuple(out), G.loops, G.vertices)


def is_pure_flip(G: Graph, spec: FlipSpec) -> bool:
    parts = spec.partition.parts
    return all(fully_adjacent(G, parts[a], parts[b]) or fully_non_adjacent(G, parts[a], parts[b])
               for a, b in spec.relation)


def relations(k: int) -> Iterator[frozenset[Pair]]:
    '''Every symmetric relation on k part ids.'''
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    for chosen in product((False, True), repeat=len(pairs)):
        yield frozenset(p for p, c in zip(pairs, chosen) if c)


def flip_specs(P: Partition) -> Iterator[FlipSpec]:
    for rel in relations(len(P)):
        yield FlipSpec(P, rel)


def relation_between(G: Graph, H: Graph, P: Partition) -> FlipSpec | None:
    '''A relation F with H = G ⊕ (P, F), if one exists.'''
    if G.vertices != H.vertices or G.loops != H.loops:
        return None
    parts = P.parts
    rel = set()
    for i in range(len(parts)):
        for j in range(i, len(parts)):
            q = parts[j]
            verdicts = set()
            for v in bits(parts[i]):
                diff = (G.adj[v] ^ H.adj[v]) & q & ~(1 << v)
                need = q & ~(1 << v)
                if diff == 0 and need:
                    verdicts.add(False)
                elif diff == need and need:
                    verdicts.add(True)
                elif need:
                    return None
            if len(verdicts) > 1:
                return None
            if verdicts == {True}:
                rel.add((i, j))
    spec = FlipSpec(P, frozenset(rel))
    return spec if flip(G, spec) == H else None


def compose_specs(s1: FlipSpec, s2: FlipSpec) -> FlipSpec:
    '''The single (P1 ∧ P2)-flip equal to flipping by s1 and then by s2.'''
    p1, p2 = s1.partition, s2.partition
    cells = [(c, i, j) for i, a in enumerate(p1.parts) for j, b in enumerate(p2.parts) if (c := a & b)]
    meet = Partition(tuple(c for c, _, _ in cells))
    index = {c: meet.parts.index(c) for c, _, _ in cells}
    rel = set()
    for (c, i, j), (d, k, l) in combinations(cells, 2):
        if s1.related(i, k) != s2.related(j, l):
            rel.add((index[c], index[d]))
    for c, i, j in cells:
        if s1.related(i, i) != s2.related(j, j):
            rel.add((index[c], index[c]))
    return FlipSpec(meet, frozenset(rel))


@dataclass(frozen=True)
class SimilarityWitness:
    mediator: Partition
    common: Graph


def m_similar(G1: Graph, G2: Graph, M: Partition) -> SimilarityWitness | None:
    '''Witness that G1 ⊖ M = G2 ⊖ M, or None.'''
    if G1.vertices != G2.vertices:
        raise PreconditionError('graphs have different vertex sets')
    h1 = subflip(G1, M)
    return SimilarityWitness(M, h1) if h1 == subflip(G2, M) else None
