'''Partitions of vertex sets, stored as tuples of bitmasks.'''

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .graph import PreconditionError, _content_lines, as_mask, bits, mask_set, to_mask


@dataclass(frozen=True)
class Partition:
    '''Nonempty disjoint parts, ordered by their smallest member.

    ``host`` is the bitmask of the partitioned set.  Part ids are positions
    in ``parts``.
    '''
    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        seen = 0
        for p in self.parts:
            if p == 0:
                raise PreconditionError('empty part')
            if p & seen:
                raise PreconditionError('parts overlap')
            seen |= p
        ordered = tuple(sorted(self.parts, key=lambda m: m & -m))
        object.__setattr__(self, 'parts', ordered)

    @staticmethod
    def of(blocks: Iterable[Iterable[int] | int]) -> Partition:
        return Partition(tuple(as_mask(b) for b in blocks))

    @staticmethod
    def whole(vertices: int | Iterable[int]) -> Partition:
        mask = as_mask(vertices)
        return Partition((mask,) if mask else ())

    @staticmethod
    def discrete(vertices: int | Iterable[int]) -> Partition:
        return Partition(tuple(1 << v for v in bits(as_mask(vertices))))

    @property
    def host(self) -> int:
        out = 0
        for p in self.parts:
            out |= p
        return out

    @property
    def host_size(self) -> int:
        return self.host.bit_count()

    @property
    def blocks(self) -> list[frozenset[int]]:
        return [mask_set(p) for p in self.parts]

    def __len__(self) -> int:
        return len(self.parts)

    def part_of(self, v: int) -> int:
        for i, p in enumerate(self.parts):
            if p >> v & 1:
                return i
        raise KeyError(v)

    def labels(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in bits(p)}

    def restrict(self, S: int | Iterable[int]) -> Partition:
        s = as_mask(S)
        return Partition(tuple(p & s for p in self.parts if p & s))

    def refine(self, other: Partition) -> Partition:
        return Partition(tuple(p & q for p in self.parts for q in other.parts if p & q))

    def is_refinement_of(self, coarser: Partition) -> bool:
        '''True if every part of self lies inside a part of coarser.'''
        if self.host != coarser.host:
            return False
        return all(any(p & ~q == 0 for q in coarser.parts) for p in self.parts)

    def __repr__(self) -> str:
        return 'Partition(' + repr([sorted(b) for b in self.blocks]) + ')'


def common_refinement(partitions: Iterable[Partition]) -> Partition:
    it = iter(partitions)
    acc = next(it)
    for p in it:
        acc = acc.refine(p)
    return acc


def partition_ops(P: Partition, Q: Partition, S: int | Iterable[int]) -> dict:
    return {
        'restrict': P.restrict(S),
        'refine': P.refine(Q),
        'is_refinement': Q.is_refinement_of(P),
    }


def rgs_partitions(vertices: int | Iterable[int], max_parts: int | None = None) -> Iterator[Partition]:
    '''All partitions of the vertex set with at most max_parts parts.

    Enumerated as restricted-growth strings over the sorted vertices, in
    lexicographic order of the string, so {V} always comes first.
    '''
    vs = list(bits(as_mask(vertices)))
    if not vs:
        yield Partition(())
        return
    cap = len(vs) if max_parts is None else min(max_parts, len(vs))
    if cap < 1:
        return
    blocks = [0] * cap

    def rec(i: int, used: int) -> Iterator[Partition]:
        if i == len(vs):
            yield Partition(tuple(blocks[:used]))
            return
        bit = 1 << vs[i]
        for label in range(min(used + 1, cap)):
            blocks[label] |= bit
            yield from rec(i + 1, max(used, label + 1))
            blocks[label] &= ~bit

    yield from rec(0, 0)


def refinements(P: Partition) -> Iterator[Partition]:
    '''Every refinement of P, including P itself.'''
    per_part = [list(rgs_partitions(p)) for p in P.parts]

    def rec(i: int, acc: tuple[int, ...]) -> Iterator[Partition]:
        if i == len(per_part):
            yield Partition(acc)
            return
        for sub in per_part[i]:
            yield from rec(i + 1, acc + sub.parts)

    yield from rec(0, ())


def format_partition(P: Partition) -> str:
    return ''.join(' '.join(map(str, sorted(b))) + '\n' for b in P.blocks)


def parse_partition(text: str, n: int | None = None) -> Partition:
    blocks = []
    for num, s in _content_lines(text):
        try:
            blocks.append([int(x) for x in s.split()])
        except ValueError:
            raise ValueError(f'line {num}: expected vertex ids') from None
    masks = [to_mask(b) for b in blocks]
    try:
        P = Partition(tuple(masks))
    except PreconditionError as exc:
        raise ValueError(str(exc)) from None
    if sum(len(b) for b in blocks) != P.host_size:
        raise ValueError('a vertex is listed twice')
    if n is not None and P.host != (1 << n) - 1:
        raise ValueError(f'parts do not partition 0..{n - 1}')
    return P
