'''Sparsification of bounded subflip-depth graphs and its exact inverse.

Each internal node of a decomposition picks one leader per part.  The
subflip removes the edges of fully adjacent part pairs; the leader edges X
put back just enough of them to keep every component connected, and they are
covered by the leaders, which bounds the tree-depth of the result.
'''

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .depth import SUBFLIP_CAP, _SubflipSolver, _check_size
from .flips import FlipSpec, flip, max_flip_relation, subflip
from .graph import (
    INF, ColoredGraph, Graph, PreconditionError, _content_lines, as_mask, bits, component_masks, components_and_diameters,
    format_graph, parse_graph, to_mask, tree_depth,
)
from .partition import Partition
from .patterns import PatternKind, find_pattern, pattern_order
from .transduction import (
    Transduction, Witness, choice, choice_piece, compose_all, identity, parallel, parallel_witness,
    prefixed, pure_flip_transduction, vc_edit,
)

Edge = tuple[int, int]


# -- decomposition trees

@dataclass(frozen=True)
class DecompositionTree:
    vertices: int
    partition: Partition | None = None
    children: tuple[DecompositionTree, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.partition is None

    @property
    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(c.depth for c in self.children)

    def nodes(self) -> Iterable[DecompositionTree]:
        yield self
        for c in self.children:
            yield from c.nodes()


def decompose(G: Graph, k: int, d_max: int | float = INF) -> DecompositionTree | None:
    '''An optimal-depth subflip decomposition, or None when the depth exceeds d_max.'''
    _check_size(G, SUBFLIP_CAP)
    solver = _SubflipSolver(INF, k)
    value, _ = solver.solve(G)
    if value == INF or value > d_max:
        return None

    def build(C: Graph) -> DecompositionTree:
        if C.order == 1:
            return DecompositionTree(C.vertices)
        _, P = solver.solve(C)
        H = subflip(C, P)
        return DecompositionTree(C.vertices, P, tuple(build(H.induced(m)) for m in component_masks(H)))

    return build(G)


def check_tree(G: Graph, tree: DecompositionTree, k: int) -> None:
    '''Raise unless the tree is a valid subflip decomposition of G with <= k parts per node.'''
    if tree.vertices != G.vertices:
        raise PreconditionError('tree root does not match the vertex set')
    if tree.is_leaf:
        if G.order != 1:
            raise PreconditionError('leaf on more than one vertex')
        return
    P = tree.partition
    if P.host != G.vertices or len(P) > k:
        raise PreconditionError(f'bad partition at node {sorted(bits(G.vertices))}')
    H = subflip(G, P)
    if sorted(c.vertices for c in tree.children) != sorted(component_masks(H)):
        raise PreconditionError(f'children do not match the components at node {sorted(bits(G.vertices))}')
    for c in tree.children:
        check_tree(H.induced(c.vertices), c, k)


# -- sparsification

@dataclass(frozen=True)
class SparsifyNode:
    vertices: int
    partition: Partition | None
    leaders: tuple[tuple[int, int], ...]
    x_edges: tuple[Edge, ...]
    children: tuple[SparsifyNode, ...]
    result: Graph

    @property
    def tree(self) -> DecompositionTree:
        return DecompositionTree(self.vertices, self.partition, tuple(c.tree for c in self.children))

    def nodes(self) -> Iterable[SparsifyNode]:
        yield self
        for c in self.children:
            yield from c.nodes()


@dataclass(frozen=True)
class SparsifyWitness:
    '''One root per connected component of the input, plus the sparsified graph.'''
    roots: tuple[SparsifyNode, ...]
    result: Graph
    k: int
    d: int

    @property
    def trees(self) -> list[DecompositionTree]:
        return [r.tree for r in self.roots]

    def nodes(self) -> Iterable[SparsifyNode]:
        for r in self.roots:
            yield from r.nodes()


def leader_edges(P: Partition, relation: Iterable[tuple[int, int]], leaders: dict[int, int]) -> set[Edge]:
    X: set[Edge] = set()
    parts = P.parts
    for a, b in relation:
        la, lb = leaders[a], leaders[b]
        if a == b:
            X |= {(min(la, v), max(la, v)) for v in bits(parts[a]) if v != la}
        else:
            X |= {(min(la, q), max(la, q)) for q in bits(parts[b])}
            X |= {(min(lb, p), max(lb, p)) for p in bits(parts[a])}
    return X


def _with_edges(G: Graph, edges: Iterable[Edge], add: bool) -> Graph:
    adj = list(G.adj)
    for u, v in edges:
        if add:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        else:
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
    return Graph(G.n, tuple(adj), G.loops, G.vertices)


def _empty_on(G: Graph, vertices: int) -> Graph:
    return Graph(G.n, (0,) * G.n, G.loops & vertices, vertices)


def _sparsify_node(G: Graph, tree: DecompositionTree) -> SparsifyNode:
    if tree.is_leaf:
        return SparsifyNode(G.vertices, None, (), (), (), G)
    P = tree.partition
    spec = max_flip_relation(G, P)
    H = subflip(G, P)
    children = tuple(_sparsify_node(H.induced(c.vertices), c) for c in tree.children)
    # leaders are the smallest vertex of each part
    leaders = {i: next(bits(p)) for i, p in enumerate(P.parts)}
    X = leader_edges(P, spec.relation, leaders)
    out = _empty_on(G, G.vertices)
    for c in children:
        out = out.union(c.result)
    out = _with_edges(out, X, add=True)
    return SparsifyNode(G.vertices, P, tuple(sorted(leaders.items())), tuple(sorted(X)), children, out)


def sparsify(G: Graph, tree: DecompositionTree | None, k: int, d: int | None = None) -> SparsifyWitness:
    '''G* with tree-depth <= k*d, a reflexive subgraph of G, plus the recovery witness.

    A disconnected G is sparsified per component; each component is then
    decomposed on its own (its depth never exceeds that of G).
    '''
    if not G.is_reflexive():
        raise PreconditionError('sparsification needs a reflexive graph')
    if tree is None:
        tree = decompose(G, k)
        if tree is None:
            raise PreconditionError(f'no subflip decomposition with {k} parts per step')
    check_tree(G, tree, k)
    depth = tree.depth
    d = depth if d is None else d
    if d < depth:
        raise PreconditionError(f'd = {d} is below the tree depth {depth}')
    comps = component_masks(G)
    if len(comps) == 1:
        roots = (_sparsify_node(G, tree),)
    else:
        roots = []
        for m in comps:
            sub = G.induced(m)
            roots.append(_sparsify_node(sub, decompose(sub, k, depth)))
        roots = tuple(roots)
    out = _empty_on(G, G.vertices)
    for r in roots:
        out = out.union(r.result)
    if tree_depth(out) > k * d:
        raise AssertionError('tree-depth bound violated')
    return SparsifyWitness(roots, out, k, d)


def _derived_relation(node: SparsifyNode) -> FlipSpec:
    P = node.partition
    parts = P.parts
    leaders = dict(node.leaders)
    X = set(node.x_edges)
    rel = set()
    for a in range(len(parts)):
        for b in range(a, len(parts)):
            la = leaders[a]
            if a == b:
                hit = any((min(la, v), max(la, v)) in X for v in bits(parts[a]) if v != la)
            else:
                hit = any((min(la, q), max(la, q)) in X for q in bits(parts[b]))
            if hit:
                rel.add((a, b))
    return FlipSpec(P, frozenset(rel))


def _check_node(node: SparsifyNode, Gs: Graph) -> FlipSpec:
    P = node.partition
    leaders = dict(node.leaders)
    if P.host != node.vertices or sorted(leaders) != list(range(len(P))):
        raise PreconditionError('witness partition or leader map is inconsistent')
    for i, v in leaders.items():
        if not P.parts[i] >> v & 1:
            raise PreconditionError(f'leader {v} is not in part {i}')
    spec = _derived_relation(node)
    if leader_edges(P, spec.relation, leaders) != set(node.x_edges):
        raise PreconditionError('X edges do not match the leader construction')
    for u, v in node.x_edges:
        if not Gs.has_edge(u, v):
            raise PreconditionError(f'X edge ({u},{v}) missing from the sparsified graph')
    return spec


def _recover_node(node: SparsifyNode, Gs: Graph) -> Graph:
    if node.partition is None:
        if Gs.order != 1:
            raise PreconditionError('leaf witness on more than one vertex')
        return Gs
    spec = _check_node(node, Gs)
    U = _with_edges(Gs, node.x_edges, add=False)
    if sorted(c.vertices for c in node.children) != sorted(component_masks(U)):
        raise PreconditionError('children do not match the components after removing X')
    H = _empty_on(Gs, Gs.vertices)
    for c in node.children:
        H = H.union(_recover_node(c, U.induced(c.vertices)))
    return flip(H, spec)


def recover(witness: SparsifyWitness, G_star: Graph | None = None) -> Graph:
    '''Rebuild G from G* (the stored result unless given) and the witness.'''
    Gs = witness.result if G_star is None else G_star
    if sorted(r.vertices for r in witness.roots) != sorted(component_masks(Gs)):
        raise PreconditionError('witness roots do not match the components of G*')
    out = _empty_on(Gs, Gs.vertices)
    for r in witness.roots:
        out = out.union(_recover_node(r, Gs.induced(r.vertices)))
    return out


# -- the same maps as transductions

def _max_diameter(G: Graph) -> int:
    return max((d for _, d in components_and_diameters(G)), default=0)


def _parallel_step(G: Graph, subs: Sequence[tuple[Transduction, Witness]]) -> tuple[Transduction, Witness]:
    '''One transduction running subs[i] on the i-th component piece of G.'''
    distinct: list[Transduction] = []
    index = []
    for T, _ in subs:
        if T not in distinct:
            distinct.append(T)
        index.append(distinct.index(T))
    T, sel, maps = choice(distinct)
    d = _max_diameter(G)
    pieces = [choice_piece(w, j, sel, maps) for (_, w), j in zip(subs, index)]
    return parallel(T, d), parallel_witness(G, pieces, d)


def _node_transductions(node: SparsifyNode, G: Graph):
    if node.partition is None:
        return (identity(), Witness(ColoredGraph(G))), (identity(), Witness(ColoredGraph(node.result)))
    P = node.partition
    spec = max_flip_relation(G, P)
    H = subflip(G, P)
    leaders = [v for _, v in node.leaders]
    kids = [_node_transductions(c, H.induced(c.vertices)) for c in node.children]
    U = _with_edges(node.result, node.x_edges, add=False)

    T1, w1 = pure_flip_transduction(H, spec)
    T2, w2 = _parallel_step(H, [s for s, _ in kids])
    T3, w3 = vc_edit(U, node.x_edges, leaders, 'add')
    fwd = compose_all([prefixed(T1, w1, 'f_'), prefixed(T2, w2, 'p_'), prefixed(T3, w3, 'v_')])

    R1, r1 = vc_edit(node.result, node.x_edges, leaders, 'remove')
    R2, r2 = _parallel_step(U, [r for _, r in kids])
    R3, r3 = pure_flip_transduction(G, spec)
    back = compose_all([prefixed(R1, r1, 'v_'), prefixed(R2, r2, 'p_'), prefixed(R3, r3, 'f_')])
    return fwd, back


def build_transductions(witness: SparsifyWitness, G: Graph) -> dict[str, tuple[Transduction, Witness]]:
    '''EP transductions with witnesses: 'sparsify' maps G to G*, 'recover' maps G* to G.'''
    parts = [_node_transductions(r, G.induced(r.vertices)) for r in witness.roots]
    if len(parts) == 1:
        fwd, back = parts[0]
    else:
        fwd = _parallel_step(G, [f for f, _ in parts])
        back = _parallel_step(witness.result, [b for _, b in parts])
    return {'sparsify': fwd, 'recover': back}


# -- witness text format

def format_witness(witness: SparsifyWitness) -> str:
    R = witness.result
    lines = ['result']
    if not R.is_full():
        # a piece of a cover: write the host graph and the piece's vertices
        lines.append('domain ' + ' '.join(map(str, bits(R.vertices))))
        R = Graph(R.n, R.adj, R.loops, (1 << R.n) - 1)
    lines += [format_graph(R).rstrip('\n'), f'tree k {witness.k} d {witness.d}']
    counter = [0]

    def emit(node: SparsifyNode, parent: str) -> None:
        me = counter[0]
        counter[0] += 1
        lines.append(f'node {me} parent {parent} vertices ' + ' '.join(map(str, bits(node.vertices))))
        if node.partition is not None:
            for b in node.partition.blocks:
                lines.append('part ' + ' '.join(map(str, sorted(b))))
            lines.extend(f'leader {i} {v}' for i, v in node.leaders)
            lines.extend(f'X {u} {v}' for u, v in node.x_edges)
        for c in node.children:
            emit(c, str(me))

    for r in witness.roots:
        emit(r, '-')
    return '\n'.join(lines) + '\n'


def parse_witness(text: str) -> SparsifyWitness:
    lines = _content_lines(text)
    if not lines or lines[0][1] != 'result':
        raise ValueError('witness must start with "result"')
    try:
        split = next(i for i, (_, s) in enumerate(lines) if s.startswith('tree '))
    except StopIteration:
        raise ValueError('missing "tree" line') from None
    start, domain = 1, None
    if len(lines) > 1 and lines[1][1].startswith('domain'):
        try:
            domain = to_mask(int(x) for x in lines[1][1].split()[1:])
        except ValueError:
            raise ValueError(f'line {lines[1][0]}: malformed domain line') from None
        start = 2
    G = parse_graph('\n'.join(s for _, s in lines[start:split]))
    if domain is not None:
        if domain & ~G.vertices:
            raise ValueError('domain leaves the vertex set')
        G = G.induced(domain)
    head = lines[split][1].split()
    if len(head) != 5 or head[1] != 'k' or head[3] != 'd':
        raise ValueError(f'line {lines[split][0]}: expected "tree k <k> d <d>"')
    k, d = int(head[2]), int(head[4])
    raw: dict[int, dict] = {}
    order: list[int] = []
    current = None
    for num, s in lines[split + 1:]:
        w = s.split()
        try:
            if w[0] == 'node' and w[2] == 'parent' and w[4] == 'vertices':
                current = int(w[1])
                if current in raw:
                    raise ValueError(f'line {num}: duplicate node {current}')
                parent = None if w[3] == '-' else int(w[3])
                if parent is not None and parent not in raw:
                    raise ValueError(f'line {num}: parent {parent} is not defined yet')
                raw[current] = {'parent': parent, 'vertices': to_mask(int(x) for x in w[5:]),
                                'parts': [], 'leaders': [], 'X': []}
                order.append(current)
            elif current is None:
                raise ValueError(f'line {num}: data before the first node')
            elif w[0] == 'part':
                raw[current]['parts'].append(to_mask(int(x) for x in w[1:]))
            elif w[0] == 'leader' and len(w) == 3:
                raw[current]['leaders'].append((int(w[1]), int(w[2])))
            elif w[0] == 'X' and len(w) == 3:
                u, v = int(w[1]), int(w[2])
                raw[current]['X'].append((min(u, v), max(u, v)))
            else:
                raise ValueError(f'line {num}: unrecognized line')
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ValueError) and str(exc).startswith('line'):
                raise
            raise ValueError(f'line {num}: malformed line') from None

    def build(i: int) -> SparsifyNode:
        r = raw[i]
        kids = tuple(build(j) for j in order if raw[j]['parent'] == i)
        P = Partition(tuple(r['parts'])) if r['parts'] else None
        res = G.induced(r['vertices'])
        return SparsifyNode(r['vertices'], P, tuple(sorted(r['leaders'])), tuple(sorted(r['X'])), kids, res)

    try:
        roots = tuple(build(i) for i in order if raw[i]['parent'] is None)
    except PreconditionError as exc:
        raise ValueError(str(exc)) from None
    return SparsifyWitness(roots, G, k, d)


def format_tree(tree: DecompositionTree, k: int) -> str:
    lines = [f'tree k {k} d {tree.depth}']
    counter = [0]

    def emit(node: DecompositionTree, parent: str) -> None:
        me = counter[0]
        counter[0] += 1
        lines.append(f'node {me} parent {parent} vertices ' + ' '.join(map(str, bits(node.vertices))))
        if node.partition is not None:
            lines.extend('part ' + ' '.join(map(str, sorted(b))) for b in node.partition.blocks)
        for c in node.children:
            emit(c, str(me))

    emit(tree, '-')
    return '\n'.join(lines) + '\n'


def parse_tree(text: str) -> tuple[DecompositionTree, int]:
    lines = _content_lines(text)
    if not lines:
        raise ValueError('empty tree text')
    head = lines[0][1].split()
    if len(head) != 5 or head[0] != 'tree' or head[1] != 'k' or head[3] != 'd':
        raise ValueError(f'line {lines[0][0]}: expected "tree k <k> d <d>"')
    k = int(head[2])
    nodes: dict[int, list] = {}
    order: list[int] = []
    current = None
    for num, s in lines[1:]:
        w = s.split()
        if len(w) >= 5 and w[0] == 'node' and w[2] == 'parent' and w[4] == 'vertices':
            try:
                current = int(w[1])
                parent = None if w[3] == '-' else int(w[3])
                vs = to_mask(int(x) for x in w[5:])
            except ValueError:
                raise ValueError(f'line {num}: malformed node line') from None
            if current in nodes or (parent is not None and parent not in nodes):
                raise ValueError(f'line {num}: bad node or parent id')
            nodes[current] = [parent, vs, []]
            order.append(current)
        elif w and w[0] == 'part' and current is not None:
            try:
                nodes[current][2].append(to_mask(int(x) for x in w[1:]))
            except ValueError:
                raise ValueError(f'line {num}: malformed part line') from None
        else:
            raise ValueError(f'line {num}: unrecognized line')
    roots = [i for i in order if nodes[i][0] is None]
    if len(roots) != 1:
        raise ValueError('a tree needs exactly one root')

    def build(i: int) -> DecompositionTree:
        _, vs, parts = nodes[i]
        kids = tuple(build(j) for j in order if nodes[j][0] == i)
        try:
            P = Partition(tuple(parts)) if parts else None
        except PreconditionError as exc:
            raise ValueError(str(exc)) from None
        return DecompositionTree(vs, P, kids)

    return build(roots[0]), k


# -- covers

def p_cover_check(n: int | Iterable[int], sets: Sequence[int | Iterable[int]], p: int) -> bool:
    '''Every set of at most p vertices lies inside one of the sets.'''
    verts = list(range(n)) if isinstance(n, int) else sorted(n)
    masks = [as_mask(s) for s in sets]
    for size in range(p + 1):
        for X in combinations(verts, size):
            m = to_mask(X)
            if not any(m & ~s == 0 for s in masks):
                return False
    return True


@dataclass(frozen=True)
class CoverFamily:
    sets: tuple[int, ...]
    p: int = 2
    trees: tuple[DecompositionTree | None, ...] = ()

    @staticmethod
    def of(sets: Iterable[int | Iterable[int]], p: int = 2, trees: Iterable[DecompositionTree | None] = ()) -> CoverFamily:
        return CoverFamily(tuple(as_mask(s) for s in sets), p, tuple(trees))


def cover_sparsify(G: Graph, cover: CoverFamily, k: int, d: int | None = None) -> tuple[Graph, list[SparsifyWitness]]:
    '''Union of per-piece sparsifications over a 2-cover.'''
    if not G.is_reflexive():
        raise PreconditionError('sparsification needs a reflexive graph')
    if not p_cover_check(G.vertex_list, cover.sets, 2):
        raise PreconditionError('the sets do not form a 2-cover')
    trees = cover.trees or (None,) * len(cover.sets)
    if len(trees) != len(cover.sets):
        raise PreconditionError('one decomposition per cover set is required')
    out = _empty_on(G, G.vertices)
    witnesses = []
    for U, tree in zip(cover.sets, trees):
        w = sparsify(G.induced(U), tree, k, d)
        witnesses.append(w)
        out = out.union(w.result)
    return out, witnesses


def recover_covered(G_star: Graph, witnesses: Sequence[SparsifyWitness]) -> Graph:
    '''G from the union G* using the stored per-piece results (witness driven).'''
    out = _empty_on(G_star, G_star.vertices)
    for w in witnesses:
        if not w.result.is_subgraph_of(G_star):
            raise PreconditionError('a piece result is not part of G*')
        out = out.union(recover(w))
    return out


def cover_biclique_report(G_star: Graph, witnesses: Sequence[SparsifyWitness]) -> dict:
    return {'union': pattern_order(G_star, PatternKind.BICLIQUE),
            'pieces': [pattern_order(w.result, PatternKind.BICLIQUE) for w in witnesses]}


def comatching_cover_lift(G: Graph, sets: Sequence[int | Iterable[int]], s: int, t: int):
    '''(i, witness): cover set i (1-based) whose induced graph keeps an order-t co-matching.

    Each index m of an order s*t co-matching is sent to the first set containing
    both a_m and b_m; some set receives at least t indices.
    '''
    masks = [as_mask(S) for S in sets]
    if not p_cover_check(G.vertex_list, masks, 2):
        raise PreconditionError('the sets do not form a 2-cover')
    found = find_pattern(G, PatternKind.CO_MATCHING, s * t)
    if found is None:
        raise PreconditionError(f'no semi-induced co-matching of order {s * t}')
    A, B = found
    buckets: dict[int, list[int]] = {}
    for m, (a, b) in enumerate(zip(A, B)):
        i = next(i for i, S in enumerate(masks) if S >> a & 1 and S >> b & 1)
        buckets.setdefault(i, []).append(m)
    i = max(sorted(buckets), key=lambda j: len(buckets[j]))
    idx = buckets[i][:t]
    if len(idx) < t:
        raise PreconditionError('pigeonhole failed: more pieces than the bound allows')
    return i + 1, (tuple(A[m] for m in idx), tuple(B[m] for m in idx))
