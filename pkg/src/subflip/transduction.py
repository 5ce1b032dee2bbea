'''Executable transductions: a coloring step followed by a simple interpretation.

A transduction is a color signature plus a domain formula nu(x) and an edge
formula eta(x,y).  Applying it needs an explicit witness coloring of the
input; the constructions below build those colorings alongside the formulas.
'''

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .flips import FlipSpec, flip, fully_adjacent, is_pure_flip, max_flip_relation
from .graph import ColoredGraph, Graph, PreconditionError, as_mask, bits, components_and_diameters
from .logic.classify import classify
from .logic.evaluate import TableEvaluator
from .logic.parser import dist_formula, parse_formula
from .logic.syntax import (
    ATOMS, And, Color, Edge, Eq, Exists, FO_QUANTIFIERS, Forall, Formula, Or, SO_QUANTIFIERS, TRUE, Top,
    all_var_names, children, colors_used, conj, disj, free_var_set, fresh_names, is_quantifier_free,
    rebuild, render, rename_free, transform,
)
from .partition import Partition, common_refinement

X, Y = 'x', 'y'


# -- core types

@dataclass(frozen=True)
class Transduction:
    colors: tuple[str, ...]
    nu: Formula
    eta: Formula

    def __post_init__(self) -> None:
        if len(set(self.colors)) != len(self.colors):
            raise PreconditionError('repeated color in the signature')
        if not free_var_set(self.nu) <= {X}:
            raise PreconditionError('the domain formula may only use the free variable x')
        if not free_var_set(self.eta) <= {X, Y}:
            raise PreconditionError('the edge formula may only use the free variables x, y')
        unknown = (colors_used(self.nu) | colors_used(self.eta)) - set(self.colors)
        if unknown:
            raise PreconditionError(f'formulas use colors outside the signature: {sorted(unknown)}')

    @staticmethod
    def build(colors: Iterable[str], nu: Formula, eta: Formula) -> Transduction:
        '''Checked constructor; eta is symmetrized unless it is already symmetric as written.'''
        if _canonical(_swap(eta)) != _canonical(eta):
            eta = disj(eta, _swap(eta))
        return Transduction(tuple(colors), nu, eta)

    @property
    def ep(self) -> bool:
        return classify(self.nu).ep and classify(self.eta).ep

    @property
    def quantifier_free_positive(self) -> bool:
        return all(is_quantifier_free(f) and classify(f).positive for f in (self.nu, self.eta))

    def __str__(self) -> str:
        return format_transduction(self)


@dataclass(frozen=True)
class Witness:
    coloring: ColoredGraph

    def renamed(self, mapping: Mapping[str, str]) -> Witness:
        cg = self.coloring
        return Witness(ColoredGraph.of(cg.graph, {mapping.get(c, c): m for c, m in cg.colors}))


def identity() -> Transduction:
    # E(x,y) with x = y reads the loop, so one atom copies edges and loops
    return Transduction((), TRUE, Edge(X, Y))


def apply(T: Transduction, w: Witness | ColoredGraph | Graph) -> Graph:
    cg = _coloring(w)
    extra = set(cg.color_map) - set(T.colors)
    if extra:
        raise PreconditionError(f'witness uses colors outside the signature: {sorted(extra)}')
    ev = TableEvaluator(cg)
    G = cg.graph
    nu = np.asarray(ev.table(T.nu, (X,)), dtype=bool)
    eta = np.asarray(ev.table(T.eta, (X, Y)), dtype=bool)
    dom = nu[:, None] & nu[None, :]
    if ((eta ^ eta.T) & dom).any():
        raise PreconditionError('the edge formula is not symmetric on this input')
    verts = ev.vertices
    vmask = 0
    for i, v in enumerate(verts):
        if nu[i]:
            vmask |= 1 << v
    adj = [0] * G.n
    loops = 0
    for i, u in enumerate(verts):
        if not nu[i]:
            continue
        for j in np.nonzero(eta[i] & nu)[0]:
            if j == i:
                loops |= 1 << u
            else:
                adj[u] |= 1 << verts[j]
    return Graph(G.n, tuple(adj), loops, vmask)


def member_check(T: Transduction, G: Graph, H: Graph, max_bits: int = 16) -> Witness | None:
    '''Search all colorings of G for one that T maps to H.'''
    n, k = G.order, len(T.colors)
    if n * k > max_bits:
        raise PreconditionError(f'{n * k} color bits exceed the budget of {max_bits}')
    verts = G.vertex_list
    for code in range(1 << (n * k)):
        colors = {c: 0 for c in T.colors}
        for i, v in enumerate(verts):
            for j, c in enumerate(T.colors):
                if code >> (i * k + j) & 1:
                    colors[c] |= 1 << v
        w = Witness(ColoredGraph.of(G, colors))
        if apply(T, w) == H:
            return w
    return None


def rename_colors(T: Transduction, mapping: Mapping[str, str]) -> Transduction:
    def leaf(a: Formula) -> Formula:
        return Color(mapping[a.name], a.x) if isinstance(a, Color) and a.name in mapping else a
    return Transduction(tuple(mapping.get(c, c) for c in T.colors), transform(T.nu, leaf), transform(T.eta, leaf))


def prefixed(T: Transduction, w: Witness | None, prefix: str) -> tuple[Transduction, Witness | None]:
    mapping = {c: prefix + c for c in T.colors}
    return rename_colors(T, mapping), (w.renamed(mapping) if w is not None else None)


# -- serialization

def format_transduction(T: Transduction) -> str:
    return f'colors: {" ".join(T.colors)}\nnu: {render(T.nu)}\neta: {render(T.eta)}\n'


def parse_transduction(text: str) -> Transduction:
    fields: dict[str, str] = {}
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(':')
        key = key.strip()
        if not sep or key not in ('colors', 'nu', 'eta') or key in fields:
            raise ValueError(f'line {num}: expected one each of "colors:", "nu:", "eta:"')
        fields[key] = rest.strip()
    if set(fields) != {'colors', 'nu', 'eta'}:
        raise ValueError('transduction needs colors:, nu: and eta: lines')
    colors = fields['colors'].split()
    return Transduction.build(colors, parse_formula(fields['nu'], free=[X]), parse_formula(fields['eta'], free=[X, Y]))


# -- formula helpers

def _coloring(w: Witness | ColoredGraph | Graph) -> ColoredGraph:
    if isinstance(w, Witness):
        return w.coloring
    return w if isinstance(w, ColoredGraph) else ColoredGraph(w)


def _swap(f: Formula) -> Formula:
    return rename_free(f, {X: Y, Y: X})


def _canonical(f: Formula) -> tuple:
    if isinstance(f, (Edge, Eq)):
        return (type(f).__name__, *sorted((f.x, f.y)))
    if isinstance(f, (And, Or)):
        items: set = set()
        for a in f.args:
            c = _canonical(a)
            items.update(c[1] if c[0] == type(f).__name__ else (c,))
        return (type(f).__name__, frozenset(items))
    if isinstance(f, ATOMS):
        return (type(f).__name__, f)
    return (type(f).__name__, getattr(f, 'var', None), tuple(_canonical(k) for k in children(f)))


def _standardize(f: Formula, avoid: Iterable[str]) -> Formula:
    '''Rename every bound variable to a fresh, distinct name.'''
    fresh = fresh_names(set(avoid) | all_var_names(f), 'u')

    def go(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, (Edge, Eq)):
            return type(g)(env.get(g.x, g.x), env.get(g.y, g.y))
        if isinstance(g, Color):
            return Color(g.name, env.get(g.x, g.x))
        if isinstance(g, ATOMS):
            return g
        if isinstance(g, FO_QUANTIFIERS):
            new = next(fresh)
            return type(g)(new, go(g.body, {**env, g.var: new}))
        if isinstance(g, SO_QUANTIFIERS):
            raise PreconditionError('set quantifiers are not supported in transductions')
        return rebuild(g, tuple(go(k, env) for k in children(g)))

    return go(f, {})


def _relativize(f: Formula, guard, co_guard=None) -> Formula:
    '''Guard every quantifier: exists z (guard(z) & ..), forall z (co_guard(z) | ..).'''
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Exists):
        return Exists(f.var, conj(guard(f.var), _relativize(f.body, guard, co_guard)))
    if isinstance(f, Forall):
        if co_guard is None:
            raise PreconditionError('universal quantifier without a complement guard')
        return Forall(f.var, disj(co_guard(f.var), _relativize(f.body, guard, co_guard)))
    if isinstance(f, SO_QUANTIFIERS):
        raise PreconditionError('set quantifiers are not supported in transductions')
    return rebuild(f, tuple(_relativize(k, guard, co_guard) for k in children(f)))


def _fresh_color(taken: set[str], base: str) -> str:
    name = base
    while name in taken:
        name += '_'
    taken.add(name)
    return name


def _graph_of(w: Witness | ColoredGraph | Graph) -> Graph:
    return _coloring(w).graph


# -- composition

def compose(T1: Transduction, T2: Transduction) -> Transduction:
    '''First T1, then T2; defined when T1's domain formula is top.'''
    clash = set(T1.colors) & set(T2.colors)
    if clash:
        raise PreconditionError(f'color signatures overlap: {sorted(clash)}')
    if not isinstance(T1.nu, Top):
        raise PreconditionError('composition needs a first transduction with total domain (nu = top)')
    cache: dict[tuple[str, str], Formula] = {}

    def leaf(a: Formula) -> Formula:
        if not isinstance(a, Edge):
            return a
        key = (a.x, a.y)
        if key not in cache:
            cache[key] = rename_free(T1.eta, {X: a.x, Y: a.y})
        return cache[key]

    return Transduction(T1.colors + T2.colors, transform(T2.nu, leaf), transform(T2.eta, leaf))


def compose_witness(w1: Witness, w2: Witness) -> Witness:
    G, H = w1.coloring.graph, w2.coloring.graph
    if H.vertices & ~G.vertices:
        raise PreconditionError('second witness colors vertices outside the input')
    return Witness(w1.coloring.with_colors(w2.coloring.color_map))


def compose_all(steps: Sequence[tuple[Transduction, Witness]]) -> tuple[Transduction, Witness]:
    T, w = steps[0]
    for T2, w2 in steps[1:]:
        T, w = compose(T, T2), compose_witness(w, w2)
    return T, w


# -- gluing and parallel application

def glue(T: Transduction, s: int) -> Transduction:
    '''One transduction producing the union of T applied to s vertex subsets.'''
    if s < 1:
        raise PreconditionError('s must be at least 1')
    taken = set(T.colors)
    inner = []
    for c in T.colors:
        for i in range(1, s + 1):
            taken.add(f'{c}_{i}')
    U = [_fresh_color(taken, f'U{i}') for i in range(1, s + 1)]
    Ubar = [_fresh_color(taken, f'NU{i}') for i in range(1, s + 1)]
    nu_std = _standardize(T.nu, (X, Y))
    eta_std = _standardize(T.eta, (X, Y))
    nus, etas = [], []
    for i in range(s):
        sub = {c: f'{c}_{i + 1}' for c in T.colors}

        def leaf(a: Formula, sub=sub) -> Formula:
            return Color(sub[a.name], a.x) if isinstance(a, Color) else a

        def guard(z: str, i=i) -> Formula:
            return Color(U[i], z)

        def co_guard(z: str, i=i) -> Formula:
            return Color(Ubar[i], z)

        nu_i = _relativize(transform(nu_std, leaf), guard, co_guard)
        eta_i = _relativize(transform(eta_std, leaf), guard, co_guard)
        nus.append(conj(Color(U[i], X), nu_i))
        # both endpoints must be in the piece's own domain
        etas.append(conj(Color(U[i], X), Color(U[i], Y), nu_i, rename_free(nu_i, {X: Y}), eta_i))
        inner.extend(sub.values())
    colors = tuple(U) + tuple(Ubar) + tuple(inner)
    return Transduction(colors, disj(*nus), disj(*etas))


def glue_witness(G: Graph, sets: Sequence[int | Iterable[int]], pieces: Sequence[Witness], T: Transduction) -> Witness:
    if len(sets) != len(pieces):
        raise PreconditionError('one witness per set is required')
    glued = glue(T, len(sets))
    U = glued.colors[:len(sets)]
    Ubar = glued.colors[len(sets):2 * len(sets)]
    colors: dict[str, int] = {}
    for i, (S, w) in enumerate(zip(sets, pieces)):
        m = as_mask(S)
        if w.coloring.graph != G.induced(m):
            raise PreconditionError(f'piece witness {i + 1} is not a coloring of G[U_{i + 1}]')
        colors[U[i]] = m
        colors[Ubar[i]] = G.vertices & ~m
        for c, cm in w.coloring.colors:
            colors[f'{c}_{i + 1}'] = cm
    return Witness(ColoredGraph.of(G, colors))


def same_component(x: str, z: str, d: int, avoid: Iterable[str] = ()) -> Formula:
    '''Some walk of length at most d joins x and z.'''
    return disj(*(dist_formula(j, x, z, avoid) for j in range(d + 1)))


def parallel(T: Transduction, d: int) -> Transduction:
    '''T applied to every component at once; valid when all components have diameter <= d.'''
    if not T.ep:
        raise PreconditionError('parallel application needs an EP transduction')
    nu = _standardize(T.nu, (X, Y))
    eta = _standardize(T.eta, (X, Y))
    avoid = all_var_names(nu) | all_var_names(eta) | {X, Y}

    def guard(z: str) -> Formula:
        return same_component(X, z, d, avoid)

    nu_p = nu if is_quantifier_free(nu) else _relativize(nu, guard)
    eta_p = conj(same_component(X, Y, d, avoid), _relativize(eta, guard))
    return Transduction(T.colors, nu_p, eta_p)


def check_diameters(G: Graph, d: int) -> None:
    for comp, diam in components_and_diameters(G):
        if diam > d:
            raise PreconditionError(f'component {sorted(comp)} has diameter {diam} > {d}')


def parallel_witness(G: Graph, pieces: Sequence[Witness], d: int) -> Witness:
    '''Merge per-component witnesses (one per component of G, any order).'''
    check_diameters(G, d)
    comps = {c for c, _ in components_and_diameters(G)}
    got = {w.coloring.graph.vertex_set for w in pieces}
    if got != comps or len(pieces) != len(comps):
        raise PreconditionError('need exactly one witness per connected component')
    colors: dict[str, int] = {}
    for w in pieces:
        if w.coloring.graph != G.induced(w.coloring.graph.vertices):
            raise PreconditionError('component witness is not a coloring of the induced component')
        for c, m in w.coloring.colors:
            colors[c] = colors.get(c, 0) | m
    return Witness(ColoredGraph.of(G, colors))


def choice(Ts: Sequence[Transduction]) -> tuple[Transduction, list[str], list[dict[str, str]]]:
    '''Selector sum: coloring a piece with S_j makes the result act as Ts[j] there.

    Colors of Ts[j] are renamed apart.  Returns the transduction, the selector
    names and the per-summand color renamings.  The domain is top when every
    summand's domain is top.
    '''
    taken: set[str] = set()
    maps = []
    for j, T in enumerate(Ts):
        maps.append({c: _fresh_color(taken, f'{c}_{j + 1}') for c in T.colors})
    selectors = [_fresh_color(taken, f'S{j + 1}') for j in range(len(Ts))]
    renamed = [rename_colors(T, m) for T, m in zip(Ts, maps)]
    if all(isinstance(T.nu, Top) for T in Ts):
        nu: Formula = TRUE
    else:
        nu = disj(*(conj(Color(s, X), T.nu) for s, T in zip(selectors, renamed)))
    eta = disj(*(conj(Color(s, X), Color(s, Y), T.eta) for s, T in zip(selectors, renamed)))
    colors = tuple(selectors) + tuple(c for m in maps for c in m.values())
    return Transduction(colors, nu, eta), selectors, maps


def choice_piece(w: Witness, j: int, selectors: Sequence[str], maps: Sequence[dict[str, str]]) -> Witness:
    '''Witness for summand j on one piece: renamed colors plus the selector over the piece.'''
    w2 = w.renamed(maps[j])
    G = w2.coloring.graph
    return Witness(w2.coloring.with_colors({selectors[j]: G.vertices}))


# -- flips and edits

def _pf_colors(k: int) -> tuple[list[str], list[str], list[str]]:
    return ([f'P{i}' for i in range(1, k + 1)], [f'T{i}' for i in range(1, k + 1)],
            [f'N{i}' for i in range(1, k + 1)])


def pure_flip_formula(k: int) -> Transduction:
    '''The recovery formula for pure flips with k parts.

    P_i marks part i; T_i marks vertices whose part is flipped with part i and
    fully adjacent to it in the target; N_i marks vertices whose part is not
    flipped with part i.  Loops come back through the first disjunct, flipped
    adjacent pairs through the T disjuncts, untouched pairs through the N ones.
    '''
    P, Tc, N = _pf_colors(k)
    alpha = conj(Eq(X, Y), Edge(X, Y))
    beta = [disj(conj(Color(Tc[i], X), Color(P[i], Y)), conj(Color(Tc[i], Y), Color(P[i], X))) for i in range(k)]
    gamma = conj(Edge(X, Y), disj(*(disj(conj(Color(N[i], X), Color(P[i], Y)), conj(Color(N[i], Y), Color(P[i], X)))
                                      for i in range(k))))
    return Transduction(tuple(P + Tc + N), TRUE, disj(alpha, *beta, gamma))


def pure_flip_transduction(G: Graph, spec: FlipSpec) -> tuple[Transduction, Witness]:
    '''A QF positive transduction that maps the colored flip of G back to G.'''
    if spec.partition.host != G.vertices:
        raise PreconditionError('partition does not cover the vertex set')
    if not is_pure_flip(G, spec):
        raise PreconditionError('the flip is not pure')
    parts = spec.partition.parts
    for a, b in spec.relation:
        if a == b and parts[a] & ~G.loops:
            raise PreconditionError(f'part {a} is flipped with itself but has loopless vertices')
    k = len(parts)
    H = flip(G, spec)
    P, Tc, N = _pf_colors(k)
    colors = {}
    for i in range(k):
        colors[P[i]] = parts[i]
        top = not_rel = 0
        for j in range(k):
            if not spec.related(i, j):
                not_rel |= parts[j]
            elif fully_adjacent(G, parts[i], parts[j]):
                # a singleton self-pair lands here too; its loop is guaranteed above
                top |= parts[j]
        colors[Tc[i]] = top
        colors[N[i]] = not_rel
    return pure_flip_formula(k), Witness(ColoredGraph.of(H, colors))


def vc_partition(G: Graph, X_edges: Iterable[tuple[int, int]], S: Iterable[int]) -> Partition:
    '''Common refinement of {s}, X-neighbours of s, rest, over the cover vertices s.'''
    Xs = [tuple(sorted(e)) for e in X_edges]
    parts = []
    for s in sorted(set(S)):
        nb = 0
        for u, v in Xs:
            if u == s:
                nb |= 1 << v
            elif v == s:
                nb |= 1 << u
        blocks = [1 << s, nb, G.vertices & ~(1 << s) & ~nb]
        parts.append(Partition(tuple(b for b in blocks if b)))
    return common_refinement(parts) if parts else Partition.whole(G.vertices)


def vc_edit(G: Graph, X_edges: Iterable[tuple[int, int]], S: Iterable[int], direction: str = 'remove') -> tuple[Transduction, Witness]:
    '''Remove or add an edge set X covered by S, as a pure-flip transduction.'''
    if direction not in ('remove', 'add'):
        raise PreconditionError(f'unknown direction {direction!r}')
    if not G.is_reflexive():
        raise PreconditionError('vertex-cover edits need a reflexive graph')
    Xs = sorted({(min(u, v), max(u, v)) for u, v in X_edges})
    S = set(S)
    for u, v in Xs:
        if u == v or not (G.vertices >> u & 1 and G.vertices >> v & 1):
            raise PreconditionError(f'bad edge ({u},{v})')
        if u not in S and v not in S:
            raise PreconditionError(f'edge ({u},{v}) is not covered by S')
        if direction == 'remove' and not G.has_edge(u, v):
            raise PreconditionError(f'edge ({u},{v}) is not in G')
        if direction == 'add' and G.has_edge(u, v):
            raise PreconditionError(f'edge ({u},{v}) is already in G')
    P = vc_partition(G, Xs, S)
    adj = list(G.adj)
    for u, v in Xs:
        adj[u] ^= 1 << v
        adj[v] ^= 1 << u
    target = Graph(G.n, tuple(adj), G.loops, G.vertices)
    rel = set()
    for u, v in Xs:
        for s, o in ((u, v), (v, u)):
            if s in S:
                rel.add((P.part_of(s), P.part_of(o)))
    # each related pair is a cover singleton against a part of its X-neighbours
    spec = FlipSpec(P, frozenset(rel))
    if flip(target, spec) != G:
        raise PreconditionError('internal: edit flip does not reproduce the input')
    return pure_flip_transduction(target, spec)


# -- growing a recovery by single vertices

def add_one(T: Transduction, b: int, names: tuple[str, str, str] | None = None) -> Transduction:
    '''Extend a QF positive T on an old vertex set A by one vertex b.

    psi(x,y) = (C_b(x) & N_b(y)) | (C_b(y) & N_b(x)) | (A(x) & A(y) & eta(x,y)).
    '''
    if not T.quantifier_free_positive:
        raise PreconditionError('add_one needs a quantifier-free positive transduction')
    if names is None:
        # numbered by step, not by vertex, so the formula does not depend on ids
        j = 1
        while {f'A{j}', f'C{j}', f'N{j}'} & set(T.colors):
            j += 1
        names = (f'A{j}', f'C{j}', f'N{j}')
    elif set(names) & set(T.colors) or len(set(names)) != 3:
        raise PreconditionError(f'color names {names} clash with the signature')
    A, C, N = names
    eta = disj(conj(Color(C, X), Color(N, Y)), conj(Color(C, Y), Color(N, X)), conj(Color(A, X), Color(A, Y), T.eta))
    nu = TRUE if isinstance(T.nu, Top) else disj(conj(Color(A, X), T.nu), Color(C, X))
    return Transduction(T.colors + names, nu, eta)


def add_one_witness(T1: Transduction, w: Witness, H: Graph, b: int, Nb: Iterable[int]) -> Witness:
    '''Witness on the whole input H for add_one(T, b): w colors the old part A.'''
    A, C, N = T1.colors[-3:]
    old = w.coloring.graph.vertices
    if old >> b & 1:
        raise PreconditionError(f'vertex {b} is already in the old part')
    nb = as_mask(Nb)
    if nb & ~(old | 1 << b):
        raise PreconditionError('target neighbourhood leaves the new vertex set')
    cg = ColoredGraph.of(H, dict(w.coloring.colors))
    return Witness(cg.with_colors({A: old, C: 1 << b, N: nb}))


def irreflexive_clique(G: Graph, t: int) -> tuple[int, ...] | None:
    '''An induced irreflexive K_t (t pairwise adjacent loopless vertices), if any.'''
    free = [v for v in G.vertex_list if not G.loops >> v & 1]

    def grow(chosen: list[int], cand: int) -> tuple[int, ...] | None:
        if len(chosen) == t:
            return tuple(chosen)
        for v in bits(cand):
            hit = grow(chosen + [v], cand & G.adj[v] & ~((1 << (v + 1)) - 1))
            if hit:
                return hit
        return None

    return grow([], as_mask(free)) if t > 0 else ()


def subflip_recover(G: Graph, P: Partition, t: int) -> tuple[Transduction, Witness]:
    '''A QF positive transduction mapping the colored subflip of G by P back to G.'''
    if irreflexive_clique(G, t) is not None:
        raise PreconditionError(f'G contains an induced irreflexive K_{t}')
    spec = max_flip_relation(G, P)
    H_full = flip(G, spec)
    parts = P.parts
    A = 0
    for a, b in spec.relation:
        if a == b:
            A |= parts[a] & ~G.loops
    B = G.vertices & ~A
    if B:
        GB = G.induced(B)
        T, wB = pure_flip_transduction(GB, spec.restrict(B))
    else:
        T, wB = pure_flip_formula(0), Witness(ColoredGraph(G.induced(0)))
    steps = [(T, wB)]
    done = B
    for a in bits(A):
        T = add_one(T, a)
        nb = G.adj[a] & (done | 1 << a) | (G.loops & 1 << a)
        w = add_one_witness(T, steps[-1][1], H_full.induced(done | 1 << a), a, nb)
        steps.append((T, w))
        done |= 1 << a
    T, w = steps[-1]
    return T, Witness(ColoredGraph.of(H_full, dict(w.coloring.colors)))
