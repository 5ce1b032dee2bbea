'''Model checking on colored graphs.

``evaluate`` is the textbook recursive semantics.  ``TableEvaluator``
computes, for each subformula, the boolean table of its satisfying
assignments over its free variables, memoized on node identity; blocks of
existential quantifiers over a conjunction are eliminated one variable at a
time so that walk formulas stay polynomial.  A color that the coloring does
not mention is read as empty.
'''

from __future__ import annotations

from itertools import product
from typing import Mapping, Sequence

import numpy as np

from ..graph import ColoredGraph, Graph, bits
from .syntax import (
    And, Bot, Color, Edge, Eq, Exists, ExistsSet, Forall, ForallSet, Formula, InSet, Not, Or,
    Top, free_vars,
)


class EvaluationError(ValueError):
    pass


def _as_colored(G: ColoredGraph | Graph) -> ColoredGraph:
    return G if isinstance(G, ColoredGraph) else ColoredGraph(G)


def evaluate(G: ColoredGraph | Graph, phi: Formula, assignment: Mapping[str, int] | None = None,
             set_assignment: Mapping[str, frozenset[int] | set[int]] | None = None) -> bool:
    cg = _as_colored(G)
    graph = cg.graph
    colors = {name: frozenset(bits(mask)) for name, mask in cg.colors}
    domain = graph.vertex_list
    subsets = None

    def all_subsets():
        nonlocal subsets
        if subsets is None:
            subsets = [frozenset(v for i, v in enumerate(domain) if code >> i & 1)
                       for code in range(1 << len(domain))]
        return subsets

    def val(var: str, env: Mapping[str, int]) -> int:
        try:
            return env[var]
        except KeyError:
            raise EvaluationError(f'unassigned variable {var!r}') from None

    def go(f: Formula, env: dict[str, int], senv: dict[str, frozenset]) -> bool:
        if isinstance(f, Edge):
            return graph.has_edge(val(f.x, env), val(f.y, env))
        if isinstance(f, Eq):
            return val(f.x, env) == val(f.y, env)
        if isinstance(f, Color):
            return val(f.x, env) in colors.get(f.name, ())
        if isinstance(f, InSet):
            if f.name not in senv:
                raise EvaluationError(f'unassigned set variable {f.name!r}')
            return val(f.x, env) in senv[f.name]
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Not):
            return not go(f.arg, env, senv)
        if isinstance(f, And):
            return all(go(a, env, senv) for a in f.args)
        if isinstance(f, Or):
            return any(go(a, env, senv) for a in f.args)
        if isinstance(f, Exists):
            return any(go(f.body, {**env, f.var: v}, senv) for v in domain)
        if isinstance(f, Forall):
            return all(go(f.body, {**env, f.var: v}, senv) for v in domain)
        if isinstance(f, ExistsSet):
            return any(go(f.body, env, {**senv, f.var: S}) for S in all_subsets())
        if isinstance(f, ForallSet):
            return all(go(f.body, env, {**senv, f.var: S}) for S in all_subsets())
        raise TypeError(f'not a formula: {f!r}')

    env = dict(assignment or {})
    for v in env.values():
        if not graph.vertices >> v & 1:
            raise EvaluationError(f'{v} is not a vertex')
    senv = {k: frozenset(s) for k, s in (set_assignment or {}).items()}
    return go(phi, env, senv)


class _Factor:
    __slots__ = ('vars', 'arr')

    def __init__(self, vars_: tuple[str, ...], arr: np.ndarray):
        self.vars = vars_
        self.arr = arr


def _expand(f: _Factor, target: tuple[str, ...]) -> np.ndarray:
    '''View of f's table broadcastable over the axes ``target``.'''
    order = sorted(range(len(f.vars)), key=lambda i: target.index(f.vars[i]))
    arr = np.transpose(f.arr, order) if order != list(range(len(order))) else f.arr
    present = {f.vars[i] for i in order}
    shape = []
    it = iter(arr.shape)
    for v in target:
        shape.append(next(it) if v in present else 1)
    return arr.reshape(shape)


def _union_vars(factors: Sequence[_Factor]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for f in factors:
        for v in f.vars:
            seen.setdefault(v)
    return tuple(sorted(seen))


def _combine(factors: Sequence[_Factor], op) -> _Factor:
    target = _union_vars(factors)
    out = _expand(factors[0], target)
    for f in factors[1:]:
        out = op(out, _expand(f, target))
    return _Factor(target, out)


class TableEvaluator:
    '''Satisfying-assignment tables for one colored graph.

    Tables are indexed by positions in ``vertex_list``.  One evaluator can be
    reused for many formulas and assignments on the same graph.
    '''

    def __init__(self, G: ColoredGraph | Graph):
        cg = _as_colored(G)
        self.cg = cg
        self.vertices = cg.graph.vertex_list
        self.index = {v: i for i, v in enumerate(self.vertices)}
        m = len(self.vertices)
        adj = np.zeros((m, m), dtype=bool)
        for i, u in enumerate(self.vertices):
            for j, v in enumerate(self.vertices):
                adj[i, j] = cg.graph.has_edge(u, v)
        self.adj = adj
        self.eye = np.eye(m, dtype=bool)
        self.colors = {}
        for name, mask in cg.colors:
            vec = np.zeros(m, dtype=bool)
            for v in bits(mask):
                vec[self.index[v]] = True
            self.colors[name] = vec
        self.empty = np.zeros(m, dtype=bool)
        self.memo: dict[tuple, _Factor] = {}
        self._keep: list[Formula] = []

    @property
    def m(self) -> int:
        return len(self.vertices)

    def _set_vec(self, S) -> np.ndarray:
        vec = np.zeros(self.m, dtype=bool)
        for v in S:
            vec[self.index[v]] = True
        return vec

    def factor(self, f: Formula, senv: tuple = ()) -> _Factor:
        key = (id(f), senv)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._compute(f, senv)
        self.memo[key] = out
        self._keep.append(f)
        return out

    def _compute(self, f: Formula, senv: tuple) -> _Factor:
        if isinstance(f, Edge):
            if f.x == f.y:
                return _Factor((f.x,), np.diagonal(self.adj).copy())
            return _Factor((f.x, f.y), self.adj)
        if isinstance(f, Eq):
            if f.x == f.y:
                return _Factor((), np.array(True))
            return _Factor((f.x, f.y), self.eye)
        if isinstance(f, Color):
            return _Factor((f.x,), self.colors.get(f.name, self.empty))
        if isinstance(f, InSet):
            env = dict(senv)
            if f.name not in env:
                raise EvaluationError(f'unassigned set variable {f.name!r}')
            return _Factor((f.x,), self._set_vec(env[f.name]))
        if isinstance(f, Top):
            return _Factor((), np.array(True))
        if isinstance(f, Bot):
            return _Factor((), np.array(False))
        if isinstance(f, Not):
            g = self.factor(f.arg, senv)
            return _Factor(g.vars, ~g.arr)
        if isinstance(f, And):
            return _combine([self.factor(a, senv) for a in f.args], np.logical_and)
        if isinstance(f, Or):
            return _combine([self.factor(a, senv) for a in f.args], np.logical_or)
        if isinstance(f, Exists):
            return self._exists_block(f, senv)
        if isinstance(f, Forall):
            g = self.factor(f.body, senv)
            return self._reduce(g, f.var, np.all)
        if isinstance(f, (ExistsSet, ForallSet)):
            acc = None
            for code in range(1 << self.m):
                S = frozenset(v for i, v in enumerate(self.vertices) if code >> i & 1)
                inner = tuple(sorted({**dict(senv), f.var: S}.items(), key=lambda kv: kv[0]))
                g = self.factor(f.body, inner)
                acc = g if acc is None else _combine(
                    [acc, g], np.logical_or if isinstance(f, ExistsSet) else np.logical_and)
            return acc
        raise TypeError(f'not a formula: {f!r}')

    def _reduce(self, g: _Factor, var: str, red) -> _Factor:
        if var not in g.vars:
            if self.m == 0:
                return _Factor((), np.array(red is np.all))
            return g
        ax = g.vars.index(var)
        return _Factor(g.vars[:ax] + g.vars[ax + 1:], red(g.arr, axis=ax))

    def _exists_block(self, f: Exists, senv: tuple) -> _Factor:
        block = []
        body: Formula = f
        while isinstance(body, Exists):
            block.append(body.var)
            body = body.body
        if not isinstance(body, And):
            g = self.factor(body, senv)
            for v in reversed(block):
                g = self._reduce(g, v, np.any)
            return g
        factors = [self.factor(a, senv) for a in body.args]
        # innermost binding wins when a name repeats; the outer copies bind nothing
        todo = list(dict.fromkeys(reversed(block)))
        if self.m == 0:
            return _Factor(_union_vars(factors), np.zeros((0,) * len(_union_vars(factors)), dtype=bool))
        while todo:
            # eliminate the variable whose merged factor is smallest
            best = min(todo, key=lambda v: len(_union_vars([g for g in factors if v in g.vars])))
            todo.remove(best)
            touching = [g for g in factors if best in g.vars]
            if not touching:
                continue
            rest = [g for g in factors if best not in g.vars]
            merged = _combine(touching, np.logical_and)
            factors = rest + [self._reduce(merged, best, np.any)]
        return _combine(factors, np.logical_and)

    def table(self, f: Formula, order: Sequence[str], set_assignment: Mapping | None = None) -> np.ndarray:
        '''Boolean array with one axis per variable of ``order`` (vertex-list positions).'''
        senv = tuple(sorted((k, frozenset(v)) for k, v in (set_assignment or {}).items()))
        g = self.factor(f, senv)
        missing = set(g.vars) - set(order)
        if missing:
            raise EvaluationError(f'unassigned variable(s) {sorted(missing)}')
        order = tuple(order)
        if len(set(order)) != len(order):
            raise EvaluationError('repeated variable in order')
        arr = _expand(g, order)
        return np.broadcast_to(arr, (self.m,) * len(order))

    def holds(self, f: Formula, assignment: Mapping[str, int], set_assignment: Mapping | None = None) -> bool:
        order = tuple(sorted(assignment))
        arr = self.table(f, order, set_assignment)
        return bool(arr[tuple(self.index[assignment[v]] for v in order)])

    def satisfying(self, f: Formula, order: Sequence[str] | None = None) -> set[tuple[int, ...]]:
        order = tuple(order if order is not None else free_vars(f))
        arr = self.table(f, order)
        return {tuple(self.vertices[i] for i in idx) for idx in zip(*np.nonzero(arr))} if order else (
            {()} if bool(arr) else set())


def models(G: ColoredGraph | Graph, phi: Formula, assignment: Mapping[str, int] | None = None,
           set_assignment: Mapping | None = None) -> bool:
    '''Same answer as ``evaluate`` through the table evaluator.'''
    return TableEvaluator(G).holds(phi, dict(assignment or {}), set_assignment)


def satisfying_assignments(G: ColoredGraph | Graph, phi: Formula, order: Sequence[str] | None = None) -> set[tuple[int, ...]]:
    return TableEvaluator(G).satisfying(phi, order)


def naive_satisfying(G: ColoredGraph | Graph, phi: Formula, order: Sequence[str] | None = None) -> set[tuple[int, ...]]:
    cg = _as_colored(G)
    order = tuple(order if order is not None else free_vars(phi))
    return {vals for vals in product(cg.graph.vertex_list, repeat=len(order))
            if evaluate(cg, phi, dict(zip(order, vals)))}
