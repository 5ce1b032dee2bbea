'''Normal form of EP formulas as positive DNFs of clique formulas.

The construction recurses on the formula: atoms are single conjuncts,
conjunction distributes over the disjuncts, and an existential quantifier is
pushed into every disjunct, where the conjuncts not mentioning the quantified
variable are moved out of its scope and the remaining ones are bundled into
one new conjunct.
'''

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from ..graph import ColoredGraph, Graph, INF, distance_matrix
from .classify import classify
from .evaluate import TableEvaluator
from .syntax import (
    ATOMS, And, Bot, Exists, Formula, Or, Top, conj, disj, free_var_set, free_vars, qrank,
)


class NotEPError(ValueError):
    pass


@dataclass(frozen=True)
class Conjunct:
    formula: Formula
    vars: tuple[str, ...]


@dataclass(frozen=True)
class NormalForm:
    radius: int
    disjuncts: tuple[tuple[Conjunct, ...], ...]
    free: tuple[str, ...]

    def formula(self) -> Formula:
        return disj(*(conj(*(c.formula for c in d)) for d in self.disjuncts))

    def conjuncts(self) -> list[Conjunct]:
        return [c for d in self.disjuncts for c in d]


def _nf(f: Formula) -> list[list[Formula]]:
    if isinstance(f, Top):
        return [[]]
    if isinstance(f, Bot):
        return []
    if isinstance(f, ATOMS):
        return [[f]]
    if isinstance(f, Or):
        return [d for a in f.args for d in _nf(a)]
    if isinstance(f, And):
        out: list[list[Formula]] = [[]]
        for a in f.args:
            out = [d1 + d2 for d1 in out for d2 in _nf(a)]
        return out
    if isinstance(f, Exists):
        out = []
        for d in _nf(f.body):
            inside = [c for c in d if f.var in free_var_set(c)]
            outside = [c for c in d if f.var not in free_var_set(c)]
            if inside:
                outside.append(Exists(f.var, conj(*inside)))
            out.append(outside)
        return out
    raise NotEPError(f'{type(f).__name__} is not allowed in an EP formula')


def ep_normal_form(f: Formula) -> NormalForm:
    if not classify(f).ep:
        raise NotEPError('formula is not existential positive')
    free = free_vars(f)
    disjuncts = []
    for d in _nf(f):
        items = []
        for c in d:
            fv = free_var_set(c)
            items.append(Conjunct(c, tuple(v for v in free if v in fv)))
        disjuncts.append(tuple(items))
    return NormalForm(2 ** qrank(f), tuple(disjuncts), free)


def clique_formula_check(f: Formula, r: int | float, graphs: Iterable[ColoredGraph | Graph]) -> bool:
    '''True iff on every supplied graph each satisfying assignment is a distance-r clique.

    This is a spot check over the given graphs only; the clique property itself
    quantifies over all graphs.
    '''
    fv = free_vars(f)
    for G in graphs:
        cg = G if isinstance(G, ColoredGraph) else ColoredGraph(G)
        ev = TableEvaluator(cg)
        if len(fv) < 2:
            continue
        table = ev.table(f, fv)
        dist = distance_matrix(cg.graph)
        verts = ev.vertices
        far = np.array([[dist.get((u, v), INF) > r for v in verts] for u in verts], dtype=bool)
        for i, j in combinations(range(len(fv)), 2):
            # a satisfying assignment with coordinates i, j far apart violates the property
            hit = np.moveaxis(table, (i, j), (0, 1))
            pair_sat = hit.reshape(hit.shape[0], hit.shape[1], -1).any(axis=2)
            if (pair_sat & far).any():
                return False
    return True


def normal_form_report(nf: NormalForm) -> list[dict]:
    return [{'disjunct': i, 'conjunct': str(c.formula), 'vars': list(c.vars)}
            for i, d in enumerate(nf.disjuncts) for c in d]


def check_normal_form(f: Formula, graphs: Sequence[ColoredGraph | Graph]) -> bool:
    '''Semantic equivalence of f and its normal form on the given graphs.'''
    nf = ep_normal_form(f)
    g = nf.formula()
    fv = free_vars(f)
    for G in graphs:
        ev = TableEvaluator(G)
        if not np.array_equal(ev.table(f, fv), ev.table(g, fv)):
            return False
    return True
