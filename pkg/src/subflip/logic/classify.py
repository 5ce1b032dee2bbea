'''Syntactic classification and the collapse of positive MSO to FO.'''

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .syntax import (
    ATOMS, Bot, ExistsSet, Forall, ForallSet, Formula, InSet, Not, SO_QUANTIFIERS, Top,
    check_scope, children, is_quantifier_free, qrank, rebuild, walk,
)


@dataclass(frozen=True)
class Classification:
    positive: bool
    existential: bool
    ep: bool
    qrank: int
    positive_in: frozenset[str]

    def as_dict(self) -> dict:
        return {'positive': self.positive, 'existential': self.existential, 'ep': self.ep,
                'qrank': self.qrank, 'positive_in': sorted(self.positive_in)}


def _set_polarities(f: Formula) -> dict[str, set[int]]:
    '''Set variable name -> parities of negation depth at its occurrences.'''
    out: dict[str, set[int]] = {}

    def go(g: Formula, neg: int) -> None:
        if isinstance(g, InSet):
            out.setdefault(g.name, set()).add(neg)
            return
        if isinstance(g, SO_QUANTIFIERS):
            out.setdefault(g.var, set())
        if isinstance(g, Not):
            neg ^= 1
        for k in children(g):
            go(k, neg)

    go(f, 0)
    return out


def is_positive_in(f: Formula, Y: str) -> bool:
    return 1 not in _set_polarities(f).get(Y, set())


def classify(f: Formula, free: Iterable[str] | None = None, free_sets: Iterable[str] | None = None) -> Classification:
    if free is not None or free_sets is not None:
        check_scope(f, free or (), free_sets or ())
    nodes = list(walk(f))
    positive = not any(isinstance(g, Not) for g in nodes)
    existential = not any(isinstance(g, (Forall, ForallSet)) for g in nodes) and all(
        is_quantifier_free(g.arg) for g in nodes if isinstance(g, Not))
    pol = _set_polarities(f)
    return Classification(positive, existential, positive and existential, qrank(f),
                          frozenset(Y for Y, ps in pol.items() if 1 not in ps))


class NotPositiveError(ValueError):
    pass


def _substitute_set(f: Formula, Y: str, value: Formula) -> Formula:
    '''Replace free atoms Y(t) by ``value`` (respecting inner rebinding of Y).'''
    if isinstance(f, InSet):
        return value if f.name == Y else f
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, SO_QUANTIFIERS) and f.var == Y:
        return f
    kids = tuple(_substitute_set(k, Y, value) for k in children(f))
    if all(a is b for a, b in zip(kids, children(f))):
        return f
    return rebuild(f, kids)


def mso_collapse(f: Formula) -> Formula:
    '''Eliminate every set quantifier whose body is positive in its variable.

    An existential set quantifier becomes its body with the set read as the
    whole vertex set (atoms replaced by top); a universal one reads the set as
    empty (atoms replaced by bot).  Inner quantifiers are eliminated first.
    '''
    if isinstance(f, ATOMS):
        return f
    kids = tuple(mso_collapse(k) for k in children(f))
    if isinstance(f, SO_QUANTIFIERS):
        body = kids[0]
        if not is_positive_in(body, f.var):
            raise NotPositiveError(f'body is not positive in {f.var}')
        return _substitute_set(body, f.var, Top() if isinstance(f, ExistsSet) else Bot())
    if all(a is b for a, b in zip(kids, children(f))):
        return f
    return rebuild(f, kids)
