'''Formula AST for first-order and monadic second-order logic on colored graphs.

Terms are variable names.  Individual variables and set variables live in
separate namespaces; colors are free unary predicates referenced by name.
'''

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

RESERVED = frozenset({'E', 'top', 'bot', 'exists', 'forall', 'existsS', 'forallS'})


class ScopeError(ValueError):
    pass


class Formula:
    __slots__ = ()

    def __and__(self, other: Formula) -> Formula:
        return conj(self, other)

    def __or__(self, other: Formula) -> Formula:
        return disj(self, other)

    def __invert__(self) -> Formula:
        return Not(self)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Edge(Formula):
    x: str
    y: str


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    x: str
    y: str


@dataclass(frozen=True, slots=True)
class Color(Formula):
    name: str
    x: str


@dataclass(frozen=True, slots=True)
class InSet(Formula):
    name: str
    x: str


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if len(self.args) < 2:
            raise ValueError('And needs at least two arguments; use conj()')


@dataclass(frozen=True, slots=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if len(self.args) < 2:
            raise ValueError('Or needs at least two arguments; use disj()')


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ForallSet(Formula):
    var: str
    body: Formula


TRUE = Top()
FALSE = Bot()
ATOMS = (Edge, Eq, Color, InSet, Top, Bot)
FO_QUANTIFIERS = (Exists, Forall)
SO_QUANTIFIERS = (ExistsSet, ForallSet)
QUANTIFIERS = FO_QUANTIFIERS + SO_QUANTIFIERS


def conj(*fs: Formula) -> Formula:
    '''Flattened conjunction; the empty conjunction is top.'''
    out: list[Formula] = []
    for f in fs:
        out.extend(f.args if isinstance(f, And) else (f,))
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(*fs: Formula) -> Formula:
    '''Flattened disjunction; the empty disjunction is bot.'''
    out: list[Formula] = []
    for f in fs:
        out.extend(f.args if isinstance(f, Or) else (f,))
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def exists_many(vs: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Exists(v, body)
    return body


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(f, And):
        return And(kids)
    if isinstance(f, Or):
        return Or(kids)
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, kids[0])
    return f


def atom_vars(f: Formula) -> tuple[str, ...]:
    if isinstance(f, (Edge, Eq)):
        return (f.x, f.y)
    if isinstance(f, (Color, InSet)):
        return (f.x,)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    '''Every node once per distinct object (shared subformulas are visited once).'''
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        stack.extend(children(g))


def _memo_map(f: Formula, fn: Callable[[Formula, tuple], object]) -> object:
    '''Post-order fold memoized on object identity, so shared DAGs stay linear.'''
    cache: dict[int, object] = {}
    keep: list[Formula] = []
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        g, done = stack.pop()
        if id(g) in cache:
            continue
        kids = children(g)
        if done:
            cache[id(g)] = fn(g, tuple(cache[id(k)] for k in kids))
            keep.append(g)
        else:
            stack.append((g, True))
            stack.extend((k, False) for k in kids if id(k) not in cache)
    return cache[id(f)]


def free_var_set(f: Formula) -> frozenset[str]:
    def step(g, kids):
        if isinstance(g, ATOMS):
            return frozenset(atom_vars(g))
        acc = frozenset().union(*kids)
        if isinstance(g, FO_QUANTIFIERS):
            return acc - {g.var}
        return acc
    return _memo_map(f, step)


def free_vars(f: Formula) -> tuple[str, ...]:
    '''Free individual variables in order of first occurrence.'''
    order: dict[str, None] = {}

    def go(g: Formula, bound: frozenset) -> None:
        if isinstance(g, ATOMS):
            for v in atom_vars(g):
                if v not in bound:
                    order.setdefault(v)
            return
        if isinstance(g, FO_QUANTIFIERS):
            bound = bound | {g.var}
        for k in children(g):
            go(k, bound)

    go(f, frozenset())
    return tuple(order)


def free_set_vars(f: Formula) -> frozenset[str]:
    def step(g, kids):
        if isinstance(g, InSet):
            return frozenset({g.name})
        acc = frozenset().union(*kids) if kids else frozenset()
        if isinstance(g, SO_QUANTIFIERS):
            return acc - {g.var}
        return acc
    return _memo_map(f, step)


def colors_used(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in walk(f) if isinstance(g, Color))


def all_var_names(f: Formula) -> frozenset[str]:
    names = set()
    for g in walk(f):
        names.update(atom_vars(g))
        if isinstance(g, QUANTIFIERS):
            names.add(g.var)
        if isinstance(g, InSet):
            names.add(g.name)
    return frozenset(names)


def qrank(f: Formula) -> int:
    def step(g, kids):
        base = max(kids, default=0)
        return base + 1 if isinstance(g, QUANTIFIERS) else base
    return _memo_map(f, step)


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, QUANTIFIERS) for g in walk(f))


def check_scope(f: Formula, free: Iterable[str] = (), free_sets: Iterable[str] = ()) -> None:
    '''Raise ScopeError if a variable occurs neither bound nor listed as free.'''
    extra = set(free_vars(f)) - set(free)
    if extra:
        raise ScopeError(f'unbound variable(s): {", ".join(sorted(extra))}')
    extra = free_set_vars(f) - set(free_sets)
    if extra:
        raise ScopeError(f'unbound set variable(s): {", ".join(sorted(extra))}')


def fresh_names(avoid: Iterable[str], prefix: str = 'v') -> Iterator[str]:
    taken = set(avoid)
    for i in itertools.count(1):
        name = f'{prefix}{i}'
        if name not in taken:
            taken.add(name)
            yield name


def transform(f: Formula, leaf: Callable[[Formula], Formula]) -> Formula:
    '''Replace every atom by ``leaf(atom)``; inner nodes are rebuilt only if a child changed.'''
    def step(g, kids):
        if isinstance(g, ATOMS):
            return leaf(g)
        if all(a is b for a, b in zip(kids, children(g))):
            return g
        return rebuild(g, kids)
    return _memo_map(f, step)


def rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    '''Capture-avoiding renaming of free individual variables.'''
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    targets = set(mapping.values())
    avoid = set(targets) | all_var_names(f)
    fresh = fresh_names(avoid, 'w')

    def go(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, ATOMS):
            vs = atom_vars(g)
            if not any(v in env for v in vs):
                return g
            if isinstance(g, (Edge, Eq)):
                return type(g)(env.get(g.x, g.x), env.get(g.y, g.y))
            return type(g)(g.name, env.get(g.x, g.x))
        if isinstance(g, FO_QUANTIFIERS):
            env = {k: v for k, v in env.items() if k != g.var}
            var = g.var
            if var in targets and env:
                new = next(fresh)
                env = dict(env)
                env[var] = new
                var = new
            if not env:
                return g
            body = go(g.body, env)
            return type(g)(var, body)
        kids = tuple(go(k, env) for k in children(g))
        if all(a is b for a, b in zip(kids, children(g))):
            return g
        return rebuild(g, kids)

    return go(f, mapping)


# -- rendering

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def _prec(f: Formula) -> int:
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, QUANTIFIERS):
        return 0
    return _PREC_UNARY


def render(f: Formula) -> str:
    '''Concrete syntax accepted by ``parse_formula``; parse(render(f)) == f.'''
    parts: list[str] = []

    def wrap(g: Formula, need: int) -> None:
        if _prec(g) < need:
            parts.append('(')
            go(g)
            parts.append(')')
        else:
            go(g)

    def go(g: Formula) -> None:
        if isinstance(g, Edge):
            parts.append(f'E({g.x},{g.y})')
        elif isinstance(g, Eq):
            parts.append(f'{g.x} = {g.y}')
        elif isinstance(g, (Color, InSet)):
            parts.append(f'{g.name}({g.x})')
        elif isinstance(g, Top):
            parts.append('top')
        elif isinstance(g, Bot):
            parts.append('bot')
        elif isinstance(g, Not):
            parts.append('~')
            wrap(g.arg, _PREC_UNARY)
        elif isinstance(g, (And, Or)):
            op, need = (' & ', _PREC_AND + 1) if isinstance(g, And) else (' | ', _PREC_OR + 1)
            for i, a in enumerate(g.args):
                if i:
                    parts.append(op)
                wrap(a, need)
        elif isinstance(g, QUANTIFIERS):
            kw = {Exists: 'exists', Forall: 'forall', ExistsSet: 'existsS', ForallSet: 'forallS'}[type(g)]
            parts.append(f'{kw} {g.var} ')
            go(g.body)
        else:
            raise TypeError(f'not a formula: {g!r}')

    go(f)
    return ''.join(parts)
