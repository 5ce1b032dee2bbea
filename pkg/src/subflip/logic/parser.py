'''Recursive-descent parser for the formula grammar.

    form := top | bot | E(id,id) | id = id | NAME(id) | ~form | form & form
          | form | form | exists id form | forall id form | existsS NAME form
          | forallS NAME form | dist<=INT(id,id) | (form)

Precedence is ~ over & over |, and quantifier bodies extend as far as
possible.  ``NAME(id)`` is a set atom when NAME is a set variable in scope and
a color atom otherwise.
'''

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .syntax import (
    RESERVED, Bot, Color, Edge, Eq, Exists, ExistsSet, Forall, ForallSet, Formula, InSet,
    Not, Top, And, Or, conj,
)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f'{message} at offset {offset}')
        self.offset = offset


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


_TOKEN = re.compile(r'\s*(?:(?P<dist>dist<=)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()~&|=,]))')


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip():
                raise FormulaSyntaxError(f'unexpected character {rest.strip()[0]!r}', pos + len(rest) - len(rest.lstrip()))
            break
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok('eof', '', len(text)))
    return toks


def dist_formula(r: int, x: str, y: str, avoid: Iterable[str] = ()) -> Formula:
    '''dist(x,y) <= r as the walk formula with r - 1 existential intermediates.'''
    if r < 0:
        raise ValueError('distance bound must be nonnegative')
    if r == 0:
        return Eq(x, y)
    taken = {x, y, *avoid}
    zs = []
    i = 1
    while len(zs) < r - 1:
        name = f'z{i}'
        if name not in taken:
            zs.append(name)
        i += 1
    chain = [x, *zs, y]
    body = conj(*(Edge(a, b) for a, b in zip(chain, chain[1:])))
    for z in reversed(zs):
        body = Exists(z, body)
    return body


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.sets: list[str] = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str) -> None:
        raise FormulaSyntaxError(msg, self.tok.pos)

    def take(self, kind: str, text: str | None = None) -> _Tok:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text else kind
            got = 'end of input' if t.kind == 'eof' else repr(t.text)
            self.fail(f'expected {want}, got {got}')
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def ident(self) -> str:
        t = self.take('name')
        if t.text in RESERVED:
            self.i -= 1
            self.fail(f'reserved word {t.text!r} used as a name')
        return t.text

    def form(self) -> Formula:
        args = [self.conjunction()]
        while self.at('sym', '|'):
            self.i += 1
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.at('sym', '&'):
            self.i += 1
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        t = self.tok
        if self.at('sym', '~'):
            self.i += 1
            return Not(self.unary())
        if self.at('sym', '('):
            self.i += 1
            f = self.form()
            self.take('sym', ')')
            return f
        if t.kind == 'dist':
            self.i += 1
            r = int(self.take('int').text)
            self.take('sym', '(')
            x = self.ident()
            self.take('sym', ',')
            y = self.ident()
            self.take('sym', ')')
            return dist_formula(r, x, y)
        if t.kind != 'name':
            self.fail('expected a formula, got ' + ('end of input' if t.kind == 'eof' else repr(t.text)))
        word = t.text
        if word == 'top':
            self.i += 1
            return Top()
        if word == 'bot':
            self.i += 1
            return Bot()
        if word in ('exists', 'forall'):
            self.i += 1
            v = self.ident()
            body = self.form()
            return (Exists if word == 'exists' else Forall)(v, body)
        if word in ('existsS', 'forallS'):
            self.i += 1
            v = self.ident()
            self.sets.append(v)
            try:
                body = self.form()
            finally:
                self.sets.pop()
            return (ExistsSet if word == 'existsS' else ForallSet)(v, body)
        if word == 'E' and self.toks[self.i + 1].text == '(':
            self.i += 2
            x = self.ident()
            self.take('sym', ',')
            y = self.ident()
            self.take('sym', ')')
            return Edge(x, y)
        name = self.ident()
        if self.at('sym', '('):
            self.i += 1
            x = self.ident()
            self.take('sym', ')')
            return InSet(name, x) if name in self.sets else Color(name, x)
        if self.at('sym', '='):
            self.i += 1
            return Eq(name, self.ident())
        self.fail('expected "(" or "=" after a name')
        raise AssertionError


def parse_formula(text: str, free: Sequence[str] | None = None, set_vars: Sequence[str] = ()) -> Formula:
    '''Parse ``text``; with ``free`` given, any other free variable is an error.'''
    p = _Parser(text)
    p.sets = list(set_vars)
    f = p.form()
    if not p.at('eof'):
        p.fail(f'unexpected {p.tok.text!r}')
    if free is not None:
        _check_bound(text, f, set(free))
    return f


def _check_bound(text: str, f: Formula, free: set[str]) -> None:
    from .syntax import free_vars

    extra = [v for v in free_vars(f) if v not in free]
    if extra:
        m = re.search(r'\b' + re.escape(extra[0]) + r'\b', text)
        raise FormulaSyntaxError(f'unbound variable {extra[0]!r}', m.start() if m else 0)
