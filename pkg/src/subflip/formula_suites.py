'''Fixed formula suites used by the verification battery and the tests.'''

from __future__ import annotations

from .logic.parser import parse_formula
from .logic.syntax import Formula

EP_SUITE_TEXT = (
    'E(x,y)',
    'E(x,y) | exists z (E(x,z) & E(z,y))',
    'exists y (E(x1,y) & C(x2))',
    'dist<=3(x,y)',
    'exists z (E(x,z) & E(y,z) & C(z))',
    '(E(x,y) | C(x)) & (E(y,z) | x = z)',
    'exists u (E(x,u) & exists v (E(u,v) & E(v,y) & C(v)))',
    'exists z (C(z) & (E(x,z) | E(y,z)))',
    'exists u exists v (E(u,v) & C(u) & E(x,u))',
    'x = y & C(x) | exists z (E(x,z) & E(z,z))',
    '(exists z (E(x,z) & C(z) | E(y,z) & z = x)) & C(y)',
    'exists a (E(x,a) & exists b (E(a,b) & exists c (E(b,c) & E(c,y))))',
)

MSO_SUITE_TEXT = (
    'existsS Y forall x Y(x)',
    'forallS Y (Y(x) | E(x,y))',
    'existsS Y (Y(x) & exists z (Y(z) & E(x,z)))',
    'forallS Y exists z (Y(z) | C(z))',
    'existsS Y forallS Z (Y(x) | Z(y) | E(x,y))',
    'forall x existsS Y (Y(x) & (E(x,y) | C(y)))',
    'existsS Y exists z (Y(z) & C(z) & E(z,x))',
    'forallS Y ((exists z (Y(z) & E(x,z))) | C(x))',
    'existsS Y ((forall z (Y(z) | E(x,z))) & exists w (Y(w) & C(w)))',
)


def ep_suite() -> list[Formula]:
    return [parse_formula(s) for s in EP_SUITE_TEXT]


def mso_suite() -> list[Formula]:
    return [parse_formula(s) for s in MSO_SUITE_TEXT]
