'''First-order and monadic second-order logic on colored graphs.'''

from .classify import Classification, NotPositiveError, classify, is_positive_in, mso_collapse
from .evaluate import EvaluationError, TableEvaluator, evaluate, models, naive_satisfying, satisfying_assignments
from .nep import (
    NEPInstance, clique_family, co_matching_family, disjointify, half_graph_family, half_graph_search,
    nep_check, sunflower_tuples,
)
from .normal_form import NormalForm, NotEPError, clique_formula_check, ep_normal_form
from .parser import FormulaSyntaxError, dist_formula, parse_formula
from .syntax import (
    And, Bot, Color, Edge, Eq, Exists, ExistsSet, Forall, ForallSet, Formula, InSet, Not, Or, Top,
    conj, disj, free_vars, qrank, render,
)
