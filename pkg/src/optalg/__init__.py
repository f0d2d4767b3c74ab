"""Optimization terms with restriction and parallel composition, solved by
dynamic programming over their structure."""
from .terms import (NIL, Atom, Nil, Par, ParseError, PermApp, Permutation, Restrict, Signature,
                    TermError, alpha_eq, apply_perm, free_names, parse_term, render_term)
from .forms import canonical_form, complexity, normal_form, scope_extension_step
from .nhgraph import NHGraph, congruent_terms, eval_graph, graph_to_term, isomorphic
from .treedec import TreeDecomposition, heuristic_td, td_to_term, td_width, validate_td
from .costeval import INF, Binding, CostTable, backtrack_optima, brute_force, eval_cost
from .parking import ParkingInstance, eval_parking, park_backtrack, park_brute_force

__all__ = [
    "NIL", "Atom", "Nil", "Par", "ParseError", "PermApp", "Permutation", "Restrict", "Signature",
    "TermError", "alpha_eq", "apply_perm", "free_names", "parse_term", "render_term",
    "canonical_form", "complexity", "normal_form", "scope_extension_step",
    "NHGraph", "congruent_terms", "eval_graph", "graph_to_term", "isomorphic",
    "TreeDecomposition", "heuristic_td", "td_to_term", "td_width", "validate_td",
    "INF", "Binding", "CostTable", "backtrack_optima", "brute_force", "eval_cost",
    "ParkingInstance", "eval_parking", "park_backtrack", "park_brute_force",
]
