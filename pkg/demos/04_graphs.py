"""Terms as hypergraphs: isomorphism decides structural congruence."""
from optalg.nhgraph import congruent_terms, eval_graph, format_graph, format_hier, graph_to_term, term_to_hier
from optalg.terms import parse_term, render_term

nested = parse_term("(x2)((x1)A(x1,x2) || (x3)B(x2,x3))")
flat = parse_term("(x1)(x2)(x3)(B(x2,x3) || A(x1,x2))")

print(format_graph(eval_graph(nested)))
print(format_hier(term_to_hier(nested)))
print("back to a term:", render_term(graph_to_term(eval_graph(nested))))

print("congruent:", congruent_terms(nested, flat))
# swapping the attachment order of B is a different problem
print("congruent:", congruent_terms(nested, parse_term("(x1)(x2)(x3)(A(x1,x2) || B(x3,x2))")))
# a free name interfaces with the outside, a bound one does not
g = eval_graph(parse_term("(x2)A(x1,x2) || (x3)B(x1,x3)"))
print(format_graph(g))
