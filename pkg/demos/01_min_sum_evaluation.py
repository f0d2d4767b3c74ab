"""Min/+ evaluation of a two-factor problem, table by table."""
from optalg.costeval import Binding, backtrack_optima, brute_force, eval_cost_trace, format_cost_table
from optalg.forms import canonical_form, complexity, normal_form
from optalg.terms import parse_term, render_term

domain = ("d1", "d2")
binding = Binding.from_values(domain, {"A": [7, 5, "inf", 2], "B": [9, 1, 6, 13]})

flat = parse_term("(x1)(x2)(x3)(A(x1,x2) || B(x2,x3))")
nested = canonical_form(flat)
print("as written:", render_term(flat), " width", complexity(flat))
print("canonical: ", render_term(nested), " width", complexity(nested))

# every intermediate table, innermost first
trace = eval_cost_trace(nested, binding, domain)
for path, (sub, table) in sorted(trace.tables.items(), key=lambda kv: -len(kv[0])):
    print(format_cost_table(table, f"== {render_term(sub)}"))
    print()

print("peak support", trace.peak)

# both optimal assignments, recovered by backtracking
for assignment, cost in backtrack_optima(nested, binding, domain):
    print(assignment, "cost", cost)

# the enumeration oracle agrees
assert brute_force(flat, binding, domain) == trace.table
assert brute_force(normal_form(nested), binding, domain) == trace.table
