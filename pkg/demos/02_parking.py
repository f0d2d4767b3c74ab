"""Car parking: zones with capacities, one cost per car and zone."""
from optalg import INF, ParkingInstance, parse_term
from optalg.parking import (eval_parking_trace, format_subset_table, park_backtrack_trace, park_brute_force,
                            parallel_candidates)
from optalg.terms import render_term

zones = {"A": 2, "B": 2, "C": 2}
cars = ("x1", "x2", "x3")
costs = {("x1", "A"): 3, ("x1", "B"): INF, ("x1", "C"): INF,
         ("x2", "A"): 4, ("x2", "B"): 6, ("x2", "C"): INF,
         ("x3", "A"): INF, ("x3", "B"): 4, ("x3", "C"): 1}
inst = ParkingInstance(zones, cars, costs, parse_term("(x1)(x2)(x3)(A(x1,x2) || B(x2,x3) || C(x3))"))

trace = eval_parking_trace(inst)
print("evaluating", render_term(trace.term))
for path, (sub, table) in sorted(trace.tables.items(), key=lambda kv: -len(kv[0])):
    print(format_subset_table(table, f"== {render_term(sub)}"))
    print()

# where can x3 go at the inner parallel node?
for left, right, c in parallel_candidates(trace, (0, 1, 0), ["x3"]):
    print("B gets", sorted(left), "C gets", sorted(right), "->", c)

sol = park_backtrack_trace(trace)
print("total", sol.total)
for step in sol.steps:
    tail = "" if step.cost is None else f" (cost {step.cost})"
    print(f"  {step.car} into {step.where}{tail}")

best, argmin = park_brute_force(inst)
assert best == sol.total and sol.zone in argmin

# shrink zone A to one slot: x2 has to move to B
tight = ParkingInstance({**zones, "A": 1}, cars, costs, inst.term)
print("with |A| = 1:", park_backtrack_trace(eval_parking_trace(tight)).zone)
