import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import generators as gen
from optalg.costeval import INF
from optalg.forms import complexity
from optalg.parking import (NIL_TABLE, Infeasible, ParkingError, ParkingInstance, Step, SubsetTable, ZoneSpec,
                            eval_parking, eval_parking_term, eval_parking_trace, format_subset_table,
                            park_atom, park_backtrack, park_brute_force, park_brute_table, park_parallel,
                            park_permute, park_restrict, parallel_candidates, zone_table)
from optalg.terms import Permutation, parse_term

ZONES = {"A": 2, "B": 2, "C": 2}
CARS = ("x1", "x2", "x3")
COSTS = {("x1", "A"): 3, ("x1", "B"): INF, ("x1", "C"): INF,
         ("x2", "A"): 4, ("x2", "B"): 6, ("x2", "C"): INF,
         ("x3", "A"): INF, ("x3", "B"): 4, ("x3", "C"): 1}
TERM = "(x1)(x2)(x3)(A(x1,x2) || B(x2,x3) || C(x3))"


def instance(term=TERM, zones=ZONES, costs=COSTS, cars=CARS):
    return ParkingInstance(zones, cars, costs, parse_term(term))


def as_map(t):
    return {tuple(sorted(xs)): c for xs, c in t.rows()}


@st.composite
def parking_instances(draw):
    return gen.parking_instance(gen.Drawer(draw))


def test_zone_tables():
    inst = instance()
    assert as_map(park_atom("A", ("x1", "x2"), inst)) == {(): 0, ("x1",): 3, ("x2",): 4, ("x1", "x2"): 7}
    assert as_map(park_atom("B", ("x2", "x3"), inst)) == {(): 0, ("x2",): 6, ("x3",): 4, ("x2", "x3"): 10}
    assert as_map(park_atom("C", ("x3",), inst)) == {(): 0, ("x3",): 1}


def test_capacity_bound():
    t = zone_table(("a", "b", "c"), ZoneSpec(1, (1, 2, 3)))
    assert t({"a"}) == 1 and t({"a", "b"}) == INF and t() == 0
    assert zone_table(("a",), ZoneSpec(0, (5,)))({"a"}) == INF
    with pytest.raises(ParkingError):
        zone_table(("a", "a"), ZoneSpec(2, (1, 1)))
    with pytest.raises(ParkingError):
        zone_table(("a",), ZoneSpec(2, (1, 1)))


def test_parallel_chooses_cheaper_side():
    a = zone_table(("x",), ZoneSpec(1, (5,)))
    b = zone_table(("x", "y"), ZoneSpec(1, (2, 1)))
    t = park_parallel(a, b)
    assert as_map(t) == {(): 0, ("x",): 2, ("y",): 1, ("x", "y"): 6}
    assert park_parallel(a, NIL_TABLE) == a


def test_restrict_parks_the_car():
    b = zone_table(("x", "y"), ZoneSpec(1, (2, 1)))
    r = park_restrict(b, "x")
    assert r.support == ("y",) and as_map(r) == {(): 2, ("y",): INF}
    assert park_restrict(b, "zz") == b


def test_permute_renames_cars():
    b = zone_table(("x", "y"), ZoneSpec(2, (2, 1)))
    s = park_permute(b, Permutation.swap("x", "y"))
    assert as_map(s) == {(): 0, ("x",): 1, ("y",): 2, ("x", "y"): 3}
    assert park_permute(s, Permutation.swap("x", "y")) == b


def test_subset_table_checks():
    with pytest.raises(ParkingError):
        SubsetTable(("b", "a"), (0, 0, 0, 0))
    with pytest.raises(ParkingError):
        SubsetTable(("a",), (0,))


def test_worked_instance_optimum():
    inst = instance()
    for form in ("canonical", "normal", "as-is"):
        assert as_map(eval_parking(inst, form)) == {(): 8}
    sol = park_backtrack(inst)
    assert sol.total == 8
    assert sol.zone == {"x1": "A", "x2": "A", "x3": "C"}
    assert sol.cost == {"x1": 3, "x2": 4, "x3": 1}
    assert park_brute_force(inst) == (8, [{"x1": "A", "x2": "A", "x3": "C"}])


def test_worked_instance_inner_tables():
    trace = eval_parking_trace(instance())
    assert complexity(trace.term) == 2
    assert as_map(trace.tables[0, 1, 0, 0][1]) == {(): 0, ("x2",): 6, ("x3",): 4, ("x2", "x3"): 10}
    assert as_map(trace.tables[0, 1][1]) == {(): 1, ("x2",): 7}
    assert as_map(trace.tables[(0,)][1]) == {(): 4, ("x2",): 8}


def test_step_log():
    sol = park_backtrack(instance())
    assert sol.steps == [
        Step("x2", "(x1)A(x1,x2) || (x3)(B(x2,x3) || C(x3))", None),
        Step("x2", "(x1)A(x1,x2)", None),
        Step("x2", "A(x1,x2)", Fraction(4)),
        Step("x1", "A(x1,x2)", Fraction(3)),
        Step("x3", "B(x2,x3) || C(x3)", None),
        Step("x3", "C(x3)", Fraction(1)),
    ]


def test_parallel_candidates():
    trace = eval_parking_trace(instance())
    par = (0, 1, 0)  # B(x2,x3) || C(x3)
    got = {(tuple(sorted(a)), tuple(sorted(b))): c for a, b, c in parallel_candidates(trace, par, ["x3"])}
    assert got == {(("x3",), ()): 4, ((), ("x3",)): 1}
    with pytest.raises(ParkingError):
        parallel_candidates(trace, (), [])


def test_infeasible():
    costs = {k: INF for k in COSTS}
    inst = instance(costs=costs)
    with pytest.raises(Infeasible):
        park_backtrack(inst)
    assert park_brute_force(inst) == (INF, [])
    tight = instance(zones={"A": 0, "B": 0, "C": 0})
    assert as_map(eval_parking(tight)) == {(): INF}


def test_capacity_forces_second_choice():
    inst = instance(zones={"A": 1, "B": 2, "C": 2})
    sol = park_backtrack(inst)
    assert sol.zone == {"x1": "A", "x2": "B", "x3": "C"} and sol.total == 10


def test_open_instance():
    inst = instance(term="(x1)(x3)(A(x1,x2) || B(x2,x3) || C(x3))")
    table = eval_parking(inst)
    assert as_map(table) == {(): 4, ("x2",): 8}
    assert table == park_brute_table(inst)


@pytest.mark.parametrize("kw, term", [
    ({"zones": {"A": 2}}, TERM),
    ({"cars": ("x1", "x2")}, TERM),
    ({"costs": {k: v for k, v in COSTS.items() if k != ("x3", "C")}}, TERM),
    ({}, "((x1)(x2)(x3)(A(x1,x2) || B(x2,x3) || C(x3)))[x1:x2, x2:x1]"),
    ({}, "(x1)(x2)(x3)(A(x1,x2) || B(x2,x3)) || C(x3)"),
    ({}, "(x1)(x2)(x3)(A(x1,x2) || (x3)B(x2,x3) || C(x3))"),
    ({}, "(x1)(x2)(x3)(A(x1,x2) || B(x2,x3) || A(x3,x1))"),
    ({"zones": {"A": -1, "B": 2, "C": 2}}, TERM),
    ({"cars": ("x1", "x2", "x3", "x1")}, TERM),
])
def test_instance_validation(kw, term):
    with pytest.raises(ParkingError):
        instance(term=term, **kw)


def test_brute_force_guard():
    cars = tuple(f"c{i}" for i in range(11))
    inst = ParkingInstance({"A": 11}, cars, {(c, "A"): 1 for c in cars},
                           parse_term("".join(f"({c})" for c in cars) + f"A({','.join(cars)})"))
    with pytest.raises(ParkingError):
        park_brute_force(inst)


def test_format():
    text = format_subset_table(zone_table(("x",), ZoneSpec(1, (2,))), "== C(x)")
    assert text.splitlines() == ["== C(x)", "x  cost", "-------", "✓  2", "-  0"]


def test_direct_term_evaluation():
    t = parse_term("(a)(P(a,b) || Q(a))")
    tab = eval_parking_term(t, {"P": ZoneSpec(1, (2, 3)), "Q": ZoneSpec(1, (1,))})
    assert as_map(tab.table) == {(): 1, ("b",): 4}


def test_seeded_corpus_agrees_on_forms():
    rng = random.Random(21)
    for _ in range(60):
        inst = gen.parking_instance(rng)
        assert eval_parking(inst, "normal") == eval_parking(inst, "canonical") == eval_parking(inst, "as-is")


@settings(max_examples=200)
@given(parking_instances())
def test_oracle_equivalence(inst):
    assert eval_parking(inst) == park_brute_table(inst)
    best, argmin = park_brute_force(inst)
    try:
        sol = park_backtrack(inst)
    except Infeasible:
        assert best == INF
        return
    assert sol.total == best and sol.zone in argmin
    assert sum(sol.cost.values()) == best
    load = {}
    for z in sol.zone.values():
        load[z] = load.get(z, 0) + 1
    assert all(n <= inst.zones[z] for z, n in load.items())
    assert all(inst.costs[x, z] == sol.cost[x] for x, z in sol.zone.items())
