"""Acceptance criteria 1-9, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v`` (or ``-s`` to see the lines as
they happen); a summary block lists one PASS/FAIL line per criterion.
"""
import io
import json
import random
import time

import pytest

import generators as gen
from conftest import record
from optalg import cli
from optalg.costeval import (INF, backtrack_optima, brute_force, brute_force_optima, eval_cost,
                             table_permute)
from optalg.forms import canonical_form, complexity, normal_form, scope_extension_redexes, scope_extension_step
from optalg.nhgraph import congruent_terms, eval_graph, graph_permute, isomorphic, support_graph
from optalg.parking import (Infeasible, eval_parking, eval_parking_term, eval_parking_trace, park_backtrack,
                            park_brute_force, park_brute_table, park_permute)
from optalg.terms import alpha_eq, apply_perm, free_names, parse_term, subterm
from optalg.treedec import heuristic_td, td_to_term, validate_td

TWO_FACTOR = {
    "domain": ["d1", "d2"],
    "constants": {
        "A": {"arity": 2, "rows": [["d1", "d1", 7], ["d1", "d2", 5], ["d2", "d1", "inf"], ["d2", "d2", 2]]},
        "B": {"arity": 2, "rows": [["d1", "d1", 9], ["d1", "d2", 1], ["d2", "d1", 6], ["d2", "d2", 13]]},
    },
    "term": "(x2)((x1)A(x1,x2) || (x3)B(x2,x3))",
}

PARKING = {
    "zones": {"A": 2, "B": 2, "C": 2},
    "cars": ["x1", "x2", "x3"],
    "costs": [["x1", "A", 3], ["x1", "B", "inf"], ["x1", "C", "inf"],
              ["x2", "A", 4], ["x2", "B", 6], ["x2", "C", "inf"],
              ["x3", "A", "inf"], ["x3", "B", 4], ["x3", "C", 1]],
    "term": "(x1)(x2)(x3)(A(x1,x2) || B(x2,x3) || C(x3))",
}


def run_cli(tmp_path, doc, *argv):
    f = tmp_path / "input.json"
    f.write_text(json.dumps(doc))
    out = io.StringIO()
    start = time.perf_counter()
    status = cli.main([argv[0], str(f), *argv[1:]], out=out)
    return status, json.loads(out.getvalue()), time.perf_counter() - start


def test_criterion_1_two_factor_reproduction(tmp_path):
    status, rep, elapsed = run_cli(tmp_path, TWO_FACTOR, "solve", "--all-optima", "--emit-tables", "--json")
    tables = {t["term"]: t["rows"] for t in rep["tables"]}
    expected = {
        "A(x1,x2)": [["d1", "d1", "7"], ["d1", "d2", "5"], ["d2", "d1", "inf"], ["d2", "d2", "2"]],
        "B(x2,x3)": [["d1", "d1", "9"], ["d1", "d2", "1"], ["d2", "d1", "6"], ["d2", "d2", "13"]],
        "(x1)A(x1,x2)": [["d1", "7"], ["d2", "2"]],
        "(x3)B(x2,x3)": [["d1", "1"], ["d2", "6"]],
        "(x1)A(x1,x2) || (x3)B(x2,x3)": [["d1", "8"], ["d2", "8"]],
        "(x2)((x1)A(x1,x2) || (x3)B(x2,x3))": [["8"]],
    }
    optima = {tuple(a[x] for x in ("x1", "x2", "x3")) for a in rep["optima"]}
    ok = (status == 0 and rep["optimum"] == "8" and len(rep["optima"]) == 2
          and optima == {("d1", "d1", "d2"), ("d2", "d2", "d1")} and tables == expected and elapsed < 1.0)
    record(1, ok, f"optimum {rep['optimum']}, optima {sorted(optima)}, {len(tables)} tables match, {elapsed:.3f} s")
    assert ok


def test_criterion_2_parking_reproduction(tmp_path):
    status, rep, elapsed = run_cli(tmp_path, PARKING, "park", "--emit-tables", "--json")

    def as_map(rows):
        return {frozenset(xs): c for xs, c in rows}

    tables = {t["term"]: as_map(t["rows"]) for t in rep["tables"]}
    splits = {t["term"]: t.get("splits") for t in rep["tables"]}
    s = frozenset
    expected = {
        # zone tables
        "A(x1,x2)": {s({"x1", "x2"}): "7", s({"x1"}): "3", s({"x2"}): "4", s(): "0"},
        # B entries follow the car costs: x2 costs 6 in B, x3 costs 4
        "B(x2,x3)": {s({"x2", "x3"}): "10", s({"x2"}): "6", s({"x3"}): "4", s(): "0"},
        "C(x3)": {s({"x3"}): "1", s(): "0"},
        # x1 parked below its binder
        "(x1)A(x1,x2)": {s({"x2"}): "7", s(): "3"},
        # inner sums, then the restricted costs
        "B(x2,x3) || C(x3)": {s({"x2", "x3"}): "7", s({"x2"}): "6", s({"x3"}): "1", s(): "0"},
        "(x3)(B(x2,x3) || C(x3))": {s({"x2"}): "7", s(): "1"},
        "(x1)A(x1,x2) || (x3)(B(x2,x3) || C(x3))": {s({"x2"}): "8", s(): "4"},
        # closed term
        "(x2)((x1)A(x1,x2) || (x3)(B(x2,x3) || C(x3)))": {s(): "8"},
    }
    cand_e = {c for xs, _, _, c in splits["B(x2,x3) || C(x3)"] if set(xs) == {"x2", "x3"}}
    cand_e0 = {c for xs, _, _, c in splits["B(x2,x3) || C(x3)"] if set(xs) == {"x3"}}
    cand_f = {(tuple(a), c) for xs, a, _, c in splits["(x1)A(x1,x2) || (x3)(B(x2,x3) || C(x3))"] if xs == ["x2"]}
    steps = [(c, w, k) for c, w, k in rep["steps"]]
    expected_steps = [
        ("x2", "(x1)A(x1,x2) || (x3)(B(x2,x3) || C(x3))", None),
        ("x2", "(x1)A(x1,x2)", None),
        ("x2", "A(x1,x2)", "4"),
        ("x1", "A(x1,x2)", "3"),
        ("x3", "B(x2,x3) || C(x3)", None),
        ("x3", "C(x3)", "1"),
    ]
    assignment = {x: (v["zone"], v["cost"]) for x, v in rep["assignment"].items()}
    ok = (status == 0 and rep["total"] == "8"
          and assignment == {"x1": ("A", "3"), "x2": ("A", "4"), "x3": ("C", "1")}
          and tables == expected and cand_e == {"10", "7"} and cand_e0 == {"4", "1"}
          and cand_f == {(("x2",), "8"), ((), "10")} and steps == expected_steps and elapsed < 1.0)
    record(2, ok, f"total {rep['total']}, assignment {assignment}, {len(tables)} tables match, {elapsed:.3f} s")
    assert ok


def test_criterion_3_complexity_figures():
    p = parse_term("(x2)((x1)A(x1,x2) || (x3)B(x2,x3))")
    n, c = normal_form(p), canonical_form(p)
    ok = (complexity(n) == 3 and complexity(c) == 2
          and alpha_eq(n, parse_term("(x1)(x2)(x3)(A(x1,x2) || B(x2,x3))"))
          and alpha_eq(c, parse_term("(x2)((x1)A(x1,x2) || (x3)B(x2,x3))")))
    record(3, ok, f"normal width {complexity(n)}, canonical width {complexity(c)}")
    assert ok


def _assignment_set(assignments):
    return {frozenset(a.items()) for a in assignments}


def test_criterion_4_pointwise_oracle():
    corpus = gen.cost_corpus(250, seed=4, ties=100)
    start = time.perf_counter()
    bad = []
    optima_checked = 0
    for i, inst in enumerate(corpus):
        t, b, d = inst.term, inst.binding, inst.domain
        table = eval_cost(t, b, d)
        oracle = brute_force(t, b, d)
        opt, argmin = brute_force_optima(t, b, d)
        found = backtrack_optima(t, b, d, cap=10**6)
        if table != oracle:
            bad.append((i, "table"))
        elif _assignment_set(a for a, _ in found) != _assignment_set(argmin):
            bad.append((i, "optima"))
        elif any(c != opt for _, c in found):
            bad.append((i, "optimum"))
        optima_checked += len(found)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    record(4, ok, f"{len(corpus)} instances, {optima_checked} optimal assignments, "
                  f"{len(bad)} mismatches, {elapsed:.2f} s")
    assert ok, bad[:5]


def test_criterion_5_parking_oracle():
    corpus = gen.parking_corpus(250, seed=5)
    start = time.perf_counter()
    bad = []
    feasible = 0
    for i, inst in enumerate(corpus):
        if eval_parking(inst) != park_brute_table(inst):
            bad.append((i, "table"))
            continue
        best, argmin = park_brute_force(inst)
        try:
            sol = park_backtrack(inst)
        except Infeasible:
            if best != INF or argmin:
                bad.append((i, "spurious infeasible"))
            continue
        feasible += 1
        if sol.total != best or sol.zone not in argmin:
            bad.append((i, "assignment"))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    record(5, ok, f"{len(corpus)} instances ({feasible} feasible), {len(bad)} mismatches, {elapsed:.2f} s")
    assert ok, bad[:5]


def test_criterion_6_congruence_soundness():
    rng = random.Random(6)
    per_schema = 60
    bad = []
    for schema in gen.SCHEMAS:
        for _ in range(per_schema):
            names = [f"x{i}" for i in range(rng.randint(2, 5))]
            sig = gen.random_signature(rng, len(names))
            lhs, rhs = gen.axiom_instance(rng, schema, sig, names)
            d = gen.random_domain(rng)
            b = gen.random_binding(rng, sig, d)
            zones = gen.random_zone_specs(rng, sig)
            if not isomorphic(eval_graph(lhs), eval_graph(rhs)):
                bad.append((schema, "graph"))
            elif eval_cost(lhs, b, d) != eval_cost(rhs, b, d):
                bad.append((schema, "cost"))
            elif eval_parking_term(lhs, zones).table != eval_parking_term(rhs, zones).table:
                bad.append((schema, "parking"))
    ok = not bad
    record(6, ok, f"{len(gen.SCHEMAS)} schemas x {per_schema} instances, {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_7_tree_decomposition_translation():
    corpus = gen.hypergraph_corpus(120, seed=7)
    bad = []
    rerooted = 0
    for i, g in enumerate(corpus):
        for strategy in ("min-degree", "min-fill"):
            td = heuristic_td(g, strategy)
            if validate_td(g, td):
                bad.append((i, strategy, "invalid td"))
                continue
            base = td_to_term(g, td)
            if not isomorphic(eval_graph(base), g):
                bad.append((i, strategy, "not isomorphic"))
            for root in td.nodes[1:]:
                rerooted += 1
                if not congruent_terms(td_to_term(g, td, root), base):
                    bad.append((i, strategy, f"root {root}"))
    ok = not bad
    record(7, ok, f"{len(corpus)} hypergraphs x 2 heuristics, {rerooted} re-rootings, {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_8_canonical_width_and_scope_extension():
    corpus = gen.cost_corpus(250, seed=4, ties=100) + gen.cost_corpus(100, seed=8, wild=True)
    rng = random.Random(8)
    worse, redexes, bound_bad = 0, 0, []
    for inst in corpus:
        n = normal_form(inst.term)
        if complexity(canonical_form(inst.term)) > complexity(n):
            worse += 1
        # a random scope-extension path from the normal form to termination
        t = n
        while True:
            found = list(scope_extension_redexes(t))
            if not found:
                break
            path = rng.choice(found)
            before, after = subterm(t, path), None
            t = scope_extension_step(t, path)
            after = subterm(t, path)
            redexes += 1
            if complexity(after) > complexity(before):
                bound_bad.append((inst.term, path))
    ok = worse == 0 and not bound_bad
    record(8, ok, f"{len(corpus)} terms, canonical wider in {worse}; {redexes} redexes, "
                  f"{len(bound_bad)} violate the scope-extension bound")
    assert ok


def test_criterion_9_nominal_properties():
    rng = random.Random(9)
    cost = gen.cost_corpus(250, seed=4, ties=100) + [gen.cost_instance(rng, wild=True, perm_percent=25) for _ in range(150)]
    parking = gen.parking_corpus(250, seed=5)
    failures = []
    extra = ["w0", "w1"]
    for inst in cost:
        t, b, d = inst.term, inst.binding, inst.domain
        fn = free_names(t)
        table = eval_cost(t, b, d)
        if not set(table.support) <= fn:
            failures.append("cost support")
        if not support_graph(eval_graph(t)) == fn:
            failures.append("graph support")
        # compactness: the table over its support agrees with the function on all of fn(t)
        full = brute_force(t, b, d)
        for vals, c in full.rows():
            if table(dict(zip(full.support, vals))) != c:
                failures.append("cost compactness")
        pi = gen.random_perm(rng, sorted(fn) + extra)
        moved = apply_perm(t, pi)
        if free_names(moved) != pi.apply_set(fn):
            failures.append("term equivariance")
        if eval_cost(moved, b, d) != table_permute(table, pi):
            failures.append("cost equivariance")
        if not isomorphic(eval_graph(moved), graph_permute(eval_graph(t), pi)):
            failures.append("graph equivariance")
        zones = gen.random_zone_specs(rng, inst.sig)
        trace = eval_parking_term(t, zones)
        if not set(trace.table.support) <= fn:
            failures.append("parking support")
        if eval_parking_term(moved, zones).table != park_permute(trace.table, pi):
            failures.append("parking equivariance")
    eq1_checks = 0
    for inst in parking:
        trace = eval_parking_trace(inst)
        if not set(trace.table.support) <= free_names(inst.term):
            failures.append("parking support")
        for _, tab in trace.tables.values():
            universe = list(tab.support) + extra + list(inst.cars)
            for _ in range(4):
                xs = {x for x in universe if rng.randint(0, 1)}
                eq1_checks += 1
                if tab(xs) != tab(xs & set(tab.support)):
                    failures.append("extension rule")
    ok = not failures
    record(9, ok, f"{len(cost)} cost terms, {len(parking)} parking instances, {eq1_checks} "
                  f"extension checks, {len(failures)} failures")
    assert ok, failures[:5]


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
