"""Command-line front end.

    optalg normal FILE          normal form and its width
    optalg canon FILE           canonical form and its width
    optalg width FILE           width of the term as written
    optalg solve PROBLEM        min/+ evaluation and optimal assignments
    optalg park INSTANCE        parking evaluation and car assignment
    optalg graph FILE           NH-graph (or --hier tree) of a term
    optalg congruent F1 F2      structural congruence verdict
    optalg td GRAPH [TD]        tree decomposition -> term

Exit status is 0 for well-formed input (an infeasible problem is a result,
not a failure) and 1 otherwise.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import costeval, forms, nhgraph, parking, treedec
from .costeval import format_cost, format_cost_table
from .files import parse_parking, parse_problem, read_term
from .parking import format_subset_table
from .terms import render_term


def _read(path: str) -> tuple[str, str]:
    data = Path(path).read_bytes() if path != "-" else sys.stdin.buffer.read()
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


def _emit(out, args, report: dict, text_lines: list[str]) -> None:
    if args.json:
        out.write(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


def _form(term, which: str):
    if which == "canonical":
        return forms.canonical_form(term)
    if which == "normal":
        return forms.normal_form(term)
    return forms.rename_apart(term)


def cmd_forms(args, out) -> int:
    text, _ = _read(args.file)
    term, _ = read_term(text)
    if args.command == "normal":
        t = forms.normal_form(term)
    elif args.command == "canon":
        t = forms.canonical_form(term)
    else:
        t = forms.rename_apart(term)
    out.write(f"{render_term(t)}\nwidth {forms.complexity(t)}\n")
    return 0


def cmd_solve(args, out) -> int:
    text, digest = _read(args.file)
    prob = parse_problem(text)
    start = time.perf_counter()
    term = _form(prob.term, args.form)
    trace = costeval.eval_cost_trace(term, prob.binding, prob.domain)
    optima = costeval.backtrack_trace(trace, cap=args.cap if args.all_optima else 1)
    elapsed = time.perf_counter() - start
    optimum = trace.table.minimum()

    def show(a):
        return " ".join(f"{x}={a[x]}" for x in sorted(a))

    report = {
        "input_sha256": digest,
        "form": args.form,
        "term": render_term(term),
        "complexity": forms.complexity(term),
        "peak_support": trace.peak,
        "optimum": format_cost(optimum),
        "optima": [{x: a[x] for x in sorted(a)} for a, _ in optima],
    }
    lines = [f"input sha256 {digest}", f"form {args.form}", f"term {render_term(term)}",
             f"width {report['complexity']}", f"peak support {trace.peak}",
             f"optimum {'infeasible (inf)' if optimum == costeval.INF else format_cost(optimum)}"]
    label = "optima" if args.all_optima else "optimal assignment"
    if optima:
        lines.append(f"{label} ({len(optima)})" if args.all_optima else label)
        lines += ["  " + show(a) for a, _ in optima]
    if args.emit_tables:
        report["tables"] = []
        for u, table in trace.tables.values():
            report["tables"].append({
                "term": render_term(u), "support": list(table.support),
                "rows": [[*vals, format_cost(c)] for vals, c in table.rows()]})
            lines += ["", format_cost_table(table, f"== {render_term(u)}")]
    if args.timing:
        report["wall_time_s"] = elapsed
        lines.append(f"wall time {elapsed:.6f} s")
    _emit(out, args, report, lines)
    return 0


def cmd_park(args, out) -> int:
    text, digest = _read(args.file)
    inst = parse_parking(text)
    start = time.perf_counter()
    trace = parking.eval_parking_trace(inst, args.form)
    total = trace.table()
    solution = None
    if total != costeval.INF:
        solution = parking.park_backtrack_trace(trace)
    elapsed = time.perf_counter() - start
    report = {
        "input_sha256": digest,
        "form": args.form,
        "term": render_term(trace.term),
        "complexity": forms.complexity(trace.term),
        "peak_support": trace.peak,
        "total": format_cost(total),
    }
    lines = [f"input sha256 {digest}", f"form {args.form}", f"term {render_term(trace.term)}",
             f"width {report['complexity']}", f"peak support {trace.peak}"]
    if solution is None:
        lines.append("total infeasible (∞)")
        report["assignment"] = None
    else:
        lines.append(f"total {format_cost(total)}")
        report["assignment"] = {x: {"zone": solution.zone[x], "cost": format_cost(solution.cost[x])}
                                for x in sorted(solution.zone)}
        lines += [f"  {x} -> {solution.zone[x]} (cost {format_cost(solution.cost[x])})"
                  for x in sorted(solution.zone)]
        lines.append("trace")
        for s in solution.steps:
            if s.cost is None:
                lines.append(f"  {s.car} inside {s.where}")
            else:
                lines.append(f"  {s.car} inside {s.where} with cost {format_cost(s.cost)}")
        report["steps"] = [[s.car, s.where, None if s.cost is None else format_cost(s.cost)]
                           for s in solution.steps]
    if args.emit_tables:
        report["tables"] = []
        for path, (u, table) in trace.tables.items():
            block = {"term": render_term(u), "support": list(table.support),
                     "rows": [[sorted(xs), format_cost(c)] for xs, c in table.rows()]}
            lines += ["", format_subset_table(table, f"== {render_term(u)}")]
            if isinstance(u, parking.Par):
                block["splits"] = []
                lines.append("splits")
                for xs, _ in table.rows():
                    for left, right, c in parking.parallel_candidates(trace, path, xs):
                        block["splits"].append([sorted(xs), sorted(left), sorted(right), format_cost(c)])
                        lines.append(f"  {{{','.join(sorted(xs))}}}: "
                                     f"{{{','.join(sorted(left))}}} | {{{','.join(sorted(right))}}} "
                                     f"-> {format_cost(c)}")
            report["tables"].append(block)
    if args.timing:
        report["wall_time_s"] = elapsed
        lines.append(f"wall time {elapsed:.6f} s")
    _emit(out, args, report, lines)
    return 0


def cmd_graph(args, out) -> int:
    text, _ = _read(args.file)
    term, sig = read_term(text)
    if args.hier:
        out.write(nhgraph.format_hier(nhgraph.term_to_hier(forms.rename_apart(term))) + "\n")
    else:
        out.write(nhgraph.format_graph(nhgraph.eval_graph(term, sig)))
    return 0


def cmd_congruent(args, out) -> int:
    a, _ = read_term(_read(args.file1)[0])
    b, _ = read_term(_read(args.file2)[0])
    out.write("yes\n" if nhgraph.congruent_terms(a, b) else "no\n")
    return 0


def cmd_td(args, out) -> int:
    g = nhgraph.parse_graph(_read(args.graph)[0])
    if args.heuristic:
        td = treedec.heuristic_td(g, args.heuristic)
    elif args.td:
        td = treedec.parse_td(_read(args.td)[0])
    else:
        raise treedec.TDError("give a TD file or --heuristic")
    violations = treedec.validate_td(g, td)
    if violations:
        for v in violations:
            sys.stderr.write(f"violation ({v.condition}): {v.message}\n")
        return 1
    root = args.root
    if root is not None and root not in td.bags and root.isdigit() and int(root) in td.bags:
        root = int(root)
    term = treedec.td_to_term(g, td, root)
    width, bag = treedec.td_width(td)
    iso = nhgraph.isomorphic(nhgraph.eval_graph(term), g)
    if args.emit_td:
        out.write(treedec.format_td(td))
    out.write(f"{render_term(term)}\ntd width {width}\nmax bag {bag}\n"
              f"width {forms.complexity(term)}\nisomorphic {'yes' if iso else 'no'}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="optalg", description="Algebraic dynamic programming for optimization terms.")
    sub = p.add_subparsers(dest="command", required=True)

    for name, help_ in [("normal", "print the normal form"), ("canon", "print the canonical form"),
                        ("width", "print the width of the term as written")]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("file")
        s.set_defaults(func=cmd_forms)

    for name, func in [("solve", cmd_solve), ("park", cmd_park)]:
        s = sub.add_parser(name)
        s.add_argument("file")
        s.add_argument("--form", choices=["canonical", "normal", "as-is"], default="canonical")
        s.add_argument("--emit-tables", action="store_true")
        s.add_argument("--json", action="store_true", help="machine-readable report")
        s.add_argument("--timing", action="store_true", help="include wall time (not deterministic)")
        if name == "solve":
            s.add_argument("--all-optima", action="store_true")
            s.add_argument("--cap", type=int, default=1000)
        s.set_defaults(func=func)

    s = sub.add_parser("graph")
    s.add_argument("file")
    s.add_argument("--hier", action="store_true", help="print the hierarchical graph tree")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("congruent")
    s.add_argument("file1")
    s.add_argument("file2")
    s.set_defaults(func=cmd_congruent)

    s = sub.add_parser("td")
    s.add_argument("graph")
    s.add_argument("td", nargs="?")
    s.add_argument("--heuristic", choices=["min-degree", "min-fill"])
    s.add_argument("--root")
    s.add_argument("--emit-td", action="store_true")
    s.set_defaults(func=cmd_td)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
