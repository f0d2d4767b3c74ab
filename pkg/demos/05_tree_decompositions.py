"""From a hypergraph and a tree decomposition to a term of matching width."""
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
import generators as gen  # noqa: E402

from optalg import (complexity, congruent_terms, eval_graph, heuristic_td, isomorphic, render_term,  # noqa: E402
                    td_to_term, td_width, validate_td)
from optalg.nhgraph import hypergraph  # noqa: E402
from optalg.treedec import TreeDecomposition, format_td  # noqa: E402

cycle = hypergraph([("E", ("a", "b")), ("E", ("b", "c")), ("E", ("c", "d")), ("E", ("d", "a"))])
td = TreeDecomposition({1: {"a", "b", "c"}, 2: {"a", "c", "d"}}, [(1, 2)])
print(validate_td(cycle, td) or "valid")
t = td_to_term(cycle, td)
print(render_term(t), "| td width", td_width(td)[0], "| term width", complexity(t))

# drop c from bag 2 and the edge c-d has nowhere to live
broken = TreeDecomposition({1: {"a", "b", "c"}, 2: {"a", "d"}}, [(1, 2)])
for v in validate_td(cycle, broken):
    print("violation", v.condition, v.witness)

# heuristic decompositions of random hypergraphs, re-rooted everywhere
rng = random.Random(7)
widths = {"min-degree": [], "min-fill": []}
for _ in range(50):
    g = gen.random_hypergraph(rng)
    for strategy, seen in widths.items():
        d = heuristic_td(g, strategy)
        assert validate_td(g, d) == []
        base = td_to_term(g, d)
        assert isomorphic(eval_graph(base), g)
        assert all(congruent_terms(td_to_term(g, d, r), base) for r in d.nodes)
        seen.append(td_width(d)[0])
for strategy, seen in widths.items():
    print(strategy, "mean width", sum(seen) / len(seen))
print(format_td(heuristic_td(cycle, "min-fill")))
