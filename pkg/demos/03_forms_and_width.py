"""Normal and canonical forms, and how much they save on random terms."""
import random
import statistics
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
import generators as gen  # noqa: E402

from optalg import canonical_form, complexity, normal_form, render_term  # noqa: E402
from optalg.forms import scope_extension_redexes, scope_extension_step  # noqa: E402
from optalg.terms import parse_term  # noqa: E402

t = parse_term("(x1)(x2)(x3)(A(x1,x2) || B(x2,x3) || C(x3))")
print(render_term(t), complexity(t))

# one scope-extension step at a time
while True:
    paths = list(scope_extension_redexes(t))
    if not paths:
        break
    t = scope_extension_step(t, paths[0])
    print(" ->", render_term(t), complexity(t))
# the outer binders only move once restrictions are reordered, which the canonical form does
print("canonical:", render_term(canonical_form(t)))

# width saved over a seeded corpus of random terms
rng = random.Random(0)
saved = []
for _ in range(300):
    term = gen.wild_term(rng)[0]
    n, c = complexity(normal_form(term)), complexity(canonical_form(term))
    assert c <= n
    saved.append(n - c)
print("mean width saved", round(statistics.mean(saved), 2), "max", max(saved))
