"""Tree decompositions of hypergraphs and their translation to terms."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Mapping, NamedTuple

from .nhgraph import NHGraph, _vkey
from .terms import NAME_RE, Atom, Term, par, restrict

Node = Hashable


class TDError(ValueError):
    pass


class Violation(NamedTuple):
    condition: str  # "a", "b", "c" or "tree"
    witness: object
    message: str


@dataclass(frozen=True, eq=False)
class TreeDecomposition:
    bags: Mapping[Node, frozenset]
    arcs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bags", {n: frozenset(b) for n, b in dict(self.bags).items()})
        object.__setattr__(self, "arcs", tuple(tuple(a) for a in self.arcs))

    @property
    def nodes(self) -> list:
        return sorted(self.bags, key=_vkey)

    def neighbors(self) -> dict:
        adj: dict = {n: set() for n in self.bags}
        for a, b in self.arcs:
            if a not in adj or b not in adj:
                raise TDError(f"arc ({a}, {b}) references an unknown node")
            adj[a].add(b)
            adj[b].add(a)
        return adj


def _connected(nodes: set, adj: dict) -> bool:
    if not nodes:
        return True
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        n = stack.pop()
        for m in adj[n]:
            if m in nodes and m not in seen:
                seen.add(m)
                stack.append(m)
    return seen == nodes


def validate_td(g: NHGraph, td: TreeDecomposition) -> list[Violation]:
    """Check the tree shape and conditions (a), (b), (c); empty list if valid."""
    for n, bag in td.bags.items():
        dangling = bag - g.vertices
        if dangling:
            raise TDError(f"bag of node {n} references unknown vertices {sorted(dangling, key=_vkey)}")
    adj = td.neighbors()
    out = []
    if not td.bags:
        out.append(Violation("tree", None, "decomposition has no nodes"))
    else:
        if len({frozenset(a) for a in td.arcs}) != len(td.bags) - 1 or not _connected(set(td.bags), adj):
            out.append(Violation("tree", None, "nodes and arcs do not form a tree"))
    covered = set().union(*td.bags.values()) if td.bags else set()
    for v in sorted(g.vertices - covered, key=_vkey):
        out.append(Violation("a", v, f"vertex {v} is in no bag"))
    for e in g.edges:
        if not any(set(e.attach) <= bag for bag in td.bags.values()):
            out.append(Violation("b", e.id, f"no bag covers edge {e.label}({','.join(map(str, e.attach))})"))
    for v in sorted(covered, key=_vkey):
        holders = {n for n, bag in td.bags.items() if v in bag}
        if not _connected(holders, adj):
            out.append(Violation("c", v, f"nodes holding {v} do not induce a subtree"))
    return out


def td_width(td: TreeDecomposition) -> tuple[int, int]:
    """``(width, max bag size)``; width is max bag size minus one."""
    if not td.bags:
        raise TDError("empty decomposition")
    m = max(len(b) for b in td.bags.values())
    return m - 1, m


def vertex_names(g: NHGraph) -> dict:
    """Deterministic, distinct term names for the vertices of ``g``."""
    names = {}
    used = set()
    for v in g.sorted_vertices():
        s = str(v)
        x = s if NAME_RE.match(s) and s != "nil" and not s.startswith("_g") else None
        if x is None or x in used:
            x = "v" + re.sub(r"\W", "_", s)
            while x in used:
                x += "_"
        used.add(x)
        names[v] = x
    return names


def td_to_term(g: NHGraph, td: TreeDecomposition, root: Node | None = None) -> Term:
    """Term induced by a visit of the decomposition from ``root``.

    Every vertex is restricted at the highest node whose bag holds it; each
    edge is emitted once, at the first visited node whose bag covers it.
    """
    if g.naming:
        raise TDError("tree decompositions are translated for graphs with empty interface")
    violations = validate_td(g, td)
    if violations:
        raise TDError("invalid tree decomposition: " + "; ".join(v.message for v in violations))
    adj = td.neighbors()
    if root is None:
        root = td.nodes[0]
    if root not in td.bags:
        raise TDError(f"unknown root {root}")
    names = vertex_names(g)
    edges = sorted(g.edges, key=lambda e: e.id)
    emitted: set = set()

    def visit(n, parent, introduced: frozenset) -> Term:
        new = sorted(td.bags[n] - introduced, key=_vkey)
        here = introduced | td.bags[n]
        factors = []
        for e in edges:
            if e.id not in emitted and set(e.attach) <= td.bags[n]:
                emitted.add(e.id)
                factors.append(Atom(e.label, tuple(names[v] for v in e.attach)))
        for m in sorted(adj[n] - {parent}, key=_vkey):
            factors.append(visit(m, n, here))
        return restrict([names[v] for v in new], par(*factors))

    return visit(root, None, frozenset())


def primal_graph(g: NHGraph) -> dict:
    adj = {v: set() for v in g.vertices}
    for e in g.edges:
        for u in e.attach:
            adj[u].update(w for w in e.attach if w != u)
    return adj


def elimination_order(g: NHGraph, strategy: str = "min-degree") -> list:
    if strategy not in ("min-degree", "min-fill"):
        raise ValueError(f"unknown strategy {strategy!r}")
    adj = primal_graph(g)
    order = []

    def fill(v):
        nb = sorted(adj[v], key=_vkey)
        return sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b not in adj[a])

    while adj:
        cost = (lambda v: len(adj[v])) if strategy == "min-degree" else fill
        v = min(adj, key=lambda u: (cost(u), _vkey(u)))
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a].update(nb - {a})
        order.append(v)
    return order


def heuristic_td(g: NHGraph, strategy: str = "min-degree") -> TreeDecomposition:
    """Decomposition from a greedy elimination order on the primal graph."""
    if not g.vertices:
        raise TDError("graph has no vertices")
    order = elimination_order(g, strategy)
    pos = {v: i for i, v in enumerate(order)}
    adj = primal_graph(g)
    bags = {}
    parent = {}
    for i, v in enumerate(order):
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a].update(nb - {a})
        bags[i] = frozenset(nb | {v})
        if nb:
            parent[i] = min(pos[a] for a in nb)
    # join the trees of disconnected components
    roots = [i for i in bags if i not in parent]
    for r in roots[:-1]:
        parent[r] = roots[-1]
    adj: dict = {i: set() for i in bags}
    for c, p in parent.items():
        adj[c].add(p)
        adj[p].add(c)
    # contract arcs whose one bag is contained in the other
    changed = True
    while changed:
        changed = False
        for a in sorted(adj):
            b = next((b for b in sorted(adj[a]) if bags[a] <= bags[b]), None)
            if b is not None:
                for c in adj.pop(a):
                    adj[c].discard(a)
                    if c != b:
                        adj[c].add(b)
                        adj[b].add(c)
                del bags[a]
                changed = True
                break
    ids = {n: k for k, n in enumerate(sorted(bags))}
    arcs = sorted({tuple(sorted((ids[a], ids[b]))) for a in adj for b in adj[a]})
    return TreeDecomposition({ids[n]: b for n, b in bags.items()}, tuple(arcs))


# --------------------------------------------------------------------------
# Text format:  "node <id>: v1 v2 ..."  and  "arc <id> <id>"

def format_td(td: TreeDecomposition) -> str:
    lines = [f"node {n}: " + " ".join(str(v) for v in sorted(td.bags[n], key=_vkey)) for n in td.nodes]
    lines += [f"arc {a} {b}" for a, b in td.arcs]
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    bags: dict = {}
    arcs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("node "):
            head, sep, rest = line[5:].partition(":")
            if not sep:
                raise TDError(f"line {lineno}: expected 'node <id>: vertices'")
            n = head.strip()
            if n in bags:
                raise TDError(f"line {lineno}: duplicate node {n}")
            bags[n] = frozenset(rest.split())
        elif line.startswith("arc "):
            parts = line[4:].split()
            if len(parts) != 2:
                raise TDError(f"line {lineno}: expected 'arc <id> <id>'")
            arcs.append(tuple(parts))
        else:
            raise TDError(f"line {lineno}: cannot parse {raw!r}")
    return TreeDecomposition(bags, tuple(arcs))
