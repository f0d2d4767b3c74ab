"""Labeled nominal hypergraphs (NH-graphs) and hierarchical NH-graphs.

An NH-graph is a labeled hypergraph without isolated vertices plus a
partial injective naming of its vertices; the named vertices form its
interface.  Vertex ids carry no meaning, so graphs are compared with
:func:`isomorphic` only.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

from .terms import (
    Atom, FreshNames, Name, Nil, Par, PermApp, Permutation, Restrict, Term,
    TermError, check_name, free_names, has_permapp, par, restrict,
)

Vertex = Hashable


class GraphError(ValueError):
    pass


class Edge(NamedTuple):
    id: int
    label: str
    attach: tuple


def _vkey(v):
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


@dataclass(frozen=True, eq=False)
class NHGraph:
    vertices: frozenset = frozenset()
    edges: tuple = ()
    naming: Mapping[Vertex, Name] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        object.__setattr__(self, "naming", dict(self.naming))
        attached = set()
        for e in self.edges:
            if len(set(e.attach)) != len(e.attach):
                raise GraphError(f"edge {e.label}{e.attach} repeats a vertex")
            attached.update(e.attach)
        if not attached <= self.vertices:
            raise GraphError(f"edges attach unknown vertices {sorted(attached - self.vertices, key=_vkey)}")
        if attached != self.vertices:
            raise GraphError(f"isolated vertices {sorted(self.vertices - attached, key=_vkey)}")
        if not set(self.naming) <= self.vertices:
            raise GraphError("naming defined on unknown vertices")
        if len(set(self.naming.values())) != len(self.naming):
            raise GraphError("naming is not injective")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise GraphError("duplicate edge ids")

    @property
    def interface(self) -> frozenset:
        return frozenset(self.naming.values())

    def sorted_vertices(self) -> list:
        return sorted(self.vertices, key=_vkey)

    def vertex_of(self, x: Name):
        for v, y in self.naming.items():
            if y == x:
                return v
        return None

    def __repr__(self):
        return f"NHGraph({format_graph(self)!r})"


EMPTY = NHGraph()


def graph_atom(label: str, names: Sequence[Name], sig: Mapping[str, int] | None = None) -> NHGraph:
    names = tuple(names)
    if sig is not None and sig.get(label) != len(names):
        raise GraphError(f"arity mismatch for {label}")
    if len(set(names)) != len(names):
        raise GraphError(f"repeated name in {label}{names}")
    n = len(names)
    if n == 0:
        return NHGraph(frozenset(), (Edge(0, label, ()),), {})
    return NHGraph(frozenset(range(n)), (Edge(0, label, tuple(range(n))),),
                   {i: x for i, x in enumerate(names)})


def graph_parallel(g1: NHGraph, g2: NHGraph) -> NHGraph:
    """Disjoint union, then identify vertices carrying the same name."""
    m1 = {v: i for i, v in enumerate(g1.sorted_vertices())}
    by_name = {x: m1[v] for v, x in g1.naming.items()}
    m2 = {}
    nxt = len(m1)
    for v in g2.sorted_vertices():
        x = g2.naming.get(v)
        if x is not None and x in by_name:
            m2[v] = by_name[x]
        else:
            m2[v] = nxt
            nxt += 1
    edges = [Edge(i, e.label, tuple(m1[v] for v in e.attach)) for i, e in enumerate(g1.edges)]
    edges += [Edge(len(edges) + i, e.label, tuple(m2[v] for v in e.attach))
              for i, e in enumerate(g2.edges)]
    naming = {m1[v]: x for v, x in g1.naming.items()}
    naming.update({m2[v]: x for v, x in g2.naming.items()})
    return NHGraph(frozenset(range(nxt)), tuple(edges), naming)


def graph_restrict(x: Name, g: NHGraph) -> NHGraph:
    if x not in g.interface:
        return g
    return NHGraph(g.vertices, g.edges, {v: y for v, y in g.naming.items() if y != x})


def graph_permute(g: NHGraph, pi: Permutation) -> NHGraph:
    return NHGraph(g.vertices, g.edges, {v: pi(x) for v, x in g.naming.items()})


def support_graph(g: NHGraph) -> frozenset:
    return g.interface


def eval_graph(t: Term, sig: Mapping[str, int] | None = None) -> NHGraph:
    if isinstance(t, Atom):
        return graph_atom(t.label, t.args, sig)
    if isinstance(t, Nil):
        return EMPTY
    if isinstance(t, Par):
        return graph_parallel(eval_graph(t.left, sig), eval_graph(t.right, sig))
    if isinstance(t, Restrict):
        return graph_restrict(t.name, eval_graph(t.body, sig))
    if isinstance(t, PermApp):
        return graph_permute(eval_graph(t.body, sig), t.perm)
    raise TypeError(f"not a term: {t!r}")


def graph_to_term(g: NHGraph) -> Term:
    """Normal-form term whose graph is isomorphic to ``g``."""
    fresh = FreshNames(g.interface)
    names = dict(g.naming)
    hidden = []
    for v in g.sorted_vertices():
        if v not in names:
            names[v] = fresh()
            hidden.append(names[v])
    body = par(*(Atom(e.label, tuple(names[v] for v in e.attach))
                 for e in sorted(g.edges, key=lambda e: e.id)))
    return restrict(hidden, body)


# --------------------------------------------------------------------------
# Isomorphism


def _vertex_invariants(g: NHGraph) -> dict:
    inc: dict = {v: [] for v in g.vertices}
    for e in g.edges:
        for i, v in enumerate(e.attach):
            inc[v].append((e.label, len(e.attach), i))
    return {v: (g.naming.get(v), tuple(sorted(inc[v]))) for v in g.vertices}


def _edge_order(g: NHGraph) -> list[Edge]:
    """Edges ordered so each one touches already-mapped vertices if possible."""
    remaining = sorted(g.edges, key=lambda e: (not any(v in g.naming for v in e.attach), e.id))
    seen = set(g.naming)
    out = []
    while remaining:
        pick = next((e for e in remaining if any(v in seen for v in e.attach)), remaining[0])
        remaining.remove(pick)
        out.append(pick)
        seen.update(pick.attach)
    return out


def isomorphic(g1: NHGraph, g2: NHGraph) -> bool:
    """Exact test for a name-, label- and attachment-preserving bijection."""
    if (len(g1.vertices), len(g1.edges)) != (len(g2.vertices), len(g2.edges)):
        return False
    if g1.interface != g2.interface:
        return False
    if Counter((e.label, len(e.attach)) for e in g1.edges) != Counter(
            (e.label, len(e.attach)) for e in g2.edges):
        return False
    inv1, inv2 = _vertex_invariants(g1), _vertex_invariants(g2)
    if Counter(inv1.values()) != Counter(inv2.values()):
        return False

    vmap = {v: g2.vertex_of(x) for v, x in g1.naming.items()}
    used_v = set(vmap.values())
    order = _edge_order(g1)
    by_label: dict = {}
    for e in g2.edges:
        by_label.setdefault((e.label, len(e.attach)), []).append(e)
    used_e: set = set()

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        e1 = order[k]
        for e2 in by_label[(e1.label, len(e1.attach))]:
            if e2.id in used_e:
                continue
            added = []
            ok = True
            for v1, v2 in zip(e1.attach, e2.attach):
                if v1 in vmap:
                    if vmap[v1] != v2:
                        ok = False
                        break
                elif v2 in used_v or inv1[v1] != inv2[v2]:
                    ok = False
                    break
                else:
                    vmap[v1] = v2
                    used_v.add(v2)
                    added.append(v1)
            if ok:
                used_e.add(e2.id)
                if extend(k + 1):
                    return True
                used_e.discard(e2.id)
            for v1 in added:
                used_v.discard(vmap.pop(v1))
        return False

    return extend(0)


def congruent_terms(a: Term, b: Term) -> bool:
    """Decide structural congruence through graph isomorphism."""
    return isomorphic(eval_graph(a), eval_graph(b))


# --------------------------------------------------------------------------
# Hierarchical NH-graphs


@dataclass(frozen=True)
class HierLeaf:
    label: str
    args: tuple


@dataclass(frozen=True)
class HierNode:
    """A component exposing ``names``; the root exposes the interface."""

    names: tuple
    children: tuple = ()


def term_to_hier(t: Term) -> HierNode:
    if has_permapp(t):
        raise TermError("hierarchical graphs need a term without permutations")
    from .forms import rename_apart

    t = rename_apart(t)
    return HierNode(tuple(sorted(free_names(t))), tuple(_hier_children(t)))


def _hier_children(t: Term) -> list:
    if isinstance(t, Atom):
        return [HierLeaf(t.label, t.args)]
    if isinstance(t, Nil):
        return []
    if isinstance(t, Par):
        return _hier_children(t.left) + _hier_children(t.right)
    if isinstance(t, Restrict):
        names = []
        while isinstance(t, Restrict):
            names.append(t.name)
            t = t.body
        return [HierNode(tuple(names), tuple(_hier_children(t)))]
    raise TypeError(f"unexpected {t!r}")


def validate_hier(h: HierNode) -> None:
    def walk(node, exposed: frozenset):
        if isinstance(node, HierLeaf):
            missing = set(node.args) - exposed
            if missing:
                raise GraphError(f"leaf {node.label}{node.args} uses names {sorted(missing)} not on its path")
            return
        if not isinstance(node, HierNode):
            raise GraphError(f"not a tree node: {node!r}")
        clash = exposed & set(node.names)
        if clash or len(set(node.names)) != len(node.names):
            raise GraphError(f"names {sorted(clash) or list(node.names)} exposed twice on a path")
        for n in node.names:
            check_name(n)
        inner = exposed | set(node.names)
        for c in node.children:
            walk(c, inner)

    if not isinstance(h, HierNode):
        raise GraphError("root must be an internal node")
    walk(h, frozenset())


def hier_to_term(h: HierNode) -> Term:
    validate_hier(h)

    def build(node):
        if isinstance(node, HierLeaf):
            return Atom(node.label, node.args)
        return restrict(node.names, par(*(build(c) for c in node.children)))

    return par(*(build(c) for c in h.children))


def flatten_hier(h: HierNode) -> NHGraph:
    """Paste the leaf edges together, sharing vertices of the same exposed name."""
    validate_hier(h)
    vid: dict = {}
    edges = []

    def vertex(key):
        if key not in vid:
            vid[key] = len(vid)
        return vid[key]

    def walk(node, env, path):
        if isinstance(node, HierLeaf):
            edges.append(Edge(len(edges), node.label, tuple(vertex(env[x]) for x in node.args)))
            return
        env = {**env, **{x: (path, x) for x in node.names}}
        for i, c in enumerate(node.children):
            walk(c, env, path + (i,))

    walk(h, {}, ())
    naming = {vid[((), x)]: x for x in h.names if ((), x) in vid}
    return NHGraph(frozenset(vid.values()), tuple(edges), naming)


def format_hier(h: HierNode, indent: str = "  ") -> str:
    lines = []

    def walk(node, depth):
        if isinstance(node, HierLeaf):
            lines.append(f"{indent * depth}{node.label}({','.join(node.args)})")
        else:
            lines.append(f"{indent * depth}{{{', '.join(node.names)}}}")
            for c in node.children:
                walk(c, depth + 1)

    walk(h, 0)
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Text format
#
#   vertices: v0 v1 v2
#   names: v0=x1
#   A(v0,v1)
#   B(v0,v2)

_EDGE_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*\(([^)]*)\)\s*\Z")


def _vtoken(v) -> str:
    return f"v{v}" if isinstance(v, int) else str(v)


def format_graph(g: NHGraph) -> str:
    lines = ["vertices: " + " ".join(_vtoken(v) for v in g.sorted_vertices())]
    named = sorted(g.naming.items(), key=lambda kv: _vkey(kv[0]))
    if named:
        lines.append("names: " + " ".join(f"{_vtoken(v)}={x}" for v, x in named))
    for e in sorted(g.edges, key=lambda e: e.id):
        lines.append(f"{e.label}({','.join(_vtoken(v) for v in e.attach)})")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> NHGraph:
    """Read the text format; vertex ids stay strings."""
    vertices: set = set()
    naming: dict = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vertices:"):
            vertices.update(line[len("vertices:"):].split())
        elif line.startswith("names:"):
            for item in line[len("names:"):].split():
                v, sep, x = item.partition("=")
                if not sep:
                    raise GraphError(f"line {lineno}: expected vertex=name, got {item!r}")
                naming[v] = check_name(x)
        else:
            m = _EDGE_RE.match(line)
            if m is None:
                raise GraphError(f"line {lineno}: cannot parse {raw!r}")
            attach = tuple(a.strip() for a in m.group(2).split(",") if a.strip())
            edges.append(Edge(len(edges), m.group(1), attach))
    for e in edges:
        vertices.update(e.attach)
    return NHGraph(frozenset(vertices), tuple(edges), naming)


def relabel(g: NHGraph, mapping: Mapping) -> NHGraph:
    """Rename vertex ids (an isomorphic copy)."""
    return NHGraph(frozenset(mapping[v] for v in g.vertices),
                   tuple(Edge(e.id, e.label, tuple(mapping[v] for v in e.attach)) for e in g.edges),
                   {mapping[v]: x for v, x in g.naming.items()})


def hypergraph(edges: Iterable[tuple[str, Sequence]]) -> NHGraph:
    """Unnamed hypergraph from ``(label, attachment)`` pairs."""
    es = tuple(Edge(i, lab, tuple(att)) for i, (lab, att) in enumerate(edges))
    return NHGraph(frozenset(v for e in es for v in e.attach), es, {})
