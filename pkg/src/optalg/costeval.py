"""Point-wise min/+ cost functions over a finite domain.

A cost function is stored as a dense table over its support (sorted names),
indexed in mixed radix: axis ``i`` of :attr:`CostTable.values` is the value
of ``support[i]``.  Entries are exact: :class:`fractions.Fraction` or
``math.inf`` for a forbidden assignment.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

import numpy as np

from .terms import (
    Atom, Name, Nil, Par, PermApp, Permutation, Restrict, Term, TermError,
    free_names, push_perms,
)

INF = math.inf
ExtCost = Union[Fraction, float]
Assignment = dict


class CostError(ValueError):
    pass


def to_cost(x) -> ExtCost:
    """Exact cost from an int, Fraction, decimal string or ``"inf"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise CostError(f"invalid cost {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if x == INF:
            return INF
        if math.isnan(x) or x == -INF:
            raise CostError(f"invalid cost {x!r}")
        return Fraction(str(x))
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "∞", "infinity"):
            return INF
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            pass
        try:
            return Fraction(Decimal(s))
        except (InvalidOperation, ValueError, OverflowError):
            raise CostError(f"invalid cost {x!r}") from None
    raise CostError(f"invalid cost {x!r}")


def format_cost(c: ExtCost) -> str:
    return "inf" if c == INF else str(c)


def check_domain(d: Sequence) -> tuple:
    d = tuple(d)
    if not d:
        raise CostError("domain must be nonempty")
    if len(set(d)) != len(d):
        raise CostError("domain values must be distinct")
    return d


def _obj_array(x) -> np.ndarray:
    a = np.empty(np.shape(x), dtype=object)
    a[...] = x
    return a


@dataclass(frozen=True, eq=False)
class CostTable:
    support: tuple
    domain: tuple
    values: np.ndarray

    def __post_init__(self):
        if list(self.support) != sorted(self.support):
            raise CostError("support must be sorted")
        object.__setattr__(self, "support", tuple(self.support))
        expected = (len(self.domain),) * len(self.support)
        if self.values.shape != expected:
            raise CostError(f"table shape {self.values.shape} does not match {expected}")

    def index(self, rho: Mapping[Name, object]) -> tuple:
        pos = {v: i for i, v in enumerate(self.domain)}
        return tuple(pos[rho[x]] for x in self.support)

    def __call__(self, rho: Mapping[Name, object]) -> ExtCost:
        """Entry at ``rho``; names outside the support are ignored."""
        return self.values[self.index(rho)]

    def rows(self) -> Iterator[tuple[tuple, ExtCost]]:
        for idx in itertools.product(range(len(self.domain)), repeat=len(self.support)):
            yield tuple(self.domain[i] for i in idx), self.values[idx]

    def minimum(self) -> ExtCost:
        return min(self.values.flat)

    def __eq__(self, other):
        return (isinstance(other, CostTable) and self.support == other.support
                and self.domain == other.domain
                and all(a == b for a, b in zip(self.values.flat, other.values.flat)))

    __hash__ = None

    def __repr__(self):
        return f"CostTable({self.support}, {[format_cost(c) for _, c in self.rows()]})"


def constant_table(c: ExtCost, d: Sequence) -> CostTable:
    return CostTable((), check_domain(d), _obj_array(to_cost(c)))


class Binding(dict):
    """Constant label -> positional base table (numpy object array)."""

    @classmethod
    def from_rows(cls, domain: Sequence, constants: Mapping[str, tuple[int, Sequence]],
                  default: ExtCost = INF) -> "Binding":
        """``constants[label] = (arity, rows)`` with rows ``[v1, ..., vn, cost]``.

        Assignments without a row get ``default``.
        """
        domain = check_domain(domain)
        pos = {v: i for i, v in enumerate(domain)}
        b = cls()
        for label, (arity, rows) in constants.items():
            arr = _obj_array(np.full((len(domain),) * arity, to_cost(default), dtype=object))
            for row in rows:
                row = list(row)
                if len(row) != arity + 1:
                    raise CostError(f"row {row} of {label} needs {arity} values and a cost")
                try:
                    idx = tuple(pos[v] for v in row[:-1])
                except KeyError as e:
                    raise CostError(f"value {e.args[0]!r} of {label} not in domain") from None
                arr[idx] = to_cost(row[-1])
            b[label] = arr
        return b

    @classmethod
    def from_values(cls, domain: Sequence, constants: Mapping[str, Sequence]) -> "Binding":
        """Flat cost lists in mixed-radix (row-major) order; arity is inferred."""
        n = len(check_domain(domain))
        b = cls()
        for label, flat in constants.items():
            flat = [to_cost(c) for c in flat]
            arity = round(math.log(len(flat), n)) if n > 1 else None
            if arity is None:
                raise CostError("use from_rows for a one-value domain")
            if n ** arity != len(flat):
                raise CostError(f"{label}: {len(flat)} entries is not a power of {n}")
            b[label] = _obj_array(np.array(flat, dtype=object).reshape((n,) * arity))
        return b


def table_atom(label: str, args: Sequence[Name], b: Mapping, d: Sequence) -> CostTable:
    d = check_domain(d)
    args = tuple(args)
    if label not in b:
        raise CostError(f"constant {label!r} has no cost table")
    base = b[label]
    if base.ndim != len(args):
        raise CostError(f"arity mismatch for {label}: table has {base.ndim}, atom has {len(args)}")
    if len(set(args)) != len(args):
        raise CostError(f"repeated argument in {label}{args}")
    if base.shape != (len(d),) * len(args):
        raise CostError(f"table of {label} does not fit the domain")
    support = tuple(sorted(args))
    return CostTable(support, d, _obj_array(base.transpose([args.index(x) for x in support])))


def nil_table(d: Sequence) -> CostTable:
    return constant_table(0, d)


def _expand(t: CostTable, support: tuple) -> np.ndarray:
    shape = [len(t.domain) if x in t.support else 1 for x in support]
    return t.values.reshape(shape)


def table_sum(t1: CostTable, t2: CostTable) -> CostTable:
    if t1.domain != t2.domain:
        raise CostError("cannot combine tables over different domains")
    support = tuple(sorted(set(t1.support) | set(t2.support)))
    vals = _expand(t1, support) + _expand(t2, support)
    return CostTable(support, t1.domain, _obj_array(vals))


def table_min_out(t: CostTable, x: Name) -> CostTable:
    if x not in t.support:
        return t
    i = t.support.index(x)
    return CostTable(t.support[:i] + t.support[i + 1:], t.domain,
                     _obj_array(t.values.min(axis=i)))


def table_permute(t: CostTable, pi: Permutation) -> CostTable:
    """Rename the support by ``pi`` (so ``A(x)pi`` and ``A(pi(x))`` agree)."""
    renamed = [pi(x) for x in t.support]
    if len(set(renamed)) != len(renamed):
        raise CostError("permutation identifies two support names")
    support = tuple(sorted(renamed))
    return CostTable(support, t.domain,
                     _obj_array(t.values.transpose([renamed.index(x) for x in support])))


@dataclass
class CostTrace:
    """Result of an evaluation with one stored table per AST position."""

    term: Term
    table: CostTable
    tables: dict = field(default_factory=dict)  # path -> (subterm, table)

    @property
    def peak(self) -> int:
        """Largest table support met during the evaluation."""
        return max(len(t.support) for _, t in self.tables.values())


def eval_cost_trace(t: Term, b: Mapping, d: Sequence) -> CostTrace:
    d = check_domain(d)
    tables: dict = {}

    def ev(u: Term, path: tuple) -> CostTable:
        if isinstance(u, Atom):
            out = table_atom(u.label, u.args, b, d)
        elif isinstance(u, Nil):
            out = nil_table(d)
        elif isinstance(u, Par):
            out = table_sum(ev(u.left, path + (0,)), ev(u.right, path + (1,)))
        elif isinstance(u, Restrict):
            out = table_min_out(ev(u.body, path + (0,)), u.name)
        elif isinstance(u, PermApp):
            out = table_permute(ev(u.body, path + (0,)), u.perm)
        else:
            raise TypeError(f"not a term: {u!r}")
        tables[path] = (u, out)
        return out

    return CostTrace(t, ev(t, ()), tables)


def eval_cost(t: Term, b: Mapping, d: Sequence) -> CostTable:
    return eval_cost_trace(t, b, d).table


def backtrack_trace(trace: CostTrace, cap: int = 1000) -> list[tuple[Assignment, ExtCost]]:
    """All optimal assignments recovered top-down from stored tables."""
    d = trace.table.domain
    tables = trace.tables
    optimum = trace.table.minimum()
    if optimum == INF:
        return []

    def descend(u: Term, path: tuple, rho: dict) -> Iterator[dict]:
        if isinstance(u, (Atom, Nil)):
            yield {}
        elif isinstance(u, Par):
            rights = list(descend(u.right, path + (1,), rho))
            for left in descend(u.left, path + (0,), rho):
                for right in rights:
                    yield {**left, **right}
        elif isinstance(u, Restrict):
            child = tables[path + (0,)][1]
            if u.name not in child.support:
                yield from descend(u.body, path + (0,), rho)
                return
            target = tables[path][1](rho)
            for v in d:
                inner = {**rho, u.name: v}
                if child(inner) == target:
                    for ext in descend(u.body, path + (0,), inner):
                        yield {u.name: v, **ext}
        else:
            raise TermError("backtracking needs a term without permutations")

    found = []
    for values, cost in trace.table.rows():
        if cost == optimum:
            rho = dict(zip(trace.table.support, values))
            for ext in descend(trace.term, (), rho):
                found.append({**rho, **ext})
    pos = {v: i for i, v in enumerate(d)}
    found.sort(key=lambda a: [(x, pos[a[x]]) for x in sorted(a)])
    return [(a, optimum) for a in found[:cap]]


def backtrack_optima(t: Term, b: Mapping, d: Sequence, cap: int = 1000) -> list[tuple[Assignment, ExtCost]]:
    """Evaluate ``t`` and enumerate up to ``cap`` optimal assignments.

    Binders are first renamed apart (keeping names that do not clash), so
    the assignment mentions every variable once.  Returns ``[]`` when no
    assignment is feasible.
    """
    from .forms import rename_apart

    return backtrack_trace(eval_cost_trace(rename_apart(t), b, d), cap)


def assignment_cost(t: Term, b: Mapping, d: Sequence, rho: Mapping) -> ExtCost:
    """Sum of atom costs of a term with distinct binders under ``rho``."""
    pos = {v: i for i, v in enumerate(d)}
    total: ExtCost = Fraction(0)
    for a in _atoms_resolved(push_perms(t))[0]:
        total = total + b[a[0]][tuple(pos[rho[x]] for x in a[1])]
    return total


# --------------------------------------------------------------------------
# Brute-force oracle


MAX_BRUTE = 3 ** 12


def _atoms_resolved(t: Term) -> tuple[list, list]:
    """Atoms with bound names replaced by unique variables.

    A binder keeps its name if that name is bound once and never free;
    otherwise it becomes ``name#k``.
    """
    counts: dict = {}
    free = free_names(t)

    def count(u):
        if isinstance(u, Par):
            count(u.left)
            count(u.right)
        elif isinstance(u, Restrict):
            counts[u.name] = counts.get(u.name, 0) + 1
            count(u.body)

    count(t)
    found = []
    variables: list = []
    k = [0]

    def walk(u, env):
        if isinstance(u, Atom):
            found.append((u.label, tuple(env.get(x, x) for x in u.args)))
        elif isinstance(u, Par):
            walk(u.left, env)
            walk(u.right, env)
        elif isinstance(u, Restrict):
            x = u.name
            if counts[x] == 1 and x not in free:
                v = x
            else:
                v = f"{x}#{k[0]}"
                k[0] += 1
            variables.append(v)
            walk(u.body, {**env, x: v})

    walk(t, {})
    return found, variables


def _enumerate(t: Term, b: Mapping, d: Sequence):
    d = check_domain(d)
    t = push_perms(t)
    found, _ = _atoms_resolved(t)
    for label, args in found:
        if label not in b:
            raise CostError(f"constant {label!r} has no cost table")
        if b[label].ndim != len(args):
            raise CostError(f"arity mismatch for {label}")
    free = sorted(free_names(t))
    used = sorted({x for _, args in found for x in args})
    bound = [x for x in used if x not in free]
    if len(d) ** len(used) > MAX_BRUTE:
        raise CostError(f"brute force over {len(used)} variables and {len(d)} values is too large")
    order = free + bound
    for idx in itertools.product(range(len(d)), repeat=len(order)):
        rho = dict(zip(order, idx))
        total: ExtCost = Fraction(0)
        for label, args in found:
            total = total + b[label][tuple(rho[x] for x in args)]
        yield free, order, idx, total


def brute_force(t: Term, b: Mapping, d: Sequence) -> CostTable:
    """Direct enumeration of every assignment; no intermediate tables."""
    d = check_domain(d)
    best: dict = {}
    free: list = []
    for free, order, idx, total in _enumerate(t, b, d):
        key = idx[:len(free)]
        if key not in best or total < best[key]:
            best[key] = total
    vals = np.empty((len(d),) * len(free), dtype=object)
    for key, c in best.items():
        vals[key] = c
    return CostTable(tuple(free), d, vals)


def brute_force_optima(t: Term, b: Mapping, d: Sequence) -> tuple[ExtCost, list[Assignment]]:
    """Global minimum and every assignment reaching it (``[]`` if infeasible)."""
    d = check_domain(d)
    opt: ExtCost = INF
    argmin: list = []
    order: list = []
    for _, order, idx, total in _enumerate(t, b, d):
        if total < opt:
            opt, argmin = total, [idx]
        elif total == opt and total != INF:
            argmin.append(idx)
    if opt == INF:
        return INF, []
    return opt, [{x: d[i] for x, i in zip(order, idx)} for idx in argmin]


def format_cost_table(t: CostTable, title: str | None = None) -> str:
    """Aligned rows ``value ... cost`` in mixed-radix order."""
    header = list(t.support) + ["cost"]
    rows = [[str(v) for v in values] + [format_cost(c)] for values, c in t.rows()]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [title] if title else []
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)
