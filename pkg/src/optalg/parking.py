"""The parking algebra: cost functions over subsets of cars.

A term over zone constants describes where cars may park: ``A(x1,x2)`` says
cars ``x1, x2`` may use zone ``A``, and ``(x)p`` forces car ``x`` to park
somewhere inside ``p``.  The table of ``p`` maps a set ``X`` of free cars to
the cheapest way of parking ``X`` plus every car restricted in ``p``.

Costs of an atom are attached to argument *positions* when an instance is
built, so evaluation is invariant under renaming of bound cars.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .costeval import INF, ExtCost, format_cost, to_cost
from .terms import (
    Atom, Name, Nil, Par, PermApp, Permutation, Restrict, Term, atoms,
    bound_names, free_names, has_permapp, render_term,
)


class ParkingError(ValueError):
    pass


class Infeasible(ParkingError):
    """No assignment of cars to zones respects the capacities."""


# --------------------------------------------------------------------------
# Tables


def _mask(support: tuple, xs: Iterable[Name]) -> int:
    m = 0
    for x in xs:
        if x in support:
            m |= 1 << support.index(x)
    return m


def _subset(support: tuple, m: int) -> frozenset:
    return frozenset(x for i, x in enumerate(support) if m >> i & 1)


@dataclass(frozen=True, eq=False)
class SubsetTable:
    """``entries[m]`` is the cost of the subset of ``support`` with bitmask ``m``."""

    support: tuple
    entries: tuple

    def __post_init__(self):
        if list(self.support) != sorted(set(self.support)):
            raise ParkingError("support must be sorted and distinct")
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) != 1 << len(self.support):
            raise ParkingError("table size must be 2^|support|")

    def __call__(self, xs: Iterable[Name] = ()) -> ExtCost:
        """Cost of ``xs``; names outside the support are ignored."""
        return self.entries[_mask(self.support, xs)]

    def rows(self) -> Iterator[tuple[frozenset, ExtCost]]:
        """Subsets in the order all-in first, first support name most significant."""
        k = len(self.support)
        for bits in itertools.product((1, 0), repeat=k):
            xs = frozenset(x for x, b in zip(self.support, bits) if b)
            yield xs, self(xs)

    def __eq__(self, other):
        return (isinstance(other, SubsetTable) and self.support == other.support
                and self.entries == other.entries)

    __hash__ = None

    def __repr__(self):
        body = ", ".join("{%s}: %s" % (",".join(sorted(xs)), format_cost(c)) for xs, c in self.rows())
        return f"SubsetTable({body})"


class ZoneSpec(NamedTuple):
    capacity: int
    weights: tuple  # cost of parking the car at each argument position


def zone_table(args: Sequence[Name], spec: ZoneSpec) -> SubsetTable:
    """``X ↦ Σ weights`` when ``|X| <= capacity``, else infinity."""
    args = tuple(args)
    if len(spec.weights) != len(args):
        raise ParkingError(f"zone has {len(spec.weights)} weights but {len(args)} cars")
    if len(set(args)) != len(args):
        raise ParkingError(f"repeated car in zone {args}")
    support = tuple(sorted(args))
    w = {x: to_cost(c) for x, c in zip(args, spec.weights)}
    entries = []
    for m in range(1 << len(support)):
        xs = _subset(support, m)
        if len(xs) > spec.capacity:
            entries.append(INF)
        else:
            total: ExtCost = Fraction(0)
            for x in xs:
                total = total + w[x]
            entries.append(total)
    return SubsetTable(support, entries)


NIL_TABLE = SubsetTable((), (Fraction(0),))


def _splits(xs: frozenset, s1: set, s2: set) -> Iterator[tuple[frozenset, frozenset]]:
    """Ordered splits ``X1 ⊎ X2 = xs`` with ``X1 ⊆ s1``, ``X2 ⊆ s2``; blocks may be empty."""
    shared = tuple(sorted(xs & s1 & s2))
    fixed = xs - s2
    for k in range(1 << len(shared)):
        left = fixed | _subset(shared, k)
        yield left, xs - left


def park_parallel(t1: SubsetTable, t2: SubsetTable) -> SubsetTable:
    """Each car of ``X`` parks on exactly one side that knows it."""
    support = tuple(sorted(set(t1.support) | set(t2.support)))
    s1, s2 = set(t1.support), set(t2.support)
    entries = []
    for m in range(1 << len(support)):
        entries.append(min(t1(a) + t2(b) for a, b in _splits(_subset(support, m), s1, s2)))
    return SubsetTable(support, entries)


def park_restrict(t: SubsetTable, x: Name) -> SubsetTable:
    """``X ↦ t(X ∪ {x})``: car ``x`` must park inside."""
    if x not in t.support:
        return t
    support = tuple(y for y in t.support if y != x)
    return SubsetTable(support, [t(_subset(support, m) | {x}) for m in range(1 << len(support))])


def park_permute(t: SubsetTable, pi: Permutation) -> SubsetTable:
    """``X ↦ t(pi^{-1}(X))``."""
    inv = pi.inverse()
    support = tuple(sorted(pi(x) for x in t.support))
    return SubsetTable(support, [t(inv.apply_set(_subset(support, m)))
                                 for m in range(1 << len(support))])


# --------------------------------------------------------------------------
# Evaluation


@dataclass
class ParkTrace:
    term: Term
    table: SubsetTable
    tables: dict = field(default_factory=dict)  # path -> (subterm, table)
    binding: Mapping = field(default_factory=dict)

    @property
    def peak(self) -> int:
        return max(len(t.support) for _, t in self.tables.values())


def eval_parking_term(t: Term, binding: Mapping[str, ZoneSpec]) -> ParkTrace:
    """Bottom-up evaluation of any term with the given zone specs."""
    tables: dict = {}

    def ev(u: Term, path: tuple) -> SubsetTable:
        if isinstance(u, Atom):
            if u.label not in binding:
                raise ParkingError(f"undeclared zone {u.label!r}")
            out = zone_table(u.args, binding[u.label])
        elif isinstance(u, Nil):
            out = NIL_TABLE
        elif isinstance(u, Par):
            out = park_parallel(ev(u.left, path + (0,)), ev(u.right, path + (1,)))
        elif isinstance(u, Restrict):
            out = park_restrict(ev(u.body, path + (0,)), u.name)
        elif isinstance(u, PermApp):
            out = park_permute(ev(u.body, path + (0,)), u.perm)
        else:
            raise TypeError(f"not a term: {u!r}")
        tables[path] = (u, out)
        return out

    return ParkTrace(t, ev(t, ()), tables, binding)


@dataclass(frozen=True)
class ParkingInstance:
    zones: Mapping[str, int]
    cars: tuple
    costs: Mapping[tuple, ExtCost]  # (car, zone) -> cost
    term: Term

    def __post_init__(self):
        object.__setattr__(self, "zones", dict(self.zones))
        object.__setattr__(self, "cars", tuple(self.cars))
        object.__setattr__(self, "costs", {k: to_cost(v) for k, v in dict(self.costs).items()})
        self.validate()

    def validate(self) -> None:
        t = self.term
        if has_permapp(t):
            raise ParkingError("parking terms may not contain permutations")
        for zone, cap in self.zones.items():
            if not isinstance(cap, int) or isinstance(cap, bool) or cap < 0:
                raise ParkingError(f"capacity of {zone} must be a natural number")
        if len(set(self.cars)) != len(self.cars):
            raise ParkingError("cars must be distinct")
        seen = set()
        for a in atoms(t):
            if a.label not in self.zones:
                raise ParkingError(f"undeclared zone {a.label!r}")
            if a.label in seen:
                raise ParkingError(f"zone {a.label} occurs more than once in the term")
            seen.add(a.label)
            for x in a.args:
                if x not in self.cars:
                    raise ParkingError(f"undeclared car {x!r} in zone {a.label}")
                if (x, a.label) not in self.costs:
                    raise ParkingError(f"no cost for car {x} in zone {a.label}")
        binders = bound_names(t)
        if len(set(binders)) != len(binders):
            raise ParkingError("each car may be restricted at most once")
        if set(binders) & free_names(t):
            raise ParkingError("a restricted car also occurs free")

    def binding(self) -> dict:
        return {a.label: ZoneSpec(self.zones[a.label], tuple(self.costs[x, a.label] for x in a.args))
                for a in atoms(self.term)}


def park_atom(zone: str, cars: Sequence[Name], inst: ParkingInstance) -> SubsetTable:
    if zone not in inst.zones:
        raise ParkingError(f"undeclared zone {zone!r}")
    for x in cars:
        if x not in inst.cars:
            raise ParkingError(f"undeclared car {x!r}")
    return zone_table(cars, ZoneSpec(inst.zones[zone], tuple(inst.costs.get((x, zone), INF) for x in cars)))


def eval_parking_trace(inst: ParkingInstance, form: str = "canonical") -> ParkTrace:
    from .forms import canonical_form, normal_form

    if form == "canonical":
        t = canonical_form(inst.term)
    elif form == "normal":
        t = normal_form(inst.term)
    elif form == "as-is":
        t = inst.term
    else:
        raise ValueError(f"unknown form {form!r}")
    return eval_parking_term(t, inst.binding())


def eval_parking(inst: ParkingInstance, form: str = "canonical") -> SubsetTable:
    return eval_parking_trace(inst, form).table


class Step(NamedTuple):
    car: Name
    where: str
    cost: ExtCost | None  # set when the car is finally parked in a zone


@dataclass
class ParkingSolution:
    zone: dict  # car -> zone
    cost: dict  # car -> cost
    total: ExtCost
    steps: list


def park_backtrack_trace(trace: ParkTrace, parked: Iterable[Name] = ()) -> ParkingSolution:
    """Recover a minimal assignment; ``parked`` are the free cars to place."""
    tables = trace.tables
    total = trace.table(parked)
    if total == INF:
        raise Infeasible("no assignment respects the zone capacities")
    zone: dict = {}
    cost: dict = {}
    steps: list = []

    def descend(u: Term, path: tuple, xs: tuple) -> None:
        # xs keeps the order in which cars were committed, for the step log
        if isinstance(u, Atom):
            spec = trace.binding[u.label]
            for x in xs:
                c = to_cost(spec.weights[u.args.index(x)])
                zone[x], cost[x] = u.label, c
                steps.append(Step(x, render_term(u), c))
        elif isinstance(u, Nil):
            pass
        elif isinstance(u, Restrict):
            child = tables[path + (0,)][1]
            if u.name in child.support:
                if not isinstance(u.body, Atom):
                    steps.append(Step(u.name, render_term(u.body), None))
                xs = xs + (u.name,)
            descend(u.body, path + (0,), tuple(x for x in xs if x in child.support))
        elif isinstance(u, Par):
            t1, t2 = tables[path + (0,)][1], tables[path + (1,)][1]
            target = tables[path][1](xs)
            left, right = next((a, b) for a, b in _splits(frozenset(xs), set(t1.support), set(t2.support))
                               if t1(a) + t2(b) == target)
            for x in xs:
                side = u.left if x in left else u.right
                if not isinstance(side, Atom):
                    steps.append(Step(x, render_term(side), None))
            descend(u.left, path + (0,), tuple(x for x in xs if x in left))
            descend(u.right, path + (1,), tuple(x for x in xs if x in right))
        else:
            raise ParkingError("backtracking needs a term without permutations")

    descend(trace.term, (), tuple(sorted(frozenset(parked) & frozenset(trace.table.support))))
    return ParkingSolution(zone, cost, total, steps)


def park_backtrack(inst: ParkingInstance, form: str = "canonical") -> ParkingSolution:
    return park_backtrack_trace(eval_parking_trace(inst, form))


# --------------------------------------------------------------------------
# Brute-force oracle

MAX_CARS = 10
MAX_ZONES = 4


def _candidate_zones(t: Term) -> tuple[dict, dict]:
    """For each restricted car the zones inside its scope that list it, and
    for each free car every zone that lists it."""
    bound: dict = {}
    free: dict = {}

    def walk(u, scope: dict):
        if isinstance(u, Atom):
            for x in u.args:
                if x in scope:
                    scope[x].append(u.label)
                else:
                    free.setdefault(x, []).append(u.label)
        elif isinstance(u, Par):
            walk(u.left, scope)
            walk(u.right, scope)
        elif isinstance(u, Restrict):
            bound[u.name] = []
            walk(u.body, {**scope, u.name: bound[u.name]})
        elif isinstance(u, PermApp):
            raise ParkingError("parking terms may not contain permutations")

    walk(t, {})
    return bound, free


def _brute(inst: ParkingInstance, parked: frozenset):
    bound, free = _candidate_zones(inst.term)
    cars = sorted(x for x, zs in bound.items() if zs) + sorted(parked)
    choices = [bound[x] if x in bound else free[x] for x in cars]
    for combo in itertools.product(*choices):
        load: dict = {}
        total: ExtCost = Fraction(0)
        for x, z in zip(cars, combo):
            load[z] = load.get(z, 0) + 1
            total = total + inst.costs[x, z]
        if all(n <= inst.zones[z] for z, n in load.items()):
            yield dict(zip(cars, combo)), total


def _guard(inst: ParkingInstance) -> None:
    if len(inst.cars) > MAX_CARS or len(inst.zones) > MAX_ZONES:
        raise ParkingError(f"brute force limited to {MAX_CARS} cars and {MAX_ZONES} zones")


def park_brute_force(inst: ParkingInstance, parked: Iterable[Name] = ()) -> tuple[ExtCost, list[dict]]:
    """Minimum over every capacity-respecting assignment, with all minimizers."""
    _guard(inst)
    best: ExtCost = INF
    argmin: list = []
    for rho, total in _brute(inst, frozenset(parked)):
        if total < best:
            best, argmin = total, [rho]
        elif total == best and total != INF:
            argmin.append(rho)
    return best, argmin if best != INF else []


def park_brute_table(inst: ParkingInstance) -> SubsetTable:
    """The whole table over the free cars, by enumeration."""
    _guard(inst)
    support = tuple(sorted(free_names(inst.term)))
    return SubsetTable(support, [park_brute_force(inst, _subset(support, m))[0]
                                 for m in range(1 << len(support))])


# --------------------------------------------------------------------------
# Output


def format_subset_table(t: SubsetTable, title: str | None = None) -> str:
    header = list(t.support) + ["cost"]
    rows = [["✓" if x in xs else "-" for x in t.support] + [format_cost(c)] for xs, c in t.rows()]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [title] if title else []
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)


def parallel_candidates(trace: ParkTrace, path: tuple, xs: Iterable[Name]) -> list[tuple[frozenset, frozenset, ExtCost]]:
    """Every split ``(X1, X2)`` considered by a parallel node at ``xs``."""
    u, _ = trace.tables[path]
    if not isinstance(u, Par):
        raise ParkingError("not a parallel node")
    t1, t2 = trace.tables[path + (0,)][1], trace.tables[path + (1,)][1]
    return [(a, b, t1(a) + t2(b)) for a, b in _splits(frozenset(xs), set(t1.support), set(t2.support))]
