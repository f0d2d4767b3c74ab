"""Normal forms, canonical forms and the complexity measure of terms.

A normal form puts every restriction at the top over a flat parallel
composition of atoms.  A canonical form pushes each restriction as close as
possible to the atoms mentioning its name, which is what makes dynamic
programming over the term cheap.
"""
from __future__ import annotations

from typing import Iterator

from .terms import (
    Atom, FreshNames, Name, Nil, Par, PermApp, Restrict, Term, TermError,
    all_names, free_names, par, par_factors, push_perms, replace_at,
    restrict, subterm,
)


def rename_apart(t: Term) -> Term:
    """Alpha-rename binders so they are pairwise distinct and distinct from
    the free names.  Binders that already satisfy this keep their names."""
    t = push_perms(t)
    used = set(free_names(t))
    fresh = FreshNames(all_names(t))
    return _rename_apart(t, used, fresh, {})


def _rename_apart(t: Term, used: set, fresh: FreshNames, env: dict) -> Term:
    if isinstance(t, Atom):
        return Atom(t.label, tuple(env.get(x, x) for x in t.args))
    if isinstance(t, Nil):
        return t
    if isinstance(t, Par):
        return Par(_rename_apart(t.left, used, fresh, env),
                   _rename_apart(t.right, used, fresh, env))
    if isinstance(t, Restrict):
        x = t.name
        y = fresh() if x in used else x
        used.add(y)
        return Restrict(y, _rename_apart(t.body, used, fresh, {**env, x: y}))
    raise TypeError(f"unexpected {t!r}")


def _atom_key(a: Atom, free: frozenset) -> tuple:
    return (a.label, tuple((0, x) if x in free else (1, "") for x in a.args))


def _flatten(t: Term) -> tuple[list[Name], list[Atom]]:
    binders: list[Name] = []
    found: list[Atom] = []

    def walk(u: Term) -> None:
        if isinstance(u, Atom):
            found.append(u)
        elif isinstance(u, Par):
            walk(u.left)
            walk(u.right)
        elif isinstance(u, Restrict):
            binders.append(u.name)
            walk(u.body)

    walk(t)
    return binders, found


def normal_parts(t: Term) -> tuple[list[Name], list[Atom]]:
    """Restricted names and atoms of the normal form, in normal-form order."""
    t = rename_apart(t)
    binders, found = _flatten(t)
    free = free_names(t)
    found = sorted(found, key=lambda a: _atom_key(a, free))
    bound = set(binders)
    order: list[Name] = []
    for a in found:
        for x in a.args:
            if x in bound and x not in order:
                order.append(x)
    return order, found


def normal_form(t: Term) -> Term:
    order, found = normal_parts(t)
    return restrict(order, par(*found))


def canonical_form(t: Term) -> Term:
    """Deterministic canonical form reached from the normal form.

    Within a connected group of atoms the restriction kept outermost is the
    one whose removal splits the group into the most pieces (ties: smaller
    largest piece, then normal-form order); everything else is pushed down.
    """
    order, found = normal_parts(t)
    rank = {x: i for i, x in enumerate(order)}
    return par(*_canon(set(order), list(range(len(found))), found, rank))


def _components(names: set, idxs: list[int], found: list[Atom]) -> list[list[int]]:
    parent = {i: i for i in idxs}

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[Name, int] = {}
    for i in idxs:
        for x in found[i].args:
            if x in names:
                if x in owner:
                    parent[root(i)] = root(owner[x])
                else:
                    owner[x] = i
    groups: dict[int, list[int]] = {}
    for i in idxs:
        groups.setdefault(root(i), []).append(i)
    return sorted(groups.values(), key=min)


def _canon(names: set, idxs: list[int], found: list[Atom], rank: dict) -> list[Term]:
    out = []
    for comp in _components(names, idxs, found):
        local = {x for i in comp for x in found[i].args if x in names}
        if not local:
            out.extend(found[i] for i in comp)
        else:
            out.append(_component(local, comp, found, rank))
    return out


def _component(names: set, comp: list[int], found: list[Atom], rank: dict) -> Term:
    if len(comp) == 1:
        return restrict(sorted(names, key=rank.__getitem__), found[comp[0]])

    def score(x):
        pieces = _components(names - {x}, comp, found)
        return (-len(pieces), max(len(p) for p in pieces), rank[x])

    pivot = min(names, key=score)
    return Restrict(pivot, par(*_canon(names - {pivot}, comp, found, rank)))


def complexity(t: Term) -> int:
    """Largest support size met while evaluating ``t`` bottom-up."""
    return _complexity(t)[0]


def _complexity(t: Term) -> tuple[int, frozenset]:
    if isinstance(t, Atom):
        return len(t.args), frozenset(t.args)
    if isinstance(t, Nil):
        return 0, frozenset()
    if isinstance(t, Restrict):
        c, fn = _complexity(t.body)
        return c, fn - {t.name}
    if isinstance(t, Par):
        c1, fn1 = _complexity(t.left)
        c2, fn2 = _complexity(t.right)
        fn = fn1 | fn2
        return max(c1, c2, len(fn)), fn
    if isinstance(t, PermApp):
        raise TermError("complexity is only defined for terms without permutations")
    raise TypeError(f"not a term: {t!r}")


def scope_extension_step(t: Term, path: tuple[int, ...] = ()) -> Term:
    """Rewrite ``(x)(p || q)`` into ``(x)p || q`` at ``path``.

    The parallel body is split by factors: ``q`` gathers every factor where
    ``x`` is not free.  When no factor mentions ``x`` the restriction is
    dropped altogether.
    """
    path = tuple(path)
    red = subterm(t, path)
    if not isinstance(red, Restrict):
        raise TermError("scope extension needs a restriction at this position")
    x = red.name
    factors = par_factors(red.body)
    keep = [f for f in factors if x in free_names(f)]
    hoist = [f for f in factors if x not in free_names(f)]
    if not hoist:
        raise TermError(f"{x} is free in every parallel factor; no scope extension applies")
    if keep:
        new = Par(Restrict(x, par(*keep)), par(*hoist))
    else:
        new = par(*hoist)
    return replace_at(t, path, new)


def scope_extension_redexes(t: Term, path: tuple[int, ...] = ()) -> Iterator[tuple[int, ...]]:
    """Positions where :func:`scope_extension_step` applies."""
    if isinstance(t, Restrict):
        if any(t.name not in free_names(f) for f in par_factors(t.body)):
            yield path
        yield from scope_extension_redexes(t.body, path + (0,))
    elif isinstance(t, Par):
        yield from scope_extension_redexes(t.left, path + (0,))
        yield from scope_extension_redexes(t.right, path + (1,))
    elif isinstance(t, PermApp):
        yield from scope_extension_redexes(t.body, path + (0,))


def is_canonical(t: Term) -> bool:
    """No restriction admits a further scope-extension step."""
    return next(scope_extension_redexes(t), None) is None
