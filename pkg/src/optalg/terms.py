"""Names, permutations and optimization terms.

A term is built from atoms ``A(x1,...,xn)``, the empty problem ``nil``,
parallel composition ``p || q``, restriction ``(x)p`` and permutation
application.  Terms are immutable; every operation here is a pure function.

Concrete syntax::

    term  := par
    par   := pre ( "||" pre )*
    pre   := "(" NAME ")" pre | atom
    atom  := "nil" | LABEL "(" NAME ("," NAME)* ")" | LABEL "(" ")"
           | "(" term ")" [ "[" NAME ":" NAME ("," NAME ":" NAME)* "]" ]

The trailing ``[x:y, y:x]`` form writes a permutation application; it is
only produced by :func:`render_term` for terms that still carry one.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

Name = str
NameSet = frozenset

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class TermError(ValueError):
    """Raised for malformed terms (bad arity, repeated arguments...)."""


class ParseError(TermError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


def check_name(x: str) -> Name:
    if not isinstance(x, str) or not NAME_RE.match(x) or x == "nil":
        raise TermError(f"invalid name {x!r}")
    return x


class FreshNames:
    """Deterministic generator of ``_g0, _g1, ...`` avoiding a set of names."""

    def __init__(self, avoid: Iterable[Name] = (), prefix: str = "_g"):
        self.avoid = set(avoid)
        self.prefix = prefix
        self.counter = 0

    def __call__(self) -> Name:
        while True:
            x = f"{self.prefix}{self.counter}"
            self.counter += 1
            if x not in self.avoid:
                self.avoid.add(x)
                return x

    def reserve(self, names: Iterable[Name]) -> None:
        self.avoid.update(names)


# --------------------------------------------------------------------------
# Permutations


@dataclass(frozen=True)
class Permutation:
    """Finite-support bijection on names, stored by its non-fixed points."""

    moved: Mapping[Name, Name] = field(default_factory=dict)

    def __post_init__(self):
        m = {a: b for a, b in dict(self.moved).items() if a != b}
        if set(m) != set(m.values()):
            raise TermError(f"not a permutation: {m}")
        object.__setattr__(self, "moved", m)

    @classmethod
    def identity(cls) -> "Permutation":
        return cls({})

    @classmethod
    def swap(cls, x: Name, y: Name) -> "Permutation":
        return cls({x: y, y: x})

    @classmethod
    def cycle(cls, *names: Name) -> "Permutation":
        n = len(names)
        return cls({names[i]: names[(i + 1) % n] for i in range(n)})

    def __call__(self, x: Name) -> Name:
        return self.moved.get(x, x)

    def apply_set(self, names: Iterable[Name]) -> frozenset:
        return frozenset(self(x) for x in names)

    @property
    def support(self) -> frozenset:
        return frozenset(self.moved)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: apply ``other`` first."""
        keys = set(self.moved) | set(other.moved)
        return Permutation({x: self(other(x)) for x in keys})

    __matmul__ = compose

    def inverse(self) -> "Permutation":
        return Permutation({b: a for a, b in self.moved.items()})

    def is_identity(self) -> bool:
        return not self.moved

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.moved == other.moved

    def __hash__(self):
        return hash(frozenset(self.moved.items()))

    def __repr__(self):
        if not self.moved:
            return "Permutation()"
        return "Permutation({%s})" % ", ".join(f"{a}:{b}" for a, b in sorted(self.moved.items()))


# --------------------------------------------------------------------------
# Term AST


@dataclass(frozen=True)
class Atom:
    label: str
    args: tuple[Name, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(set(self.args)) != len(self.args):
            raise TermError(f"repeated argument in atom {self.label}{self.args}")


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Par:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Restrict:
    name: Name
    body: "Term"


@dataclass(frozen=True)
class PermApp:
    body: "Term"
    perm: Permutation


Term = Union[Atom, Nil, Par, Restrict, PermApp]
NIL = Nil()


def par(*terms: Term) -> Term:
    """Right-associated parallel composition; the empty composition is nil."""
    if not terms:
        return NIL
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Par(t, out)
    return out


def restrict(names: Iterable[Name], body: Term) -> Term:
    """``(x1)(x2)...body`` with ``x1`` outermost."""
    for x in reversed(list(names)):
        body = Restrict(x, body)
    return body


def par_factors(t: Term) -> list[Term]:
    """Flatten the parallel spine of ``t``; nil factors are dropped."""
    if isinstance(t, Par):
        return par_factors(t.left) + par_factors(t.right)
    if isinstance(t, Nil):
        return []
    return [t]


def atoms(t: Term) -> Iterator[Atom]:
    if isinstance(t, Atom):
        yield t
    elif isinstance(t, Par):
        yield from atoms(t.left)
        yield from atoms(t.right)
    elif isinstance(t, (Restrict, PermApp)):
        yield from atoms(t.body)


def all_names(t: Term) -> frozenset:
    """Every name occurring in ``t``, free, bound or moved by a permutation."""
    if isinstance(t, Atom):
        return frozenset(t.args)
    if isinstance(t, Nil):
        return frozenset()
    if isinstance(t, Par):
        return all_names(t.left) | all_names(t.right)
    if isinstance(t, Restrict):
        return all_names(t.body) | {t.name}
    return all_names(t.body) | t.perm.support


def bound_names(t: Term) -> list[Name]:
    """Binder names in pre-order (with repetitions)."""
    if isinstance(t, Par):
        return bound_names(t.left) + bound_names(t.right)
    if isinstance(t, Restrict):
        return [t.name] + bound_names(t.body)
    if isinstance(t, PermApp):
        return bound_names(t.body)
    return []


def has_permapp(t: Term) -> bool:
    if isinstance(t, PermApp):
        return True
    if isinstance(t, Par):
        return has_permapp(t.left) or has_permapp(t.right)
    if isinstance(t, Restrict):
        return has_permapp(t.body)
    return False


def free_names(t: Term) -> frozenset:
    if isinstance(t, Atom):
        return frozenset(t.args)
    if isinstance(t, Nil):
        return frozenset()
    if isinstance(t, Par):
        return free_names(t.left) | free_names(t.right)
    if isinstance(t, Restrict):
        return free_names(t.body) - {t.name}
    if isinstance(t, PermApp):
        return t.perm.apply_set(free_names(t.body))
    raise TypeError(f"not a term: {t!r}")


def apply_perm(t: Term, pi: Permutation, fresh: FreshNames | None = None) -> Term:
    """Push ``pi`` through ``t`` in a capture-avoiding way.

    The result contains no permutation applications.  A binder moved by
    ``pi`` is first renamed to a fresh name; since ``pi`` is a bijection this
    also rules out capture of a free name mapped onto the binder.
    """
    if fresh is None:
        fresh = FreshNames(all_names(t) | pi.support)
    if isinstance(t, Atom):
        return Atom(t.label, tuple(pi(x) for x in t.args))
    if isinstance(t, Nil):
        return t
    if isinstance(t, Par):
        return Par(apply_perm(t.left, pi, fresh), apply_perm(t.right, pi, fresh))
    if isinstance(t, PermApp):
        # (p π') π = p (π ∘ π')
        return apply_perm(t.body, pi.compose(t.perm), fresh)
    # Restrict
    x = t.name
    if x in pi.moved:
        z = fresh()
        # z is fresh, so pi fixes it and the swap is an alpha-renaming
        return Restrict(z, apply_perm(t.body, pi.compose(Permutation.swap(x, z)), fresh))
    return Restrict(x, apply_perm(t.body, pi, fresh))


def push_perms(t: Term) -> Term:
    """Eliminate every permutation application in ``t``."""
    if not has_permapp(t):
        return t
    fresh = FreshNames(all_names(t))
    return _push(t, fresh)


def _push(t: Term, fresh: FreshNames) -> Term:
    if isinstance(t, Par):
        return Par(_push(t.left, fresh), _push(t.right, fresh))
    if isinstance(t, Restrict):
        return Restrict(t.name, _push(t.body, fresh))
    if isinstance(t, PermApp):
        fresh.reserve(t.perm.support)
        return apply_perm(t.body, t.perm, fresh)
    return t


def rename_free(t: Term, x: Name, y: Name) -> Term:
    """``t[x ↦ y]`` for a ``y`` not occurring in ``t``."""
    return apply_perm(t, Permutation.swap(x, y))


def _alpha_key(t: Term, env: dict, counter: list) -> tuple:
    if isinstance(t, Atom):
        return ("A", t.label, tuple(env.get(x, ("f", x)) for x in t.args))
    if isinstance(t, Nil):
        return ("N",)
    if isinstance(t, Par):
        return ("P", _alpha_key(t.left, env, counter), _alpha_key(t.right, env, counter))
    if isinstance(t, Restrict):
        idx = ("b", counter[0])
        counter[0] += 1
        inner = dict(env)
        inner[t.name] = idx
        return ("R", idx, _alpha_key(t.body, inner, counter))
    raise TypeError(f"not a term: {t!r}")


def alpha_key(t: Term) -> tuple:
    """Binder-index canonicalization: equal keys iff alpha-equivalent."""
    return _alpha_key(push_perms(t), {}, [0])


def alpha_eq(a: Term, b: Term) -> bool:
    return alpha_key(a) == alpha_key(b)


# --------------------------------------------------------------------------
# Signature, parsing and printing


class Signature(dict):
    """Mapping from constant label to arity."""

    def check(self, t: Term) -> None:
        for a in atoms(t):
            if a.label not in self:
                raise TermError(f"unknown constant {a.label!r}")
            if self[a.label] != len(a.args):
                raise TermError(
                    f"arity mismatch for {a.label}: expected {self[a.label]}, got {len(a.args)}")


_TOKEN_RE = re.compile(r"\s*(?:(\|\|)|([A-Za-z_][A-Za-z0-9_]*)|([(),\[\]:]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            s = len(text[pos:]) - len(text[pos:].lstrip()) + pos
            raise ParseError(f"unexpected character {text[s]!r}", s)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("OR", "||", start))
        elif m.group(2):
            tokens.append(("ID", m.group(2), start))
        else:
            tokens.append((m.group(3), m.group(3), start))
        pos = m.end()
    tokens.append(("EOF", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Mapping[str, int] | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.inferred: dict[str, int] = {}

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self) -> Term:
        t = self.term()
        tok = self.peek()
        if tok[0] != "EOF":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return t

    def term(self) -> Term:
        parts = [self.pre()]
        while self.peek()[0] == "OR":
            self.next()
            parts.append(self.pre())
        return par(*parts)

    def pre(self) -> Term:
        if (self.peek()[0] == "(" and self.peek(1)[0] == "ID" and self.peek(1)[1] != "nil"
                and self.peek(2)[0] == ")"):
            self.next()
            x = self.next()[1]
            self.next()
            return Restrict(x, self.pre())
        return self.atom()

    def atom(self) -> Term:
        tok = self.next()
        if tok[0] == "ID" and tok[1] == "nil":
            return NIL
        if tok[0] == "ID":
            label = tok[1]
            self.expect("(")
            args = []
            if self.peek()[0] != ")":
                args.append(self.name())
                while self.peek()[0] == ",":
                    self.next()
                    args.append(self.name())
            self.expect(")")
            if len(set(args)) != len(args):
                raise ParseError(f"repeated atom argument in {label}({','.join(args)})", tok[2])
            self.check_arity(label, len(args), tok[2])
            return Atom(label, tuple(args))
        if tok[0] == "(":
            t = self.term()
            self.expect(")")
            if self.peek()[0] == "[":
                t = PermApp(t, self.perm())
            return t
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])

    def name(self) -> Name:
        tok = self.expect("ID")
        if tok[1] == "nil":
            raise ParseError("'nil' is not a name", tok[2])
        return tok[1]

    def perm(self) -> Permutation:
        start = self.expect("[")
        pairs = {}
        while self.peek()[0] != "]":
            a = self.name()
            self.expect(":")
            pairs[a] = self.name()
            if self.peek()[0] != ",":
                break
            self.next()
        self.expect("]")
        try:
            return Permutation(pairs)
        except TermError as e:
            raise ParseError(str(e), start[2]) from None

    def check_arity(self, label: str, n: int, pos: int) -> None:
        if self.sig is None:
            expected = self.inferred.setdefault(label, n)
        else:
            if label not in self.sig:
                raise ParseError(f"unknown constant {label!r}", pos)
            expected = self.sig[label]
        if expected != n:
            raise ParseError(f"arity mismatch for {label}: expected {expected}, got {n}", pos)


def parse_term(text: str, sig: Mapping[str, int] | None = None) -> Term:
    """Parse the term DSL.

    With ``sig=None`` arities are inferred and only checked for consistency
    across occurrences.
    """
    return _Parser(text, sig).parse()


def infer_signature(t: Term) -> Signature:
    sig = Signature()
    for a in atoms(t):
        if sig.setdefault(a.label, len(a.args)) != len(a.args):
            raise TermError(f"inconsistent arity for {a.label}")
    return sig


def render_term(t: Term) -> str:
    if isinstance(t, Atom):
        return f"{t.label}({','.join(t.args)})"
    if isinstance(t, Nil):
        return "nil"
    if isinstance(t, Par):
        left = render_term(t.left)
        if isinstance(t.left, Par):
            left = f"({left})"
        return f"{left} || {render_term(t.right)}"
    if isinstance(t, Restrict):
        body = render_term(t.body)
        if isinstance(t.body, Par):
            body = f"({body})"
        return f"({t.name}){body}"
    if isinstance(t, PermApp):
        pairs = ", ".join(f"{a}:{b}" for a, b in sorted(t.perm.moved.items()))
        return f"({render_term(t.body)})[{pairs}]"
    raise TypeError(f"not a term: {t!r}")


def subterm(t: Term, path: Iterable[int]) -> Term:
    """Subterm at a tree position (0 = left/body, 1 = right)."""
    for i in path:
        if isinstance(t, Par):
            t = (t.left, t.right)[i]
        elif isinstance(t, (Restrict, PermApp)) and i == 0:
            t = t.body
        else:
            raise TermError(f"invalid position {i} in {render_term(t)}")
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, Par):
        if i == 0:
            return Par(replace_at(t.left, rest, new), t.right)
        if i == 1:
            return Par(t.left, replace_at(t.right, rest, new))
    elif isinstance(t, Restrict) and i == 0:
        return Restrict(t.name, replace_at(t.body, rest, new))
    elif isinstance(t, PermApp) and i == 0:
        return PermApp(replace_at(t.body, rest, new), t.perm)
    raise TermError(f"invalid position {i} in {render_term(t)}")
