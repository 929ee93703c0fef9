"""The proposition language: atoms plus not / and / or / implies.

Double negation is never collapsed implicitly: ``Not(Not(p))`` and ``p``
are different syntax and are related only through inference.
"""

from __future__ import annotations

import sys
import threading
import weakref
from typing import Callable, Iterator

from .terms import Compound, Constant, Variable, term_variables

__all__ = [
    "Proposition",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "atom",
    "is_ground",
    "subformulas",
    "symbols",
    "strip_negations",
    "negation_depth",
    "format_prop",
    "format_term",
    "size",
]


class Proposition:
    """Base of the formula classes.

    Instances are hash-consed: building the same formula twice returns the
    same object, so equality is identity and hashing is by address.
    """

    __slots__ = ("__weakref__", "_neg")

    def __setattr__(self, key, value):
        raise AttributeError("propositions are immutable")

    def __str__(self):
        return format_prop(self)

    def __lt__(self, other):
        return format_prop(self) < format_prop(other)


_table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()
_table_lock = threading.Lock()


def _interned(cls, key, fields):
    obj = _table.get(key)
    if obj is not None:
        return obj
    with _table_lock:
        obj = _table.get(key)
        if obj is None:
            obj = object.__new__(cls)
            object.__setattr__(obj, "_neg", None)
            for name, value in fields:
                object.__setattr__(obj, name, value)
            _table[key] = obj
    return obj


class Atom(Proposition):
    __slots__ = ("predicate", "args")

    def __new__(cls, predicate: str, args=()):
        predicate = sys.intern(predicate)
        args = tuple(args)
        return _interned(cls, ("A", predicate, args), (("predicate", predicate), ("args", args)))

    def __reduce__(self):
        return (Atom, (self.predicate, self.args))

    def __repr__(self):
        if not self.args:
            return f"Atom({self.predicate!r})"
        return f"Atom({self.predicate!r}, {list(self.args)!r})"

    def map_terms(self, fn: Callable) -> "Atom":
        if not self.args:
            return self
        new = tuple(fn(a) for a in self.args)
        if all(a is b for a, b in zip(new, self.args)):
            return self
        return Atom(self.predicate, new)

    def variables(self) -> Iterator[Variable]:
        for a in self.args:
            yield from term_variables(a)

    def unify_parts(self, other):
        if (
            type(other) is not Atom
            or other.predicate is not self.predicate
            or len(other.args) != len(self.args)
        ):
            return None
        return list(zip(self.args, other.args))


class Not(Proposition):
    __slots__ = ("p",)

    def __new__(cls, p: Proposition):
        if not isinstance(p, Proposition):
            raise TypeError(f"not a proposition: {p!r}")
        neg = p._neg
        if neg is None:
            # the negation is kept alive by what it negates
            neg = _interned(cls, ("N", p), (("p", p),))
            object.__setattr__(p, "_neg", neg)
        return neg

    def __reduce__(self):
        return (Not, (self.p,))

    def __repr__(self):
        return f"Not({self.p!r})"

    def map_terms(self, fn):
        p = self.p.map_terms(fn)
        return self if p is self.p else Not(p)

    def variables(self):
        return self.p.variables()

    def unify_parts(self, other):
        if type(other) is not Not:
            return None
        return [(self.p, other.p)]


class _Binary(Proposition):
    __slots__ = ("left", "right")
    _tag = ""

    def __new__(cls, left: Proposition, right: Proposition):
        if not (isinstance(left, Proposition) and isinstance(right, Proposition)):
            raise TypeError(f"not propositions: {left!r}, {right!r}")
        return _interned(cls, (cls._tag, left, right), (("left", left), ("right", right)))

    def __reduce__(self):
        return (type(self), (self.left, self.right))

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"

    def map_terms(self, fn):
        l = self.left.map_terms(fn)
        r = self.right.map_terms(fn)
        if l is self.left and r is self.right:
            return self
        return type(self)(l, r)

    def variables(self):
        yield from self.left.variables()
        yield from self.right.variables()

    def unify_parts(self, other):
        if type(other) is not type(self):
            return None
        return [(self.left, other.left), (self.right, other.right)]


class And(_Binary):
    __slots__ = ()
    _tag = "and"


class Or(_Binary):
    __slots__ = ()
    _tag = "or"


class Implies(_Binary):
    """The implication connective; ``left`` is the antecedent."""

    __slots__ = ()
    _tag = "implies"

    @property
    def antecedent(self):
        return self.left

    @property
    def consequent(self):
        return self.right


def atom(predicate: str, *args: str) -> Atom:
    """Build an atom from bare strings; ``?x`` strings become variables."""
    return Atom(predicate, [_term_from_str(a) for a in args])


def _term_from_str(s):
    if not isinstance(s, str):
        return s
    if s.startswith("?"):
        return Variable(s[1:])
    return Constant(s)


def is_ground(p) -> bool:
    return next(iter(p.variables()), None) is None


def subformulas(p: Proposition) -> Iterator[Proposition]:
    """Pre-order walk over every subformula occurrence of ``p``."""
    stack = [p]
    while stack:
        q = stack.pop()
        yield q
        if isinstance(q, Not):
            stack.append(q.p)
        elif isinstance(q, _Binary):
            stack.append(q.right)
            stack.append(q.left)


def size(p: Proposition) -> int:
    return sum(1 for _ in subformulas(p))


def symbols(p: Proposition) -> set[str]:
    """Predicate, constant and functor names mentioned by ``p``."""
    out: set[str] = set()

    def walk_term(t):
        if isinstance(t, Constant):
            out.add(t.name)
        elif isinstance(t, Compound):
            out.add(t.functor)
            for a in t.args:
                walk_term(a)

    for q in subformulas(p):
        if isinstance(q, Atom):
            out.add(q.predicate)
            for a in q.args:
                walk_term(a)
    return out


def strip_negations(p: Proposition) -> Proposition:
    while isinstance(p, Not):
        p = p.p
    return p


def negation_depth(p: Proposition) -> int:
    n = 0
    while isinstance(p, Not):
        p = p.p
        n += 1
    return n


def format_term(t) -> str:
    if isinstance(t, Compound):
        if not t.args:
            return f"({t.functor})"
        return "(" + " ".join([t.functor, *map(format_term, t.args)]) + ")"
    return str(t)


def format_prop(p: Proposition) -> str:
    """Render in the surface s-expression syntax (0-ary atoms print bare)."""
    if isinstance(p, Atom):
        if not p.args:
            return p.predicate
        return "(" + " ".join([p.predicate, *map(format_term, p.args)]) + ")"
    if isinstance(p, Not):
        return f"(not {format_prop(p.p)})"
    if isinstance(p, And):
        return f"(and {format_prop(p.left)} {format_prop(p.right)})"
    if isinstance(p, Or):
        return f"(or {format_prop(p.left)} {format_prop(p.right)})"
    if isinstance(p, Implies):
        return f"(implies {format_prop(p.left)} {format_prop(p.right)})"
    raise TypeError(f"not a proposition: {p!r}")
