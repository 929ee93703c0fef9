"""First-order terms, substitutions and unification.

Constants obey the unique-name assumption: two constants unify only when
their names are identical.  Variables carry a scope id so that renaming a
plan or rule apart is a deterministic O(size) walk instead of a gensym.
The occurs check is always on.
"""

from __future__ import annotations

import sys
from typing import Iterator, Mapping, Union

__all__ = [
    "Constant",
    "Variable",
    "Compound",
    "Term",
    "Substitution",
    "UnifyFailure",
    "unify",
    "apply_substitution",
    "freshen",
    "term_variables",
    "occurs_in",
    "ScopeCounter",
    "match",
]


class Constant:
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", sys.intern(name))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Constant) and other.name is self.name

    def __hash__(self):
        return hash(("c", self.name))

    def __repr__(self):
        return f"Constant({self.name!r})"

    def __str__(self):
        return self.name


class Variable:
    __slots__ = ("name", "scope")

    def __init__(self, name: str, scope: int = 0):
        object.__setattr__(self, "name", sys.intern(name))
        object.__setattr__(self, "scope", scope)

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Variable)
            and other.name is self.name
            and other.scope == self.scope
        )

    def __hash__(self):
        return hash(("v", self.name, self.scope))

    def __repr__(self):
        return f"Variable({self.name!r}, {self.scope})"

    def __str__(self):
        if self.scope:
            return f"?{self.name}@{self.scope}"
        return f"?{self.name}"


class Compound:
    __slots__ = ("functor", "args", "_hash")

    def __init__(self, functor: str, args):
        object.__setattr__(self, "functor", sys.intern(functor))
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "_hash", hash(("f", self.functor, self.args)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Compound)
            and self._hash == other._hash
            and other.functor is self.functor
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Compound({self.functor!r}, {list(self.args)!r})"

    def __str__(self):
        if not self.args:
            return f"({self.functor})"
        return "(" + " ".join([self.functor, *map(str, self.args)]) + ")"


Term = Union[Constant, Variable, Compound]
_TERM_TYPES = (Constant, Variable, Compound)


class UnifyFailure:
    """Returned (not raised) when two terms do not unify."""

    __slots__ = ("reason",)

    def __init__(self, reason: str):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"UnifyFailure({self.reason!r})"


class Substitution(Mapping):
    """An idempotent finite map from variables to terms.

    Bindings are kept fully resolved: no bound variable occurs in any
    binding's right-hand side, so one application pass is enough.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Mapping | None = None):
        self._map: dict = {}
        if bindings:
            for var, term in bindings.items():
                self._map[var] = term
            # resolve to idempotent form; a cycle never stabilises
            for _ in range(len(self._map) + 1):
                resolved = {
                    k: _walk_apply(v, self._map, None) for k, v in self._map.items()
                }
                if resolved == self._map:
                    break
                self._map = resolved
            for var, term in self._map.items():
                if occurs_in(var, term):
                    raise ValueError(f"cyclic binding for {var}")

    def __getitem__(self, key):
        return self._map[key]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __bool__(self):
        # success is truthy even when empty; UnifyFailure is the falsy case
        return True

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}↦{v}" for k, v in self._map.items())
        return "{" + inner + "}"

    def extend(self, var: Variable, term: Term) -> "Substitution":
        """Return a new substitution with ``var ↦ term`` composed in.

        ``term`` must already be resolved against ``self`` and must not
        contain ``var``.
        """
        new = Substitution.__new__(Substitution)
        single = {var: term}
        new._map = {k: _walk_apply(v, single, None) for k, v in self._map.items()}
        new._map[var] = term
        return new

    def restrict(self, variables) -> "Substitution":
        new = Substitution.__new__(Substitution)
        wanted = set(variables)
        new._map = {k: v for k, v in self._map.items() if k in wanted}
        return new


def _walk_apply(t, mapping, _seen):
    if isinstance(t, Variable):
        return mapping.get(t, t)
    if isinstance(t, Compound):
        if not t.args:
            return t
        new_args = tuple(_walk_apply(a, mapping, _seen) for a in t.args)
        if all(a is b for a, b in zip(new_args, t.args)):
            return t
        return Compound(t.functor, new_args)
    return t


def occurs_in(var: Variable, t) -> bool:
    if isinstance(t, Variable):
        return t == var
    if isinstance(t, Compound):
        return any(occurs_in(var, a) for a in t.args)
    return False


def term_variables(t) -> Iterator[Variable]:
    """Yield the variables of a term (or proposition) left to right."""
    if isinstance(t, Variable):
        yield t
    elif isinstance(t, Compound):
        for a in t.args:
            yield from term_variables(a)
    elif hasattr(t, "variables"):
        yield from t.variables()


def unify(a, b, s: Substitution | None = None):
    """Most general unifier of ``a`` and ``b`` extending ``s``.

    Works on terms and on propositions (which expose ``unify_parts``).
    Returns a :class:`UnifyFailure` on clash, arity mismatch or occurs
    check violation.
    """
    if s is None:
        s = Substitution()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = _walk_apply(x, s._map, None)
        y = _walk_apply(y, s._map, None)
        if x is y or x == y:
            continue
        if isinstance(x, Variable) or isinstance(y, Variable):
            if not (isinstance(x, _TERM_TYPES) and isinstance(y, _TERM_TYPES)):
                return UnifyFailure(f"variables range over terms only: {x} vs {y}")
        if isinstance(x, Variable):
            if occurs_in(x, y):
                return UnifyFailure(f"occurs check: {x} in {y}")
            s = s.extend(x, y)
            continue
        if isinstance(y, Variable):
            if occurs_in(y, x):
                return UnifyFailure(f"occurs check: {y} in {x}")
            s = s.extend(y, x)
            continue
        if isinstance(x, Constant) or isinstance(y, Constant):
            return UnifyFailure(f"clash: {x} vs {y}")
        if isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor is not y.functor or len(x.args) != len(y.args):
                return UnifyFailure(f"functor mismatch: {x} vs {y}")
            stack.extend(zip(x.args, y.args))
            continue
        parts = _prop_parts(x, y)
        if parts is None:
            return UnifyFailure(f"shape mismatch: {x} vs {y}")
        stack.extend(parts)
    return s


def _prop_parts(x, y):
    # Propositions register a `unify_parts` hook so that unify stays the
    # single matching routine for both layers.
    hook = getattr(x, "unify_parts", None)
    if hook is None:
        return None
    return hook(y)


def apply_substitution(t, s: Mapping):
    """Replace every bound variable of ``t`` (term or proposition)."""
    if not s:
        return t
    if isinstance(s, Substitution):
        s = s._map
    if hasattr(t, "map_terms"):
        return t.map_terms(lambda u: _walk_apply(u, s, None))
    return _walk_apply(t, s, None)


def freshen(t, scope: int):
    """Rename every variable of ``t`` into ``scope``, preserving sharing."""

    def rename(u):
        if isinstance(u, Variable):
            return Variable(u.name, scope)
        if isinstance(u, Compound) and u.args:
            return Compound(u.functor, [rename(a) for a in u.args])
        return u

    if hasattr(t, "map_terms"):
        return t.map_terms(rename)
    return rename(t)


class ScopeCounter:
    """Hands out never-before-used scope ids (0 is reserved for user text)."""

    def __init__(self, start: int = 1):
        self._next = start

    def __call__(self) -> int:
        n = self._next
        self._next += 1
        return n


def match(pattern, target, s: Substitution | None = None):
    """One-way matching: bind variables of ``pattern`` only.

    Variables inside ``target`` are treated as opaque constants.  Returns a
    substitution or a :class:`UnifyFailure`.
    """
    if s is None:
        s = Substitution()
    bindings = dict(s._map)
    stack = [(pattern, target)]
    while stack:
        x, y = stack.pop()
        if isinstance(x, Variable):
            bound = bindings.get(x)
            if bound is None:
                if not isinstance(y, _TERM_TYPES):
                    return UnifyFailure(f"variables range over terms only: {x}")
                bindings[x] = y
            elif bound != y:
                return UnifyFailure(f"{x} already bound to {bound}, not {y}")
            continue
        if isinstance(x, Constant):
            if x != y:
                return UnifyFailure(f"clash: {x} vs {y}")
            continue
        if isinstance(x, Compound):
            if (
                not isinstance(y, Compound)
                or x.functor is not y.functor
                or len(x.args) != len(y.args)
            ):
                return UnifyFailure(f"functor mismatch: {x} vs {y}")
            stack.extend(zip(x.args, y.args))
            continue
        parts = _prop_parts(x, y)
        if parts is None:
            return UnifyFailure(f"shape mismatch: {x} vs {y}")
        stack.extend(parts)
    out = Substitution.__new__(Substitution)
    out._map = bindings
    return out
