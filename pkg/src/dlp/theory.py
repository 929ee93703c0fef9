"""Named theories, their append-only ledgers and the store that owns them.

A theory holds assertions, directional entailment rules, plans and
probability constraints.  Nothing is ever removed from a theory; a theory
without some item is obtained by deriving a new theory from a snapshot of
the old one.  Each theory also keeps the ledger of derivations the engines
recorded against it and the arguments people made about its contents.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import (
    CycleDetected,
    DuplicateName,
    EmptyPremises,
    UnknownId,
    UnknownTheory,
    UnsafeRule,
)
from .plans import Plan, compile_implication
from .props import Implies, Proposition, is_ground
from .terms import term_variables

__all__ = [
    "Assertion",
    "EntailmentRule",
    "Derivation",
    "Argument",
    "Theory",
    "TheorySnapshot",
    "TheoryStore",
    "USER",
    "CLOSED_WORLD",
    "REITERATION",
]

USER = "user"
CLOSED_WORLD = "closed-world"
REITERATION = "reiteration"


@dataclass(frozen=True)
class Assertion:
    id: str
    prop: Proposition
    source: str = USER
    # (plan id, triggering assertion id or None) for planner-made assertions
    cause: tuple | None = None


@dataclass(frozen=True)
class EntailmentRule:
    """``premises |-_theory conclusion``; only ever applied left to right."""

    id: str
    premises: tuple
    conclusion: Proposition
    theory: str


@dataclass(frozen=True)
class Derivation:
    id: str
    conclusion: Proposition
    rule: str
    premises: tuple
    theory: str
    depth: int
    hypotheses: tuple = ()
    # assertion id for reiteration leaves, rule id for rule-application
    ref: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.premises


@dataclass(frozen=True)
class Argument:
    id: str
    target: Union[Proposition, str]
    polarity: str  # "pro" | "con"
    support: str  # derivation id or free-text annotation
    author: str


@dataclass(frozen=True)
class TheorySnapshot:
    """Immutable view of a theory's visible content at one instant."""

    name: str
    assertions: tuple
    rules: tuple
    plans: tuple
    constraints: tuple

    @property
    def propositions(self) -> tuple:
        return tuple(a.prop for a in self.assertions)

    def is_ground_boolean(self) -> bool:
        return all(is_ground(a.prop) for a in self.assertions) and all(
            is_ground(r.conclusion) and all(is_ground(p) for p in r.premises)
            for r in self.rules
        )


_ID_NUM = re.compile(r"(\d+)$")


class Theory:
    def __init__(self, name: str, basis: tuple | None = None):
        self.name = name
        self.basis = basis  # (parent name, frozenset of omitted ids)
        self._items: dict[str, object] = {}
        self.constraints: list = []
        self._derivations: dict[str, Derivation] = {}
        self._derivation_keys: dict[tuple, str] = {}
        self.arguments: dict[str, Argument] = {}
        self._lock = threading.RLock()

    # -- reading ---------------------------------------------------------

    @property
    def assertions(self) -> list[Assertion]:
        return [i for i in self._items.values() if isinstance(i, Assertion)]

    @property
    def rules(self) -> list[EntailmentRule]:
        return [i for i in self._items.values() if isinstance(i, EntailmentRule)]

    @property
    def plans(self) -> list[Plan]:
        return [i for i in self._items.values() if isinstance(i, Plan)]

    @property
    def derivations(self) -> list[Derivation]:
        return list(self._derivations.values())

    def item(self, item_id: str):
        try:
            return self._items[item_id]
        except KeyError:
            raise UnknownId(f"{item_id} is not visible in theory {self.name}") from None

    def has_item(self, item_id: str) -> bool:
        return item_id in self._items

    def derivation(self, d_id: str) -> Derivation:
        try:
            return self._derivations[d_id]
        except KeyError:
            raise UnknownId(f"no derivation {d_id} in theory {self.name}") from None

    def snapshot(self) -> TheorySnapshot:
        with self._lock:
            return TheorySnapshot(
                self.name,
                tuple(self.assertions),
                tuple(self.rules),
                tuple(self.plans),
                tuple(self.constraints),
            )

    # -- writing (store-mediated) ------------------------------------------

    def _add_item(self, item):
        with self._lock:
            if item.id in self._items:
                raise DuplicateName(f"id {item.id} already used in {self.name}")
            self._items[item.id] = item
        return item.id

    def record_derivation(
        self, conclusion, rule, premises=(), hypotheses=(), ref=None, depth=None
    ) -> str:
        """Append a derivation node, reusing the id of an identical node."""
        premises = tuple(premises)
        hypotheses = tuple(hypotheses)
        key = (conclusion, rule, premises, hypotheses, ref)
        with self._lock:
            found = self._derivation_keys.get(key)
            if found is not None:
                return found
            if depth is None:
                depth = 1 + max(
                    (self._derivations[p].depth for p in premises), default=-1
                )
            d_id = f"d{len(self._derivations)}"
            self._derivations[d_id] = Derivation(
                d_id, conclusion, rule, premises, self.name, depth, hypotheses, ref
            )
            self._derivation_keys[key] = d_id
            return d_id

    def _add_derivation(self, d: Derivation):
        # import path: ids come from the exported ledger
        key = (d.conclusion, d.rule, d.premises, d.hypotheses, d.ref)
        with self._lock:
            self._derivations[d.id] = d
            self._derivation_keys.setdefault(key, d.id)


class TheoryStore:
    """Registry of theories sharing one id space for items and arguments."""

    def __init__(self):
        self._theories: dict[str, Theory] = {}
        self._item_counter = itertools.count(1)
        self._plan_counter = itertools.count(1)
        self._arg_counter = itertools.count(1)
        self._lock = threading.RLock()

    # -- theories ----------------------------------------------------------

    def create_theory(self, name: str) -> str:
        with self._lock:
            if name in self._theories:
                raise DuplicateName(f"theory {name} already exists")
            self._theories[name] = Theory(name)
        return name

    def ensure_theory(self, name: str) -> str:
        with self._lock:
            if name not in self._theories:
                self._theories[name] = Theory(name)
        return name

    def theory(self, name: str) -> Theory:
        try:
            return self._theories[name]
        except KeyError:
            raise UnknownTheory(f"no theory named {name}") from None

    def __contains__(self, name):
        return name in self._theories

    @property
    def theory_names(self) -> list[str]:
        return list(self._theories)

    def snapshot(self, name: str) -> TheorySnapshot:
        return self.theory(name).snapshot()

    # -- ids ---------------------------------------------------------------

    def _next_item_id(self) -> str:
        return f"A{next(self._item_counter)}"

    def _next_plan_id(self) -> str:
        return f"P{next(self._plan_counter)}"

    def _bump(self, which: str, item_id: str):
        # keep counters ahead of ids that arrive through import
        m = _ID_NUM.search(item_id)
        if not m:
            return
        n = int(m.group(1))
        counter = getattr(self, which)
        nxt = next(counter)
        setattr(self, which, itertools.count(max(nxt, n + 1)))

    # -- content -----------------------------------------------------------

    def assert_prop(
        self,
        theory: str,
        prop: Proposition,
        source: str = USER,
        cause: tuple | None = None,
        item_id: str | None = None,
    ) -> str:
        """Append ``prop``; asserting the same proposition twice gives two ids.

        This is the raw ledger write.  Forward plans fire only through
        :func:`dlp.planner.assert_with_triggers`.
        """
        t = self.theory(theory)
        if not isinstance(prop, Proposition):
            raise TypeError(f"not a proposition: {prop!r}")
        with self._lock:
            if item_id is None:
                item_id = self._next_item_id()
            else:
                self._bump("_item_counter", item_id)
        return t._add_item(Assertion(item_id, prop, source, cause))

    def add_rule(
        self,
        theory: str,
        premises: Iterable[Proposition],
        conclusion: Proposition,
        item_id: str | None = None,
    ) -> str:
        t = self.theory(theory)
        premises = tuple(premises)
        if not premises:
            raise EmptyPremises("an entailment rule needs at least one premise")
        bound = {v for p in premises for v in term_variables(p)}
        loose = [v for v in term_variables(conclusion) if v not in bound]
        if loose:
            raise UnsafeRule(
                "conclusion variables not bound by any premise: "
                + ", ".join(str(v) for v in loose)
            )
        with self._lock:
            if item_id is None:
                item_id = self._next_item_id()
            else:
                self._bump("_item_counter", item_id)
        return t._add_item(EntailmentRule(item_id, premises, conclusion, theory))

    def add_plan(self, theory: str, trigger: str, pattern, body, origin="user") -> str:
        t = self.theory(theory)
        with self._lock:
            plan_id = self._next_plan_id()
        return t._add_item(Plan(plan_id, trigger, pattern, tuple(body), origin))

    def add_implication(self, theory: str, p, q, plans: bool = True) -> tuple:
        """Assert ``(implies p q)`` and, unless ``plans`` is false, install
        its four compiled plans.  Returns (assertion id, plan ids)."""
        a_id = self.assert_prop(theory, Implies(p, q))
        plan_ids = []
        if plans:
            t = self.theory(theory)
            with self._lock:
                ids = [self._next_plan_id() for _ in range(4)]
            for plan in compile_implication(p, q, ids, a_id):
                plan_ids.append(t._add_item(plan))
        return a_id, plan_ids

    def add_constraint(self, theory: str, constraint) -> None:
        t = self.theory(theory)
        with t._lock:
            t.constraints.append(constraint)

    def list_assertions(self, theory: str) -> list[Assertion]:
        return self.theory(theory).assertions

    def derive_theory(
        self,
        base: str,
        name: str,
        omit: Iterable[str] = (),
        add: Iterable = (),
        omit_sources: Iterable[str] = (),
    ) -> str:
        """Snapshot ``base`` minus ``omit`` (ids) into a new theory ``name``.

        Items keep their ids.  ``omit_sources`` drops every assertion whose
        source tag is listed (e.g. all closed-world conclusions).  ``add``
        takes propositions (asserted) and ``(premises, conclusion)`` pairs
        (added as rules).  Later changes to ``base`` do not reach the child.
        """
        parent = self.theory(base)
        omit = frozenset(omit)
        omit_sources = frozenset(omit_sources)
        with parent._lock:
            for item_id in omit:
                if not parent.has_item(item_id):
                    raise UnknownId(f"{item_id} is not visible in theory {base}")
            with self._lock:
                if name in self._theories:
                    raise DuplicateName(f"theory {name} already exists")
                child = Theory(name, basis=(base, omit))
                self._theories[name] = child
            dropped = set(omit)
            for item in parent._items.values():
                if item.id in omit:
                    continue
                if isinstance(item, Assertion) and item.source in omit_sources:
                    dropped.add(item.id)
                    continue
                if isinstance(item, EntailmentRule):
                    item = EntailmentRule(
                        item.id, item.premises, item.conclusion, name
                    )
                child._items[item.id] = item
            child.constraints = list(parent.constraints)
            child.basis = (base, frozenset(dropped))
        for extra in add:
            if isinstance(extra, Proposition):
                self.assert_prop(name, extra)
            else:
                premises, conclusion = extra
                self.add_rule(name, premises, conclusion)
        return name

    # -- argumentation -----------------------------------------------------

    def argue(
        self,
        theory: str,
        target,
        polarity: str,
        support: str,
        author: str,
        arg_id: str | None = None,
    ) -> str:
        """Record a pro/con argument about a proposition or another argument.

        Arguments are ledger entries only; they never change what is
        derivable.
        """
        t = self.theory(theory)
        if polarity not in ("pro", "con"):
            raise ValueError(f"polarity must be pro or con, not {polarity!r}")
        with t._lock:
            if arg_id is None:
                with self._lock:
                    arg_id = f"arg{next(self._arg_counter)}"
            else:
                if arg_id in t.arguments:
                    raise DuplicateName(f"argument {arg_id} already exists")
                with self._lock:
                    self._bump("_arg_counter", arg_id)
            if isinstance(target, str):
                seen = {arg_id}
                cursor = target
                while isinstance(cursor, str):
                    if cursor in seen:
                        raise CycleDetected(
                            f"argument {arg_id} would transitively target itself"
                        )
                    seen.add(cursor)
                    if cursor not in t.arguments:
                        raise UnknownId(f"no argument {cursor} in theory {theory}")
                    cursor = t.arguments[cursor].target
            elif not isinstance(target, Proposition):
                raise TypeError("target must be a proposition or an argument id")
            t.arguments[arg_id] = Argument(arg_id, target, polarity, support, author)
        return arg_id

    def arguments_about(self, theory: str, target) -> list[Argument]:
        return [a for a in self.theory(theory).arguments.values() if a.target == target]

    # -- engine-backed queries ----------------------------------------------

    def list_inconsistencies(self, theory: str, budget=None):
        from .direct import list_inconsistencies

        return list_inconsistencies(self, theory, budget)

    def audit(self, theory: str, constraints=None):
        from .prob import audit_contraposition

        snap = self.snapshot(theory)
        if constraints is None:
            constraints = snap.constraints
        return audit_contraposition(snap.rules, constraints)
