"""Pattern-directed plans over a theory's database.

Goals are matched against database assertions first and then against
when-goal plans, both in installation order, with chronological
backtracking.  Assertions made inside a branch are tentative: they are
rolled back when the search backs out past them and written to the
theory only when the top-level call succeeds.  ``thnot`` concludes
``not G`` only after the search for ``G`` has been exhausted; running out
of budget is not failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .plans import WHEN_ASSERT, WHEN_GOAL, Bind, DoAssert, DoGoal, DoThnot, Fail
from .props import Not, is_ground
from .terms import ScopeCounter, Substitution, apply_substitution, freshen, unify
from .theory import CLOSED_WORLD, USER

__all__ = [
    "TraceEvent",
    "Success",
    "Failure",
    "ThnotResult",
    "Consequents",
    "achieve",
    "assert_with_triggers",
    "thnot",
    "DEFAULT_PLANNER_BUDGET",
]

DEFAULT_PLANNER_BUDGET = 10_000
MAX_GOAL_DEPTH = 200


@dataclass(frozen=True)
class TraceEvent:
    kind: str  # goal | match | plan | assert | trigger | thnot | budget-exhausted
    depth: int
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "depth": self.depth, "detail": self.detail}


@dataclass
class Success:
    substitution: Substitution
    trace: list
    assertions: list = field(default_factory=list)  # ids committed by the run

    ok = True

    def __bool__(self):
        return True


@dataclass
class Failure:
    exhausted: bool  # True: search space exhausted; False: budget ran out
    trace: list

    ok = False

    def __bool__(self):
        return False

    @property
    def budget_exhausted(self) -> bool:
        return not self.exhausted


@dataclass
class ThnotResult:
    success: bool
    assertion_id: str | None = None
    budget_exhausted: bool = False

    def __bool__(self):
        return self.success


class Consequents(list):
    """Ids asserted by triggered plans; ``assertion_id`` is the trigger's own
    id and ``exhausted`` is set when the cascade was cut short by budget."""

    def __init__(self, ids=(), assertion_id=None, exhausted=False):
        super().__init__(ids)
        self.assertion_id = assertion_id
        self.exhausted = exhausted


class _OutOfBudget(Exception):
    pass


@dataclass
class _Pending:
    id: str
    prop: object
    source: str
    cause: tuple | None


class _Session:
    """One search over a theory snapshot plus tentative assertions."""

    def __init__(self, store, theory: str, budget: int | None):
        self.store = store
        self.theory = theory
        snap = store.snapshot(theory)
        self.base = [(a.id, a.prop) for a in snap.assertions]
        self.goal_plans = [p for p in snap.plans if p.trigger == WHEN_GOAL]
        self.assert_plans = [p for p in snap.plans if p.trigger == WHEN_ASSERT]
        self.pending: list[_Pending] = []
        self.max_steps = budget if budget is not None else DEFAULT_PLANNER_BUDGET
        self.steps = 0
        self.trace: list[TraceEvent] = []
        self.fresh = ScopeCounter()

    # bookkeeping

    def _tick(self, depth):
        self.steps += 1
        if self.steps > self.max_steps or depth > MAX_GOAL_DEPTH:
            raise _OutOfBudget

    def _log(self, kind, depth, detail):
        self.trace.append(TraceEvent(kind, depth, detail))

    def database(self):
        return self.base + [(p.id, p.prop) for p in self.pending]

    def _contains(self, prop) -> bool:
        return any(q == prop for _, q in self.database())

    def commit(self) -> list[str]:
        ids = []
        for p in self.pending:
            self.store.assert_prop(self.theory, p.prop, p.source, p.cause, item_id=p.id)
            ids.append(p.id)
        self.pending = []
        return ids

    # goals

    def solve(self, goal, s, depth):
        self._tick(depth)
        g = apply_substitution(goal, s)
        self._log("goal", depth, str(g))
        for a_id, fact in self.database():
            if not is_ground(fact):
                fact = freshen(fact, self.fresh())
            s2 = unify(g, fact, s)
            if s2:
                self._log("match", depth, a_id)
                yield s2
                self._tick(depth)
        for plan in self.goal_plans:
            pattern, body = plan.freshened(self.fresh())
            s2 = unify(g, pattern, s)
            if not s2:
                continue
            self._log("plan", depth, plan.id)
            yield from self.run_body(body, s2, depth + 1, plan.id, None)

    def run_body(self, steps, s, depth, plan_id, trigger_id):
        if not steps:
            yield s
            return
        step, rest = steps[0], steps[1:]
        if isinstance(step, DoGoal):
            for s2 in self.solve(step.prop, s, depth):
                yield from self.run_body(rest, s2, depth, plan_id, trigger_id)
        elif isinstance(step, DoAssert):
            prop = apply_substitution(step.prop, s)
            mark = len(self.pending)
            self.assert_tentative(prop, f"planner:{plan_id}", (plan_id, trigger_id), depth)
            yield from self.run_body(rest, s, depth, plan_id, trigger_id)
            del self.pending[mark:]
        elif isinstance(step, DoThnot):
            prop = apply_substitution(step.prop, s)
            if self.exhaustively_fails(prop, s, depth):
                mark = len(self.pending)
                if step.assert_negation:
                    self.assert_tentative(Not(prop), CLOSED_WORLD, (plan_id, trigger_id), depth)
                yield from self.run_body(rest, s, depth, plan_id, trigger_id)
                del self.pending[mark:]
        elif isinstance(step, Bind):
            s2 = unify(apply_substitution(step.left, s), apply_substitution(step.right, s), s)
            if s2:
                yield from self.run_body(rest, s2, depth, plan_id, trigger_id)
        elif isinstance(step, Fail):
            return
        else:
            raise TypeError(f"unknown plan step {step!r}")

    def exhaustively_fails(self, goal, s, depth) -> bool:
        self._log("thnot", depth, str(goal))
        mark = len(self.pending)
        found = False
        for _ in self.solve(goal, s, depth + 1):
            found = True
            break
        del self.pending[mark:]
        return not found

    # assertions

    def assert_tentative(self, prop, source, cause, depth):
        """Add ``prop`` unless already present and run matching when-assert
        plans, each to its first success, in installation order."""
        if self._contains(prop):
            return None
        a_id = self.store._next_item_id()
        self.pending.append(_Pending(a_id, prop, source, cause))
        self._log("assert", depth, f"{a_id} {prop}")
        self.fire_triggers(prop, a_id, depth)
        return a_id

    def fire_triggers(self, prop, a_id, depth):
        for plan in self.assert_plans:
            pattern, body = plan.freshened(self.fresh())
            s = unify(pattern, prop)
            if not s:
                continue
            self._tick(depth)
            self._log("trigger", depth, f"{plan.id} on {a_id}")
            run = self.run_body(body, s, depth + 1, plan.id, a_id)
            for _ in run:
                break
            run.close()


def achieve(store, theory: str, goal, budget: int | None = None):
    """Depth-first search for ``goal``; commits the winning branch's
    assertions.  Returns :class:`Success` or :class:`Failure`."""
    sess = _Session(store, theory, budget)
    try:
        for s in sess.solve(goal, Substitution(), 0):
            ids = sess.commit()
            return Success(s.restrict(list(goal.variables())), sess.trace, ids)
    except _OutOfBudget:
        sess.pending = []
        sess._log("budget-exhausted", 0, f"after {sess.steps} steps")
        return Failure(False, sess.trace)
    return Failure(True, sess.trace)


def assert_with_triggers(store, theory: str, prop, budget: int | None = None, source: str = USER) -> Consequents:
    """Assert ``prop`` (always a new ledger entry) and cascade when-assert
    plans.  On budget exhaustion the cascade stops and what was already
    asserted is kept."""
    sess = _Session(store, theory, budget)
    a_id = store._next_item_id()
    sess.pending.append(_Pending(a_id, prop, source, None))
    exhausted = False
    try:
        sess.fire_triggers(prop, a_id, 0)
    except _OutOfBudget:
        exhausted = True
    ids = sess.commit()
    return Consequents(ids[1:], a_id, exhausted)


def thnot(store, theory: str, goal, assert_negation: bool = False, budget: int | None = None) -> ThnotResult:
    """Negation as failure: succeed iff the search for ``goal`` exhausts
    without a solution, optionally asserting ``not goal`` (source
    closed-world)."""
    sess = _Session(store, theory, budget)
    try:
        found = not sess.exhaustively_fails(goal, Substitution(), 0)
    except _OutOfBudget:
        return ThnotResult(False, budget_exhausted=True)
    if found:
        return ThnotResult(False)
    a_id = None
    if assert_negation:
        a_id = store.assert_prop(theory, Not(goal), CLOSED_WORLD)
    return ThnotResult(True, a_id)
