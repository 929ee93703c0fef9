"""Plan data types and the four-way procedural reading of an implication."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .props import Not, Proposition
from .terms import freshen

__all__ = [
    "DoAssert",
    "DoGoal",
    "DoThnot",
    "Fail",
    "Bind",
    "PlanStep",
    "Plan",
    "WHEN_ASSERT",
    "WHEN_GOAL",
    "compile_implication",
]

WHEN_ASSERT = "when-assert"
WHEN_GOAL = "when-goal"


@dataclass(frozen=True)
class DoAssert:
    prop: Proposition


@dataclass(frozen=True)
class DoGoal:
    prop: Proposition


@dataclass(frozen=True)
class DoThnot:
    prop: Proposition
    assert_negation: bool = False


@dataclass(frozen=True)
class Fail:
    pass


@dataclass(frozen=True)
class Bind:
    left: object
    right: object


PlanStep = Union[DoAssert, DoGoal, DoThnot, Fail, Bind]


@dataclass(frozen=True)
class Plan:
    id: str
    trigger: str  # WHEN_ASSERT or WHEN_GOAL
    pattern: Proposition
    body: tuple = ()
    origin: str = "user"  # "user" or "compiled-from:<id>"

    def __post_init__(self):
        if self.trigger not in (WHEN_ASSERT, WHEN_GOAL):
            raise ValueError(f"unknown plan trigger {self.trigger!r}")
        object.__setattr__(self, "body", tuple(self.body))

    def freshened(self, scope: int) -> tuple[Proposition, tuple]:
        """Pattern and body renamed apart into ``scope``."""
        return freshen(self.pattern, scope), tuple(
            _freshen_step(s, scope) for s in self.body
        )


def _freshen_step(step, scope):
    if isinstance(step, DoAssert):
        return DoAssert(freshen(step.prop, scope))
    if isinstance(step, DoGoal):
        return DoGoal(freshen(step.prop, scope))
    if isinstance(step, DoThnot):
        return DoThnot(freshen(step.prop, scope), step.assert_negation)
    if isinstance(step, Bind):
        return Bind(freshen(step.left, scope), freshen(step.right, scope))
    return step


def compile_implication(p: Proposition, q: Proposition, ids, origin: str) -> list[Plan]:
    """The four plans for ``p implies q``, in this fixed order:

    when assert p, assert q; when goal q, goal p;
    when assert (not q), assert (not p); when goal (not p), goal (not q).

    ``ids`` supplies four plan ids.
    """
    ids = list(ids)
    if len(ids) != 4:
        raise ValueError("compile_implication needs exactly four plan ids")
    src = f"compiled-from:{origin}"
    return [
        Plan(ids[0], WHEN_ASSERT, p, (DoAssert(q),), src),
        Plan(ids[1], WHEN_GOAL, q, (DoGoal(p),), src),
        Plan(ids[2], WHEN_ASSERT, Not(q), (DoAssert(Not(p)),), src),
        Plan(ids[3], WHEN_GOAL, Not(p), (DoGoal(Not(q)),), src),
    ]
