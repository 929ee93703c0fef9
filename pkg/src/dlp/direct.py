"""Direct inference over a theory.

The saturator applies a fixed ledger of natural-deduction rules inside a
finite closure set built from the theory and the goal.  Entailment rules
fire only from premises to conclusion; nothing contraposes them.  There is
no ex falso, no proof by contradiction and no unrestricted
or-introduction (together with disjunctive syllogism it would rebuild
explosion).  The implication connective, on the other hand, carries both
modus ponens and modus tollens and is introduced two ways: ``a => b``
needs ``b`` under the hypothesis ``a`` *and* ``not a`` under the
hypothesis ``not b``.

Hypothetical reasoning runs in contexts keyed by their set of hypotheses.
A context inherits every fact of every context whose hypothesis set is a
subset of its own, and may open further contexts until the configured
hypothetical depth is reached.  All rules are monotone, so the result is
the least fixpoint regardless of insertion order.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import NotGroundBoolean
from .props import (
    And,
    Implies,
    Not,
    Or,
    Proposition,
    is_ground,
    negation_depth,
    strip_negations,
    subformulas,
)
from .terms import Substitution, freshen, match, unify, apply_substitution

__all__ = [
    "Rule",
    "EXCLUDED_RULES",
    "ProofBudget",
    "closure_set",
    "SaturationResult",
    "ProofResult",
    "TwoWayResult",
    "DecideResult",
    "BlockDiagnostic",
    "InconsistencyList",
    "saturate",
    "prove",
    "prove_implication",
    "decide_boolean",
    "explain_blocked_inference",
    "list_inconsistencies",
    "check_derivation",
]


class Rule(str, Enum):
    REITERATION = "reiteration"
    RULE_APPLICATION = "rule-application"
    AND_INTRO = "and-intro"
    AND_ELIM_LEFT = "and-elim-left"
    AND_ELIM_RIGHT = "and-elim-right"
    DISJUNCTIVE_SYLLOGISM = "disjunctive-syllogism"
    DOUBLE_NEGATION_INTRO = "double-negation-intro"
    DOUBLE_NEGATION_ELIM = "double-negation-elim"
    DE_MORGAN_NOT_AND = "de-morgan-not-and"  # not(a and b) |- not a or not b
    DE_MORGAN_OR_NOT = "de-morgan-or-not"  # not a or not b |- not(a and b)
    DE_MORGAN_NOT_OR = "de-morgan-not-or"  # not(a or b) |- not a and not b
    DE_MORGAN_AND_NOT = "de-morgan-and-not"  # not a and not b |- not(a or b)
    IMPLIES_ELIM = "implies-elim"
    IMPLIES_CONTRA_ELIM = "implies-contra-elim"
    IMPLIES_INTRO = "implies-intro"
    OR_ELIM = "or-elim"
    # never applied; named so diagnostics can say what was refused
    CONTRAPOSITION = "contraposition-of-entailment-rule"
    EX_FALSO = "ex-falso"
    REDUCTIO = "reductio"
    OR_INTRO = "or-intro"

    def __str__(self):
        return self.value


EXCLUDED_RULES = frozenset(
    {Rule.CONTRAPOSITION, Rule.EX_FALSO, Rule.REDUCTIO, Rule.OR_INTRO}
)

DEFAULT_MAX_STEPS = 200_000
DEFAULT_HYP_DEPTH = 3


@dataclass(frozen=True)
class ProofBudget:
    max_steps: int | None = DEFAULT_MAX_STEPS  # None: unbounded
    max_hyp_depth: int = DEFAULT_HYP_DEPTH

    def __post_init__(self):
        if self.max_steps is not None and self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.max_hyp_depth < 0:
            raise ValueError("max_hyp_depth must be nonnegative")

    @classmethod
    def from_env(cls, **overrides) -> "ProofBudget":
        steps = os.environ.get("DLP_BUDGET")
        kwargs = {}
        if steps:
            kwargs["max_steps"] = int(steps)
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


# -- closure set -----------------------------------------------------------


def _dual(p):
    """The De Morgan partner of ``p``, or None."""
    if type(p) is Not:
        q = p.p
        if type(q) is And:
            return Or(Not(q.left), Not(q.right))
        if type(q) is Or:
            return And(Not(q.left), Not(q.right))
        return None
    if type(p) is Or and type(p.left) is Not and type(p.right) is Not:
        return Not(And(p.left.p, p.right.p))
    if type(p) is And and type(p.left) is Not and type(p.right) is Not:
        return Not(Or(p.left.p, p.right.p))
    return None


def _closure_additions(formulas: Iterable[Proposition], known: dict) -> list:
    """New closure members contributed by ``formulas`` (in a stable order)."""
    out: dict = {}

    def put(q):
        if q not in known and q not in out:
            out[q] = None

    base: dict = {}
    for f in formulas:
        for q in subformulas(f):
            base.setdefault(q, None)
    step = dict(base)
    for q in base:
        for extra in (_dual(q), _dual(Not(q))):
            if extra is not None:
                for r in subformulas(extra):
                    step.setdefault(r, None)
    for q in step:
        put(q)
        put(Not(q))
    return list(out)


def closure_set(formulas: Iterable[Proposition]) -> list[Proposition]:
    """Subformulas of ``formulas`` and of their De Morgan partners, plus the
    single outer negation of each.  Ordered deterministically."""
    return _closure_additions(list(formulas), {})


# -- results -------------------------------------------------------------


@dataclass
class SaturationResult:
    derived: dict  # Proposition -> derivation id, in derivation order
    complete: bool
    contradictions: list  # (prop, derivation id of prop, of its negation)
    steps: int = 0
    closure_size: int = 0

    def __contains__(self, p):
        return p in self.derived


PROVABLE = "provable"
NOT_DERIVABLE = "not-derivable"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class ProofResult:
    status: str
    derivation: str | None = None
    definitive: bool = False
    substitution: Substitution | None = None

    @property
    def provable(self) -> bool:
        return self.status == PROVABLE

    def __bool__(self):
        return self.provable


@dataclass
class TwoWayResult:
    forward: ProofResult
    backward: ProofResult
    established: bool
    derivation: str | None = None


@dataclass
class DecideResult:
    provable: bool
    derivation: str | None = None
    steps: int = 0
    closure_size: int = 0

    def __bool__(self):
        return self.provable


@dataclass(frozen=True)
class BlockDiagnostic:
    would_derive_by: Rule
    via: tuple  # rule id and/or supporting propositions
    note: str = ""

    def describe(self) -> str:
        if self.would_derive_by is Rule.CONTRAPOSITION:
            return f"contraposition of rule {self.via[0]}"
        if self.would_derive_by is Rule.EX_FALSO:
            return f"ex falso from the contradiction on {self.via[0]}"
        if self.would_derive_by is Rule.OR_INTRO:
            return f"unrestricted or-introduction from {self.via[0]}"
        return f"proof by contradiction ({self.note})"


class InconsistencyList(list):
    """Contradictory pairs found within budget; ``complete`` is False when
    the budget ran out first.  An empty complete list is still not a
    consistency certificate for theories with variables."""

    def __init__(self, pairs=(), complete=True):
        super().__init__(pairs)
        self.complete = complete


# -- saturation machinery ----------------------------------------------------


class _BudgetExceeded(Exception):
    pass


class _GoalReached(Exception):
    pass


# justification kinds
_LEAF = "leaf"
_HYP = "hyp"
_INHERIT = "inherit"


class _Context:
    __slots__ = ("key", "hyps", "facts", "agenda", "ors", "children", "parents", "ext")

    def __init__(self, key, hyps):
        self.key = key
        self.hyps = hyps  # ordered tuple
        self.facts: dict = {}
        self.agenda: deque = deque()
        self.ors: list = []
        self.children: list = []
        self.parents: list = []
        self.ext: dict = {}  # hypothesis -> context with it added


class _Saturator:
    def __init__(self, snapshot, seeds=(), budget: ProofBudget | None = None):
        self.snapshot = snapshot
        self.budget = budget or ProofBudget()
        self.max_steps = self.budget.max_steps
        self.max_depth = self.budget.max_hyp_depth
        self.steps = 0
        self.stop_goal = None

        self.ground_rules = []
        self.open_rules = []
        for r in snapshot.rules:
            if is_ground(r.conclusion) and all(is_ground(p) for p in r.premises):
                self.ground_rules.append(r)
            else:
                self.open_rules.append(r)

        self.closure: dict = {}
        self.order: dict = {}
        self.and_parents: dict = {}
        self.or_by_left: dict = {}
        self.or_by_right: dict = {}
        self.imp_by_ante: dict = {}
        self.imp_by_cons: dict = {}
        self.implications: list = []
        self.rules_by_premise: dict = {}

        inputs = list(snapshot.propositions)
        for r in self.ground_rules:
            inputs.extend(r.premises)
            inputs.append(r.conclusion)
        for r in self.open_rules:
            inputs.extend(r.premises)
            inputs.append(r.conclusion)
        inputs.extend(seeds)
        self._extend_closure(inputs)
        for r in self.ground_rules:
            for p in dict.fromkeys(r.premises):
                self.rules_by_premise.setdefault(p, []).append(r)

        self.contexts: dict = {}
        self.context_list: list = []
        self.root = self._context(frozenset())

    # closure bookkeeping

    def _extend_closure(self, formulas):
        self._plans = {}
        for q in _closure_additions(formulas, self.closure):
            self.closure[q] = None
            self.order[q] = len(self.order)
            t = type(q)
            if t is And:
                self.and_parents.setdefault(q.left, []).append(q)
                if q.right != q.left:
                    self.and_parents.setdefault(q.right, []).append(q)
            elif t is Or:
                self.or_by_left.setdefault(q.left, []).append(q)
                self.or_by_right.setdefault(q.right, []).append(q)
            elif t is Implies:
                self.imp_by_ante.setdefault(q.left, []).append(q)
                self.imp_by_cons.setdefault(q.right, []).append(q)
                self.implications.append(q)

    # contexts

    def _context(self, key: frozenset) -> _Context:
        ctx = self.contexts.get(key)
        if ctx is not None:
            return ctx
        # subsets first so inheritance is complete
        parents = [self._context(key - {h}) for h in self._ordered(key)]
        ctx = _Context(key, self._ordered(key))
        self.contexts[key] = ctx
        self.context_list.append(ctx)
        for h in ctx.hyps:
            self._add(ctx, h, (_HYP,))
        for parent in parents:
            ctx.parents.append(parent)
            parent.children.append(ctx)
            for f in list(parent.facts):
                self._add(ctx, f, (_INHERIT, parent.key))
        return ctx

    def _extend(self, ctx: _Context, hyp) -> _Context:
        child = ctx.ext.get(hyp)
        if child is None:
            child = ctx.ext[hyp] = self._context(ctx.key | {hyp})
        return child

    def _ordered(self, key) -> tuple:
        if len(key) < 2:
            return tuple(key)
        return tuple(sorted(key, key=self.order.__getitem__))

    def _add(self, ctx: _Context, f, just) -> bool:
        if f in ctx.facts:
            return False
        if f not in self.closure:
            self._extend_closure([f])
        self.steps += 1
        if self.max_steps is not None and self.steps > self.max_steps:
            raise _BudgetExceeded
        ctx.facts[f] = just
        ctx.agenda.append(f)
        if type(f) is Or:
            ctx.ors.append(f)
        for child in ctx.children:
            self._add(child, f, (_INHERIT, ctx.key))
        if ctx is self.root and self.stop_goal is not None and f == self.stop_goal:
            raise _GoalReached
        return True

    # forward rules

    def _forward(self, ctx: _Context) -> bool:
        progressed = False
        while True:
            while ctx.agenda:
                progressed = True
                self._fire(ctx, ctx.agenda.popleft())
            if not self.open_rules or not self._apply_open_rules(ctx):
                return progressed

    def _fire(self, ctx, f):
        plan = self._plans.get(f)
        if plan is None:
            plan = self._plans[f] = self._fire_plan(f)
        F = ctx.facts
        add = self._add
        uncond, cond, rules = plan
        for c, just in uncond:
            add(ctx, c, just)
        for need, c, just in cond:
            if need in F:
                add(ctx, c, just)
        for r in rules:
            if all(p in F for p in r.premises):
                add(ctx, r.conclusion, (Rule.RULE_APPLICATION, r.premises, r.id))

    def _fire_plan(self, f):
        """What a new fact ``f`` licenses: conclusions that follow from ``f``
        alone, and (side premise, conclusion, justification) triples."""
        C = self.closure
        uncond = []
        cond = []
        t = type(f)
        if t is And:
            uncond.append((f.left, (Rule.AND_ELIM_LEFT, (f,))))
            uncond.append((f.right, (Rule.AND_ELIM_RIGHT, (f,))))
        for g in self.and_parents.get(f, ()):
            other = g.right if g.left == f else g.left
            cond.append((other, g, (Rule.AND_INTRO, (g.left, g.right))))
        if t is Or:
            n = Not(f.left)
            cond.append((n, f.right, (Rule.DISJUNCTIVE_SYLLOGISM, (f, n))))
            n = Not(f.right)
            cond.append((n, f.left, (Rule.DISJUNCTIVE_SYLLOGISM, (f, n))))
        if t is Not:
            x = f.p
            for g in self.or_by_left.get(x, ()):
                cond.append((g, g.right, (Rule.DISJUNCTIVE_SYLLOGISM, (g, f))))
            for g in self.or_by_right.get(x, ()):
                cond.append((g, g.left, (Rule.DISJUNCTIVE_SYLLOGISM, (g, f))))
            for g in self.imp_by_cons.get(x, ()):
                cond.append((g, Not(g.left), (Rule.IMPLIES_CONTRA_ELIM, (g, f))))
            if type(x) is Not:
                uncond.append((x.p, (Rule.DOUBLE_NEGATION_ELIM, (f,))))
        nn = Not(Not(f))
        if nn in C:
            uncond.append((nn, (Rule.DOUBLE_NEGATION_INTRO, (f,))))
        d = _dual(f)
        if d is not None and d in C:
            if t is Not:
                tag = Rule.DE_MORGAN_NOT_AND if type(f.p) is And else Rule.DE_MORGAN_NOT_OR
            elif t is Or:
                tag = Rule.DE_MORGAN_OR_NOT
            else:
                tag = Rule.DE_MORGAN_AND_NOT
            uncond.append((d, (tag, (f,))))
        if t is Implies:
            cond.append((f.left, f.right, (Rule.IMPLIES_ELIM, (f, f.left))))
            n = Not(f.right)
            cond.append((n, Not(f.left), (Rule.IMPLIES_CONTRA_ELIM, (f, n))))
        for g in self.imp_by_ante.get(f, ()):
            cond.append((g, g.right, (Rule.IMPLIES_ELIM, (g, f))))
        return tuple(uncond), tuple(cond), tuple(self.rules_by_premise.get(f, ()))

    def _apply_open_rules(self, ctx) -> bool:
        added = False
        facts = list(ctx.facts)
        for n, r in enumerate(self.open_rules):
            scope = -(n + 1)  # private, never produced by user text
            premises = [freshen(p, scope) for p in r.premises]
            conclusion = freshen(r.conclusion, scope)
            for s, used in _match_all(premises, facts, Substitution()):
                concl = apply_substitution(conclusion, s)
                if self._add(ctx, concl, (Rule.RULE_APPLICATION, tuple(used), r.id)):
                    added = True
        return added

    # hypothetical rules

    def _hypothetical(self, ctx: _Context) -> bool:
        if len(ctx.hyps) >= self.max_depth:
            return False
        added = False
        F = ctx.facts
        for imp in list(self.implications):
            if imp in F:
                continue
            a, b = imp.left, imp.right
            fwd = self._extend(ctx, a)
            if b not in fwd.facts:
                continue
            nb = Not(b)
            bwd = self._extend(ctx, nb)
            na = Not(a)
            if na in bwd.facts:
                just = (Rule.IMPLIES_INTRO, ((fwd.key, b), (bwd.key, na)))
                added |= self._add(ctx, imp, just)
        i = 0
        while i < len(ctx.ors):
            disj = ctx.ors[i]
            i += 1
            left = self._extend(ctx, disj.left)
            right = self._extend(ctx, disj.right)
            small, big = (left, right)
            if len(right.facts) < len(left.facts):
                small, big = right, left
            for c in list(small.facts):
                if c in big.facts and c not in F:
                    just = (Rule.OR_ELIM, ((ctx.key, disj), (left.key, c), (right.key, c)))
                    added |= self._add(ctx, c, just)
        return added

    # driver

    def run(self, stop_goal=None, extra_contexts=()):
        """Saturate to the fixpoint.  Returns True when complete."""
        self.stop_goal = stop_goal
        try:
            for a in self.snapshot.assertions:
                self._add(self.root, a.prop, (_LEAF, a.id))
            for hyps in extra_contexts:
                self._context(frozenset(hyps))
            while True:
                progressed = False
                i = 0
                while i < len(self.context_list):
                    progressed |= self._forward(self.context_list[i])
                    i += 1
                i = 0
                while i < len(self.context_list):
                    before = len(self.context_list)
                    progressed |= self._hypothetical(self.context_list[i])
                    progressed |= len(self.context_list) != before
                    i += 1
                if not progressed:
                    return True
        except _BudgetExceeded:
            return False
        except _GoalReached:
            return True

    # provenance

    def register(self, theory, key, f, memo=None) -> str:
        """Record the derivation of ``f`` in context ``key`` into ``theory``'s
        ledger (with all supporting nodes) and return its id."""
        if memo is None:
            memo = {}
        stack = [(key, f)]
        while stack:
            k, g = stack[-1]
            if (k, g) in memo:
                stack.pop()
                continue
            ctx = self.contexts[k]
            just = ctx.facts[g]
            kind = just[0]
            if kind == _INHERIT:
                deps = [(just[1], g)]
            elif kind in (_LEAF, _HYP):
                deps = []
            elif kind in (Rule.IMPLIES_INTRO, Rule.OR_ELIM):
                deps = list(just[1])
            else:
                deps = [(k, p) for p in just[1]]
            missing = [d for d in deps if d not in memo]
            if missing:
                stack.extend(missing)
                continue
            stack.pop()
            hyps = ctx.hyps
            if kind == _LEAF:
                d = theory.record_derivation(g, Rule.REITERATION.value, (), hyps, just[1])
            elif kind == _HYP:
                d = theory.record_derivation(g, Rule.REITERATION.value, (), hyps)
            elif kind == _INHERIT:
                d = theory.record_derivation(
                    g, Rule.REITERATION.value, (memo[deps[0]],), hyps
                )
            else:
                ref = just[2] if len(just) > 2 else None
                d = theory.record_derivation(
                    g, just[0].value, tuple(memo[x] for x in deps), hyps, ref
                )
            memo[(k, g)] = d
        return memo[(key, f)]


def _match_all(patterns, facts, s):
    if not patterns:
        yield s, []
        return
    head = apply_substitution(patterns[0], s)
    for f in facts:
        s2 = match(head, f, s)
        if s2:
            for s3, used in _match_all(patterns[1:], facts, s2):
                yield s3, [f, *used]


def _contradiction_pairs(sat: _Saturator, theory, memo) -> list:
    """One (prop, d+, d-) per contradiction, keyed by the prop with its
    negations stripped; the least-negated witness is reported."""
    facts = sat.root.facts
    best: dict = {}
    for f in facts:
        n = Not(f)
        if n in facts:
            key = strip_negations(f)
            cur = best.get(key)
            if cur is None or negation_depth(f) < negation_depth(cur):
                best[key] = f
    out = []
    for f in best.values():
        out.append(
            (
                f,
                sat.register(theory, sat.root.key, f, memo),
                sat.register(theory, sat.root.key, Not(f), memo),
            )
        )
    return out


# -- public operations ----------------------------------------------------


def _snapshot_and_theory(store, theory):
    t = store.theory(theory)
    return t, t.snapshot()


def saturate(store, theory: str, goal_seed=None, budget: ProofBudget | None = None):
    t, snap = _snapshot_and_theory(store, theory)
    seeds = [goal_seed] if goal_seed is not None else []
    sat = _Saturator(snap, seeds, budget)
    complete = sat.run()
    memo: dict = {}
    derived = {f: sat.register(t, sat.root.key, f, memo) for f in sat.root.facts}
    return SaturationResult(
        derived,
        complete,
        _contradiction_pairs(sat, t, memo),
        sat.steps,
        len(sat.closure),
    )


def _find_goal(sat, goal):
    if goal in sat.root.facts:
        return goal, Substitution()
    if is_ground(goal):
        return None, None
    for f in sat.root.facts:
        s = unify(goal, f)
        if s:
            return f, s.restrict(list(goal.variables()))
    return None, None


def prove(store, theory: str, goal: Proposition, budget: ProofBudget | None = None) -> ProofResult:
    t, snap = _snapshot_and_theory(store, theory)
    sat = _Saturator(snap, [goal], budget)
    ground = is_ground(goal) and snap.is_ground_boolean()
    complete = sat.run(stop_goal=goal if is_ground(goal) else None)
    found, s = _find_goal(sat, goal)
    if found is not None:
        return ProofResult(PROVABLE, sat.register(t, sat.root.key, found), True, s)
    if not complete:
        return ProofResult(BUDGET_EXHAUSTED)
    return ProofResult(NOT_DERIVABLE, definitive=ground)


def prove_implication(
    store, theory: str, psi: Proposition, phi: Proposition, budget: ProofBudget | None = None
) -> TwoWayResult:
    """Check both halves of the two-way deduction theorem for ``psi => phi``:
    ``phi`` under hypothesis ``psi`` and ``not psi`` under ``not phi``."""
    budget = budget or ProofBudget()
    if budget.max_hyp_depth < 1:
        raise ValueError("prove_implication needs max_hyp_depth >= 1")
    t, snap = _snapshot_and_theory(store, theory)
    imp = Implies(psi, phi)
    sat = _Saturator(snap, [imp], budget)
    ground = snap.is_ground_boolean() and is_ground(imp)
    complete = sat.run(extra_contexts=[(psi,), (Not(phi),)])

    def half(hyp, goal):
        ctx = sat.contexts.get(frozenset({hyp}))
        if ctx is not None and goal in ctx.facts:
            return ProofResult(PROVABLE, sat.register(t, ctx.key, goal), True)
        if not complete:
            return ProofResult(BUDGET_EXHAUSTED)
        return ProofResult(NOT_DERIVABLE, definitive=ground)

    forward = half(psi, phi)
    backward = half(Not(phi), Not(psi))
    established = forward.provable and backward.provable
    d = None
    if established:
        d = t.record_derivation(
            imp, Rule.IMPLIES_INTRO.value, (forward.derivation, backward.derivation)
        )
    return TwoWayResult(forward, backward, established, d)


def decide_boolean(store, theory: str, goal: Proposition, max_hyp_depth: int = DEFAULT_HYP_DEPTH) -> DecideResult:
    """Total decision procedure for ground theories and goals."""
    t, snap = _snapshot_and_theory(store, theory)
    if not (snap.is_ground_boolean() and is_ground(goal)):
        raise NotGroundBoolean("decide_boolean needs a ground theory and goal")
    sat = _Saturator(snap, [goal], ProofBudget(max_steps=None, max_hyp_depth=max_hyp_depth))
    sat.run(stop_goal=goal)
    if goal in sat.root.facts:
        return DecideResult(True, sat.register(t, sat.root.key, goal), sat.steps, len(sat.closure))
    return DecideResult(False, None, sat.steps, len(sat.closure))


def list_inconsistencies(store, theory: str, budget: ProofBudget | None = None) -> InconsistencyList:
    t, snap = _snapshot_and_theory(store, theory)
    sat = _Saturator(snap, (), budget)
    complete = sat.run()
    return InconsistencyList(_contradiction_pairs(sat, t, {}), complete)


def explain_blocked_inference(store, theory: str, goal: Proposition, budget: ProofBudget | None = None) -> list[BlockDiagnostic]:
    """What one step of a refused rule would have concluded ``goal``.

    Contraposition, ex falso and or-introduction are checked first; a
    proof-by-contradiction diagnostic is added only when none of those
    applies.
    """
    t, snap = _snapshot_and_theory(store, theory)
    sat = _Saturator(snap, [goal], budget)
    sat.run()
    F = sat.root.facts
    if goal in F:
        return []
    out: list[BlockDiagnostic] = []
    for r in snap.rules:
        for i, prem in enumerate(r.premises):
            s = unify(goal, Not(prem))
            if not s:
                continue
            neg = apply_substitution(Not(r.conclusion), s)
            others = [apply_substitution(p, s) for j, p in enumerate(r.premises) if j != i]
            if neg in F and all(o in F for o in others):
                out.append(BlockDiagnostic(Rule.CONTRAPOSITION, (r.id, neg, *others)))
                break
    if type(goal) is Or:
        for side in (goal.left, goal.right):
            if side in F:
                out.append(BlockDiagnostic(Rule.OR_INTRO, (side,)))
                break
    pairs = [f for f in F if Not(f) in F]
    if pairs:
        pairs.sort(key=negation_depth)
        out.append(BlockDiagnostic(Rule.EX_FALSO, (pairs[0], Not(pairs[0]))))
    if not out and sat.max_depth >= 1:
        assumption = goal.p if type(goal) is Not else Not(goal)
        before = {strip_negations(f) for f in pairs}
        sat2 = _Saturator(snap, [goal, assumption], budget)
        sat2.run(extra_contexts=[(assumption,)])
        ctx = sat2.contexts[frozenset({assumption})]
        for f in ctx.facts:
            if Not(f) in ctx.facts and strip_negations(f) not in before:
                out.append(
                    BlockDiagnostic(
                        Rule.REDUCTIO,
                        (assumption, f),
                        f"assuming {assumption} yields both {f} and its negation",
                    )
                )
                break
    return out


# -- replay ------------------------------------------------------------------


def _one_step_ok(d, prem, theory) -> bool:
    """Does the rule named by ``d`` license its conclusion from ``prem``?"""
    c = d.conclusion
    rule = d.rule
    ps = [p.conclusion for p in prem]
    if rule == Rule.REITERATION:
        if not prem:
            if d.ref is not None:
                if not theory.has_item(d.ref):
                    return False
                item = theory.item(d.ref)
                return getattr(item, "prop", None) == c
            return c in d.hypotheses
        return len(prem) == 1 and ps[0] == c and set(prem[0].hypotheses) <= set(d.hypotheses)
    if any(p.hypotheses != d.hypotheses for p in prem) and rule not in (
        Rule.IMPLIES_INTRO,
        Rule.OR_ELIM,
    ):
        return False
    if rule == Rule.RULE_APPLICATION:
        if not theory.has_item(d.ref or ""):
            return False
        r = theory.item(d.ref)
        s = Substitution()
        if len(r.premises) != len(ps):
            return False
        for pat, got in zip(r.premises, ps):
            s = match(pat, got, s)
            if not s:
                return False
        return apply_substitution(r.conclusion, s) == c
    if rule == Rule.AND_INTRO:
        return len(ps) == 2 and c == And(ps[0], ps[1])
    if rule == Rule.AND_ELIM_LEFT:
        return len(ps) == 1 and type(ps[0]) is And and ps[0].left == c
    if rule == Rule.AND_ELIM_RIGHT:
        return len(ps) == 1 and type(ps[0]) is And and ps[0].right == c
    if rule == Rule.DISJUNCTIVE_SYLLOGISM:
        if len(ps) != 2 or type(ps[0]) is not Or:
            return False
        o, n = ps
        return (n == Not(o.left) and c == o.right) or (n == Not(o.right) and c == o.left)
    if rule == Rule.DOUBLE_NEGATION_INTRO:
        return len(ps) == 1 and c == Not(Not(ps[0]))
    if rule == Rule.DOUBLE_NEGATION_ELIM:
        return len(ps) == 1 and ps[0] == Not(Not(c))
    if rule in (
        Rule.DE_MORGAN_NOT_AND,
        Rule.DE_MORGAN_OR_NOT,
        Rule.DE_MORGAN_NOT_OR,
        Rule.DE_MORGAN_AND_NOT,
    ):
        return len(ps) == 1 and _dual(ps[0]) == c
    if rule == Rule.IMPLIES_ELIM:
        return len(ps) == 2 and ps[0] == Implies(ps[1], c)
    if rule == Rule.IMPLIES_CONTRA_ELIM:
        return (
            len(ps) == 2
            and type(ps[0]) is Implies
            and ps[1] == Not(ps[0].right)
            and c == Not(ps[0].left)
        )
    if rule == Rule.IMPLIES_INTRO:
        if len(prem) != 2 or type(c) is not Implies:
            return False
        fwd, bwd = prem
        base = set(d.hypotheses)
        return (
            fwd.conclusion == c.right
            and set(fwd.hypotheses) <= base | {c.left}
            and bwd.conclusion == Not(c.left)
            and set(bwd.hypotheses) <= base | {Not(c.right)}
        )
    if rule == Rule.OR_ELIM:
        if len(prem) != 3 or type(ps[0]) is not Or:
            return False
        base = set(d.hypotheses)
        o = ps[0]
        return (
            set(prem[0].hypotheses) <= base
            and ps[1] == c
            and ps[2] == c
            and set(prem[1].hypotheses) <= base | {o.left}
            and set(prem[2].hypotheses) <= base | {o.right}
        )
    return False


def check_derivation(theory, d_id: str) -> bool:
    """Re-validate a ledger derivation node by node down to its leaves."""
    seen = set()
    stack = [d_id]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        d = theory.derivation(cur)
        if d.rule in {r.value for r in EXCLUDED_RULES}:
            return False
        prem = [theory.derivation(p) for p in d.premises]
        if any(int(p.id[1:]) >= int(d.id[1:]) for p in prem):
            return False
        expected_depth = 1 + max((p.depth for p in prem), default=-1)
        if d.depth != expected_depth or not _one_step_ok(d, prem, theory):
            return False
        stack.extend(d.premises)
    return True
