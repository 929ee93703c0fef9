"""Independent reference implementations used by the test suite.

None of these share code with the engine beyond the data types.
"""

from __future__ import annotations

import itertools
import random
from collections import deque

from dlp.props import And, Implies, Not, Or
from dlp.terms import Compound, Constant, Variable


# -- unification -------------------------------------------------------------


def subst(t, s: dict):
    """Naive recursive substitution application (to a fixpoint)."""
    while True:
        new = _subst1(t, s)
        if new == t:
            return t
        t = new


def _subst1(t, s):
    if isinstance(t, Variable):
        return s.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, [_subst1(a, s) for a in t.args])
    return t


def variables_of(t) -> list:
    if isinstance(t, Variable):
        return [t]
    if isinstance(t, Compound):
        out = []
        for a in t.args:
            for v in variables_of(a):
                if v not in out:
                    out.append(v)
        return out
    return []


def ground_terms(constants, functors, depth):
    """All ground terms up to ``depth`` (constants have depth 0)."""
    level = [Constant(c) for c in constants]
    out = list(level)
    for _ in range(depth):
        new = []
        for f, arity in functors:
            for args in itertools.product(out, repeat=arity):
                new.append(Compound(f, list(args)))
        out = list(dict.fromkeys(out + new))
    return out


def brute_unifiable(a, b, universe) -> dict | None:
    """Search every grounding of the variables of ``a`` and ``b`` over
    ``universe``; returns a unifying grounding or None."""
    vs = variables_of(a)
    for v in variables_of(b):
        if v not in vs:
            vs.append(v)
    for values in itertools.product(universe, repeat=len(vs)):
        s = dict(zip(vs, values))
        if subst(a, s) == subst(b, s):
            return s
    return None


# -- direct-engine saturation ------------------------------------------------


def _subformulas(p):
    yield p
    if isinstance(p, Not):
        yield from _subformulas(p.p)
    elif isinstance(p, (And, Or, Implies)):
        yield from _subformulas(p.left)
        yield from _subformulas(p.right)


def _de_morgan(p):
    if isinstance(p, Not) and isinstance(p.p, And):
        return Or(Not(p.p.left), Not(p.p.right))
    if isinstance(p, Not) and isinstance(p.p, Or):
        return And(Not(p.p.left), Not(p.p.right))
    if isinstance(p, Or) and isinstance(p.left, Not) and isinstance(p.right, Not):
        return Not(And(p.left.p, p.right.p))
    if isinstance(p, And) and isinstance(p.left, Not) and isinstance(p.right, Not):
        return Not(Or(p.left.p, p.right.p))
    return None


def oracle_closure(formulas) -> list:
    base = []
    for f in formulas:
        base.extend(_subformulas(f))
    step = list(base)
    for q in base:
        for x in (q, Not(q)):
            d = _de_morgan(x)
            if d is not None:
                step.extend(_subformulas(d))
    out = []
    for q in step:
        out.append(q)
        out.append(Not(q))
    return list(dict.fromkeys(out))


class SaturationOracle:
    """Naive fixpoint of the included rules over the closure set.

    Facts are bitmasks over closure members.  Every forward rule is
    compiled to Horn clauses; each context is re-closed by repeated passes
    over all clauses, and all contexts are swept round after round until a
    full round changes nothing.  Hypothetical contexts are sets of at most
    ``depth`` hypotheses and see the facts of all their subsets.
    """

    def __init__(self, facts, rules=(), goal=None, depth=3):
        formulas = list(facts)
        for prem, concl in rules:
            formulas.extend(prem)
            formulas.append(concl)
        if goal is not None:
            formulas.append(goal)
        self.closure = oracle_closure(formulas)
        self.index = {f: i for i, f in enumerate(self.closure)}
        self.depth = depth
        idx = self.index
        clauses = []

        def bit(f):
            return 1 << idx[f]

        def clause(prem, concl):
            if concl in idx and all(p in idx for p in prem):
                m = 0
                for p in prem:
                    m |= bit(p)
                clauses.append((m, idx[concl]))

        self.implications = []
        self.disjunctions = []
        for f in self.closure:
            if isinstance(f, And):
                clause([f], f.left)
                clause([f], f.right)
                clause([f.left, f.right], f)
            if isinstance(f, Or):
                clause([f, Not(f.left)], f.right)
                clause([f, Not(f.right)], f.left)
                self.disjunctions.append((idx[f], idx[f.left], idx[f.right]))
            if isinstance(f, Not) and isinstance(f.p, Not):
                clause([f], f.p.p)
                clause([f.p.p], f)
            d = _de_morgan(f)
            if d is not None:
                clause([f], d)
            if isinstance(f, Implies):
                clause([f, f.left], f.right)
                clause([f, Not(f.right)], Not(f.left))
                if Not(f.left) in idx and Not(f.right) in idx:
                    self.implications.append(
                        (idx[f], idx[f.left], idx[f.right], idx[Not(f.left)], idx[Not(f.right)])
                    )
        for prem, concl in rules:
            clause(prem, concl)
        self.clauses = clauses
        self.base = 0
        for f in facts:
            self.base |= bit(f)
        self.contexts: dict = {}
        self.order: list = []
        self._solve()

    def _horn(self, m):
        changed = True
        while changed:
            changed = False
            for mask, c in self.clauses:
                if m & mask == mask and not (m >> c) & 1:
                    m |= 1 << c
                    changed = True
        return m

    def _get(self, key):
        if key not in self.contexts:
            self.contexts[key] = 0
            self.order.append(key)
            self._grew = True
        return self.contexts[key]

    def _solve(self):
        self._get(frozenset())
        while True:
            self._grew = False
            changed = False
            for key in list(self.order):
                m = self.contexts[key] | self.base
                for h in key:
                    m |= 1 << h
                    m |= self._get(key - {h})
                m = self._horn(m)
                if len(key) < self.depth:
                    for i, a, b, na, nb in self.implications:
                        if (m >> i) & 1:
                            continue
                        if (self._get(key | {a}) >> b) & 1 and (self._get(key | {nb}) >> na) & 1:
                            m |= 1 << i
                    for i, a, b in self.disjunctions:
                        if (m >> i) & 1:
                            m |= self._get(key | {a}) & self._get(key | {b})
                if m != self.contexts[key]:
                    self.contexts[key] = m
                    changed = True
            if not changed and not self._grew:
                return

    def holds(self, f, hyps=()) -> bool:
        key = frozenset(self.index[h] for h in hyps)
        if f not in self.index or key not in self.contexts:
            return False
        return bool((self.contexts[key] >> self.index[f]) & 1)

    def derived(self, hyps=()) -> set:
        key = frozenset(self.index[h] for h in hyps)
        m = self.contexts.get(key, 0)
        return {f for f, i in self.index.items() if (m >> i) & 1}


# -- planner search ----------------------------------------------------------


def bfs_achievable(db, goal_plans, goal, max_nodes=200_000):
    """Breadth-first search over ground goal stacks.

    ``db`` is a set of ground atoms; ``goal_plans`` maps a ground atom to a
    list of bodies, each body a list of ground atoms to achieve in order
    (the propositional shape of when-goal plans whose steps are all goals).
    Returns True if some sequence of choices empties the goal stack.
    Cycles in the plan graph are explored up to ``max_nodes`` states.
    """
    start = (goal,)
    queue = deque([start])
    seen = {start}
    nodes = 0
    while queue:
        stack = queue.popleft()
        nodes += 1
        if nodes > max_nodes:
            return None
        if not stack:
            return True
        g, rest = stack[0], stack[1:]
        succs = []
        if g in db:
            succs.append(rest)
        for body in goal_plans.get(g, ()):
            succs.append(tuple(body) + rest)
        for s in succs:
            if len(s) > 60:
                continue
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return False


# -- probability -----------------------------------------------------------------


def sample_joint(rng: random.Random):
    """A random joint distribution over two binary events (W, T) as the four
    cell probabilities (w&t, w&~t, ~w&t, ~w&~t)."""
    cuts = sorted(rng.random() for _ in range(3))
    return (cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1 - cuts[2])


def sup_w_monte_carlo(p_cond, p_marg, rng, samples=20_000):
    """Largest P(W) among sampled joints meeting P(T|W)=p_cond and
    P(T)=p_marg exactly.  Joints are parametrised by w = P(W): P(W&T) is
    then forced to p_cond*w and P(~W&T) to p_marg - p_cond*w; samples whose
    cells go negative are rejected."""
    best = None
    for _ in range(samples):
        w = rng.random()
        cells = (p_cond * w, (1 - p_cond) * w, p_marg - p_cond * w, 1 - w - (p_marg - p_cond * w))
        if min(cells) < 0 or w <= 0:
            continue
        if admissible(cells, p_cond, p_marg, tol=1e-9):
            best = w if best is None else max(best, w)
    return best


def admissible(cells, p_cond, p_marg, tol=1e-9):
    wt, w_nt, nwt, _ = cells
    w = wt + w_nt
    if w <= 0:
        return False
    return abs(wt / w - p_cond) <= tol and abs(wt + nwt - p_marg) <= tol
