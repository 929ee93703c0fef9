"""Seeded random generators for propositions, theories and KB documents."""

import random

from dlp.plans import WHEN_ASSERT, WHEN_GOAL, Bind, DoAssert, DoGoal, DoThnot, Fail
from dlp.prob import Conditional, Marginal
from dlp.props import And, Atom, Implies, Not, Or
from dlp.syntax import (
    AssertClause,
    ImpliesClause,
    KBDocument,
    PlanClause,
    ProbClause,
    RuleClause,
    TheoryBlock,
)
from dlp.terms import Compound, Constant, Variable


def random_prop(rng: random.Random, atoms, depth: int):
    if depth <= 0 or rng.random() < 0.3:
        return Atom(rng.choice(atoms))
    k = rng.randrange(4)
    if k == 0:
        return Not(random_prop(rng, atoms, depth - 1))
    cls = (And, Or, Implies)[k - 1]
    return cls(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1))


def random_ground_kb(rng, atoms, n_facts=(1, 6), n_rules=(0, 3), depth=2):
    """(facts, rules) with rules as (premises, conclusion) pairs."""
    facts = [random_prop(rng, atoms, depth) for _ in range(rng.randint(*n_facts))]
    rules = []
    for _ in range(rng.randint(*n_rules)):
        prem = [random_prop(rng, atoms, 1) for _ in range(rng.randint(1, 2))]
        rules.append((prem, random_prop(rng, atoms, 1)))
    return facts, rules


def load_kb(store, name, facts, rules):
    store.create_theory(name)
    for f in facts:
        store.assert_prop(name, f)
    for prem, concl in rules:
        store.add_rule(name, prem, concl)
    return name


# -- documents -------------------------------------------------------------

SYMS = ["p", "q", "r", "On", "Found", "Raining", "WetStreets", "a", "b", "c"]


def _term(rng, depth=1):
    r = rng.random()
    if r < 0.3:
        return Variable(rng.choice(["x", "y", "X"]), rng.choice([0, 0, 3]))
    if r < 0.8 or depth <= 0:
        return Constant(rng.choice(["a", "b", "c", "Boston"]))
    return Compound(rng.choice(["f", "g"]), [_term(rng, depth - 1) for _ in range(rng.randint(0, 2))])


def _doc_prop(rng, depth=2):
    if depth <= 0 or rng.random() < 0.4:
        return Atom(rng.choice(SYMS[:6]), [_term(rng) for _ in range(rng.randint(0, 2))])
    k = rng.randrange(4)
    if k == 0:
        return Not(_doc_prop(rng, depth - 1))
    cls = (And, Or, Implies)[k - 1]
    return cls(_doc_prop(rng, depth - 1), _doc_prop(rng, depth - 1))


def _step(rng):
    k = rng.randrange(6)
    if k == 0:
        return DoAssert(_doc_prop(rng, 1))
    if k == 1:
        return DoGoal(_doc_prop(rng, 1))
    if k == 2:
        return DoThnot(_doc_prop(rng, 1), rng.random() < 0.5)
    if k == 3:
        return Fail()
    return Bind(_term(rng), _term(rng))


def random_clause(rng):
    k = rng.randrange(5)
    if k == 0:
        return AssertClause(_doc_prop(rng))
    if k == 1:
        return RuleClause(tuple(_doc_prop(rng, 1) for _ in range(rng.randint(1, 3))), _doc_prop(rng, 1))
    if k == 2:
        return ImpliesClause(_doc_prop(rng, 1), _doc_prop(rng, 1))
    if k == 3:
        trig = rng.choice([WHEN_ASSERT, WHEN_GOAL])
        return PlanClause(trig, _doc_prop(rng, 1), tuple(_step(rng) for _ in range(rng.randint(0, 3))))
    if rng.random() < 0.5:
        return ProbClause(Conditional(rng.choice(SYMS), rng.choice(SYMS), round(rng.random(), 3)))
    return ProbClause(Marginal(rng.choice(SYMS), round(rng.random(), 3)))


def random_document(rng, max_theories=3, max_clauses=6):
    theories = []
    for i in range(rng.randint(0, max_theories)):
        theories.append(
            TheoryBlock(f"T{i}", tuple(random_clause(rng) for _ in range(rng.randint(0, max_clauses))))
        )
    return KBDocument(tuple(theories))


def safe_ground_document(rng, max_theories=2, max_clauses=6):
    """Documents whose clauses are all loadable (ground rules, no plans),
    for ledger round trips."""
    atoms = ["p", "q", "r", "s"]
    theories = []
    for i in range(rng.randint(1, max_theories)):
        clauses = []
        for _ in range(rng.randint(0, max_clauses)):
            k = rng.randrange(3)
            if k == 0:
                clauses.append(AssertClause(random_prop(rng, atoms, 2)))
            elif k == 1:
                clauses.append(
                    RuleClause(
                        tuple(random_prop(rng, atoms, 1) for _ in range(rng.randint(1, 2))),
                        random_prop(rng, atoms, 1),
                    )
                )
            else:
                clauses.append(ImpliesClause(random_prop(rng, atoms, 1), random_prop(rng, atoms, 1)))
        theories.append(TheoryBlock(f"T{i}", tuple(clauses)))
    return KBDocument(tuple(theories))
