import random

import pytest

from dlp.errors import ParseError
from dlp.plans import WHEN_GOAL, Bind, DoGoal
from dlp.prob import Conditional, Marginal
from dlp.props import And, Atom, Implies, Not, Or, atom
from dlp.syntax import (
    AssertClause,
    ImpliesClause,
    KBDocument,
    PlanClause,
    ProbClause,
    RuleClause,
    load_document,
    parse_document,
    parse_prop,
    parse_term,
    print_document,
    read_sexprs,
    theory_to_block,
)
from dlp.terms import Compound, Constant, Variable
from dlp.theory import TheoryStore
from generators import random_document, safe_ground_document

BOSTON = "(theory Boston (rule ((Observe WeekdayAt5PM)) (TrafficJam)) (assert (not (TrafficJam))))"


def test_boston_document():
    doc = parse_document(BOSTON)
    (th,) = doc.theories
    assert th.name == "Boston"
    assert th.clauses == (
        RuleClause((atom("Observe", "WeekdayAt5PM"),), Atom("TrafficJam")),
        AssertClause(Not(Atom("TrafficJam"))),
    )
    s = TheoryStore()
    load_document(s, doc)
    assert [r.id for r in s.snapshot("Boston").rules] == ["A1"]
    assert [a.id for a in s.list_assertions("Boston")] == ["A2"]


def test_empty_document():
    assert parse_document("") == KBDocument(())
    assert parse_document("  ; just a comment\n") == KBDocument(())


def test_unclosed_form_position():
    with pytest.raises(ParseError) as e:
        parse_document("(theory Boston (assert (and P))")
    assert (e.value.line, e.value.column) == (1, 1)
    assert "')'" in str(e.value)


@pytest.mark.parametrize(
    "text, where",
    [
        ("(theory B (assert))", (1, 11)),
        ("(theory B (frob x))", (1, 12)),
        (")", (1, 1)),
        ("(theory B\n  (prob (cond T W 2)))", (2, 19)),
        ("(theory B (rule () P))", (1, 17)),
        ("(theory B (assert (and P)))", (1, 19)),
        ("(notatheory B)", (1, 2)),
    ],
)
def test_positioned_errors(text, where):
    with pytest.raises(ParseError) as e:
        parse_document(text)
    assert (e.value.line, e.value.column) == where


def test_bare_and_parenthesised_zero_ary_atoms_agree():
    assert parse_prop("TrafficJam") == parse_prop("(TrafficJam)") == Atom("TrafficJam")


def test_connectives_and_terms():
    p = parse_prop("(implies (and P (or Q (not R))) (On a ?x))")
    assert p == Implies(And(Atom("P"), Or(Atom("Q"), Not(Atom("R")))), Atom("On", [Constant("a"), Variable("x")]))
    assert parse_term("(f a ?y@3)") == Compound("f", [Constant("a"), Variable("y", 3)])


def test_full_clause_set():
    text = """
    (theory K
      (implies P Q)
      (plan (when-goal (G ?x)) ((goal (H ?x)) (bind ?x a)))
      (prob (cond T W 0.5))
      (prob (marginal T 0.25)))
    """
    (th,) = parse_document(text).theories
    assert th.clauses == (
        ImpliesClause(Atom("P"), Atom("Q")),
        PlanClause(WHEN_GOAL, atom("G", "?x"), (DoGoal(atom("H", "?x")), Bind(Variable("x"), Constant("a")))),
        ProbClause(Conditional("T", "W", 0.5)),
        ProbClause(Marginal("T", 0.25)),
    )


def test_sexpr_positions():
    (form,) = read_sexprs("\n  (a (b c))")
    assert (form.line, form.col) == (2, 3)
    assert (form.items[1].line, form.items[1].col) == (2, 6)


def test_print_parse_round_trip_generated():
    rng = random.Random(10)
    for _ in range(500):
        doc = random_document(rng)
        text = print_document(doc)
        assert parse_document(text) == doc
        assert print_document(parse_document(text)) == text


def test_store_round_trip_generated():
    rng = random.Random(12)
    for _ in range(200):
        doc = safe_ground_document(rng)
        s = TheoryStore()
        load_document(s, doc)
        back = KBDocument(tuple(theory_to_block(s, th.name) for th in doc.theories))
        assert back == doc
