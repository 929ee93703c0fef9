"""S-expression surface syntax for knowledge bases.

Grammar::

    document := form*
    form     := "(" "theory" name clause* ")"
    clause   := "(" "assert" prop ")"
              | "(" "rule" "(" prop+ ")" prop ")"
              | "(" "implies" prop prop ")"
              | "(" "plan" trigger "(" step* ")" ")"
              | "(" "prob" probclause ")"
    prop     := atom | "(" "not" prop ")" | "(" "and" prop prop ")"
              | "(" "or" prop prop ")" | "(" "implies" prop prop ")"
              | "(" predname term* ")"
    trigger  := "(" ("when-assert" | "when-goal") prop ")"
    step     := "(" "assert" prop ")" | "(" "goal" prop ")"
              | "(" "thnot" prop ")" | "(" "thnot-assert" prop ")"
              | "(" "fail" ")" | "(" "bind" term term ")"
    probclause := "(" "cond" event event number ")"      ; P(event | given)
                | "(" "marginal" event number ")"
    term     := "?"name | name | "(" functor term* ")"

Comments run from ``;`` to end of line.  Parsing stops at the first
error, reported with line and column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ParseError
from .plans import WHEN_ASSERT, WHEN_GOAL, Bind, DoAssert, DoGoal, DoThnot, Fail
from .prob import Conditional, Marginal
from .props import And, Atom, Implies, Not, Or, Proposition, format_prop, format_term
from .terms import Compound, Constant, Variable

__all__ = [
    "SAtom",
    "SList",
    "read_sexprs",
    "KBDocument",
    "TheoryBlock",
    "AssertClause",
    "RuleClause",
    "ImpliesClause",
    "PlanClause",
    "ProbClause",
    "parse_document",
    "parse_prop",
    "parse_term",
    "prop_from_sexpr",
    "term_from_sexpr",
    "print_document",
    "clause_from_sexpr",
    "install_clause",
    "theory_to_block",
    "format_step",
    "load_document",
]

KEYWORDS = frozenset({"not", "and", "or", "implies"})


# -- reader ----------------------------------------------------------------


@dataclass
class SAtom:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


SExpr = Union[SAtom, SList]


def read_sexprs(text: str) -> list:
    """Read every top-level s-expression in ``text``."""
    out = []
    stack: list[SList] = []
    i, n = 0, len(text)
    line, col = 1, 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(SList([], line, col))
            i += 1
            col += 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError(line, col, "form", "')'")
            done = stack.pop()
            (stack[-1].items if stack else out).append(done)
            i += 1
            col += 1
            continue
        start, start_col = i, col
        if ch == '"':
            end = text.find('"', i + 1)
            if end < 0 or "\n" in text[i:end]:
                raise ParseError(line, col, "closing '\"'", "end of line")
            col += end + 1 - i
            i = end + 1
            (stack[-1].items if stack else out).append(SAtom(text[start:i], line, start_col))
            continue
        while i < n and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        tok = SAtom(text[start:i], line, start_col)
        (stack[-1].items if stack else out).append(tok)
    if stack:
        opened = stack[-1]
        raise ParseError(opened.line, opened.col, "')' to close this form", "end of input")
    return out


# -- document model -------------------------------------------------------


@dataclass(frozen=True)
class AssertClause:
    prop: Proposition


@dataclass(frozen=True)
class RuleClause:
    premises: tuple
    conclusion: Proposition


@dataclass(frozen=True)
class ImpliesClause:
    antecedent: Proposition
    consequent: Proposition


@dataclass(frozen=True)
class PlanClause:
    trigger: str
    pattern: Proposition
    steps: tuple


@dataclass(frozen=True)
class ProbClause:
    constraint: Union[Conditional, Marginal]


Clause = Union[AssertClause, RuleClause, ImpliesClause, PlanClause, ProbClause]


@dataclass(frozen=True)
class TheoryBlock:
    name: str
    clauses: tuple = ()


@dataclass(frozen=True)
class KBDocument:
    theories: tuple = ()


# -- s-expression -> model ---------------------------------------------------


def _where(x: SExpr):
    return x.line, x.col


def _found(x: SExpr) -> str:
    if isinstance(x, SAtom):
        return repr(x.text)
    return "a list"


def _symbol(x: SExpr, what: str) -> str:
    if not isinstance(x, SAtom) or x.text.startswith("?"):
        raise ParseError(*_where(x), what, _found(x))
    return x.text


def _end_of(x: SList):
    # position of the closing paren is unknown after reading; point at the form
    return x.line, x.col


def term_from_sexpr(x: SExpr):
    if isinstance(x, SAtom):
        t = x.text
        if t.startswith("?"):
            name = t[1:]
            scope = 0
            if "@" in name:
                name, _, sc = name.partition("@")
                if not sc.isdigit():
                    raise ParseError(*_where(x), "variable scope number", repr(t))
                scope = int(sc)
            if not name:
                raise ParseError(*_where(x), "variable name after '?'", repr(t))
            return Variable(name, scope)
        return Constant(t)
    if not x.items:
        raise ParseError(*_where(x), "functor", "()")
    functor = _symbol(x.items[0], "functor symbol")
    return Compound(functor, [term_from_sexpr(a) for a in x.items[1:]])


def prop_from_sexpr(x: SExpr) -> Proposition:
    if isinstance(x, SAtom):
        name = _symbol(x, "proposition")
        if name in KEYWORDS:
            raise ParseError(*_where(x), "proposition", repr(name))
        return Atom(name)
    if not x.items:
        raise ParseError(*_where(x), "proposition", "()")
    head = x.items[0]
    name = _symbol(head, "connective or predicate")
    args = x.items[1:]
    if name == "not":
        _arity(x, args, 1)
        return Not(prop_from_sexpr(args[0]))
    if name in ("and", "or", "implies"):
        _arity(x, args, 2)
        cls = {"and": And, "or": Or, "implies": Implies}[name]
        return cls(prop_from_sexpr(args[0]), prop_from_sexpr(args[1]))
    return Atom(name, [term_from_sexpr(a) for a in args])


def _arity(x: SList, args, n):
    if len(args) < n:
        raise ParseError(*_end_of(x), f"{n} argument(s) to {x.items[0].text}", f"{len(args)}")
    if len(args) > n:
        raise ParseError(*_where(args[n]), f"')' after {n} argument(s)", _found(args[n]))


def _number(x: SExpr) -> float:
    if isinstance(x, SAtom):
        try:
            return float(x.text)
        except ValueError:
            pass
    raise ParseError(*_where(x), "number", _found(x))


def _step_from_sexpr(x: SExpr):
    if not isinstance(x, SList) or not x.items:
        raise ParseError(*_where(x), "plan step", _found(x))
    kw = _symbol(x.items[0], "plan step keyword")
    args = x.items[1:]
    if kw == "assert":
        _arity(x, args, 1)
        return DoAssert(prop_from_sexpr(args[0]))
    if kw == "goal":
        _arity(x, args, 1)
        return DoGoal(prop_from_sexpr(args[0]))
    if kw in ("thnot", "thnot-assert"):
        _arity(x, args, 1)
        return DoThnot(prop_from_sexpr(args[0]), kw == "thnot-assert")
    if kw == "fail":
        _arity(x, args, 0)
        return Fail()
    if kw == "bind":
        _arity(x, args, 2)
        return Bind(term_from_sexpr(args[0]), term_from_sexpr(args[1]))
    raise ParseError(*_where(x.items[0]), "assert, goal, thnot, thnot-assert, fail or bind", repr(kw))


def clause_from_sexpr(x: SExpr) -> Clause:
    if not isinstance(x, SList) or not x.items:
        raise ParseError(*_where(x), "clause", _found(x))
    kw = _symbol(x.items[0], "clause keyword")
    args = x.items[1:]
    if kw == "assert":
        _arity(x, args, 1)
        return AssertClause(prop_from_sexpr(args[0]))
    if kw == "rule":
        _arity(x, args, 2)
        prem = args[0]
        if not isinstance(prem, SList) or not prem.items:
            raise ParseError(*_where(prem), "non-empty premise list", _found(prem))
        return RuleClause(tuple(prop_from_sexpr(p) for p in prem.items), prop_from_sexpr(args[1]))
    if kw == "implies":
        _arity(x, args, 2)
        return ImpliesClause(prop_from_sexpr(args[0]), prop_from_sexpr(args[1]))
    if kw == "plan":
        _arity(x, args, 2)
        trig, body = args
        if not isinstance(trig, SList) or len(trig.items) != 2:
            raise ParseError(*_where(trig), "(when-assert prop) or (when-goal prop)", _found(trig))
        kind = _symbol(trig.items[0], "when-assert or when-goal")
        if kind not in (WHEN_ASSERT, WHEN_GOAL):
            raise ParseError(*_where(trig.items[0]), "when-assert or when-goal", repr(kind))
        if not isinstance(body, SList):
            raise ParseError(*_where(body), "step list", _found(body))
        return PlanClause(kind, prop_from_sexpr(trig.items[1]), tuple(_step_from_sexpr(s) for s in body.items))
    if kw == "prob":
        _arity(x, args, 1)
        pc = args[0]
        if not isinstance(pc, SList) or not pc.items:
            raise ParseError(*_where(pc), "(cond ...) or (marginal ...)", _found(pc))
        pk = _symbol(pc.items[0], "cond or marginal")
        pargs = pc.items[1:]
        try:
            if pk == "cond":
                _arity(pc, pargs, 3)
                return ProbClause(
                    Conditional(
                        _symbol(pargs[0], "event"), _symbol(pargs[1], "event"), _number(pargs[2])
                    )
                )
            if pk == "marginal":
                _arity(pc, pargs, 2)
                return ProbClause(Marginal(_symbol(pargs[0], "event"), _number(pargs[1])))
        except ValueError:
            raise ParseError(*_where(pargs[-1]), "probability in [0, 1]", _found(pargs[-1])) from None
        raise ParseError(*_where(pc.items[0]), "cond or marginal", repr(pk))
    raise ParseError(*_where(x.items[0]), "assert, rule, implies, plan or prob", repr(kw))


def parse_document(text: str) -> KBDocument:
    theories = []
    for form in read_sexprs(text):
        if not isinstance(form, SList) or not form.items:
            raise ParseError(*_where(form), "(theory ...)", _found(form))
        if _symbol(form.items[0], "theory") != "theory":
            raise ParseError(*_where(form.items[0]), "theory", repr(form.items[0].text))
        if len(form.items) < 2:
            raise ParseError(*_end_of(form), "theory name", "nothing")
        name = _symbol(form.items[1], "theory name")
        clauses = tuple(clause_from_sexpr(c) for c in form.items[2:])
        theories.append(TheoryBlock(name, clauses))
    return KBDocument(tuple(theories))


def _single(text: str, what: str) -> SExpr:
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise ParseError(1, 1, f"exactly one {what}", f"{len(forms)} forms")
    return forms[0]


def parse_prop(text: str) -> Proposition:
    return prop_from_sexpr(_single(text, "proposition"))


def parse_term(text: str):
    return term_from_sexpr(_single(text, "term"))


# -- printing ------------------------------------------------------------------


def _fmt_num(v: float) -> str:
    return repr(float(v))


def format_step(step) -> str:
    if isinstance(step, DoAssert):
        return f"(assert {format_prop(step.prop)})"
    if isinstance(step, DoGoal):
        return f"(goal {format_prop(step.prop)})"
    if isinstance(step, DoThnot):
        kw = "thnot-assert" if step.assert_negation else "thnot"
        return f"({kw} {format_prop(step.prop)})"
    if isinstance(step, Fail):
        return "(fail)"
    if isinstance(step, Bind):
        return f"(bind {format_term(step.left)} {format_term(step.right)})"
    raise TypeError(step)


def format_clause(c: Clause) -> str:
    if isinstance(c, AssertClause):
        return f"(assert {format_prop(c.prop)})"
    if isinstance(c, RuleClause):
        prem = " ".join(format_prop(p) for p in c.premises)
        return f"(rule ({prem}) {format_prop(c.conclusion)})"
    if isinstance(c, ImpliesClause):
        return f"(implies {format_prop(c.antecedent)} {format_prop(c.consequent)})"
    if isinstance(c, PlanClause):
        steps = " ".join(format_step(s) for s in c.steps)
        return f"(plan ({c.trigger} {format_prop(c.pattern)}) ({steps}))"
    if isinstance(c, ProbClause):
        k = c.constraint
        if isinstance(k, Conditional):
            return f"(prob (cond {k.event} {k.given} {_fmt_num(k.value)}))"
        return f"(prob (marginal {k.event} {_fmt_num(k.value)}))"
    raise TypeError(c)


def print_document(doc: KBDocument) -> str:
    blocks = []
    for th in doc.theories:
        lines = [f"(theory {th.name}"]
        lines.extend("  " + format_clause(c) for c in th.clauses)
        lines[-1] += ")"
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# -- store bridge -------------------------------------------------------------


def load_document(store, doc: KBDocument, plans: bool = True, triggers: bool = False) -> list[str]:
    """Install every theory block into ``store`` (creating theories as
    needed).  ``implies`` clauses also install their four compiled plans
    unless ``plans`` is false.  With ``triggers`` assertions go through the
    planner so when-assert plans fire."""
    names = []
    for th in doc.theories:
        store.ensure_theory(th.name)
        names.append(th.name)
        for c in th.clauses:
            install_clause(store, th.name, c, plans=plans, triggers=triggers)
    return names


def install_clause(store, theory: str, c: Clause, plans: bool = True, triggers: bool = False):
    if isinstance(c, AssertClause):
        if triggers:
            from .planner import assert_with_triggers

            return assert_with_triggers(store, theory, c.prop).assertion_id
        return store.assert_prop(theory, c.prop)
    if isinstance(c, RuleClause):
        return store.add_rule(theory, c.premises, c.conclusion)
    if isinstance(c, ImpliesClause):
        return store.add_implication(theory, c.antecedent, c.consequent, plans=plans)[0]
    if isinstance(c, PlanClause):
        return store.add_plan(theory, c.trigger, c.pattern, c.steps)
    if isinstance(c, ProbClause):
        return store.add_constraint(theory, c.constraint)
    raise TypeError(c)


def theory_to_block(store, theory: str) -> TheoryBlock:
    """Print-side inverse of :func:`load_document` for one theory.

    Compiled plans are folded back into their ``implies`` clause.
    """
    snap = store.snapshot(theory)
    compiled = {}
    for p in snap.plans:
        if p.origin.startswith("compiled-from:"):
            compiled.setdefault(p.origin.split(":", 1)[1], []).append(p)
    items = sorted(
        [*snap.assertions, *snap.rules, *[p for p in snap.plans if p.origin == "user"]],
        key=lambda i: _id_key(i.id),
    )
    clauses = []
    for it in items:
        if hasattr(it, "prop"):
            if it.id in compiled and isinstance(it.prop, Implies):
                clauses.append(ImpliesClause(it.prop.left, it.prop.right))
            else:
                clauses.append(AssertClause(it.prop))
        elif hasattr(it, "premises"):
            clauses.append(RuleClause(tuple(it.premises), it.conclusion))
        else:
            clauses.append(PlanClause(it.trigger, it.pattern, tuple(it.body)))
    clauses.extend(ProbClause(k) for k in snap.constraints)
    return TheoryBlock(theory, tuple(clauses))


def _id_key(item_id: str):
    prefix = item_id.rstrip("0123456789")
    return (int(item_id[len(prefix):] or 0), prefix)
