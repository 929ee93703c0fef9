"""Command line interface: ``dlp repl|run|prove|export``.

REPL commands take an optional theory name before their arguments; without
one the current theory (set by ``theory`` or the last ``load``) is used.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import direct, planner
from .errors import DLPError, ParseError
from .export import export_provenance
from .planner import DEFAULT_PLANNER_BUDGET
from .props import format_prop
from .syntax import (
    KBDocument,
    SAtom,
    SList,
    clause_from_sexpr,
    install_clause,
    load_document,
    parse_document,
    parse_prop,
    print_document,
    prop_from_sexpr,
    read_sexprs,
    theory_to_block,
)
from .theory import CLOSED_WORLD, TheoryStore

__all__ = ["Repl", "main", "EXIT_OK", "EXIT_IO", "EXIT_PARSE"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARSE = 2

HELP = """\
commands (an optional theory name may precede the arguments):
  load <path>                    load a KB file
  theory <name>                  create/switch theory
  assert [T] <prop>              assert, firing when-assert plans
  rule [T] (<prop>+) <prop>      add an entailment rule
  implies [T] <p> <q>            assert (implies p q) and its compiled plans
  plan [T] (when-assert|when-goal <pat>) (<step>*)
  prob [T] (cond E G v) | (marginal E v)
  goal [T] <prop>                planner search
  prove [T] <prop>               direct inference
  decide [T] <prop>              ground Boolean decision procedure
  implies? [T] <psi> <phi>       two-way deduction check
  thnot [T] <prop>               negation as failure
  thnot-assert [T] <prop>        negation as failure, asserting the negation
  derive <base> <new> (<omit-id>*) (<clause>*)
  why [T] <derivation-id>        derivation tree
  inconsistencies [T]
  audit [T]
  argue [T] <target> pro|con <support> <author>
  args [T] <target>
  export [T] <path>              JSON provenance export
  show [T]                       print the theory in KB syntax
  quit"""


class CommandError(DLPError):
    pass


class Repl:
    """Command interpreter over one :class:`TheoryStore`."""

    def __init__(
        self,
        out=None,
        budget: int | None = None,
        hyp_depth: int | None = None,
        plans: bool = True,
        store: TheoryStore | None = None,
        batch: bool = False,
    ):
        self.out = out if out is not None else sys.stdout
        self.store = store or TheoryStore()
        self.current: str | None = None
        self.proof_budget = direct.ProofBudget.from_env(max_steps=budget, max_hyp_depth=hyp_depth)
        env = os.environ.get("DLP_BUDGET")
        self.planner_budget = budget or (int(env) if env else DEFAULT_PLANNER_BUDGET)
        self.plans = plans
        self.batch = batch

    def say(self, text: str = ""):
        self.out.write(text + "\n")

    # -- driving -----------------------------------------------------------

    def run_lines(self, lines, echo: bool = False) -> int:
        """Execute commands; returns an exit code."""
        for lineno, raw in enumerate(lines, 1):
            line = raw.strip()
            if not line or line.startswith(";"):
                continue
            if echo:
                self.say(f"> {line}")
            try:
                if self.execute(line) == "quit":
                    return EXIT_OK
            except ParseError as e:
                self.say(f"parse error: {e}")
                if self.batch:
                    return EXIT_PARSE
            except OSError as e:
                self.say(f"i/o error: {e}")
                if self.batch:
                    return EXIT_IO
            except (DLPError, ValueError, TypeError) as e:
                self.say(f"error: {e}")
        return EXIT_OK

    def execute(self, line: str):
        cmd, _, rest = line.partition(" ")
        handler = COMMANDS.get(cmd)
        if handler is None:
            raise CommandError(f"unknown command {cmd!r}; try help")
        return handler(self, rest.strip())

    # -- argument helpers ----------------------------------------------------

    def _theory(self, args: list, n: int) -> tuple[str, list]:
        """Split an optional leading theory name off ``args`` when it has one
        more element than the ``n`` the command needs."""
        if len(args) == n + 1 and isinstance(args[0], SAtom):
            name = args[0].text
            self.store.theory(name)
            return name, args[1:]
        if len(args) != n:
            raise CommandError(f"expected {n} argument(s), got {len(args)}")
        if self.current is None:
            raise CommandError("no current theory; use theory <name> first")
        return self.current, args

    def _theory_only(self, rest: str) -> str:
        args = read_sexprs(rest)
        return self._theory(args, 0)[0]

    # -- rendering -------------------------------------------------------------

    def _layer(self, theory, d) -> str:
        if d.rule == direct.Rule.REITERATION and not d.premises and d.ref:
            t = self.store.theory(theory)
            if t.has_item(d.ref):
                item = t.item(d.ref)
                src = getattr(item, "source", "user")
                if src == CLOSED_WORLD:
                    return "closed-world"
                if src.startswith("planner:"):
                    return "planner"
        return "direct"

    def _node_text(self, theory, d) -> str:
        if d.rule == direct.Rule.REITERATION and not d.premises:
            if d.ref is not None:
                what = f"assertion {d.ref}"
            else:
                what = "hypothesis"
        else:
            refs = list(d.premises)
            if d.ref is not None:
                refs.insert(0, f"rule {d.ref}")
            what = ", ".join(refs)
        label = f"{d.id}: {format_prop(d.conclusion)}, {self._layer(theory, d)}"
        if d.hypotheses:
            label += "; assuming " + ", ".join(format_prop(h) for h in d.hypotheses)
        return f"{d.rule} ← {what}  ({label})"

    def why_lines(self, theory: str, d_id: str) -> list[str]:
        t = self.store.theory(theory)
        lines = []
        shown = set()

        def walk(i, indent):
            d = t.derivation(i)
            text = "  " * indent + self._node_text(theory, d)
            if i in shown and d.premises:
                lines.append(text + " [above]")
                return
            shown.add(i)
            lines.append(text)
            for p in d.premises:
                walk(p, indent + 1)

        walk(d_id, 0)
        return lines

    # -- commands ------------------------------------------------------------------

    def cmd_help(self, rest):
        self.say(HELP)

    def cmd_quit(self, rest):
        self.say("bye")
        return "quit"

    def cmd_load(self, rest):
        path = rest.strip()
        if not path:
            raise CommandError("load needs a path")
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        doc = parse_document(text)
        names = self.load(doc)
        self.say(f"loaded {', '.join(names) if names else 'nothing'} from {path}")

    def load(self, doc: KBDocument) -> list[str]:
        names = load_document(self.store, doc, plans=self.plans, triggers=self.plans)
        if names:
            self.current = names[-1]
        return names

    def cmd_theory(self, rest):
        args = read_sexprs(rest)
        if len(args) != 1 or not isinstance(args[0], SAtom):
            raise CommandError("theory needs one name")
        name = args[0].text
        created = name not in self.store
        self.store.ensure_theory(name)
        self.current = name
        self.say(f"theory {name}" + (" (new)" if created else ""))

    def _clause(self, keyword, rest, n):
        args = read_sexprs(rest)
        theory, args = self._theory(args, n)
        clause = clause_from_sexpr(SList([SAtom(keyword, 1, 1), *args], 1, 1))
        return theory, clause

    def cmd_assert(self, rest):
        theory, clause = self._clause("assert", rest, 1)
        if self.plans:
            res = planner.assert_with_triggers(
                self.store, theory, clause.prop, budget=self.planner_budget
            )
            msg = f"asserted {res.assertion_id}"
            if len(res):
                msg += "; triggered " + ", ".join(self._describe_item(theory, i) for i in res)
            if res.exhausted:
                msg += "; cascade stopped: budget exhausted"
            self.say(msg)
        else:
            self.say(f"asserted {self.store.assert_prop(theory, clause.prop)}")

    def _describe_item(self, theory, item_id):
        item = self.store.theory(theory).item(item_id)
        return f"{item_id} {format_prop(item.prop)} [planner]"

    def cmd_rule(self, rest):
        theory, clause = self._clause("rule", rest, 2)
        self.say(f"rule {install_clause(self.store, theory, clause)}")

    def cmd_implies(self, rest):
        theory, clause = self._clause("implies", rest, 2)
        a_id, plan_ids = self.store.add_implication(
            theory, clause.antecedent, clause.consequent, plans=self.plans
        )
        msg = f"asserted {a_id}"
        if plan_ids:
            msg += "; plans " + ", ".join(plan_ids)
        self.say(msg)

    def cmd_plan(self, rest):
        theory, clause = self._clause("plan", rest, 2)
        self.say(f"plan {install_clause(self.store, theory, clause)}")

    def cmd_prob(self, rest):
        theory, clause = self._clause("prob", rest, 1)
        install_clause(self.store, theory, clause)
        self.say("constraint added")

    def _prop_args(self, rest, n):
        args = read_sexprs(rest)
        theory, args = self._theory(args, n)
        return theory, [prop_from_sexpr(a) for a in args]

    def cmd_goal(self, rest):
        theory, (goal,) = self._prop_args(rest, 1)
        res = planner.achieve(self.store, theory, goal, budget=self.planner_budget)
        if res:
            msg = f"success {res.substitution}"
            if res.assertions:
                msg += "; asserted " + ", ".join(res.assertions)
            self.say(msg)
        elif res.exhausted:
            self.say("failure (search exhausted)")
        else:
            self.say("failure (budget exhausted)")

    def cmd_prove(self, rest):
        theory, (goal,) = self._prop_args(rest, 1)
        self.say(prove_text(self.store, theory, goal, self.proof_budget))

    def cmd_decide(self, rest):
        theory, (goal,) = self._prop_args(rest, 1)
        res = direct.decide_boolean(self.store, theory, goal, self.proof_budget.max_hyp_depth)
        if res:
            self.say(f"provable; derivation {res.derivation}")
        else:
            self.say("not provable")

    def cmd_implies_q(self, rest):
        theory, (psi, phi) = self._prop_args(rest, 2)
        budget = self.proof_budget
        if budget.max_hyp_depth < 1:
            raise CommandError("implies? needs --hyp-depth of at least 1")
        res = direct.prove_implication(self.store, theory, psi, phi, budget)
        halves = f"forward: {_status(res.forward)}, backward: {_status(res.backward)}"
        if res.established:
            self.say(f"established; derivation {res.derivation} ({halves})")
        else:
            self.say(f"not established ({halves})")

    def _thnot(self, rest, assert_negation):
        theory, (goal,) = self._prop_args(rest, 1)
        res = planner.thnot(self.store, theory, goal, assert_negation, budget=self.planner_budget)
        if res:
            msg = "success"
            if res.assertion_id:
                msg += f"; asserted {res.assertion_id} (closed-world)"
            self.say(msg)
        elif res.budget_exhausted:
            self.say("failure (budget exhausted; nothing concluded)")
        else:
            self.say("failure (goal achievable)")

    def cmd_thnot(self, rest):
        self._thnot(rest, False)

    def cmd_thnot_assert(self, rest):
        self._thnot(rest, True)

    def cmd_derive(self, rest):
        args = read_sexprs(rest)
        if len(args) not in (2, 3, 4):
            raise CommandError("derive <base> <new> (<omit-id>*) (<clause>*)")
        base = _atom_text(args[0], "base theory")
        name = _atom_text(args[1], "new theory")
        omit, sources = [], []
        if len(args) > 2:
            for x in _list_items(args[2], "omit list"):
                text = _atom_text(x, "id")
                if text.startswith("source:"):
                    sources.append(text[len("source:"):])
                else:
                    omit.append(text)
        clauses = []
        if len(args) > 3:
            clauses = [clause_from_sexpr(c) for c in _list_items(args[3], "clause list")]
        self.store.derive_theory(base, name, omit, (), sources)
        ids = [install_clause(self.store, name, c, plans=self.plans) for c in clauses]
        self.current = name
        msg = f"theory {name} derived from {base}"
        if omit or sources:
            msg += " omitting " + ", ".join([*omit, *(f"source:{s}" for s in sources)])
        added = [i for i in ids if isinstance(i, str)]
        if added:
            msg += "; added " + ", ".join(added)
        self.say(msg)

    def cmd_why(self, rest):
        args = read_sexprs(rest)
        theory, (d,) = self._theory(args, 1)
        for line in self.why_lines(theory, _atom_text(d, "derivation id")):
            self.say(line)

    def cmd_inconsistencies(self, rest):
        theory = self._theory_only(rest)
        pairs = direct.list_inconsistencies(self.store, theory, self.proof_budget)
        if not pairs:
            self.say("none found")
        for prop, d_pos, d_neg in pairs:
            self.say(f"{format_prop(prop)}: {d_pos} / {d_neg}")
        if not pairs.complete:
            self.say("(incomplete: budget exhausted)")

    def cmd_audit(self, rest):
        theory = self._theory_only(rest)
        diags = self.store.audit(theory)
        if not diags:
            self.say("no leakage")
        for d in diags:
            self.say(d.describe())

    def cmd_argue(self, rest):
        args = read_sexprs(rest)
        theory, (target, pol, support, author) = self._theory(args, 4)
        arg_id = self.store.argue(
            theory,
            _target(target),
            _atom_text(pol, "pro or con"),
            _free_text(support),
            _atom_text(author, "author"),
        )
        self.say(arg_id)

    def cmd_args(self, rest):
        args = read_sexprs(rest)
        theory, (target,) = self._theory(args, 1)
        found = self.store.arguments_about(theory, _target(target))
        if not found:
            self.say("no arguments")
        for a in found:
            self.say(f"{a.id} {a.polarity} by {a.author}: {a.support}")

    def cmd_export(self, rest):
        args = read_sexprs(rest)
        theory, (path,) = self._theory(args, 1)
        n = export_provenance(self.store, theory, _atom_text(path, "path"))
        self.say(f"wrote {n} bytes to {path.text}")

    def cmd_show(self, rest):
        theory = self._theory_only(rest)
        block = theory_to_block(self.store, theory)
        self.out.write(print_document(KBDocument((block,))))


def _status(r) -> str:
    return r.status.replace("-", " ")


def prove_text(store, theory, goal, budget) -> str:
    res = direct.prove(store, theory, goal, budget)
    if res.provable:
        text = f"provable; derivation {res.derivation}"
        if res.substitution is not None and len(res.substitution):
            text += f" {res.substitution}"
        return text
    if res.status == direct.BUDGET_EXHAUSTED:
        return "budget exhausted (not decided)"
    text = "not derivable (definitive)" if res.definitive else "not derivable (within budget)"
    blocks = direct.explain_blocked_inference(store, theory, goal, budget)
    if blocks:
        text += "; blocked: " + "; ".join(b.describe() for b in blocks)
    return text


def _atom_text(x, what) -> str:
    if not isinstance(x, SAtom):
        raise ParseError(x.line, x.col, what, "a list")
    return x.text


def _list_items(x, what) -> list:
    if not isinstance(x, SList):
        raise ParseError(x.line, x.col, what, repr(x.text))
    return x.items


def _target(x):
    if isinstance(x, SAtom) and x.text.startswith("arg") and x.text[3:].isdigit():
        return x.text
    return prop_from_sexpr(x)


def _free_text(x) -> str:
    if isinstance(x, SAtom):
        return x.text.strip('"')
    return " ".join(_free_text(i) for i in x.items)


COMMANDS = {
    "help": Repl.cmd_help,
    "quit": Repl.cmd_quit,
    "exit": Repl.cmd_quit,
    "load": Repl.cmd_load,
    "theory": Repl.cmd_theory,
    "assert": Repl.cmd_assert,
    "rule": Repl.cmd_rule,
    "implies": Repl.cmd_implies,
    "plan": Repl.cmd_plan,
    "prob": Repl.cmd_prob,
    "goal": Repl.cmd_goal,
    "prove": Repl.cmd_prove,
    "decide": Repl.cmd_decide,
    "implies?": Repl.cmd_implies_q,
    "thnot": Repl.cmd_thnot,
    "thnot-assert": Repl.cmd_thnot_assert,
    "derive": Repl.cmd_derive,
    "why": Repl.cmd_why,
    "inconsistencies": Repl.cmd_inconsistencies,
    "audit": Repl.cmd_audit,
    "argue": Repl.cmd_argue,
    "args": Repl.cmd_args,
    "export": Repl.cmd_export,
    "show": Repl.cmd_show,
}


# -- entry point ------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="step budget (default: $DLP_BUDGET)")
    common.add_argument("--hyp-depth", type=int, default=None, help="max hypothetical nesting")
    common.add_argument("--no-plans", action="store_true", help="do not compile implies clauses into plans")

    p = argparse.ArgumentParser(prog="dlp", description="Inconsistency-robust logic programming engine")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("repl", parents=[common], help="interactive session or command script")
    r.add_argument("script", nargs="?", help="run commands from this file in batch mode")
    r = sub.add_parser("run", parents=[common], help="load a KB file and report on each theory")
    r.add_argument("file")
    r = sub.add_parser("prove", parents=[common], help="prove a proposition in a theory")
    r.add_argument("theory")
    r.add_argument("prop")
    r.add_argument("--kb", action="append", default=[], help="KB file to load first")
    r = sub.add_parser("export", parents=[common], help="export a theory's provenance as JSON")
    r.add_argument("theory")
    r.add_argument("out")
    r.add_argument("--kb", action="append", default=[], help="KB file to load first")
    return p


def _read(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def main(argv=None, out=None, stdin=None) -> int:
    args = _parser().parse_args(argv)
    out = out if out is not None else sys.stdout
    batch = args.command != "repl" or args.script is not None
    repl = Repl(out, args.budget, args.hyp_depth, not args.no_plans, batch=batch)
    try:
        if args.command == "repl":
            if args.script:
                return repl.run_lines(_read(args.script).splitlines(), echo=True)
            return _interactive(repl, stdin if stdin is not None else sys.stdin)
        if args.command == "run":
            doc = parse_document(_read(args.file))
            for name in repl.load(doc):
                _report(repl, name)
            return EXIT_OK
        for path in args.kb:
            repl.load(parse_document(_read(path)))
        if args.command == "prove":
            repl.store.theory(args.theory)
            out.write(prove_text(repl.store, args.theory, parse_prop(args.prop), repl.proof_budget) + "\n")
            return EXIT_OK
        if args.command == "export":
            direct.list_inconsistencies(repl.store, args.theory, repl.proof_budget)
            n = export_provenance(repl.store, args.theory, args.out)
            out.write(f"wrote {n} bytes to {args.out}\n")
            return EXIT_OK
    except ParseError as e:
        out.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except OSError as e:
        out.write(f"i/o error: {e}\n")
        return EXIT_IO
    except DLPError as e:
        out.write(f"error: {e}\n")
        return EXIT_IO
    return EXIT_OK


def _report(repl: Repl, name: str):
    store = repl.store
    snap = store.snapshot(name)
    repl.say(f"theory {name}: {len(snap.assertions)} assertion(s), {len(snap.rules)} rule(s), {len(snap.plans)} plan(s)")
    pairs = direct.list_inconsistencies(store, name, repl.proof_budget)
    for prop, d_pos, d_neg in pairs:
        repl.say(f"  inconsistent: {format_prop(prop)}: {d_pos} / {d_neg}")
    if not pairs.complete:
        repl.say("  (incomplete: budget exhausted)")
    for d in store.audit(name):
        repl.say(f"  leakage: {d.describe()}")


def _interactive(repl: Repl, stdin) -> int:
    tty = stdin.isatty()
    while True:
        if tty:
            repl.out.write("dlp> ")
            repl.out.flush()
        line = stdin.readline()
        if not line:
            return EXIT_OK
        code = repl.run_lines([line])
        if line.strip() in ("quit", "exit"):
            return code


if __name__ == "__main__":
    sys.exit(main())
