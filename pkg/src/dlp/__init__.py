"""Inconsistency-robust logic programming: named theories with provenance,
direct inference without contraposition or explosion, a pattern-directed
planner layer, and a probabilistic contraposition auditor."""

from .direct import (
    BlockDiagnostic,
    ProofBudget,
    ProofResult,
    Rule,
    check_derivation,
    closure_set,
    decide_boolean,
    explain_blocked_inference,
    list_inconsistencies,
    prove,
    prove_implication,
    saturate,
)
from .errors import (
    CycleDetected,
    DLPError,
    DuplicateName,
    EmptyPremises,
    NotGroundBoolean,
    ParseError,
    UnknownId,
    UnknownTheory,
    UnsafeRule,
)
from .export import export_provenance, import_provenance
from .planner import achieve, assert_with_triggers, thnot
from .plans import Bind, DoAssert, DoGoal, DoThnot, Fail, Plan, compile_implication
from .prob import Conditional, Marginal, audit_contraposition, upper_bound_from_conditional
from .props import And, Atom, Implies, Not, Or, Proposition, atom, format_prop
from .syntax import parse_document, parse_prop, print_document
from .terms import (
    Compound,
    Constant,
    Substitution,
    UnifyFailure,
    Variable,
    apply_substitution,
    freshen,
    match,
    unify,
)
from .theory import TheoryStore

__version__ = "0.1.0"
