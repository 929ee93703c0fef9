"""Probability bounds that leak contraposition.

Given ``P(T | W) = p`` and ``P(T) = q`` the product rule forces
``P(W) <= q / p``.  With ``p = 1, q = 0`` that pins ``P(W)`` to 0: a
probabilistic system concludes "not W" from "not T", which is exactly the
inference the symbolic engine refuses to make from a rule ``W |- T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .props import symbols

__all__ = [
    "Conditional",
    "Marginal",
    "ProbConstraint",
    "Bound",
    "LeakageDiagnostic",
    "upper_bound_from_conditional",
    "audit_contraposition",
]


def _check_prob(value: float, what: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{what} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class Conditional:
    """``P(event | given) = value``."""

    event: str
    given: str
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", _check_prob(self.value, "conditional"))


@dataclass(frozen=True)
class Marginal:
    event: str
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", _check_prob(self.value, "marginal"))


ProbConstraint = Conditional | Marginal


@dataclass(frozen=True)
class Bound:
    value: float
    unconstrained: bool = False

    def __float__(self):
        return self.value


def upper_bound_from_conditional(p_cond: float, p_marginal: float) -> Bound:
    """Tight upper bound on ``P(W)`` from ``P(T|W) = p_cond`` and ``P(T) = p_marginal``.

    ``p_cond == 0`` constrains nothing; the vacuous bound 1 is returned with
    ``unconstrained`` set.
    """
    p_cond = _check_prob(p_cond, "p_cond")
    p_marginal = _check_prob(p_marginal, "p_marginal")
    if p_cond == 0.0:
        return Bound(1.0, unconstrained=True)
    return Bound(min(1.0, p_marginal / p_cond))


@dataclass(frozen=True)
class LeakageDiagnostic:
    event: str
    bound: float
    conditional: Conditional
    marginal: Marginal
    provenance: tuple = field(default=())  # ids of rules linking the events

    def describe(self) -> str:
        text = (
            f"P({self.event}) <= {self.bound:.6f} forced by "
            f"P({self.conditional.event}|{self.conditional.given})="
            f"{self.conditional.value:.6f} and P({self.marginal.event})="
            f"{self.marginal.value:.6f}"
        )
        if self.provenance:
            text += "; contrapositive of rule " + ", ".join(self.provenance)
        return text


def audit_contraposition(rules, constraints) -> list[LeakageDiagnostic]:
    """Flag every conditional/marginal pair that forces a nontrivial bound.

    ``rules`` is an iterable of entailment rules (anything with ``id``,
    ``premises`` and ``conclusion``); a rule is cited when the conditioning
    event occurs in one of its premises and the conditioned event occurs in
    its conclusion.
    """
    rules = list(rules)
    marginals: dict[str, list[Marginal]] = {}
    for c in constraints:
        if isinstance(c, Marginal):
            marginals.setdefault(c.event, []).append(c)
    out = []
    for c in constraints:
        if not isinstance(c, Conditional) or c.value <= 0.0:
            continue
        for m in marginals.get(c.event, ()):
            ratio = m.value / c.value
            if ratio >= 1.0:
                continue
            cited = tuple(
                r.id
                for r in rules
                if c.event in symbols(r.conclusion)
                and any(c.given in symbols(p) for p in r.premises)
            )
            out.append(LeakageDiagnostic(c.given, ratio, c, m, cited))
    return out
