"""Plan validation by direct simulation.

This deliberately shares nothing with the planner's operator application:
states are plain sets of ``(predicate, arg, ...)`` tuples and operator
parameters are substituted by name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Optional

from ..model import Domain, Problem


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    failing_step: Optional[int] = None
    reason: str = ""
    final_state: Optional[FrozenSet[tuple]] = None

    def __post_init__(self):
        if not self.valid and self.failing_step is None:
            raise ValueError("an invalid report must name the failing step")

    def __bool__(self):
        return self.valid


def _fact(atom) -> tuple:
    return (atom.predicate, *(a.name for a in atom.args))


def _instantiate(atom, env) -> tuple:
    return (atom.predicate, *(env[a.name] if a.name.startswith("?") else a.name for a in atom.args))


def validate_plan(domain: Domain, problem: Problem, plan) -> ValidationReport:
    state = {_fact(a) for a in problem.initial_state}
    for i, step in enumerate(plan):
        op = domain.operators.get(step.symbol)
        if op is None:
            return ValidationReport(False, i, f"unknown operator {step.symbol}")
        args = [a.name for a in step.args]
        if len(args) != len(op.params):
            return ValidationReport(False, i, f"{step} has {len(args)} arguments, "
                                              f"operator expects {len(op.params)}")
        if any(a.startswith("?") for a in args):
            return ValidationReport(False, i, f"step {step} is not ground")
        env = {p.name: a for p, a in zip(op.params, args)}
        for lit in op.preconditions:
            fact = _instantiate(lit.atom, env)
            if lit.negated and fact in state:
                return ValidationReport(False, i, f"{step}: precondition (not {fact}) fails")
            if not lit.negated and fact not in state:
                return ValidationReport(False, i, f"{step}: precondition {fact} fails")
        state.difference_update(_instantiate(a, env) for a in op.delete_effects)
        state.update(_instantiate(a, env) for a in op.add_effects)
    return ValidationReport(True, final_state=frozenset(state))
