"""HTN planning by forward task decomposition, with optional reuse of
effects already achieved by earlier plan steps ("enhanced" mode)."""

from .model import (
    Atom, Branch, Const, Domain, Literal, Method, Operator, Plan, Problem, State, Task,
    TaskNetwork, Unordered, Var, apply_substitution, is_ground,
)
from .parser import ParseError, parse_domain, parse_plan, parse_problem, print_domain, print_problem
from .planner import Mode, PlannerOptions, PlanningError, SearchStats, SearchTimeout, find_plans, plan

__all__ = [
    "Atom", "Branch", "Const", "Domain", "Literal", "Method", "Operator", "Plan", "Problem",
    "State", "Task", "TaskNetwork", "Unordered", "Var", "apply_substitution", "is_ground",
    "ParseError", "parse_domain", "parse_plan", "parse_problem", "print_domain", "print_problem",
    "Mode", "PlannerOptions", "PlanningError", "SearchStats", "SearchTimeout", "find_plans", "plan",
]
