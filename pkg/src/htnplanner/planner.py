"""Forward task decomposition in the style of SHOP2, with optional task interaction.

The search is a depth-first walk over immutable ``SearchNode`` snapshots.
Each node keeps a reference to the node it was expanded from, so
backtracking is nothing more than dropping the child.

Choice points, in the order they are enumerated:

1. which frontier task to work on (the head task, or with an unordered
   group at the head, the first task of each member, left to right);
2. for a primitive task, the operator binding;
3. for a nonprimitive task, the method (source order), then the bindings of
   the first branch whose preconditions hold (branches are if-then-else).
"""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .interaction import (
    Agenda,
    AppliedStep,
    ReducedMethodRecord,
    SeenPlans,
    interleave_filter,
    is_matchable,
    recursive_subtask_check,
    reducible_records,
    suppress_duplicate,
    update_agenda_on_apply,
)
from .logic import satisfy, unify
from .model import (
    Domain,
    Method,
    Operator,
    Plan,
    Problem,
    State,
    Substitution,
    Task,
    TaskNetwork,
    Unordered,
    apply_substitution,
)

log = logging.getLogger(__name__)


class PlanningError(Exception):
    """The problem cannot be searched at all (as opposed to having no plan)."""


class InapplicableOperator(Exception):
    def __init__(self, task, reason):
        super().__init__(task, reason)
        self.task = task
        self.reason = reason

    def __str__(self):
        return f"{self.task}: {self.reason}"


class SearchExhausted(Exception):
    pass


class SearchTimeout(Exception):
    pass


class Mode(str, enum.Enum):
    BASELINE = "baseline"
    ENHANCED = "enhanced"


@dataclass
class PlannerOptions:
    mode: Mode = Mode.BASELINE
    max_plans: Optional[int] = 1  # None: enumerate every plan
    max_depth: Optional[int] = 10000
    collect_stats: bool = True
    # None: on in enhanced mode, off in baseline mode
    suppress_duplicates: Optional[bool] = None
    # also try applying a matchable task instead of only pruning it
    explore_both_on_match: bool = False
    time_limit: Optional[float] = None

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if self.max_plans is not None and self.max_plans < 1:
            raise ValueError("max_plans must be >= 1 or None")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 or None")

    @property
    def enhanced(self) -> bool:
        return self.mode is Mode.ENHANCED

    @property
    def dedup(self) -> bool:
        if self.suppress_duplicates is None:
            return self.enhanced
        return self.suppress_duplicates


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    backtracks: int = 0
    plans_emitted: int = 0
    duplicate_plans_suppressed: int = 0
    tasks_pruned: int = 0
    reductions_pruned: int = 0
    wall_time: float = 0.0

    def counters(self) -> dict:
        d = dict(self.__dict__)
        d.pop("wall_time")
        return d


@dataclass(frozen=True)
class SearchNode:
    state: State
    frontier: TaskNetwork
    partial_plan: Tuple[AppliedStep, ...] = ()
    agenda: Agenda = field(default_factory=Agenda)
    reduced_methods: Tuple[ReducedMethodRecord, ...] = ()
    depth: int = 0
    parent: Optional["SearchNode"] = field(default=None, compare=False, repr=False)

    def steps(self) -> Tuple[Task, ...]:
        return tuple(s.task for s in self.partial_plan)

    def child(self, **changes) -> "SearchNode":
        fields = dict(state=self.state, frontier=self.frontier, partial_plan=self.partial_plan,
                      agenda=self.agenda, reduced_methods=self.reduced_methods)
        fields.update(changes)
        return SearchNode(depth=self.depth + 1, parent=self, **fields)


class Candidate(NamedTuple):
    """A frontier task that may be worked on next, with its position in the frontier."""

    path: Tuple[int, ...]
    task: Task


# ---------------------------------------------------------------------------
# frontier manipulation

def normalize(net: TaskNetwork) -> TaskNetwork:
    """Drop empty unordered members and splice groups left with a single member."""
    nodes: list = []
    for node in net.nodes:
        if isinstance(node, Task):
            nodes.append(node)
            continue
        members = [m for m in (normalize(m) for m in node.members) if m.nodes]
        if len(members) == 1:
            nodes.extend(members[0].nodes)
        elif members:
            nodes.append(Unordered(tuple(members)))
    return TaskNetwork(tuple(nodes))


def frontier_candidates(net: TaskNetwork) -> List[Candidate]:
    if not net.nodes:
        return []
    head = net.nodes[0]
    if isinstance(head, Task):
        return [Candidate((0,), head)]
    out = []
    for i, member in enumerate(head.members):
        for c in frontier_candidates(member):
            out.append(Candidate((0, i) + c.path, c.task))
    return out


def replace_task(net: TaskNetwork, path: Sequence[int], replacement: Sequence) -> TaskNetwork:
    """Put ``replacement`` nodes where the candidate at ``path`` sits.

    ``path`` always addresses the head of some sequence, so the replacement
    takes over the task's precedence position in that sequence.
    """
    rest = net.nodes[1:]
    if len(path) == 1:
        return TaskNetwork(tuple(replacement) + rest)
    group = net.nodes[0]
    i = path[1]
    member = replace_task(group.members[i], path[2:], replacement)
    members = [m for m in group.members[:i] + (member,) + group.members[i + 1:] if m.nodes]
    if not members:
        return TaskNetwork(rest)
    if len(members) == 1:
        return TaskNetwork(members[0].nodes + rest)
    return TaskNetwork((Unordered(tuple(members)),) + rest)


def _locate(node: SearchNode, task: Union[Task, Candidate]) -> Candidate:
    if isinstance(task, Candidate):
        return task
    for cand in frontier_candidates(node.frontier):
        if cand.task == task:
            return cand
    raise ValueError(f"{task} is not a candidate of the frontier")


# ---------------------------------------------------------------------------
# expansion steps

def choose_candidates(node: SearchNode, domain: Optional[Domain] = None,
                      mode: Union[Mode, str] = Mode.BASELINE) -> List[Candidate]:
    """Tasks eligible to be worked on next; in enhanced mode matchable ones are left out."""
    cands = frontier_candidates(node.frontier)
    if Mode(mode) is Mode.ENHANCED:
        cands, _ = interleave_filter(cands, node, domain)
    return cands


def apply_operator(node: SearchNode, task: Union[Task, Candidate], op: Operator,
                   s: Optional[Substitution] = None, enhanced: bool = False) -> SearchNode:
    cand = _locate(node, task)
    s0 = unify(op.head, cand.task, s)
    if s0 is None:
        raise InapplicableOperator(cand.task, "does not match the operator head")
    binding = next(satisfy(op.preconditions, node.state, s0), None)
    if binding is None:
        raise InapplicableOperator(cand.task, "preconditions do not hold")
    instance = apply_substitution(cand.task, binding)
    if not instance.is_ground():
        raise PlanningError(f"primitive task {instance} is not ground when applied")
    dels = frozenset(apply_substitution(a, binding) for a in op.delete_effects)
    adds = frozenset(apply_substitution(a, binding) for a in op.add_effects)
    step = AppliedStep(len(node.partial_plan), instance, adds, dels)
    # stable order for the state index
    state = node.state.apply(dels, [apply_substitution(a, binding) for a in op.add_effects])
    agenda = update_agenda_on_apply(node.agenda, step) if enhanced else node.agenda
    return node.child(state=state,
                      frontier=replace_task(node.frontier, cand.path, ()),
                      partial_plan=node.partial_plan + (step,),
                      agenda=agenda)


def reduce_method(node: SearchNode, task: Union[Task, Candidate], method: Method,
                  branch_index: int, s: Substitution, enhanced: bool = False) -> SearchNode:
    cand = _locate(node, task)
    branch = method.branches[branch_index]
    subtasks = normalize(apply_substitution(branch.subtasks, s))
    reduced = node.reduced_methods
    if enhanced:
        reduced = reduced + (ReducedMethodRecord(method.name, cand.task, branch_index,
                                                 subtasks, len(node.partial_plan)),)
    return node.child(frontier=replace_task(node.frontier, cand.path, subtasks.nodes),
                      reduced_methods=reduced)


def method_bindings(method: Method, task: Task, state: State) -> Iterator[Tuple[int, Substitution]]:
    """Bindings of the first branch of ``method`` whose preconditions hold."""
    s0 = unify(method.head, task)
    if s0 is None:
        return
    for i, branch in enumerate(method.branches):
        it = satisfy(branch.preconditions, state, s0)
        first = next(it, None)
        if first is None:
            continue
        yield i, first
        for s in it:
            yield i, s
        return


def prune_matchable(node: SearchNode, domain: Optional[Domain] = None) -> Tuple[SearchNode, int]:
    """Drop matchable candidates from the frontier until none is left."""
    frontier = node.frontier
    dropped = 0
    probe = node
    while True:
        _, pruned = interleave_filter(frontier_candidates(frontier), probe, domain)
        if not pruned:
            break
        (cand, idx), *_ = pruned
        log.debug("pruning %s, matched step %d", cand.task, idx)
        frontier = replace_task(frontier, cand.path, ())
        dropped += 1
        probe = SearchNode(node.state, frontier, node.partial_plan, node.agenda, node.reduced_methods)
    return node.child(frontier=frontier), dropped


def backtrack(node: SearchNode) -> SearchNode:
    if node.parent is None:
        raise SearchExhausted("no choice point left")
    return node.parent


# ---------------------------------------------------------------------------
# search

def initial_node(problem: Problem) -> SearchNode:
    return SearchNode(State(problem.initial_state), normalize(problem.network))


def expand(node: SearchNode, domain: Domain, options: PlannerOptions,
           stats: Optional[SearchStats] = None) -> Iterator[SearchNode]:
    """Lazily generate the children of ``node`` in the planner's choice order."""
    enhanced = options.enhanced
    cands = frontier_candidates(node.frontier)
    if enhanced:
        _, pruned = interleave_filter(cands, node, domain)
        if pruned:
            child, n = prune_matchable(node, domain)
            if stats is not None:
                stats.tasks_pruned += n
            yield child
            if not options.explore_both_on_match:
                return
    for cand in cands:
        task = cand.task
        if task.primitive:
            op = domain.operators.get(task.symbol)
            if op is None:
                raise PlanningError(f"unknown task symbol: {task}")
            try:
                yield apply_operator(node, cand, op, enhanced=enhanced)
            except InapplicableOperator:
                continue
            continue
        methods = domain.methods.get(task.symbol)
        if methods is None:
            raise PlanningError(f"unknown task symbol: {task}")
        produced = False
        for m in methods:
            for i, s in method_bindings(m, task, node.state):
                produced = True
                yield reduce_method(node, cand, m, i, s, enhanced=enhanced)
        if enhanced and not produced:
            depth = len(node.partial_plan)
            for rec in reducible_records(task, node.reduced_methods, depth):
                if recursive_subtask_check(rec, node, domain):
                    log.debug("%s already accomplished by earlier reduction", task)
                    if stats is not None:
                        stats.reductions_pruned += 1
                    yield node.child(frontier=replace_task(node.frontier, cand.path, ()))
                    break


class PlanSearch:
    """Iterable over the plans of one search; ``stats`` is updated as it runs."""

    def __init__(self, problem: Problem, domain: Domain, options: PlannerOptions,
                 trace: Optional[Callable[[SearchNode], None]] = None):
        if problem.domain_name != domain.name:
            raise PlanningError(f"problem {problem.name} is for domain {problem.domain_name}, "
                                f"not {domain.name}")
        self.problem = problem
        self.domain = domain
        self.options = options
        self.trace = trace
        self.stats = SearchStats()
        self.exhausted = False

    def __iter__(self) -> Iterator[Plan]:
        return self._run()

    def _run(self):
        opts, stats = self.options, self.stats
        counting = opts.collect_stats
        seen = SeenPlans() if opts.dedup else None
        max_depth = opts.max_depth
        deadline = None if opts.time_limit is None else time.perf_counter() + opts.time_limit
        emitted = popped = 0
        started = time.perf_counter()
        stack: List[Iterator[SearchNode]] = [iter([initial_node(self.problem)])]
        try:
            while stack:
                node = next(stack[-1], None)
                if node is None:
                    stack.pop()
                    if counting:
                        stats.backtracks += 1
                    continue
                popped += 1
                if counting:
                    stats.nodes_expanded += 1
                if deadline is not None and popped % 256 == 0 and time.perf_counter() > deadline:
                    raise SearchTimeout(f"time limit of {opts.time_limit}s exceeded")
                if self.trace is not None:
                    self.trace(node)
                if not node.frontier.nodes:
                    steps = node.steps()
                    if seen is not None and suppress_duplicate(steps, seen):
                        stats.duplicate_plans_suppressed += 1
                        continue
                    emitted += 1
                    stats.plans_emitted = emitted
                    stats.wall_time += time.perf_counter() - started
                    started = None
                    yield Plan(steps)
                    started = time.perf_counter()
                    if opts.max_plans is not None and emitted >= opts.max_plans:
                        return
                    continue
                if max_depth is not None and node.depth >= max_depth:
                    continue
                stack.append(expand(node, self.domain, opts, stats if counting else None))
            self.exhausted = True
        finally:
            if started is not None:
                stats.wall_time += time.perf_counter() - started


def plan(problem: Problem, domain: Domain, options: Optional[PlannerOptions] = None,
         trace: Optional[Callable[[SearchNode], None]] = None) -> PlanSearch:
    """Search for plans of ``problem``.

    Returns a lazy ``PlanSearch``; iterate it to get plans, read ``.stats``
    afterwards. ``trace`` is called with every node taken off the stack.
    """
    return PlanSearch(problem, domain, options or PlannerOptions(), trace)


def find_plans(problem: Problem, domain: Domain, options: Optional[PlannerOptions] = None,
               **kwargs) -> Tuple[List[Plan], SearchStats]:
    """Convenience wrapper: run the search to completion and return plans and stats."""
    if options is None:
        options = PlannerOptions(**kwargs)
    elif kwargs:
        raise TypeError("pass either options or keyword options, not both")
    search = plan(problem, domain, options)
    plans = list(search)
    return plans, search.stats
