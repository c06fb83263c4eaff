"""Task interaction: reusing effects already achieved by earlier plan steps.

A primitive task is *matchable* when an identical ground step is already in
the partial plan and every atom that step added is still on the agenda, i.e.
still holds and was asserted by a plan step. Matchable tasks are dropped from
the frontier instead of being applied a second time. A nonprimitive task
whose methods have no applicable branch may likewise be dropped when an
earlier reduction of the same task is *reducible* and all of its subtasks
are matchable now.

Because dropping tasks lets several interleavings collapse onto the same
step sequence, emitted plans are also deduplicated by fingerprint.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .logic import unify
from .model import Atom, Domain, Task, TaskNetwork

if TYPE_CHECKING:
    from .planner import SearchNode


@dataclass(frozen=True)
class AppliedStep:
    index: int
    task: Task
    add_effects: FrozenSet[Atom] = frozenset()
    delete_effects: FrozenSet[Atom] = frozenset()


@dataclass(frozen=True)
class ReducedMethodRecord:
    method_name: str
    ground_head: Task
    branch_index: int
    ground_subtasks: TaskNetwork
    state_index: int


class Agenda:
    """Atoms asserted by applied steps that still hold, mapped to those steps' indices.

    Instances are immutable; ``update_agenda_on_apply`` builds a new one.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Optional[Mapping[Atom, Iterable[int]]] = None):
        self._entries: Dict[Atom, FrozenSet[int]] = {
            a: frozenset(ix) for a, ix in (entries or {}).items()
        }

    def __contains__(self, atom):
        return atom in self._entries

    def __getitem__(self, atom) -> FrozenSet[int]:
        return self._entries[atom]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def __eq__(self, other):
        if not isinstance(other, Agenda):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self):
        return hash(frozenset(self._entries.items()))

    def __repr__(self):
        body = ", ".join(f"{a}: {sorted(ix)}" for a, ix in self._entries.items())
        return f"Agenda({{{body}}})"


def update_agenda_on_apply(agenda: Agenda, step: AppliedStep) -> Agenda:
    # deletes first, then adds: mirrors (state - del) | add
    if not step.add_effects and not step.delete_effects:
        return agenda
    entries = {a: ix for a, ix in agenda.items() if a not in step.delete_effects}
    for atom in step.add_effects:
        entries[atom] = entries.get(atom, frozenset()) | {step.index}
    new = Agenda.__new__(Agenda)
    new._entries = entries
    return new


def is_matchable(task: Task, plan: Sequence[AppliedStep], agenda: Agenda,
                 domain: Optional[Domain] = None) -> Optional[int]:
    """Index of the earliest applied step that ``task`` can reuse, or None."""
    if not task.primitive or not task.is_ground():
        return None
    if domain is not None and task.symbol not in domain.operators:
        return None
    for step in plan:
        if step.task == task and all(a in agenda for a in step.add_effects):
            return step.index
    return None


def interleave_filter(candidates: Sequence, node: "SearchNode",
                      domain: Optional[Domain] = None) -> Tuple[list, list]:
    """Split frontier candidates into those to expand and those to prune.

    ``candidates`` may hold tasks or objects with a ``task`` attribute; they
    are returned unchanged. ``pruned`` pairs each candidate with the index of
    the step it matched.
    """
    keep, pruned = [], []
    for cand in candidates:
        task = getattr(cand, "task", cand)
        idx = None
        if task.primitive:
            idx = is_matchable(task, node.partial_plan, node.agenda, domain)
        if idx is None:
            keep.append(cand)
        else:
            pruned.append((cand, idx))
    return keep, pruned


def reducible_records(task: Task, records: Sequence[ReducedMethodRecord],
                      depth: int) -> Iterator[ReducedMethodRecord]:
    for rec in records:
        if (rec.method_name == task.symbol and rec.state_index < depth
                and unify(rec.ground_head, task) is not None):
            yield rec


def is_reducible(task: Task, records: Sequence[ReducedMethodRecord],
                 depth: int) -> Optional[ReducedMethodRecord]:
    """First record reducing the same task at a strictly earlier state index."""
    return next(reducible_records(task, records, depth), None)


def recursive_subtask_check(record: ReducedMethodRecord, node: "SearchNode",
                            domain: Optional[Domain] = None,
                            limit: Optional[int] = None) -> bool:
    """True iff every subtask of ``record`` is already accomplished at ``node``.

    Primitive subtasks must be matchable; nonprimitive ones must themselves
    have a reducible record that passes this check. ``limit`` bounds the
    recursion (default: one more than the number of records, which is the
    longest chain of distinct records). Exceeding it yields False.
    """
    if limit is None:
        limit = len(node.reduced_methods) + 1
    if limit <= 0:
        return False
    depth = len(node.partial_plan)
    for task in record.ground_subtasks.tasks():
        if task.primitive:
            if is_matchable(task, node.partial_plan, node.agenda, domain) is None:
                return False
        elif not any(recursive_subtask_check(r, node, domain, limit - 1)
                     for r in reducible_records(task, node.reduced_methods, depth)):
            return False
    return True


def plan_fingerprint(steps: Iterable[Task]) -> str:
    text = "\n".join(map(str, steps))
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).hexdigest()


class SeenPlans:
    """Fingerprints of emitted plans; equal fingerprints are confirmed by full comparison."""

    def __init__(self, fingerprint: Callable[[Iterable[Task]], str] = plan_fingerprint):
        self._fingerprint = fingerprint
        self._buckets: Dict[str, List[Tuple[Task, ...]]] = {}

    def add(self, steps: Sequence[Task]) -> bool:
        """Record ``steps``; return False if an equal sequence was already there."""
        steps = tuple(steps)
        bucket = self._buckets.setdefault(self._fingerprint(steps), [])
        if steps in bucket:
            return False
        bucket.append(steps)
        return True

    def __contains__(self, steps):
        steps = tuple(steps)
        return steps in self._buckets.get(self._fingerprint(steps), ())

    def __len__(self):
        return sum(len(b) for b in self._buckets.values())


def suppress_duplicate(plan: Iterable[Task], seen: SeenPlans) -> bool:
    """True if ``plan`` was seen before; otherwise remember it and return False."""
    return not seen.add(tuple(plan))
