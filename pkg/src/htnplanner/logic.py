"""Unification and precondition satisfaction against a state."""

from __future__ import annotations

from typing import Iterator, Optional, Sequence, Union

from .model import Atom, Literal, State, Substitution, Task, Var, apply_substitution, walk


class UnboundNegation(Exception):
    """A negated literal still had variables once all positive literals were matched."""

    def __init__(self, literal: Literal):
        super().__init__(f"unbound negation: {literal}")
        self.literal = literal


def unify(a: Union[Atom, Task], b: Union[Atom, Task], s: Optional[Substitution] = None) -> Optional[Substitution]:
    """Most general unifier of ``a`` and ``b`` extending ``s``, or None.

    Terms are flat (no function symbols) so no occurs check is needed.
    The input substitution is never mutated.
    """
    s = {} if s is None else s
    if type(a) is not type(b):
        return None
    if isinstance(a, Atom):
        if a.predicate != b.predicate:
            return None
    elif a.symbol != b.symbol or a.primitive != b.primitive:
        return None
    if len(a.args) != len(b.args):
        return None
    out = s
    copied = False
    for x, y in zip(a.args, b.args):
        x = walk(x, out) if type(x) is Var else x
        y = walk(y, out) if type(y) is Var else y
        if x == y:
            continue
        if not copied:
            out = dict(out)
            copied = True
        if type(x) is Var:
            out[x] = y
        elif type(y) is Var:
            out[y] = x
        else:
            return None
    return out


def satisfy(preconditions: Sequence[Literal], state: State,
            s: Optional[Substitution] = None) -> Iterator[Substitution]:
    """Lazily enumerate every extension of ``s`` satisfying the conjunction.

    Positive literals are matched first, in the order given, against the
    state's per-predicate buckets (insertion order). Negated literals are
    then checked by negation as failure and must be ground by that point.
    """
    s = {} if s is None else s
    positives = [l.atom for l in preconditions if not l.negated]
    negatives = [l for l in preconditions if l.negated]
    return _solve(positives, negatives, 0, state, s)


def _solve(positives, negatives, i, state, s):
    if i == len(positives):
        for lit in negatives:
            atom = apply_substitution(lit.atom, s)
            if not atom.is_ground():
                raise UnboundNegation(lit)
            if atom in state:
                return
        yield s
        return
    atom = apply_substitution(positives[i], s)
    if atom.is_ground():
        if atom in state:
            yield from _solve(positives, negatives, i + 1, state, s)
        return
    for fact in state.with_predicate(atom.predicate):
        s2 = unify(atom, fact, s)
        if s2 is not None:
            yield from _solve(positives, negatives, i + 1, state, s2)


def holds(preconditions: Sequence[Literal], state: State, s: Optional[Substitution] = None) -> bool:
    return next(satisfy(preconditions, state, s), None) is not None

