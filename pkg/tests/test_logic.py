import itertools

import pytest
from hypothesis import given, strategies as st

from htnplanner.logic import UnboundNegation, holds, satisfy, unify
from htnplanner.model import Atom, Const, Literal, State, Task, Var, apply_substitution, term


def atom(pred, *names):
    return Atom(pred, [term(n) for n in names])


def pos(pred, *names):
    return Literal(atom(pred, *names))


def neg(pred, *names):
    return Literal(atom(pred, *names), negated=True)


def resolved(s):
    return {k.name: apply_substitution(k, s).name for k in s}


def test_unify_binds_variables():
    assert resolved(unify(atom("on", "?l", "?r"), atom("on", "l1", "office"), {})) == {
        "?l": "l1", "?r": "office"}


def test_unify_constant_clash_fails():
    assert unify(atom("on", "a", "b"), atom("on", "a", "c"), {}) is None


def test_unify_method_head_with_task_instance():
    head = Task("adjust-office", [Var(n) for n in ("?r", "?a", "?l", "?m")])
    inst = Task("adjust-office", [Const(n) for n in ("R", "a", "l", "m")])
    assert resolved(unify(head, inst)) == {"?r": "R", "?a": "a", "?l": "l", "?m": "m"}


@pytest.mark.parametrize("a, b", [
    (atom("on", "?x"), atom("off", "?x")),
    (atom("on", "?x"), atom("on", "?x", "?y")),
    (Task("go", (), True), Task("go", (), False)),
    (atom("go"), Task("go", ())),
])
def test_unify_shape_mismatch_fails(a, b):
    assert unify(a, b) is None


def test_unify_respects_existing_bindings():
    s = {Var("?x"): Const("a")}
    assert unify(atom("p", "?x"), atom("p", "b"), s) is None
    assert unify(atom("p", "?x"), atom("p", "a"), s) == s


def test_unify_repeated_variable():
    assert unify(atom("r", "?x", "?x"), atom("r", "a", "b")) is None
    assert resolved(unify(atom("r", "?x", "?x"), atom("r", "?y", "c"))) == {"?x": "c", "?y": "c"}


def test_unify_does_not_mutate_input():
    s = {Var("?z"): Const("q")}
    unify(atom("p", "?x"), atom("p", "a"), s)
    assert s == {Var("?z"): Const("q")}


def test_satisfy_empty_conjunction_yields_one_empty_binding():
    assert list(satisfy([], State([atom("p", "a")]), {})) == [{}]


def test_satisfy_enumerates_in_insertion_order():
    state = State([atom("on", "l1", "R"), atom("on", "l2", "R")])
    out = [resolved(s) for s in satisfy([pos("on", "?l", "R")], state)]
    assert out == [{"?l": "l1"}, {"?l": "l2"}]


def test_satisfy_negation_as_failure():
    assert list(satisfy([neg("on", "l", "R")], State(), {})) == [{}]
    assert list(satisfy([neg("on", "l", "R")], State([atom("on", "l", "R")]))) == []


def test_negated_literals_are_checked_after_positives():
    # written negation-first, but ?l is bound by the positive literal
    state = State([atom("light", "l1"), atom("light", "l2"), atom("on", "l1")])
    out = [resolved(s) for s in satisfy([neg("on", "?l"), pos("light", "?l")], state)]
    assert out == [{"?l": "l2"}]


def test_unbound_negation_is_diagnosed():
    with pytest.raises(UnboundNegation) as err:
        list(satisfy([neg("on", "?l")], State()))
    assert err.value.literal == neg("on", "?l")


def test_joins_share_bindings():
    state = State([atom("at", "t1", "a"), atom("at", "t2", "b"), atom("road", "a", "c"), atom("road", "b", "d")])
    out = [resolved(s) for s in satisfy([pos("at", "?t", "?x"), pos("road", "?x", "?y")], state)]
    assert out == [{"?t": "t1", "?x": "a", "?y": "c"}, {"?t": "t2", "?x": "b", "?y": "d"}]


def test_satisfy_extends_given_substitution():
    state = State([atom("on", "l1"), atom("on", "l2")])
    out = list(satisfy([pos("on", "?l")], state, {Var("?l"): Const("l2")}))
    assert len(out) == 1 and resolved(out[0]) == {"?l": "l2"}


def test_holds():
    assert holds([pos("p", "a")], State([atom("p", "a")]))
    assert not holds([pos("p", "b")], State([atom("p", "a")]))


# properties

consts = ["a", "b", "c"]
arg = st.sampled_from(consts + ["?x", "?y", "?z"])
atoms = st.builds(lambda p, args: atom(p, *args), st.sampled_from(["p", "r"]), st.lists(arg, min_size=2, max_size=2))
ground = st.builds(lambda p, args: atom(p, *args), st.sampled_from(["p", "r"]),
                   st.lists(st.sampled_from(consts), min_size=2, max_size=2))
states = st.lists(ground, max_size=8).map(State)


@given(atoms, atoms)
def test_unify_symmetric(a, b):
    assert (unify(a, b) is None) == (unify(b, a) is None)


@given(atoms, atoms)
def test_unifier_makes_both_sides_equal(a, b):
    s = unify(a, b)
    if s is not None:
        assert apply_substitution(a, s) == apply_substitution(b, s)


@given(atoms, states)
def test_single_literal_bindings_are_facts(a, state):
    out = list(satisfy([Literal(a)], state))
    assert len(out) <= len(state)
    for s in out:
        assert apply_substitution(a, s) in state


@given(st.lists(atoms, min_size=1, max_size=3), st.lists(ground, max_size=2), states)
def test_satisfy_is_sound_and_complete(positives, negated, state):
    pre = [Literal(a) for a in positives] + [Literal(a, True) for a in negated]
    got = {frozenset(resolved(s).items()) for s in satisfy(pre, state)}
    # reference: try every assignment of the query's variables to constants
    names = sorted({t.name for a in positives for t in a.args if isinstance(t, Var)})
    want = set()
    for values in itertools.product(consts, repeat=len(names)):
        s = {Var(n): Const(v) for n, v in zip(names, values)}
        if all(apply_substitution(a, s) in state for a in positives) and \
                all(a not in state for a in negated):
            want.add(frozenset(zip(names, values)))
    assert got == want
