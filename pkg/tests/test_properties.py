"""Randomized properties on generated mini-domains (seeds drawn by hypothesis)."""

from hypothesis import given, settings, strategies as st

from htnplanner.parser import parse_domain, parse_problem, print_domain, print_problem
from htnplanner.interaction import interleave_filter
from htnplanner.planner import PlannerOptions, find_plans, frontier_candidates, plan, prune_matchable

from checks import (
    check_agenda_within_state, check_backtrack_restores, check_oracle_agreement,
    check_soundness, instance,
)
from gen import generate

seeds = st.integers(min_value=1000, max_value=10**6)
fast = settings(max_examples=40, deadline=None)


@fast
@given(seeds)
def test_soundness(seed):
    check_soundness(seed)


@fast
@given(seeds)
def test_agenda_within_state(seed):
    check_agenda_within_state(seed)


@fast
@given(seeds)
def test_backtrack_restores(seed):
    check_backtrack_restores(seed, max_nodes=100)


@fast
@given(seeds)
def test_baseline_matches_oracle(seed):
    check_oracle_agreement(seed, depth=7)


@fast
@given(seeds)
def test_generated_round_trip(seed):
    g = generate(seed)
    d, p = parse_domain(g.domain_text), parse_problem(g.problem_text)
    assert parse_domain(print_domain(d)) == d
    assert parse_problem(print_problem(p)) == p


@fast
@given(seeds)
def test_conservative_when_nothing_is_reused(seed):
    domain, problem = instance(seed)
    opts = dict(max_plans=None, max_depth=10, suppress_duplicates=False)
    base, bstats = find_plans(problem, domain, PlannerOptions(mode="baseline", **opts))
    enh, estats = find_plans(problem, domain, PlannerOptions(mode="enhanced", **opts))
    if estats.tasks_pruned == 0 and estats.reductions_pruned == 0:
        assert enh == base
        assert estats.nodes_expanded == bstats.nodes_expanded


@fast
@given(seeds)
def test_pruned_tasks_effects_hold(seed):
    # at every prune point the matched step's added atoms are in the state
    domain, problem = instance(seed)
    nodes = []
    list(plan(problem, domain, PlannerOptions(mode="enhanced", max_plans=None, max_depth=10),
              trace=nodes.append))
    for node in nodes:
        _, pruned = interleave_filter(frontier_candidates(node.frontier), node, domain)
        for _, idx in pruned:
            assert node.partial_plan[idx].add_effects <= node.state.atoms
        if pruned:
            child, n = prune_matchable(node, domain)
            assert n >= len(pruned) and child.state == node.state
