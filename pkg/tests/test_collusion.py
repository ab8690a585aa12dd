import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tests.conftest import ACYCLIC_AFTER, ACYCLIC_BEFORE, CYCLE_AFTER
from tests.strategies import matrices
from utils.collusion import Coalition, CollusionPlanner, PreferenceEdge
from utils.errors import InvalidArgumentError, PreconditionError
from utils.mechanics import ElectionCalculator
from utils.models import StrategyProfile

CANCEL_COLUMN = [7, -9, 5, -1, 1]


def column_profile(column):
    return StrategyProfile.from_rows([[vote] for vote in column])


def test_cancellation_trace():
    profile = column_profile(CANCEL_COLUMN)
    trace = CollusionPlanner.cancel_opposing_trace(profile, Coalition.of(range(5)), 0)
    assert trace.result == (0, 0, 2, 0, 1)
    assert trace.d_sequence == (10, 3, 3, 0, 0)
    assert trace.columns[:4] == (
        (0, -9, 5, -1, 1),
        (0, 0, 5, -1, 1),
        (0, 0, 2, -1, 1),
        (0, 0, 2, 0, 1),
    )
    assert not trace.mirrored


def test_cancellation_mirrors_negative_majority():
    profile = column_profile([-vote for vote in CANCEL_COLUMN])
    after = CollusionPlanner.cancel_opposing(profile, Coalition.of(range(5)), 0)
    assert after.column(0) == (0, 0, -2, 0, -1)


def test_cancellation_leaves_outsiders_and_other_outcomes():
    profile = StrategyProfile.from_rows([[7, 1], [-9, 2], [5, 3], [4, 4]])
    after = CollusionPlanner.cancel_opposing(profile, Coalition.of([0, 1, 2]), 0)
    assert after.column(1) == (1, 2, 3, 4)
    assert after.row(3) == (4, 4)
    assert sum(after.column(0)[:3]) == sum(profile.column(0)[:3])
    check = CollusionPlanner.verify_collusion(profile, after, Coalition.of([0, 1, 2]))
    assert check.beneficial


def test_cancellation_needs_both_directions():
    with pytest.raises(PreconditionError):
        CollusionPlanner.cancel_opposing(column_profile([3, 1, 2]), Coalition.of(range(3)), 0)


def test_empty_coalition():
    with pytest.raises(InvalidArgumentError):
        Coalition.of([])


def test_preference_graph_edges():
    graph = CollusionPlanner.build_preference_graph(StrategyProfile.from_rows([[1, 0, 3]]))
    edges = {(edge.tail, edge.head): edge for edge in graph.edges}
    assert set(edges) == {(1, 0), (1, 2), (0, 2)}
    assert edges[(0, 2)].strict
    assert not edges[(1, 0)].strict


def test_cycle_collusion(cycle_profile):
    graph = CollusionPlanner.build_preference_graph(cycle_profile)
    cycle = CollusionPlanner.find_beneficial_cycle(graph)
    assert [(edge.tail, edge.head, edge.agent) for edge in cycle] == [(0, 2, 0), (2, 1, 2), (1, 0, 1)]
    assert any(edge.strict for edge in cycle)

    after = CollusionPlanner.apply_cycle_transfers(cycle_profile, cycle)
    assert after.to_lists() == CYCLE_AFTER
    check = CollusionPlanner.verify_collusion(cycle_profile, after, Coalition.of(edge.agent for edge in cycle))
    assert check.payments_before == (10, 10, 40)
    assert check.payments_after == (8, 8, 34)
    assert check.beneficial


def test_acyclic_collusion():
    before = StrategyProfile.from_rows(ACYCLIC_BEFORE)
    after = StrategyProfile.from_rows(ACYCLIC_AFTER)
    graph = CollusionPlanner.build_preference_graph(before)
    assert not graph.has_cycle()
    assert CollusionPlanner.find_beneficial_cycle(graph) is None
    check = CollusionPlanner.verify_collusion(before, after, Coalition.of([0, 1]))
    assert (check.payments_before, check.payments_after) == ((77, 102), (74, 89))
    assert check.beneficial


def test_verify_rejects_outsider_changes():
    before = StrategyProfile.from_rows([[1, 0], [0, 1]])
    after = StrategyProfile.from_rows([[1, 0], [1, 0]])
    with pytest.raises(PreconditionError):
        CollusionPlanner.verify_collusion(before, after, Coalition.of([0]))


def test_verify_flags_budget_and_sums():
    before = StrategyProfile.from_rows([[3, 0], [0, 3]])
    after = StrategyProfile.from_rows([[2, 0], [0, 3]])
    check = CollusionPlanner.verify_collusion(before, after, Coalition.of([0, 1]))
    assert not check.sums_preserved
    assert not check.beneficial
    swapped = StrategyProfile.from_rows([[0, 3], [3, 0]])
    assert not CollusionPlanner.verify_collusion(before, swapped, Coalition.of([0, 1]), budget=4).within_budget


def test_transfer_rejects_unknown_outcome():
    with pytest.raises(PreconditionError):
        CollusionPlanner.apply_cycle_transfers(
            StrategyProfile.from_rows([[1, 2]]), [PreferenceEdge(tail=0, head=5, agent=0, gap=2)])


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=8).filter(
    lambda column: any(vote > 0 for vote in column) and any(vote < 0 for vote in column)))
def test_cancellation_preserves_sum_and_shrinks_votes(column):
    profile = column_profile(column)
    trace = CollusionPlanner.cancel_opposing_trace(profile, Coalition.of(range(len(column))), 0)
    assert sum(trace.result) == sum(column)
    assert all(abs(new) <= abs(old) for old, new in zip(column, trace.result))
    assert all(d >= 0 for d in trace.d_sequence)


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(st.tuples(st.integers(2, 4), st.integers(2, 4)).flatmap(lambda shape: matrices(*shape, 0, 6)))
def test_cycle_transfers_preserve_totals(rows):
    profile = StrategyProfile.from_rows(rows)
    cycle = CollusionPlanner.find_beneficial_cycle(CollusionPlanner.build_preference_graph(profile))
    if cycle is None:
        return
    after = CollusionPlanner.apply_cycle_transfers(profile, cycle)
    assert ElectionCalculator.tally(after).totals == ElectionCalculator.tally(profile).totals
    assert cycle[0].head == cycle[1].tail and cycle[-1].head == cycle[0].tail


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(st.tuples(st.integers(2, 4), st.integers(2, 4)).flatmap(lambda shape: matrices(*shape, -6, 6)))
def test_cycle_transfers_are_beneficial_collusion(rows):
    profile = StrategyProfile.from_rows(rows)
    cycle = CollusionPlanner.find_beneficial_cycle(CollusionPlanner.build_preference_graph(profile))
    if cycle is None:
        return
    assert len({edge.tail for edge in cycle}) == len(cycle)
    after = CollusionPlanner.apply_cycle_transfers(profile, cycle)
    check = CollusionPlanner.verify_collusion(profile, after, Coalition.of(edge.agent for edge in cycle))
    assert check.beneficial


@settings(max_examples=500, deadline=None, derandomize=True)
@given(st.tuples(st.integers(2, 4), st.integers(2, 4)).flatmap(lambda shape: matrices(*shape, 0, 6)), st.data())
def test_verify_collusion_ignores_member_labels(rows, data):
    profile = StrategyProfile.from_rows(rows)
    cycle = CollusionPlanner.find_beneficial_cycle(CollusionPlanner.build_preference_graph(profile))
    if cycle is None:
        return
    after = CollusionPlanner.apply_cycle_transfers(profile, cycle)
    coalition = Coalition.of(edge.agent for edge in cycle)
    order = data.draw(st.permutations(range(profile.n_agents)))

    def relabel(matrix):
        return StrategyProfile.from_rows([matrix.values[agent] for agent in order])

    check = CollusionPlanner.verify_collusion(profile, after, coalition)
    relabelled = CollusionPlanner.verify_collusion(
        relabel(profile), relabel(after), Coalition.of(order.index(member) for member in coalition.members))
    assert relabelled.beneficial == check.beneficial
    assert sorted(relabelled.payments_before) == sorted(check.payments_before)
    assert sorted(relabelled.payments_after) == sorted(check.payments_after)


def test_cycle_search_scales_with_outcomes():
    rng = np.random.default_rng(7)
    profile = StrategyProfile.from_rows([rng.permutation(40).tolist() for _ in range(3)])
    graph = CollusionPlanner.build_preference_graph(profile)
    start = time.perf_counter()
    cycle = CollusionPlanner.find_beneficial_cycle(graph)
    assert time.perf_counter() - start < 2
    assert cycle is not None
    assert len({edge.tail for edge in cycle}) == len(cycle)
    after = CollusionPlanner.apply_cycle_transfers(profile, cycle)
    assert CollusionPlanner.verify_collusion(profile, after, Coalition.of(edge.agent for edge in cycle)).beneficial
