from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tests.conftest import SAMPLE_VOTES, make_election
from tests.strategies import profiles
from utils.errors import BudgetError, ConfigError, RefundUndefinedError, ShapeError
from utils.mechanics import ElectionCalculator
from utils.models import FixedBudget, NoBudget, StrategyProfile


def test_tally_sample_profile(sample_profile):
    tally = ElectionCalculator.tally(sample_profile)
    assert tally.totals == (3, 3, -2)
    assert tally.winners == frozenset({0, 1})
    assert tally.probabilities == (Fraction(1, 2), Fraction(1, 2), Fraction(0))
    assert tally.level == 3


def test_payments_sample_profile():
    assert [ElectionCalculator.payment(row, Fraction(1)) for row in SAMPLE_VOTES] == [46, 141, 51]
    assert ElectionCalculator.payment([-4, 5, -10], Fraction(1, 2)) == Fraction(141, 2)


def test_refunds_sample_profile(sample_profile):
    refunds = [ElectionCalculator.refund(sample_profile, agent) for agent in range(3)]
    assert refunds == [Fraction(96), Fraction(97, 2), Fraction(187, 2)]


def test_refund_needs_two_agents():
    with pytest.raises(RefundUndefinedError):
        ElectionCalculator.refund(StrategyProfile.from_rows([[1, 2]]), 0)


def test_total_utility_no_budget(sample_profile):
    election = make_election([[10, 0, 0], [0, 0, 0], [0, 0, 0]], alpha=1)
    assert ElectionCalculator.total_utility(election, sample_profile, 0) == -41
    with_refund = ElectionCalculator.total_utility(election, sample_profile, 0, include_refund=True)
    assert with_refund == -41 + 96


def test_total_utility_fixed_budget_drops_payment():
    election = make_election([[0, 900, 910], [0, 0, 0]], budget=200)
    profile = StrategyProfile.from_rows([[0, 4, 0], [10, 7, -5]])
    assert ElectionCalculator.total_utility(election, profile, 0) == 900


def test_total_utility_rejects_over_budget():
    election = make_election([[1, 0], [0, 1]], budget=4)
    profile = StrategyProfile.from_rows([[3, 0], [0, 0]])
    with pytest.raises(BudgetError) as info:
        ElectionCalculator.total_utility(election, profile, 1)
    assert info.value.agent == 0


def test_zero_budget_zero_profile():
    election = make_election([[3, 1], [0, 2]], budget=0)
    profile = election.zero_profile()
    assert ElectionCalculator.total_utility(election, profile, 0) == 2


def test_binary_motion():
    assert ElectionCalculator.decide_binary_motion([3, -3])
    assert not ElectionCalculator.decide_binary_motion([1, -2])
    utility = ElectionCalculator.binary_total_utility([10, -4], [2, -1], 0)
    assert utility == 10 - 4
    assert ElectionCalculator.binary_total_utility([10, -4], [2, -1], 1, include_refund=True) == -4 - 1 + 4


def test_residuals(sample_profile):
    assert ElectionCalculator.residuals(sample_profile, 0) == (-3, 6, -3)


def test_tally_keeps_large_totals_exact():
    tally = ElectionCalculator.tally(StrategyProfile.from_rows([[2 ** 62, 0], [2 ** 62, 0]]))
    assert tally.totals == (2 ** 63, 0)
    assert tally.winners == frozenset({0})

    profile = StrategyProfile.from_rows([[2 ** 62, 0], [2 ** 62, 0], [0, 2 ** 70]])
    assert ElectionCalculator.tally(profile).winners == frozenset({1})
    assert ElectionCalculator.residuals(profile, 2) == (2 ** 63, 0)


def test_invalid_configs():
    with pytest.raises(ConfigError):
        NoBudget(Fraction(0))
    with pytest.raises(ConfigError):
        NoBudget(0.5)
    with pytest.raises(ConfigError):
        FixedBudget(-1)


def test_ragged_profile():
    with pytest.raises(ShapeError):
        StrategyProfile.from_rows([[1, 2], [3]])
    with pytest.raises(ShapeError):
        StrategyProfile.from_rows([])


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(profiles(), st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(2)]))
def test_refunds_balance_payments(profile, alpha):
    payments = sum(ElectionCalculator.payment(row, alpha) for row in profile.values)
    refunds = sum(ElectionCalculator.refund(profile, agent, alpha) for agent in range(profile.n_agents))
    assert refunds == payments


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(profiles())
def test_probabilities_normalised(profile):
    tally = ElectionCalculator.tally(profile)
    assert sum(tally.probabilities) == 1
    assert all(tally.probability(outcome) > 0 for outcome in tally.winners)


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(profiles(), st.data())
def test_tally_is_linear(profile, data):
    other = data.draw(st.lists(
        st.lists(st.integers(-6, 6), min_size=profile.n_outcomes, max_size=profile.n_outcomes),
        min_size=profile.n_agents, max_size=profile.n_agents,
    ).map(StrategyProfile.from_rows))
    combined = StrategyProfile.from_rows([
        [a + b for a, b in zip(first, second)] for first, second in zip(profile.values, other.values)
    ])
    totals = ElectionCalculator.tally(combined).totals
    expected = [a + b for a, b in zip(ElectionCalculator.tally(profile).totals, ElectionCalculator.tally(other).totals)]
    assert list(totals) == expected


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(profiles(), st.data())
def test_tally_follows_relabelling(profile, data):
    tally = ElectionCalculator.tally(profile)
    outcomes = data.draw(st.permutations(range(profile.n_outcomes)))
    by_outcome = ElectionCalculator.tally(
        StrategyProfile.from_rows([[row[outcome] for outcome in outcomes] for row in profile.values]))
    assert by_outcome.totals == tuple(tally.totals[outcome] for outcome in outcomes)
    assert by_outcome.winners == frozenset(
        position for position, outcome in enumerate(outcomes) if outcome in tally.winners)

    agents = data.draw(st.permutations(range(profile.n_agents)))
    assert ElectionCalculator.tally(StrategyProfile.from_rows([profile.values[agent] for agent in agents])) == tally


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(
    st.lists(st.integers(-50, 50), min_size=1, max_size=6),
    st.fractions(min_value=Fraction(1, 100), max_value=100),
)
def test_doubling_alpha_doubles_payment(ballot, alpha):
    assert ElectionCalculator.payment(ballot, 2 * alpha) == 2 * ElectionCalculator.payment(ballot, alpha)
