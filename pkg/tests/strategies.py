from fractions import Fraction

from hypothesis import strategies as st

from tests.conftest import make_election
from utils.mechanics import ElectionCalculator
from utils.models import StrategyProfile


def fit(row, budget):
    """Shrink the largest votes until the ballot costs at most `budget`."""
    row = list(row)
    while ElectionCalculator.cost(row) > budget:
        index = max(range(len(row)), key=lambda outcome: abs(row[outcome]))
        row[index] -= 1 if row[index] > 0 else -1
    return row


def matrices(n_rows, n_columns, low, high):
    return st.lists(
        st.lists(st.integers(low, high), min_size=n_columns, max_size=n_columns),
        min_size=n_rows, max_size=n_rows,
    )


def profiles(max_agents=5, max_outcomes=4, low=-6, high=6):
    return st.tuples(st.integers(2, max_agents), st.integers(1, max_outcomes)).flatmap(
        lambda shape: matrices(*shape, low, high)
    ).map(StrategyProfile.from_rows)


@st.composite
def small_elections(draw):
    """At most three agents and outcomes, votes within [-2, 2]."""
    n_agents = draw(st.integers(2, 3))
    n_outcomes = draw(st.integers(1, 3))
    utilities = draw(matrices(n_agents, n_outcomes, -20, 20))
    votes = draw(matrices(n_agents, n_outcomes, -2, 2))
    alpha = draw(st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(2)]))
    agent = draw(st.integers(0, n_agents - 1))
    return make_election(utilities, alpha=alpha), StrategyProfile.from_rows(votes), agent


@st.composite
def budgeted_elections(draw):
    n_agents = draw(st.integers(2, 3))
    n_outcomes = draw(st.integers(1, 3))
    budget = draw(st.sampled_from([0, 1, 4, 9]))
    utilities = draw(matrices(n_agents, n_outcomes, -20, 20))
    votes = draw(matrices(n_agents, n_outcomes, -3, 3))
    profile = StrategyProfile.from_rows([fit(row, budget) for row in votes])
    agent = draw(st.integers(0, n_agents - 1))
    return make_election(utilities, budget=budget), profile, agent
