import pytest

from tests.conftest import make_election
from utils.errors import InvalidArgumentError, OracleLimitError
from utils.models import StrategyProfile
from utils.oracle import BruteForceOracle, OracleBound


def test_bound_must_be_positive():
    with pytest.raises(InvalidArgumentError):
        OracleBound(0)


def test_sufficient_bound(betrayal_case):
    _, profile = betrayal_case
    assert BruteForceOracle.sufficient_bound(profile, 0).max_abs_vote == 111
    assert BruteForceOracle.sufficient_bound(profile, 1).max_abs_vote == 1


def test_budget_ballots_enumerates_the_ball():
    election = make_election([[0, 0], [0, 0]], budget=1)
    ballots = list(BruteForceOracle.ballots(election))
    assert ballots == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]
    assert BruteForceOracle.search_space_size(election, OracleBound()) == 5


def test_no_budget_search_needs_bound(betrayal_case):
    election, _ = betrayal_case
    with pytest.raises(InvalidArgumentError):
        list(BruteForceOracle.ballots(election))


def test_ceiling(betrayal_case):
    election, profile = betrayal_case
    with pytest.raises(OracleLimitError) as info:
        BruteForceOracle.oracle_deviate(election, profile, 0, OracleBound(1000))
    assert info.value.size == 2001 ** 3


def test_betrayal_best_ballot(betrayal_case):
    election, profile = betrayal_case
    deviation = BruteForceOracle.oracle_deviate(election, profile, 0, OracleBound(5))
    assert deviation.strategy == (-2, 2, 0)
    assert deviation.utility == 892


def test_abstaining_agent(abstain_case):
    election, profile = abstain_case
    assert BruteForceOracle.oracle_deviate(election, profile, 0, OracleBound(12)) is None


def test_oracle_nash_witness(abstain_case):
    election, profile = abstain_case
    report = BruteForceOracle.oracle_verify_nash(election, profile, OracleBound(12))
    assert not report.is_equilibrium
    agent, strategy, gain = report.witness
    assert agent == 1
    assert gain == 49


def test_zero_budget_is_equilibrium():
    election = make_election([[3, 1, 0], [0, 2, 5]], budget=0)
    report = BruteForceOracle.oracle_verify_nash(election, StrategyProfile.zeros(2, 3))
    assert report.is_equilibrium
    assert report.witness is None
