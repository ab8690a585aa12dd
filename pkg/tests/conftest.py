from fractions import Fraction
from pathlib import Path

import pytest

from utils.models import Election, FixedBudget, NoBudget, StrategyProfile, UtilityMatrix

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

SAMPLE_VOTES = [[6, -3, 1], [-4, 5, -10], [1, 1, 7]]
BETRAYAL_UTILITIES = [0, 900, 910]
BETRAYAL_OTHER_VOTES = [10, 7, -100]

# other agents' votes summing to (10, 7, -100) with every ballot within 16 credits
BUDGETED_OTHER_VOTES = (
    [[0, 0, -4]] * 25 + [[4, 0, 0], [4, 0, 0], [2, 0, 0], [0, 4, 0], [0, 3, 0]]
)

CYCLE_BEFORE = [[1, 0, 3], [3, 1, 0], [0, 6, 2]]
CYCLE_AFTER = [[2, 0, 2], [2, 2, 0], [0, 5, 3]]

ACYCLIC_BEFORE = [[6, 5, -4], [10, 1, -1]]
ACYCLIC_AFTER = [[7, 4, -3], [9, 2, -2]]


def make_election(utilities, alpha=None, budget=None) -> Election:
    config = FixedBudget(budget) if budget is not None else NoBudget(Fraction(alpha if alpha is not None else 1))
    return Election(config=config, utilities=UtilityMatrix.from_rows(utilities))


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def sample_profile() -> StrategyProfile:
    return StrategyProfile.from_rows(SAMPLE_VOTES)


@pytest.fixture
def sample_election() -> Election:
    return make_election([[10, 0, 0], [0, 12, -20], [2, 2, 14]], alpha=1)


@pytest.fixture
def abstain_case() -> tuple[Election, StrategyProfile]:
    """Agent 0 is almost indifferent, agent 1 cares a lot about outcome 1."""
    election = make_election([[40, 30], [0, 400]], alpha=1)
    return election, StrategyProfile.from_rows([[0, 0], [-5, 5]])


@pytest.fixture
def betrayal_case() -> tuple[Election, StrategyProfile]:
    election = make_election([BETRAYAL_UTILITIES, [0, 0, 0]], alpha=1)
    return election, StrategyProfile.from_rows([[0, 0, 0], BETRAYAL_OTHER_VOTES])


@pytest.fixture
def budgeted_betrayal_case() -> tuple[Election, StrategyProfile]:
    utilities = [BETRAYAL_UTILITIES] + [[0, 0, 0]] * len(BUDGETED_OTHER_VOTES)
    election = make_election(utilities, budget=16)
    return election, StrategyProfile.from_rows([[0, 0, 0]] + BUDGETED_OTHER_VOTES)


@pytest.fixture
def cycle_profile() -> StrategyProfile:
    return StrategyProfile.from_rows(CYCLE_BEFORE)
