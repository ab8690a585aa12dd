"""
Exhaustive best-response search for small elections.

Slow on purpose: every ballot in the bound is scored with
`ElectionCalculator.total_utility`, so the polynomial solvers can be checked
against it.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator

from utils.errors import InvalidArgumentError, OracleLimitError
from utils.mechanics import ElectionCalculator
from utils.models import Deviation, Election, FixedBudget, NashReport, StrategyProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleBound:
    """Largest |vote| tried per outcome. Fixed-budget searches take their bound from the budget."""

    max_abs_vote: int = 4

    def __post_init__(self):
        if self.max_abs_vote < 1:
            raise InvalidArgumentError(f"max_abs_vote must be positive, got {self.max_abs_vote}")


class BruteForceOracle:

    BALLOT_CEILING = 10 ** 7

    @staticmethod
    def sufficient_bound(profile: StrategyProfile, agent: int) -> OracleBound:
        """
        A no-budget bound that contains every best response: the optimal level
        lies between min s - 1 and max s of the other agents' totals.
        """
        residuals = ElectionCalculator.residuals(profile, agent)
        return OracleBound(max(1, max(residuals) - min(residuals) + 1))

    @classmethod
    def search_space_size(cls, election: Election, bound: OracleBound) -> int:
        if isinstance(election.config, FixedBudget):
            return sum(1 for _ in cls._budget_ballots(election.n_outcomes, election.config.budget))
        return (2 * bound.max_abs_vote + 1) ** election.n_outcomes

    @staticmethod
    def _budget_ballots(n_outcomes: int, budget: int) -> Iterator[tuple[int, ...]]:
        """Ballots with sum of squares at most `budget`, in lexicographic order."""
        if n_outcomes == 0:
            yield ()
            return
        reach = math.isqrt(budget)
        for vote in range(-reach, reach + 1):
            for rest in BruteForceOracle._budget_ballots(n_outcomes - 1, budget - vote * vote):
                yield (vote, *rest)

    @classmethod
    def ballots(cls, election: Election, bound: OracleBound | None = None) -> Iterator[tuple[int, ...]]:
        """Every ballot the oracle scores, in lexicographic order."""
        if bound is None and not isinstance(election.config, FixedBudget):
            raise InvalidArgumentError("a no-budget search needs an OracleBound")
        size = cls.search_space_size(election, bound)
        if size > cls.BALLOT_CEILING:
            raise OracleLimitError(size, cls.BALLOT_CEILING)
        logger.debug("oracle: %s ballots to score", size)
        if isinstance(election.config, FixedBudget):
            return cls._budget_ballots(election.n_outcomes, election.config.budget)
        votes = range(-bound.max_abs_vote, bound.max_abs_vote + 1)
        return itertools.product(votes, repeat=election.n_outcomes)

    @classmethod
    def oracle_deviate(
        cls,
        election: Election,
        profile: StrategyProfile,
        agent: int,
        bound: OracleBound | None = None,
    ) -> Deviation | None:
        current = ElectionCalculator.total_utility(election, profile, agent)
        best = None
        for ballot in cls.ballots(election, bound):
            utility = ElectionCalculator.total_utility(election, profile.replace_row(agent, ballot), agent)
            if utility > current and (best is None or utility > best.utility):
                best = Deviation(strategy=ballot, utility=utility)
        if best is not None:
            logger.info("oracle: agent %s improves to %s with %s", agent, best.utility, best.strategy)
        return best

    @classmethod
    def oracle_verify_nash(
        cls,
        election: Election,
        profile: StrategyProfile,
        bound: OracleBound | None = None,
    ) -> NashReport:
        for agent in range(election.n_agents):
            deviation = cls.oracle_deviate(election, profile, agent, bound)
            if deviation is not None:
                gain = deviation.utility - ElectionCalculator.total_utility(election, profile, agent)
                return NashReport(is_equilibrium=False, witness=(agent, deviation.strategy, gain))
        return NashReport(is_equilibrium=True)
