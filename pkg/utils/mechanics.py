import logging
from fractions import Fraction
from typing import Sequence

import numpy as np

from utils.errors import BudgetError, RefundUndefinedError, ShapeError
from utils.models import (
    Election,
    FixedBudget,
    NoBudget,
    StrategyProfile,
    TallyResult,
)

logger = logging.getLogger(__name__)


class ElectionCalculator:
    """
    Election mechanics for both QV variants: tally, winners, payments,
    refunds and each agent's total utility.

    Every quantity is exact. The uniform tie-break over the winner set is
    never sampled; utilities use its expectation 1/|W|.
    """

    @staticmethod
    def tally(profile: StrategyProfile) -> TallyResult:
        totals = tuple(int(total) for total in profile.as_array().sum(axis=0))
        top = max(totals)
        winners = frozenset(outcome for outcome, total in enumerate(totals) if total == top)
        share = Fraction(1, len(winners))
        probabilities = tuple(share if outcome in winners else Fraction(0) for outcome in range(len(totals)))
        return TallyResult(totals=totals, winners=winners, probabilities=probabilities)

    @staticmethod
    def cost(ballot: Sequence[int]) -> int:
        """Sum of squared votes: the credit price of a ballot."""
        return sum(int(vote) * int(vote) for vote in ballot)

    @staticmethod
    def payment(ballot: Sequence[int], alpha=Fraction(1)) -> Fraction:
        alpha = NoBudget(alpha).alpha
        return alpha * ElectionCalculator.cost(ballot)

    @staticmethod
    def refund(profile: StrategyProfile, agent: int, alpha=Fraction(1)) -> Fraction:
        profile.check_agent(agent)
        if profile.n_agents < 2:
            raise RefundUndefinedError()
        alpha = NoBudget(alpha).alpha
        others = sum(
            ElectionCalculator.cost(ballot)
            for other, ballot in enumerate(profile.values)
            if other != agent
        )
        return alpha * others / (profile.n_agents - 1)

    @staticmethod
    def expected_outcome(utility_row: Sequence[int], tally: TallyResult) -> Fraction:
        return sum(
            (Fraction(utility_row[outcome]) * tally.probabilities[outcome] for outcome in tally.winners),
            Fraction(0),
        )

    @staticmethod
    def total_utility(
        election: Election,
        profile: StrategyProfile,
        agent: int,
        include_refund: bool = False,
    ) -> Fraction:
        """
        Agent's total utility under the election's variant.

        No-budget: expected outcome utility minus payment, plus the refund
        when `include_refund` is set. Fixed-budget: expected outcome utility
        only; every ballot must fit the budget.
        """
        election.check_profile(profile)
        profile.check_agent(agent)
        config = election.config
        if isinstance(config, FixedBudget):
            ElectionCalculator.check_budget(profile, config.budget)

        tally = ElectionCalculator.tally(profile)
        utility = ElectionCalculator.expected_outcome(election.utilities.row(agent), tally)
        if isinstance(config, NoBudget):
            utility -= ElectionCalculator.payment(profile.row(agent), config.alpha)
            if include_refund:
                utility += ElectionCalculator.refund(profile, agent, config.alpha)
        return utility

    @staticmethod
    def decide_binary_motion(votes: Sequence[int]) -> bool:
        """A binary motion is adopted iff its total vote count is non-negative."""
        return sum(int(vote) for vote in votes) >= 0

    @staticmethod
    def binary_total_utility(
        utilities: Sequence[int],
        votes: Sequence[int],
        agent: int,
        alpha=Fraction(1),
        include_refund: bool = False,
    ) -> Fraction:
        """
        Total utility in binary no-budget QV: u_i * sgn(total votes) minus the
        agent's payment, plus the refund when asked for.
        """
        if len(utilities) != len(votes):
            raise ShapeError("votes", f"has {len(votes)} entries, expected {len(utilities)}")
        alpha = NoBudget(alpha).alpha
        total = int(np.sign(sum(int(vote) for vote in votes)))
        utility = Fraction(utilities[agent] * total) - alpha * int(votes[agent]) ** 2
        if include_refund:
            if len(votes) < 2:
                raise RefundUndefinedError()
            others = sum(int(vote) ** 2 for other, vote in enumerate(votes) if other != agent)
            utility += alpha * others / (len(votes) - 1)
        return utility

    @staticmethod
    def validate_budget(profile: StrategyProfile, budget: int) -> tuple[bool, ...]:
        return tuple(ElectionCalculator.cost(ballot) <= budget for ballot in profile.values)

    @staticmethod
    def check_budget(profile: StrategyProfile, budget: int) -> None:
        for agent, ballot in enumerate(profile.values):
            spent = ElectionCalculator.cost(ballot)
            if spent > budget:
                raise BudgetError(agent, spent, budget)

    @staticmethod
    def residuals(profile: StrategyProfile, agent: int) -> tuple[int, ...]:
        """Per-outcome vote totals of every agent except `agent`."""
        profile.check_agent(agent)
        totals = profile.as_array().sum(axis=0) - np.array(profile.values[agent], dtype=object)
        return tuple(int(total) for total in totals)
