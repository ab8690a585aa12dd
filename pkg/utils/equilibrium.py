import logging
from fractions import Fraction

from utils.fixed_budget_solver import FixedBudgetSolver
from utils.mechanics import ElectionCalculator
from utils.models import DeviationCandidate, Election, FixedBudget, NashReport, StrategyProfile
from utils.nobudget_solver import NoBudgetSolver

logger = logging.getLogger(__name__)


class EquilibriumChecker:
    """Pure Nash equilibrium checks built on the per-agent deviation solvers."""

    @staticmethod
    def deviate(election: Election, profile: StrategyProfile, agent: int) -> DeviationCandidate | None:
        if isinstance(election.config, FixedBudget):
            return FixedBudgetSolver.deviate_fixed(election, profile, agent)
        return NoBudgetSolver.deviate_nobudget(election, profile, agent)

    @staticmethod
    def gain(election: Election, profile: StrategyProfile, agent: int, deviation) -> Fraction:
        return deviation.utility - ElectionCalculator.total_utility(election, profile, agent)

    @staticmethod
    def verify_nash(election: Election, profile: StrategyProfile) -> NashReport:
        """The first agent (by index) with an improving deviation is the witness."""
        election.check_profile(profile)
        if isinstance(election.config, FixedBudget):
            ElectionCalculator.check_budget(profile, election.config.budget)
        for agent in range(election.n_agents):
            deviation = EquilibriumChecker.deviate(election, profile, agent)
            if deviation is not None:
                gain = EquilibriumChecker.gain(election, profile, agent, deviation)
                logger.info("not an equilibrium: agent %s gains %s", agent, gain)
                return NashReport(is_equilibrium=False, witness=(agent, deviation.strategy, gain))
        logger.info("profile is a pure Nash equilibrium")
        return NashReport(is_equilibrium=True)

    @staticmethod
    def deviation_table(election: Election, profile: StrategyProfile) -> list[tuple[int, DeviationCandidate | None]]:
        """Every agent's best deviation, or None where the agent already plays a best response."""
        election.check_profile(profile)
        return [
            (agent, EquilibriumChecker.deviate(election, profile, agent))
            for agent in range(election.n_agents)
        ]
