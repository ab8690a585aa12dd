"""
Best-response search for fixed-budget multiple-issue QV.

For a target level V every outcome is either taken into the winner set (it
ends at V + 1 votes) or left out (it ends at V or below). Choosing which
outcomes to take is a knapsack over the agent's credits, solved for every
winner-set size at once.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from utils.errors import ConfigError, InvalidArgumentError
from utils.mechanics import ElectionCalculator
from utils.models import DeviationCandidate, Election, FixedBudget, StrategyProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TakeLeaveCosts:
    """Credits needed to take each outcome into, or hold it out of, the winner set at level V."""

    V: int
    take: tuple[int, ...]
    leave: tuple[int, ...]

    @classmethod
    def at_level(cls, residuals: Sequence[int], V: int) -> "TakeLeaveCosts":
        take = tuple((V + 1 - s) ** 2 for s in residuals)
        leave = tuple(0 if s <= V else (s - V) ** 2 for s in residuals)
        return cls(V=V, take=take, leave=leave)

    def __len__(self) -> int:
        return len(self.take)


@dataclass(frozen=True, eq=False)
class DPTable:
    """
    values[n, p, b]: best utility sum from taking exactly p of the first n
    outcomes with at most b credits; NEG marks infeasible cells.
    """

    values: np.ndarray
    costs: TakeLeaveCosts

    NEG = np.iinfo(np.int64).min // 4

    @property
    def budget(self) -> int:
        return self.values.shape[2] - 1

    def value(self, n: int, p: int, b: int):
        cell = int(self.values[n, p, b])
        return -math.inf if cell == self.NEG else cell

    def taken(self, w: int) -> frozenset[int]:
        """Backtrack the outcomes taken for the full table cell (|Omega|, w, B); ties resolve to leave."""
        n_total = len(self.costs)
        if self.value(n_total, w, self.budget) == -math.inf:
            raise InvalidArgumentError(f"no feasible choice of {w} outcomes")
        taken = set()
        p, b = w, self.budget
        for n in range(n_total, 0, -1):
            current = self.values[n, p, b]
            leave = self.costs.leave[n - 1]
            if leave <= b and self.values[n - 1, p, b - leave] == current:
                b -= leave
                continue
            taken.add(n - 1)
            b -= self.costs.take[n - 1]
            p -= 1
        return frozenset(taken)


class FixedBudgetSolver:

    # utility sums stay far from the sentinel
    UTILITY_LIMIT = 2 ** 58

    @staticmethod
    def build_table(costs: TakeLeaveCosts, utilities: Sequence[int], budget: int) -> DPTable:
        """Fill the take/leave table layer by layer, vectorised over the budget axis."""
        if budget < 0:
            raise InvalidArgumentError(f"budget must be non-negative, got {budget}")
        n_outcomes = len(costs)
        if len(utilities) != n_outcomes:
            raise InvalidArgumentError(f"{len(utilities)} utilities for {n_outcomes} outcomes")
        if sum(abs(int(u)) for u in utilities) >= FixedBudgetSolver.UTILITY_LIMIT:
            raise InvalidArgumentError("utilities too large for the dynamic program")

        NEG = DPTable.NEG
        table = np.full((n_outcomes + 1, n_outcomes + 1, budget + 1), NEG, dtype=np.int64)
        table[0, 0, :] = 0
        for n in range(1, n_outcomes + 1):
            previous, current = table[n - 1], table[n]
            leave, take, utility = costs.leave[n - 1], costs.take[n - 1], int(utilities[n - 1])
            if leave <= budget:
                current[:, leave:] = previous[:, :budget + 1 - leave]
            if take <= budget:
                shifted = previous[:-1, :budget + 1 - take]
                gained = np.where(shifted > NEG, shifted + utility, NEG)
                current[1:, take:] = np.maximum(current[1:, take:], gained)
        return DPTable(values=table, costs=costs)

    @staticmethod
    def dp_value(costs: TakeLeaveCosts, utilities: Sequence[int], n: int, p: int, b: int):
        """Table cell (n, p, b) as an int, or -inf when no choice is affordable."""
        if not 0 <= p <= n <= len(costs):
            raise InvalidArgumentError(f"need 0 <= p <= n <= {len(costs)}, got p={p}, n={n}")
        if b < 0:
            raise InvalidArgumentError(f"budget must be non-negative, got {b}")
        return FixedBudgetSolver.build_table(costs, utilities, b).value(n, p, b)

    @staticmethod
    def level_range(residuals: Sequence[int], budget: int) -> range:
        """Levels V worth trying: [max s - ceil(sqrt B) - 1, max s + floor(sqrt B)]."""
        lam = max(residuals)
        floor_root = math.isqrt(budget)
        ceil_root = floor_root if floor_root * floor_root == budget else floor_root + 1
        return range(lam - ceil_root - 1, lam + floor_root + 1)

    @staticmethod
    def reconstruct(residuals: Sequence[int], V: int, taken: frozenset[int]) -> tuple[int, ...]:
        strategy = []
        for outcome, s in enumerate(residuals):
            if outcome in taken:
                strategy.append(V + 1 - s)
            elif s > V:
                strategy.append(V - s)
            else:
                strategy.append(0)
        return tuple(strategy)

    @staticmethod
    def deviate_fixed(election: Election, profile: StrategyProfile, agent: int) -> DeviationCandidate | None:
        config = election.config
        if not isinstance(config, FixedBudget):
            raise ConfigError(f"fixed-budget solver needs a fixed-budget election, got {config.variant}")
        election.check_profile(profile)
        ElectionCalculator.check_budget(profile, config.budget)

        budget = config.budget
        residuals = ElectionCalculator.residuals(profile, agent)
        utilities = election.utilities.row(agent)
        current = ElectionCalculator.total_utility(election, profile, agent)
        n_outcomes = len(residuals)

        best = None
        levels = FixedBudgetSolver.level_range(residuals, budget)
        logger.debug("agent %s: trying levels %s..%s with budget %s", agent, levels.start, levels.stop - 1, budget)
        for V in levels:
            costs = TakeLeaveCosts.at_level(residuals, V)
            table = FixedBudgetSolver.build_table(costs, utilities, budget)
            for w in range(1, n_outcomes + 1):
                value = table.value(n_outcomes, w, budget)
                if value == -math.inf:
                    continue
                utility = Fraction(value, w)
                if best is not None and utility < best.utility:
                    continue
                taken = table.taken(w)
                strategy = FixedBudgetSolver.reconstruct(residuals, V, taken)
                # equal utility: keep the cheaper ballot
                if best is not None and utility == best.utility and (
                        ElectionCalculator.cost(strategy) >= ElectionCalculator.cost(best.strategy)):
                    continue
                best = DeviationCandidate(strategy=strategy, utility=utility, V=V,
                                          W_minus=frozenset(o for o in taken if residuals[o] > V),
                                          W_plus=frozenset(o for o in taken if residuals[o] <= V))

        if best is None or best.utility <= current:
            return None
        logger.info("agent %s deviates to %s (utility %s > %s)", agent, best.strategy, best.utility, current)
        return best
