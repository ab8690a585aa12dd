"""
Best-response search for no-budget multiple-issue QV.

A best response brings a winner set W to V + 1 votes and every other outcome
to at most V. For a fixed number m of outcomes that the other agents already
push above V, the winners split into W- (drawn from those m) and W+ (from the
rest). W- only depends on the sizes |W-| and |W+|; W+ only changes where two
of the parabolas g_w(V) cross, so the candidate set stays polynomial:
O(|Omega|^2) crossings for each of the O(|Omega|^3) size combinations.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from utils.errors import ConfigError, InvalidArgumentError
from utils.mechanics import ElectionCalculator
from utils.models import DeviationCandidate, Election, NoBudget, StrategyProfile

logger = logging.getLogger(__name__)

INF = math.inf


@dataclass(frozen=True)
class ResidualTally:
    """
    Vote totals of every agent but one, with the outcomes ordered by
    descending total (ties by lowest index).
    """

    residuals: tuple[int, ...]
    order: tuple[int, ...]

    @classmethod
    def from_residuals(cls, residuals: Sequence[int]) -> "ResidualTally":
        residuals = tuple(int(value) for value in residuals)
        order = tuple(sorted(range(len(residuals)), key=lambda outcome: (-residuals[outcome], outcome)))
        return cls(residuals=residuals, order=order)

    @classmethod
    def from_profile(cls, profile: StrategyProfile, agent: int) -> "ResidualTally":
        return cls.from_residuals(ElectionCalculator.residuals(profile, agent))

    def __len__(self) -> int:
        return len(self.residuals)

    def level(self, position: int):
        """Residual at 1-based sorted position, with +inf before the first and -inf after the last."""
        if position <= 0:
            return INF
        if position > len(self.residuals):
            return -INF
        return self.residuals[self.order[position - 1]]

    def top(self, m: int) -> tuple[int, ...]:
        return self.order[:m]

    def rest(self, m: int) -> tuple[int, ...]:
        return self.order[m:]


@dataclass(frozen=True)
class IntersectionSet:
    """Sorted crossing points of the g_w curves, bracketed by -inf and +inf."""

    breakpoints: tuple

    def intervals(self) -> Iterator[tuple]:
        for low, high in zip(self.breakpoints, self.breakpoints[1:]):
            yield low, high


def _interior_point(low, high) -> Fraction:
    if low == -INF and high == INF:
        return Fraction(0)
    if low == -INF:
        return Fraction(high) - 1
    if high == INF:
        return Fraction(low) + 1
    return (Fraction(low) + Fraction(high)) / 2


class NoBudgetSolver:

    @staticmethod
    def rank_w_minus(
        residuals: ResidualTally,
        utilities: Sequence[int],
        m: int,
        w_size: int,
        total_w: int,
        alpha=Fraction(1),
    ) -> frozenset[int]:
        """
        The `w_size` outcomes among the top `m` that maximise
        f(w) = u_w / |W| + 2 * alpha * s_w; ties go to the lowest index.
        """
        if w_size > m:
            raise InvalidArgumentError(f"w_size {w_size} exceeds m {m}")
        if not 0 <= m <= len(residuals):
            raise InvalidArgumentError(f"m {m} out of range 0..{len(residuals)}")
        if total_w < 1:
            raise InvalidArgumentError(f"total_w must be at least 1, got {total_w}")
        alpha = Fraction(alpha)

        def f(outcome: int) -> Fraction:
            return Fraction(utilities[outcome], total_w) + 2 * alpha * residuals.residuals[outcome]

        ranked = sorted(residuals.top(m), key=lambda outcome: (-f(outcome), outcome))
        return frozenset(ranked[:w_size])

    @staticmethod
    def optimal_V(
        residuals: ResidualTally,
        m: int,
        W_plus: frozenset[int],
        total_w: int,
    ) -> Fraction | None:
        """
        Real-valued level that maximises the agent's utility for a fixed
        winner set, or None when m + |W+| = 0 (the combination is vacuous).
        """
        denominator = m + len(W_plus)
        if denominator == 0:
            return None
        numerator = (
            sum(residuals.residuals[outcome] for outcome in residuals.top(m))
            + sum(residuals.residuals[outcome] for outcome in W_plus)
            - total_w
        )
        return Fraction(numerator, denominator)

    @staticmethod
    def integer_V_candidates(v_star, V_min, V_max) -> frozenset[int]:
        """
        Integer levels worth trying on [V_min, V_max]: both endpoints and the
        floor and ceiling of the concave optimum, clamped to the interval.
        """
        low = math.ceil(V_min) if V_min != -INF else None
        high = math.floor(V_max) if V_max != INF else None
        if low is not None and high is not None and low > high:
            return frozenset()

        def clamp(value: int) -> int:
            if low is not None:
                value = max(low, value)
            if high is not None:
                value = min(high, value)
            return value

        candidates = {clamp(math.floor(v_star)), clamp(math.ceil(v_star))}
        candidates.update(bound for bound in (low, high) if bound is not None)
        return frozenset(candidates)

    @staticmethod
    def g(residuals: ResidualTally, utilities: Sequence[int], outcome: int, total_w: int, alpha, V) -> Fraction:
        gap = Fraction(V) + 1 - residuals.residuals[outcome]
        return Fraction(utilities[outcome], total_w) - alpha * gap * gap

    @staticmethod
    def intersection_set(
        residuals: ResidualTally,
        utilities: Sequence[int],
        m: int,
        total_w: int,
        alpha=Fraction(1),
    ) -> IntersectionSet:
        """
        Every V where two g curves of the outcomes outside the top m cross.
        The curves share their quadratic coefficient, so their difference is
        linear: a pair crosses once, or never when the residuals are equal.
        """
        alpha = Fraction(alpha)
        candidates = residuals.rest(m)
        points = set()
        for index, first in enumerate(candidates):
            s_first = residuals.residuals[first]
            for second in candidates[index + 1:]:
                s_second = residuals.residuals[second]
                if s_first == s_second:
                    continue
                lead = Fraction(utilities[first] - utilities[second], total_w) / (alpha * (s_second - s_first))
                points.add((lead + s_first + s_second) / 2 - 1)
        return IntersectionSet(breakpoints=(-INF, *sorted(points), INF))

    @staticmethod
    def reconstruct(residuals: ResidualTally, V: int, winners: frozenset[int]) -> tuple[int, ...]:
        strategy = []
        for outcome, residual in enumerate(residuals.residuals):
            if outcome in winners:
                strategy.append(V + 1 - residual)
            elif residual > V:
                strategy.append(V - residual)
            else:
                strategy.append(0)
        return tuple(strategy)

    @staticmethod
    def candidates(election: Election, profile: StrategyProfile, agent: int) -> Iterator[DeviationCandidate]:
        """Enumerate the polynomial candidate set that contains a best response."""
        config = election.config
        if not isinstance(config, NoBudget):
            raise ConfigError(f"no-budget solver needs a no-budget election, got {config.variant}")
        election.check_profile(profile)
        alpha = config.alpha
        residuals = ResidualTally.from_profile(profile, agent)
        utilities = election.utilities.row(agent)
        n = len(residuals)

        for m in range(n + 1):
            lower, upper = residuals.level(m + 1), residuals.level(m) - 1
            if lower > upper:
                continue
            for w_bar in range(m + 1):
                for x in range(n - m + 1):
                    total_w = w_bar + x
                    if total_w == 0:
                        continue
                    W_minus = NoBudgetSolver.rank_w_minus(residuals, utilities, m, w_bar, total_w, alpha)
                    if x == 0:
                        intervals = [(-INF, INF)]
                    else:
                        intervals = list(NoBudgetSolver.intersection_set(
                            residuals, utilities, m, total_w, alpha).intervals())
                    for low, high in intervals:
                        point = _interior_point(low, high)
                        ranked = sorted(
                            residuals.rest(m),
                            key=lambda outcome: (
                                -NoBudgetSolver.g(residuals, utilities, outcome, total_w, alpha, point),
                                outcome,
                            ),
                        )
                        W_plus = frozenset(ranked[:x])
                        v_star = NoBudgetSolver.optimal_V(residuals, m, W_plus, total_w)
                        if v_star is None:
                            continue
                        levels = NoBudgetSolver.integer_V_candidates(v_star, max(lower, low), min(upper, high))
                        for V in sorted(levels):
                            strategy = NoBudgetSolver.reconstruct(residuals, V, W_minus | W_plus)
                            utility = ElectionCalculator.total_utility(
                                election, profile.replace_row(agent, strategy), agent)
                            yield DeviationCandidate(
                                strategy=strategy, utility=utility, V=V, W_minus=W_minus, W_plus=W_plus)

    @staticmethod
    def deviate_nobudget(election: Election, profile: StrategyProfile, agent: int) -> DeviationCandidate | None:
        """
        Best strictly improving deviation for `agent`, or None when its
        current ballot is already a best response. Refunds are left out of
        both sides of the comparison.
        """
        current = ElectionCalculator.total_utility(election, profile, agent)
        best = None
        count = 0
        for candidate in NoBudgetSolver.candidates(election, profile, agent):
            count += 1
            if best is None or candidate.utility > best.utility or (
                candidate.utility == best.utility
                and (tuple(sorted(candidate.winners)), candidate.V) < (tuple(sorted(best.winners)), best.V)
            ):
                best = candidate
        logger.debug("agent %s: %s candidates, current utility %s", agent, count, current)
        if best is None or best.utility <= current:
            return None
        logger.info("agent %s deviates to %s (utility %s > %s)", agent, best.strategy, best.utility, current)
        return best
