import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Sequence

import numpy as np

from utils.errors import InvalidArgumentError, ShapeError
from utils.models import BallotMatrix, StrategyProfile, UtilityMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuleId:
    """A voting rule; `k` is the top score of score voting."""

    kind: str
    k: int | None = None

    PLURALITY: ClassVar[str] = "plurality"
    BORDA: ClassVar[str] = "borda"
    APPROVAL: ClassVar[str] = "approval"
    SCORE: ClassVar[str] = "score"
    QV: ClassVar[str] = "qv"

    KINDS: ClassVar[tuple[str, ...]] = (PLURALITY, BORDA, APPROVAL, SCORE, QV)
    DEFAULT_SCORE_K: ClassVar[int] = 10

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidArgumentError(f"unknown rule {self.kind!r}; choose one of {', '.join(self.KINDS)}")
        if self.kind == self.SCORE:
            if self.k is None:
                object.__setattr__(self, "k", self.DEFAULT_SCORE_K)
            if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
                raise InvalidArgumentError(f"score voting needs a positive integer k, got {self.k!r}")
        elif self.k is not None:
            raise InvalidArgumentError(f"rule {self.kind} takes no k")

    @classmethod
    def parse(cls, name: str, k: int | None = None) -> "RuleId":
        name = name.strip().lower()
        if name in ("1p1v", "fptp"):
            name = cls.PLURALITY
        return cls(name, k if name == cls.SCORE else None)

    @classmethod
    def classical(cls, k: int | None = None) -> tuple["RuleId", ...]:
        return (cls(cls.PLURALITY), cls(cls.BORDA), cls(cls.APPROVAL), cls(cls.SCORE, k))

    @property
    def ranked(self) -> bool:
        return self.kind in (self.PLURALITY, self.BORDA)

    @property
    def label(self) -> str:
        return f"score({self.k})" if self.kind == self.SCORE else self.kind

    def __str__(self) -> str:
        return self.label


class VotingRules:
    """Sincere ballots and winners of the classical rules QV is compared with."""

    @staticmethod
    def sincere_row(rule: RuleId, utilities: Sequence) -> tuple[int, ...]:
        """Sincere ballot of one agent. Entries may be any exact numbers, e.g. Fractions."""
        values = [Fraction(value) for value in utilities]
        if rule.kind == RuleId.PLURALITY:
            top = max(values)
            favourite = values.index(top)
            return tuple(int(outcome == favourite) for outcome in range(len(values)))
        if rule.kind == RuleId.BORDA:
            levels = sorted(set(values))
            return tuple(levels.index(value) for value in values)
        if rule.kind == RuleId.APPROVAL:
            mean = sum(values, Fraction(0)) / len(values)
            return tuple(int(value >= mean) for value in values)
        if rule.kind == RuleId.SCORE:
            low, high = min(values), max(values)
            if low == high:
                return (0,) * len(values)
            return tuple(math.floor(rule.k * (value - low) / (high - low) + Fraction(1, 2)) for value in values)
        raise InvalidArgumentError("QV has no sincere ballot; pass the vote profile instead")

    @staticmethod
    def sincere_ballots(
        rule: RuleId,
        utilities: UtilityMatrix,
        profile: StrategyProfile | None = None,
    ) -> BallotMatrix:
        if rule.kind == RuleId.QV:
            if profile is None:
                raise InvalidArgumentError("QV ballots come from a vote profile; none was given")
            if profile.shape != utilities.shape:
                raise ShapeError("profile", f"shape {profile.shape} does not match utilities {utilities.shape}")
            return BallotMatrix(profile.values)
        return BallotMatrix(tuple(VotingRules.sincere_row(rule, row) for row in utilities.values))

    @staticmethod
    def check_ballots(rule: RuleId, ballots: BallotMatrix) -> None:
        n_outcomes = ballots.n_outcomes
        for agent, row in enumerate(ballots.values):
            if rule.kind == RuleId.PLURALITY:
                valid = all(value in (0, 1) for value in row) and sum(row) <= 1
            elif rule.kind == RuleId.BORDA:
                valid = sorted(set(row)) == list(range(len(set(row)))) and max(row) < n_outcomes
            elif rule.kind == RuleId.APPROVAL:
                valid = all(value in (0, 1) for value in row)
            elif rule.kind == RuleId.SCORE:
                valid = all(0 <= value <= rule.k for value in row)
            else:
                valid = True
            if not valid:
                raise ShapeError("ballots", f"row {agent} {row} is not a valid {rule.label} ballot")

    @staticmethod
    def scores(rule: RuleId, ballots: BallotMatrix) -> tuple[int, ...]:
        VotingRules.check_ballots(rule, ballots)
        return tuple(int(total) for total in ballots.as_array().sum(axis=0))

    @staticmethod
    def rule_winner(rule: RuleId, ballots: BallotMatrix) -> frozenset[int]:
        """Outcomes with the highest aggregate score; ties return the full set."""
        totals = np.array(VotingRules.scores(rule, ballots))
        winners = frozenset(int(outcome) for outcome in np.flatnonzero(totals == totals.max()))
        logger.debug("%s winners %s from scores %s", rule.label, sorted(winners), totals.tolist())
        return winners

    @staticmethod
    def expected_utility(utility_row: Sequence[int], winners: frozenset[int]) -> Fraction:
        """Utility of a uniform draw from the winner set."""
        return Fraction(sum(utility_row[outcome] for outcome in winners), len(winners))
