"""
Domain types shared by every part of the election engine.

All types are frozen: matrices are stored as tuples of tuples of Python ints,
money and probabilities as `Fraction`. Vector arithmetic goes through
`as_array()`, which hands out a fresh numpy copy holding Python ints, so
sums never wrap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import ClassVar, Sequence, TypeAlias

import numpy as np

from utils.errors import ConfigError, InvalidArgumentError, ShapeError


def _freeze_matrix(what: str, rows) -> tuple[tuple[int, ...], ...]:
    if rows is None:
        raise ShapeError(what, "matrix is missing")
    frozen = tuple(tuple(row) for row in rows)
    if not frozen:
        raise ShapeError(what, "matrix has no rows")
    width = len(frozen[0])
    if width == 0:
        raise ShapeError(what, "matrix has no columns")
    for index, row in enumerate(frozen):
        if len(row) != width:
            raise ShapeError(what, f"row {index} has {len(row)} entries, expected {width}")
        for value in row:
            if isinstance(value, bool) or not isinstance(value, Integral):
                raise ShapeError(what, f"row {index} holds non-integer entry {value!r}")
    return tuple(tuple(int(value) for value in row) for row in frozen)


@dataclass(frozen=True)
class _IntMatrix:
    values: tuple[tuple[int, ...], ...]

    _label: ClassVar[str] = "matrix"

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze_matrix(self._label, self.values))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]):
        return cls(tuple(tuple(row) for row in rows))

    @property
    def n_agents(self) -> int:
        return len(self.values)

    @property
    def n_outcomes(self) -> int:
        return len(self.values[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_agents, self.n_outcomes

    def row(self, agent: int) -> tuple[int, ...]:
        self.check_agent(agent)
        return self.values[agent]

    def column(self, outcome: int) -> tuple[int, ...]:
        if not 0 <= outcome < self.n_outcomes:
            raise InvalidArgumentError(f"outcome index {outcome} out of range 0..{self.n_outcomes - 1}")
        return tuple(row[outcome] for row in self.values)

    def check_agent(self, agent: int) -> None:
        if not 0 <= agent < self.n_agents:
            raise InvalidArgumentError(f"agent index {agent} out of range 0..{self.n_agents - 1}")

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=object)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.values]


@dataclass(frozen=True)
class UtilityMatrix(_IntMatrix):
    """Integer utility of every agent (rows) for every outcome (columns)."""

    _label: ClassVar[str] = "utilities"


@dataclass(frozen=True)
class StrategyProfile(_IntMatrix):
    """Integer vote matrix, one ballot row per agent."""

    _label: ClassVar[str] = "profile"

    @classmethod
    def zeros(cls, n_agents: int, n_outcomes: int) -> StrategyProfile:
        return cls(tuple((0,) * n_outcomes for _ in range(n_agents)))

    def replace_row(self, agent: int, ballot: Sequence[int]) -> StrategyProfile:
        self.check_agent(agent)
        ballot = tuple(ballot)
        if len(ballot) != self.n_outcomes:
            raise ShapeError("ballot", f"has {len(ballot)} entries, expected {self.n_outcomes}")
        rows = list(self.values)
        rows[agent] = ballot
        return StrategyProfile(tuple(rows))

    def replace_column(self, outcome: int, column: Sequence[int]) -> StrategyProfile:
        column = tuple(column)
        if len(column) != self.n_agents:
            raise ShapeError("column", f"has {len(column)} entries, expected {self.n_agents}")
        return StrategyProfile(tuple(
            row[:outcome] + (column[agent],) + row[outcome + 1:]
            for agent, row in enumerate(self.values)
        ))


@dataclass(frozen=True)
class BallotMatrix(_IntMatrix):
    """Ballots of a classical rule: indicators, Borda points, approvals or scores."""

    _label: ClassVar[str] = "ballots"


@dataclass(frozen=True)
class NoBudget:
    """No-budget QV: votes are paid with money at price alpha per squared vote."""

    alpha: Fraction = Fraction(1)

    variant: ClassVar[str] = "no_budget"

    def __post_init__(self):
        if isinstance(self.alpha, float) or not isinstance(self.alpha, Rational):
            raise ConfigError(f"alpha must be an exact rational, got {self.alpha!r}")
        alpha = Fraction(self.alpha)
        if alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {alpha}")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class FixedBudget:
    """Fixed-budget QV: every agent spends at most `budget` credits."""

    budget: int = 0

    variant: ClassVar[str] = "fixed_budget"

    def __post_init__(self):
        if isinstance(self.budget, bool) or not isinstance(self.budget, Integral):
            raise ConfigError(f"budget must be an integer, got {self.budget!r}")
        if self.budget < 0:
            raise ConfigError(f"budget must be non-negative, got {self.budget}")
        object.__setattr__(self, "budget", int(self.budget))


ElectionConfig: TypeAlias = NoBudget | FixedBudget


@dataclass(frozen=True)
class Election:
    config: ElectionConfig
    utilities: UtilityMatrix
    outcome_labels: tuple[str, ...] | None = None
    agent_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.config, (NoBudget, FixedBudget)):
            raise ConfigError(f"unknown election config {self.config!r}")
        if not isinstance(self.utilities, UtilityMatrix):
            object.__setattr__(self, "utilities", UtilityMatrix(self.utilities))
        for name, labels, size in (
            ("outcome_labels", self.outcome_labels, self.utilities.n_outcomes),
            ("agent_labels", self.agent_labels, self.utilities.n_agents),
        ):
            if labels is None:
                continue
            labels = tuple(str(label) for label in labels)
            if len(labels) != size:
                raise ShapeError(name, f"has {len(labels)} names, expected {size}")
            object.__setattr__(self, name, labels)

    @property
    def n_agents(self) -> int:
        return self.utilities.n_agents

    @property
    def n_outcomes(self) -> int:
        return self.utilities.n_outcomes

    def outcome_name(self, outcome: int) -> str:
        return self.outcome_labels[outcome] if self.outcome_labels else str(outcome)

    def agent_name(self, agent: int) -> str:
        return self.agent_labels[agent] if self.agent_labels else str(agent)

    def check_profile(self, profile: StrategyProfile) -> None:
        if profile.shape != self.utilities.shape:
            raise ShapeError(
                "profile",
                f"shape {profile.shape} does not match utilities {self.utilities.shape}",
            )

    def zero_profile(self) -> StrategyProfile:
        return StrategyProfile.zeros(self.n_agents, self.n_outcomes)


@dataclass(frozen=True)
class TallyResult:
    totals: tuple[int, ...]
    winners: frozenset[int]
    probabilities: tuple[Fraction, ...]

    @property
    def level(self) -> int:
        """Vote total shared by the winners."""
        return max(self.totals)

    def probability(self, outcome: int) -> Fraction:
        return self.probabilities[outcome]


@dataclass(frozen=True)
class Deviation:
    """A unilateral replacement ballot and the utility it brings its agent."""

    strategy: tuple[int, ...]
    utility: Fraction


@dataclass(frozen=True)
class DeviationCandidate(Deviation):
    """
    A deviation of the winner-set form: outcomes in W are brought to V + 1
    votes, every other outcome to at most V.
    """

    V: int = 0
    W_minus: frozenset[int] = field(default_factory=frozenset)
    W_plus: frozenset[int] = field(default_factory=frozenset)

    @property
    def winners(self) -> frozenset[int]:
        return self.W_minus | self.W_plus


@dataclass(frozen=True)
class NashReport:
    is_equilibrium: bool
    witness: tuple[int, tuple[int, ...], Fraction] | None = None

    def __post_init__(self):
        if self.is_equilibrium != (self.witness is None):
            raise InvalidArgumentError("a witness is present exactly when the profile is not an equilibrium")
        if self.witness is not None and self.witness[2] <= 0:
            raise InvalidArgumentError(f"witness gain must be positive, got {self.witness[2]}")

    @property
    def agent(self) -> int | None:
        return None if self.witness is None else self.witness[0]
