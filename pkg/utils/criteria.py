"""
Empirical checks of social-choice criteria for QV and the classical rules.

Every check runs on a *case*: a JSON-friendly dict holding the utilities, the
QV vote profile where relevant, and the concrete transformation to apply
(agent split, clone placement, added outcome, betraying agent). A failing
check stores its case as the counterexample, and `replay` re-runs it.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar

import numpy as np

from utils.errors import InvalidArgumentError
from utils.mechanics import ElectionCalculator
from utils.models import (
    BallotMatrix,
    Election,
    FixedBudget,
    NoBudget,
    StrategyProfile,
    UtilityMatrix,
)
from utils.oracle import BruteForceOracle, OracleBound
from utils.voting_rules import RuleId, VotingRules

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    trials: int = 200
    min_agents: int = 3
    max_agents: int = 7
    min_outcomes: int = 2
    max_outcomes: int = 4
    utility_range: tuple[int, int] = (-10, 10)
    vote_range: tuple[int, int] = (-3, 3)
    budget: int | None = None
    max_abs_vote: int = 3

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidArgumentError(f"trials must be positive, got {self.trials}")
        if not 1 <= self.min_agents <= self.max_agents:
            raise InvalidArgumentError("need 1 <= min_agents <= max_agents")
        if not 1 <= self.min_outcomes <= self.max_outcomes:
            raise InvalidArgumentError("need 1 <= min_outcomes <= max_outcomes")


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    rule: RuleId
    holds: bool
    counterexample: dict | None = None
    witness: dict | None = None
    seed: int | None = None
    trials: int = 0
    note: str = ""

    def __post_init__(self):
        if not self.holds and self.counterexample is None:
            raise InvalidArgumentError("a failing criterion result needs a counterexample")

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "rule": self.rule.label,
            "holds": self.holds,
            "counterexample": self.counterexample,
            "witness": self.witness,
            "seed": self.seed,
            "trials": self.trials,
            "note": self.note,
        }


@dataclass
class _Finding:
    violated: bool
    vacuous: bool = False
    detail: dict = field(default_factory=dict)


def _as_fraction_text(value: Fraction) -> str:
    return str(Fraction(value))


def _case_election(case: dict) -> Election:
    if case.get("budget") is not None:
        config = FixedBudget(case["budget"])
    else:
        config = NoBudget(Fraction(case.get("alpha", "1")))
    return Election(config=config, utilities=UtilityMatrix.from_rows(case["utilities"]))


def _base_ballots(rule: RuleId, case: dict) -> BallotMatrix:
    utilities = UtilityMatrix.from_rows(case["utilities"])
    profile = StrategyProfile.from_rows(case["profile"]) if case.get("profile") is not None else None
    return VotingRules.sincere_ballots(rule, utilities, profile)


def _winners_from_totals(totals) -> frozenset[int]:
    top = max(totals)
    return frozenset(outcome for outcome, total in enumerate(totals) if total == top)


def _unique_favourite(row) -> int | None:
    top = max(row)
    return row.index(top) if list(row).count(top) == 1 else None


class CriteriaChecker:

    INTENSITY = "intensity"
    MAJORITY_SAFE = "majority_safe"
    CONSISTENCY = "consistency"
    CLONE_INDEPENDENCE = "clone_independence"
    IIA = "iia"
    NFB = "nfb"

    CRITERIA: ClassVar[tuple[str, ...]] = (INTENSITY, MAJORITY_SAFE, CONSISTENCY, CLONE_INDEPENDENCE, IIA, NFB)

    @staticmethod
    def intensity_case(rule: RuleId) -> dict:
        """Two agents with the same ordering and different intensities."""
        top = 4 * (rule.k or 1) + 1
        return {"utilities": [[0, 1, top], [0, 2, top]], "profile": [[0, 1, 3], [0, 2, 3]]}

    @staticmethod
    def _evaluate_intensity(rule: RuleId, case: dict) -> _Finding:
        ballots = _base_ballots(rule, case)
        same = ballots.values[0] == ballots.values[1]
        return _Finding(violated=same, detail={"ballots": ballots.to_lists()})

    @staticmethod
    def majority_favourites(utilities: list[list[int]]) -> frozenset[int]:
        """Outcomes ranked uniquely first by at least half of the agents."""
        counts: dict[int, int] = {}
        for row in utilities:
            favourite = _unique_favourite(list(row))
            if favourite is not None:
                counts[favourite] = counts.get(favourite, 0) + 1
        return frozenset(outcome for outcome, count in counts.items() if 2 * count >= len(utilities))

    @staticmethod
    def _evaluate_majority(rule: RuleId, case: dict) -> _Finding:
        """Violated when every majority favourite wins; a losing favourite is the witness."""
        favourites = CriteriaChecker.majority_favourites(case["utilities"])
        winners = VotingRules.rule_winner(rule, _base_ballots(rule, case))
        excluded = favourites - winners
        return _Finding(
            violated=not excluded,
            vacuous=not favourites,
            detail={"favourites": sorted(favourites), "winners": sorted(winners)},
        )

    @staticmethod
    def _evaluate_consistency(rule: RuleId, case: dict) -> _Finding:
        ballots = _base_ballots(rule, case)
        split = case["split"]
        if not 0 < split < ballots.n_agents:
            raise InvalidArgumentError(f"split {split} must leave agents on both sides")
        first = VotingRules.rule_winner(rule, BallotMatrix(ballots.values[:split]))
        second = VotingRules.rule_winner(rule, BallotMatrix(ballots.values[split:]))
        union = VotingRules.rule_winner(rule, ballots)
        premise = first == second and len(first) == 1
        return _Finding(
            violated=premise and union != first,
            vacuous=not premise,
            detail={"first": sorted(first), "second": sorted(second), "union": sorted(union)},
        )

    @staticmethod
    def _clone_ballots(rule: RuleId, case: dict, ballots: BallotMatrix) -> BallotMatrix:
        original = case["clone_of"]
        if rule.ranked:
            rows = []
            for row, side in zip(case["utilities"], case["sides"]):
                offset = Fraction(1, 2) if side == "above" else Fraction(-1, 2)
                rows.append(VotingRules.sincere_row(rule, [*row, row[original] + offset]))
            return BallotMatrix(tuple(rows))
        return BallotMatrix(tuple((*row, row[original]) for row in ballots.values))

    @staticmethod
    def _evaluate_clone(rule: RuleId, case: dict) -> _Finding:
        ballots = _base_ballots(rule, case)
        before = VotingRules.rule_winner(rule, ballots)
        after = VotingRules.rule_winner(rule, CriteriaChecker._clone_ballots(rule, case, ballots))
        clone = ballots.n_outcomes
        vacuous = len(before) != 1 or clone in after
        return _Finding(
            violated=not vacuous and after != before,
            vacuous=vacuous,
            detail={"before": sorted(before), "after": sorted(after), "clone": clone},
        )

    @staticmethod
    def _added_outcome_ballots(rule: RuleId, case: dict, ballots: BallotMatrix) -> BallotMatrix:
        added = case["added_utilities"]
        if rule.kind == RuleId.QV:
            return BallotMatrix(tuple((*row, vote) for row, vote in zip(ballots.values, case["added_votes"])))
        if rule.ranked:
            return BallotMatrix(tuple(
                VotingRules.sincere_row(rule, [*row, extra]) for row, extra in zip(case["utilities"], added)
            ))
        # rated rules keep each agent's existing scale and only rate the new outcome
        rows = []
        for row, ballot, extra in zip(case["utilities"], ballots.values, added):
            if rule.kind == RuleId.APPROVAL:
                vote = int(extra * len(row) >= sum(row))
            else:
                low, high = min(row), max(row)
                if low == high:
                    vote = 0
                else:
                    vote = math.floor(rule.k * Fraction(extra - low, high - low) + Fraction(1, 2))
                    vote = min(rule.k, max(0, vote))
            rows.append((*ballot, vote))
        return BallotMatrix(tuple(rows))

    @staticmethod
    def _evaluate_iia(rule: RuleId, case: dict) -> _Finding:
        ballots = _base_ballots(rule, case)
        before = VotingRules.scores(rule, ballots)
        after = VotingRules.scores(rule, CriteriaChecker._added_outcome_ballots(rule, case, ballots))
        for first, second in itertools.permutations(range(len(before)), 2):
            if before[first] > before[second] and after[first] < after[second]:
                return _Finding(violated=True, detail={"pair": [first, second], "before": list(before),
                                                       "after": list(after)})
        return _Finding(violated=False, detail={"before": list(before), "after": list(after)})

    @staticmethod
    def ballot_space(rule: RuleId, n_outcomes: int, election: Election | None = None, max_abs_vote: int = 3):
        """Every ballot one agent may cast under `rule`."""
        if rule.kind == RuleId.PLURALITY:
            yield (0,) * n_outcomes
            for outcome in range(n_outcomes):
                yield tuple(int(index == outcome) for index in range(n_outcomes))
        elif rule.kind == RuleId.APPROVAL:
            yield from itertools.product((0, 1), repeat=n_outcomes)
        elif rule.kind == RuleId.SCORE:
            yield from itertools.product(range(rule.k + 1), repeat=n_outcomes)
        elif rule.kind == RuleId.BORDA:
            yield from itertools.permutations(range(n_outcomes))
        else:
            yield from BruteForceOracle.ballots(election, OracleBound(max_abs_vote))

    @staticmethod
    def _evaluate_nfb(rule: RuleId, case: dict) -> _Finding:
        """
        Violated when the agent's best ballot rates some outcome strictly above
        its unique favourite and beats every alternative that keeps the
        favourite in play. For QV the alternatives are abstaining and every
        ballot under which the favourite is a possible winner; for the other
        rules they are the ballots that never rate anything above the favourite.
        """
        agent = case["agent"]
        utilities = case["utilities"]
        row = list(utilities[agent])
        favourite = _unique_favourite(row)
        if favourite is None:
            return _Finding(violated=False, vacuous=True)

        ballots = _base_ballots(rule, case)
        n_outcomes = ballots.n_outcomes
        election = profile = None
        if rule.kind == RuleId.QV:
            election = _case_election(case)
            profile = StrategyProfile.from_rows(case["profile"])
            extra = []
        else:
            others = np.array([ballot for index, ballot in enumerate(ballots.values) if index != agent],
                              dtype=object).reshape(-1, n_outcomes).sum(axis=0)
            extra = [VotingRules.sincere_row(rule, row)] if rule.kind == RuleId.BORDA else []

        best_betrayal = None
        baseline = None
        space = CriteriaChecker.ballot_space(rule, n_outcomes, election, case.get("max_abs_vote", 3))
        for ballot in itertools.chain(space, extra):
            if rule.kind == RuleId.QV:
                trial = profile.replace_row(agent, ballot)
                utility = ElectionCalculator.total_utility(election, trial, agent)
                winners = ElectionCalculator.tally(trial).winners
                keeps_favourite = favourite in winners or not any(ballot)
            else:
                winners = _winners_from_totals(others + np.array(ballot, dtype=object))
                utility = VotingRules.expected_utility(row, winners)
                keeps_favourite = all(vote <= ballot[favourite] for vote in ballot)
            betrays = any(vote > ballot[favourite] for vote in ballot)
            if betrays and (best_betrayal is None or utility > best_betrayal[0]):
                best_betrayal = (utility, tuple(int(vote) for vote in ballot))
            if keeps_favourite and (baseline is None or utility > baseline):
                baseline = utility

        violated = best_betrayal is not None and (baseline is None or best_betrayal[0] > baseline)
        detail = {"favourite": favourite}
        if best_betrayal is not None:
            detail.update(ballot=list(best_betrayal[1]), utility=_as_fraction_text(best_betrayal[0]))
        if baseline is not None:
            detail["baseline"] = _as_fraction_text(baseline)
        return _Finding(violated=violated, detail=detail)

    @classmethod
    def evaluate(cls, criterion: str, rule: RuleId, case: dict) -> _Finding:
        evaluators = {
            cls.INTENSITY: cls._evaluate_intensity,
            cls.MAJORITY_SAFE: cls._evaluate_majority,
            cls.CONSISTENCY: cls._evaluate_consistency,
            cls.CLONE_INDEPENDENCE: cls._evaluate_clone,
            cls.IIA: cls._evaluate_iia,
            cls.NFB: cls._evaluate_nfb,
        }
        if criterion not in evaluators:
            raise InvalidArgumentError(f"unknown criterion {criterion!r}; choose one of {', '.join(cls.CRITERIA)}")
        return evaluators[criterion](rule, case)

    @classmethod
    def replay(cls, result: CriterionResult) -> bool:
        """Re-run the stored counterexample; True when the violation reproduces."""
        if result.counterexample is None:
            return False
        return cls.evaluate(result.criterion, result.rule, result.counterexample).violated

    @staticmethod
    def _random_matrix(rng: np.random.Generator, shape: tuple[int, int], bounds: tuple[int, int]) -> list[list[int]]:
        low, high = bounds
        return rng.integers(low, high + 1, size=shape).tolist()

    @staticmethod
    def _fit_budget(row: list[int], budget: int) -> list[int]:
        row = list(row)
        while ElectionCalculator.cost(row) > budget:
            index = max(range(len(row)), key=lambda outcome: abs(row[outcome]))
            row[index] -= 1 if row[index] > 0 else -1
        return row

    @staticmethod
    def _random_election(rng: np.random.Generator, config: SearchConfig, n_outcomes: int | None = None) -> dict:
        n_agents = int(rng.integers(config.min_agents, config.max_agents + 1))
        if n_outcomes is None:
            n_outcomes = int(rng.integers(config.min_outcomes, config.max_outcomes + 1))
        profile = CriteriaChecker._random_matrix(rng, (n_agents, n_outcomes), config.vote_range)
        if config.budget is not None:
            profile = [CriteriaChecker._fit_budget(row, config.budget) for row in profile]
        return {
            "utilities": CriteriaChecker._random_matrix(rng, (n_agents, n_outcomes), config.utility_range),
            "profile": profile,
            "alpha": "1",
            "budget": config.budget,
            "max_abs_vote": config.max_abs_vote,
        }

    @staticmethod
    def _transform(criterion: str, rng: np.random.Generator, config: SearchConfig, base: dict) -> dict:
        """Draw the criterion's transformation on top of a base case."""
        case = dict(base)
        n_agents, n_outcomes = len(base["utilities"]), len(base["utilities"][0])
        if criterion == CriteriaChecker.CLONE_INDEPENDENCE:
            case["clone_of"] = int(rng.integers(n_outcomes))
            case["sides"] = [("above", "below")[int(side)] for side in rng.integers(2, size=n_agents)]
        elif criterion == CriteriaChecker.IIA:
            case["added_utilities"] = [int(value) for value in rng.integers(
                config.utility_range[0], config.utility_range[1] + 1, size=n_agents)]
            votes = [[int(value)] for value in rng.integers(
                config.vote_range[0], config.vote_range[1] + 1, size=n_agents)]
            if config.budget is not None:
                votes = [CriteriaChecker._fit_budget(vote, config.budget) for vote in votes]
            case["added_votes"] = [vote[0] for vote in votes]
        elif criterion == CriteriaChecker.NFB:
            case["agent"] = int(rng.integers(n_agents))
        return case

    @staticmethod
    def _random_case(criterion: str, rng: np.random.Generator, config: SearchConfig) -> dict:
        if criterion == CriteriaChecker.CONSISTENCY:
            first = CriteriaChecker._random_election(rng, config)
            second = CriteriaChecker._random_election(rng, config, len(first["utilities"][0]))
            case = dict(first)
            case["utilities"] = first["utilities"] + second["utilities"]
            case["profile"] = first["profile"] + second["profile"]
            case["split"] = len(first["utilities"])
            return case
        return CriteriaChecker._transform(criterion, rng, config, CriteriaChecker._random_election(rng, config))

    @staticmethod
    def _instance_case(election: Election, profile: StrategyProfile | None, config: SearchConfig) -> dict:
        budget = election.config.budget if isinstance(election.config, FixedBudget) else None
        alpha = election.config.alpha if isinstance(election.config, NoBudget) else Fraction(1)
        return {
            "utilities": election.utilities.to_lists(),
            "profile": profile.to_lists() if profile is not None else None,
            "alpha": _as_fraction_text(alpha),
            "budget": budget,
            "max_abs_vote": config.max_abs_vote,
        }

    @classmethod
    def _instance_cases(cls, criterion: str, base: dict, config: SearchConfig):
        """Cases derived from one given election."""
        n_agents = len(base["utilities"])
        if criterion == cls.CONSISTENCY:
            if n_agents < 2:
                raise InvalidArgumentError("consistency needs at least two agents to split")
            yield {**base, "split": math.ceil(n_agents / 2)}
        elif criterion == cls.NFB:
            for agent in range(n_agents):
                yield {**base, "agent": agent}
        elif criterion in (cls.CLONE_INDEPENDENCE, cls.IIA):
            rng = np.random.default_rng(config.seed)
            for _ in range(config.trials):
                yield cls._transform(criterion, rng, config, base)
        else:
            yield base

    @classmethod
    def _intensity(cls, rule: RuleId) -> CriterionResult:
        case = cls.intensity_case(rule)
        if rule.kind == RuleId.QV:
            return CriterionResult(
                criterion=cls.INTENSITY, rule=rule, holds=True,
                witness={"profile": case["profile"]},
                note="votes are unbounded integers priced quadratically",
            )
        finding = cls._evaluate_intensity(rule, case)
        note = f"only {rule.k + 1} score levels" if rule.kind == RuleId.SCORE else ""
        if finding.violated:
            return CriterionResult(criterion=cls.INTENSITY, rule=rule, holds=False, counterexample=case, note=note)
        return CriterionResult(criterion=cls.INTENSITY, rule=rule, holds=True, witness=case, note=note)

    @classmethod
    def check_criterion(
        cls,
        criterion: str,
        rule: RuleId,
        election: Election | None = None,
        profile: StrategyProfile | None = None,
        config: SearchConfig | None = None,
    ) -> CriterionResult:
        """
        Check one criterion for one rule, on the given election when there is
        one and on randomly sampled elections otherwise.
        """
        if criterion not in cls.CRITERIA:
            raise InvalidArgumentError(f"unknown criterion {criterion!r}; choose one of {', '.join(cls.CRITERIA)}")
        config = config or SearchConfig()
        if criterion == cls.INTENSITY:
            return cls._intensity(rule)
        if rule.kind == RuleId.QV and election is not None and profile is None:
            raise InvalidArgumentError("QV criteria need a vote profile")

        if election is not None:
            base = cls._instance_case(election, profile, config)
            cases = cls._instance_cases(criterion, base, config)
        else:
            rng = np.random.default_rng(config.seed)
            cases = (cls._random_case(criterion, rng, config) for _ in range(config.trials))

        if criterion == cls.MAJORITY_SAFE:
            return cls._search_witness(rule, cases, config)

        tried = relevant = 0
        for case in cases:
            tried += 1
            finding = cls.evaluate(criterion, rule, case)
            relevant += not finding.vacuous
            if finding.violated:
                logger.info("%s fails %s after %s cases", rule.label, criterion, tried)
                return CriterionResult(
                    criterion=criterion, rule=rule, holds=False,
                    counterexample={**case, "finding": finding.detail},
                    seed=config.seed, trials=tried,
                )
        return CriterionResult(
            criterion=criterion, rule=rule, holds=True, seed=config.seed, trials=tried,
            note=f"{relevant} of {tried} cases met the criterion's premise",
        )

    @classmethod
    def _search_witness(cls, rule: RuleId, cases, config: SearchConfig) -> CriterionResult:
        """
        Majority safety holds once some majority favourite is seen losing.
        Otherwise the first case with a majority favourite is the
        counterexample, or the first case at all when none had one.
        """
        tried = 0
        counterexample = None
        saw_favourite = False
        for case in cases:
            tried += 1
            finding = cls._evaluate_majority(rule, case)
            if not finding.violated:
                return CriterionResult(
                    criterion=cls.MAJORITY_SAFE, rule=rule, holds=True,
                    witness={**case, "finding": finding.detail}, seed=config.seed, trials=tried,
                )
            if counterexample is None or (not saw_favourite and not finding.vacuous):
                counterexample = {**case, "finding": finding.detail}
                saw_favourite = not finding.vacuous
        if counterexample is None:
            raise InvalidArgumentError("majority safety needs at least one case")
        note = "every majority favourite seen went on to win" if saw_favourite else "no case had a majority favourite"
        return CriterionResult(
            criterion=cls.MAJORITY_SAFE, rule=rule, holds=False, counterexample=counterexample,
            seed=config.seed, trials=tried, note=note,
        )

    @classmethod
    def criteria_matrix(
        cls,
        rules: list[RuleId],
        criteria: list[str],
        election: Election | None = None,
        profile: StrategyProfile | None = None,
        config: SearchConfig | None = None,
    ) -> list[CriterionResult]:
        return [
            cls.check_criterion(criterion, rule, election, profile, config)
            for rule in rules
            for criterion in criteria
        ]
