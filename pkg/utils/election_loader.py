import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from pathlib import Path

import pandas as pd

from utils.errors import ElectionFileError, QVError
from utils.mechanics import ElectionCalculator
from utils.models import Election, FixedBudget, NoBudget, StrategyProfile, UtilityMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ElectionFile:
    election: Election
    profile: StrategyProfile | None = None


class ElectionLoader:
    """
    Reads and writes election files. No command ever touches a file directly.

    JSON files (`*.json`) hold one object:
        variant, alpha ("p/q", no_budget only), budget (fixed_budget only),
        utilities, profile (optional), outcomes / agents (optional names)

    Excel workbooks (`*.xlsx`) hold sheets:
        config     key / value rows (variant, alpha or budget)
        utilities  agents as rows, outcomes as columns
        profile    optional, same layout
    """

    _cache = {}

    KEY_VARIANT   = "variant"
    KEY_ALPHA     = "alpha"
    KEY_BUDGET    = "budget"
    KEY_UTILITIES = "utilities"
    KEY_PROFILE   = "profile"
    KEY_OUTCOMES  = "outcomes"
    KEY_AGENTS    = "agents"

    SHEET_CONFIG    = "config"
    SHEET_UTILITIES = "utilities"
    SHEET_PROFILE   = "profile"

    @classmethod
    def load(cls, path) -> ElectionFile:
        path = Path(path)
        if not path.is_file():
            raise ElectionFileError("path", f"{path} does not exist")
        cache_key = (str(path.resolve()), path.stat().st_mtime_ns)
        if cache_key in cls._cache:
            return cls._cache[cache_key]

        if path.suffix.lower() == ".xlsx":
            document = cls._read_workbook(path)
        else:
            try:
                document = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ElectionFileError("document", f"invalid JSON: {exc}") from exc
        result = cls.parse(document)
        logger.debug("loaded %s: %s agents, %s outcomes", path, result.election.n_agents, result.election.n_outcomes)
        cls._cache[cache_key] = result
        return result

    @classmethod
    def parse(cls, document: dict) -> ElectionFile:
        if not isinstance(document, dict):
            raise ElectionFileError("document", "top level must be an object")
        variant = document.get(cls.KEY_VARIANT)
        if variant == NoBudget.variant:
            if cls.KEY_BUDGET in document:
                raise ElectionFileError(cls.KEY_BUDGET, "not allowed for a no_budget election")
            config = NoBudget(cls._parse_alpha(document.get(cls.KEY_ALPHA)))
        elif variant == FixedBudget.variant:
            if cls.KEY_ALPHA in document:
                raise ElectionFileError(cls.KEY_ALPHA, "not allowed for a fixed_budget election")
            budget = document.get(cls.KEY_BUDGET)
            if isinstance(budget, bool) or not isinstance(budget, Integral) or budget < 0:
                raise ElectionFileError(cls.KEY_BUDGET, f"must be a non-negative integer, got {budget!r}")
            config = FixedBudget(budget)
        else:
            raise ElectionFileError(cls.KEY_VARIANT, f'must be "no_budget" or "fixed_budget", got {variant!r}')

        utilities = cls._parse_matrix(cls.KEY_UTILITIES, document.get(cls.KEY_UTILITIES), UtilityMatrix)
        outcome_labels = cls._parse_labels(cls.KEY_OUTCOMES, document.get(cls.KEY_OUTCOMES))
        agent_labels = cls._parse_labels(cls.KEY_AGENTS, document.get(cls.KEY_AGENTS))
        try:
            election = Election(
                config=config,
                utilities=utilities,
                outcome_labels=outcome_labels,
                agent_labels=agent_labels,
            )
        except QVError as exc:
            field = {"outcome_labels": cls.KEY_OUTCOMES, "agent_labels": cls.KEY_AGENTS}.get(
                getattr(exc, "what", None), cls.KEY_UTILITIES)
            raise ElectionFileError(field, str(exc)) from exc

        profile = None
        if document.get(cls.KEY_PROFILE) is not None:
            profile = cls._parse_matrix(cls.KEY_PROFILE, document[cls.KEY_PROFILE], StrategyProfile)
            if profile.shape != utilities.shape:
                raise ElectionFileError(
                    cls.KEY_PROFILE, f"shape {profile.shape} does not match utilities {utilities.shape}")
            if isinstance(config, FixedBudget):
                for agent, fits in enumerate(ElectionCalculator.validate_budget(profile, config.budget)):
                    if not fits:
                        spent = ElectionCalculator.cost(profile.row(agent))
                        raise ElectionFileError(
                            cls.KEY_PROFILE, f"agent {agent} spends {spent} credits, budget is {config.budget}")
        return ElectionFile(election=election, profile=profile)

    @classmethod
    def dump(cls, election: Election, profile: StrategyProfile | None = None) -> dict:
        document = {cls.KEY_VARIANT: election.config.variant}
        if isinstance(election.config, NoBudget):
            document[cls.KEY_ALPHA] = str(election.config.alpha)
        else:
            document[cls.KEY_BUDGET] = election.config.budget
        document[cls.KEY_UTILITIES] = election.utilities.to_lists()
        if profile is not None:
            document[cls.KEY_PROFILE] = profile.to_lists()
        if election.outcome_labels is not None:
            document[cls.KEY_OUTCOMES] = list(election.outcome_labels)
        if election.agent_labels is not None:
            document[cls.KEY_AGENTS] = list(election.agent_labels)
        return document

    @classmethod
    def save(cls, path, election: Election, profile: StrategyProfile | None = None) -> None:
        path = Path(path)
        if path.suffix.lower() == ".xlsx":
            cls._write_workbook(path, election, profile)
        else:
            path.write_text(json.dumps(cls.dump(election, profile), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def _read_workbook(cls, path: Path) -> dict:
        sheets = pd.read_excel(path, sheet_name=None, engine="openpyxl")
        sheets = {name.strip().lower(): frame for name, frame in sheets.items()}
        for required in (cls.SHEET_CONFIG, cls.SHEET_UTILITIES):
            if required not in sheets:
                raise ElectionFileError(required, f"workbook {path.name} has no {required} sheet")

        config = sheets[cls.SHEET_CONFIG]
        config.columns = config.columns.astype(str).str.strip().str.lower()
        if not {"key", "value"} <= set(config.columns):
            raise ElectionFileError(cls.SHEET_CONFIG, "sheet needs key and value columns")
        document = {}
        for _, row in config.dropna(subset=["key"]).iterrows():
            key, value = str(row["key"]).strip(), row["value"]
            value = int(value) if key == cls.KEY_BUDGET else str(value).strip()
            document[key] = value

        utilities = sheets[cls.SHEET_UTILITIES].set_index(sheets[cls.SHEET_UTILITIES].columns[0])
        document[cls.KEY_UTILITIES] = cls._frame_rows(cls.KEY_UTILITIES, utilities)
        document[cls.KEY_OUTCOMES] = [str(name).strip() for name in utilities.columns]
        document[cls.KEY_AGENTS] = [str(name).strip() for name in utilities.index]
        if cls.SHEET_PROFILE in sheets:
            profile = sheets[cls.SHEET_PROFILE].set_index(sheets[cls.SHEET_PROFILE].columns[0])
            document[cls.KEY_PROFILE] = cls._frame_rows(cls.KEY_PROFILE, profile)
        return document

    @classmethod
    def _write_workbook(cls, path: Path, election: Election, profile: StrategyProfile | None) -> None:
        outcomes = [election.outcome_name(outcome) for outcome in range(election.n_outcomes)]
        agents = pd.Index([election.agent_name(agent) for agent in range(election.n_agents)], name="agent")
        config = [(cls.KEY_VARIANT, election.config.variant)]
        if isinstance(election.config, NoBudget):
            config.append((cls.KEY_ALPHA, str(election.config.alpha)))
        else:
            config.append((cls.KEY_BUDGET, election.config.budget))
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            pd.DataFrame(config, columns=["key", "value"]).to_excel(writer, sheet_name=cls.SHEET_CONFIG, index=False)
            pd.DataFrame(election.utilities.to_lists(), index=agents, columns=outcomes).to_excel(
                writer, sheet_name=cls.SHEET_UTILITIES)
            if profile is not None:
                pd.DataFrame(profile.to_lists(), index=agents, columns=outcomes).to_excel(
                    writer, sheet_name=cls.SHEET_PROFILE)

    @staticmethod
    def _frame_rows(field: str, frame: pd.DataFrame) -> list[list[int]]:
        if frame.isna().any().any():
            raise ElectionFileError(field, "sheet has empty cells")
        numeric = frame.apply(pd.to_numeric, errors="coerce")
        if numeric.isna().any().any() or (numeric % 1 != 0).any().any():
            raise ElectionFileError(field, "sheet holds non-integer entries")
        return numeric.astype("int64").values.tolist()

    @staticmethod
    def _parse_alpha(value) -> Fraction:
        if value is None:
            raise ElectionFileError("alpha", "required for a no_budget election")
        if isinstance(value, bool) or not isinstance(value, (str, Integral)):
            raise ElectionFileError("alpha", f'must be a rational written as "p/q", got {value!r}')
        try:
            alpha = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ElectionFileError("alpha", f"cannot read {value!r} as a rational") from exc
        if alpha <= 0:
            raise ElectionFileError("alpha", f"must be positive, got {alpha}")
        return alpha

    @staticmethod
    def _parse_matrix(field: str, rows, matrix_type):
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise ElectionFileError(field, "must be an array of integer arrays")
        try:
            return matrix_type.from_rows(rows)
        except QVError as exc:
            raise ElectionFileError(field, str(exc)) from exc

    @staticmethod
    def _parse_labels(field: str, labels) -> tuple[str, ...] | None:
        if labels is None:
            return None
        if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
            raise ElectionFileError(field, "must be an array of names")
        return tuple(labels)
