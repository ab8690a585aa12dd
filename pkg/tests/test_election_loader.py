import json
from fractions import Fraction

import pytest

from utils.election_loader import ElectionLoader
from utils.errors import ElectionFileError
from utils.models import FixedBudget, NoBudget

SAMPLE_DOCUMENT = {
    "variant": "no_budget",
    "alpha": "3/2",
    "outcomes": ["w1", "w2", "w3"],
    "agents": ["A", "B", "C"],
    "utilities": [[10, 0, 0], [0, 12, -20], [2, 2, 14]],
    "profile": [[6, -3, 1], [-4, 5, -10], [1, 1, 7]],
}


def with_changes(**changes):
    """Copy of the sample document; a change to None drops the key."""
    document = dict(SAMPLE_DOCUMENT)
    for key, value in changes.items():
        if value is None:
            document.pop(key, None)
        else:
            document[key] = value
    return document


def test_load_sample(data_dir):
    loaded = ElectionLoader.load(data_dir / "table2.qv.json")
    assert loaded.election.config == NoBudget(Fraction(1))
    assert loaded.election.outcome_name(2) == "w3"
    assert loaded.profile.row(1) == (-4, 5, -10)
    assert ElectionLoader.load(data_dir / "table2.qv.json") is loaded


def test_budget_sample_fits(data_dir):
    loaded = ElectionLoader.load(data_dir / "table4-budget.qv.json")
    assert loaded.election.config == FixedBudget(16)
    assert loaded.profile.n_agents == 31


def test_parse_dump_parse_is_identity():
    parsed = ElectionLoader.parse(SAMPLE_DOCUMENT)
    assert parsed.election.config.alpha == Fraction(3, 2)
    assert ElectionLoader.dump(parsed.election, parsed.profile) == SAMPLE_DOCUMENT
    assert ElectionLoader.parse(ElectionLoader.dump(parsed.election, parsed.profile)) == parsed


def test_json_file_round_trip(tmp_path):
    parsed = ElectionLoader.parse(SAMPLE_DOCUMENT)
    path = tmp_path / "copy.qv.json"
    ElectionLoader.save(path, parsed.election, parsed.profile)
    assert json.loads(path.read_text(encoding="utf-8")) == SAMPLE_DOCUMENT
    assert ElectionLoader.load(path) == parsed


def test_workbook_round_trip(tmp_path):
    parsed = ElectionLoader.parse(with_changes(variant="fixed_budget", alpha=None, budget=200))
    path = tmp_path / "election.xlsx"
    ElectionLoader.save(path, parsed.election, parsed.profile)
    assert ElectionLoader.load(path) == parsed


@pytest.mark.parametrize("changes, field", [
    ({"alpha": None}, "alpha"),
    ({"alpha": 0.5}, "alpha"),
    ({"alpha": "-1/2"}, "alpha"),
    ({"budget": 4}, "budget"),
    ({"variant": "ranked"}, "variant"),
    ({"utilities": [[1, 2], [3]]}, "utilities"),
    ({"profile": [[1, 2, 3]]}, "profile"),
    ({"outcomes": ["w1"]}, "outcomes"),
    ({"agents": "ABC"}, "agents"),
    ({"variant": "fixed_budget", "alpha": None, "budget": 100}, "profile"),
    ({"variant": "fixed_budget", "alpha": None, "budget": -1}, "budget"),
])
def test_invalid_documents_name_the_field(changes, field):
    document = with_changes(**changes)
    with pytest.raises(ElectionFileError) as info:
        ElectionLoader.parse(document)
    assert info.value.field == field


def test_missing_file(tmp_path):
    with pytest.raises(ElectionFileError) as info:
        ElectionLoader.load(tmp_path / "absent.qv.json")
    assert info.value.field == "path"


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.qv.json"
    path.write_text("{", encoding="utf-8")
    with pytest.raises(ElectionFileError) as info:
        ElectionLoader.load(path)
    assert info.value.field == "document"
