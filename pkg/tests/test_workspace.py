from __future__ import annotations

import json
from pathlib import Path

import pytest

from sievelab.errors import CapExceededError, InputError, ResolutionError, ValidationFailed
from sievelab.fixtures import FIXTURES, fixture, write_fixtures
from sievelab.workspace import dump_workspace, load_workspace, parse_workspace


def test_generator_forms_load(zoo) -> None:
    assert zoo.cat.objects
    assert set(zoo.omega.cat.objects) == set(zoo.cat.objects)


def test_explicit_round_trip(zoo) -> None:
    again = parse_workspace(json.loads(json.dumps(dump_workspace(zoo))), source="dumped")
    assert again.cat == zoo.cat
    assert again.ideals == zoo.ideals
    assert again.classes == zoo.classes
    assert again.families == zoo.families
    assert again.presheaves == zoo.presheaves


def test_dump_keeps_class_keywords(l3) -> None:
    doc = dump_workspace(l3)
    assert doc["admissible_classes"]["Sub"] == "all-monos"
    assert doc["admissible_classes"]["M_L3"] == ["1≤1", "x≤x", "x≤y", "y≤y"]
    assert doc["identities"] == {"x": "x≤x", "y": "y≤y", "1": "1≤1"}


def test_explicit_gamma() -> None:
    ws = parse_workspace(
        {
            "objects": ["N", "A"],
            "morphisms": [{"name": "s", "dom": "N", "cod": "A"}, {"name": "t", "dom": "N", "cod": "A"}],
            "ideals": {"I_prime": {"N": ["id_N"], "A": ["s", "t"]}},
        }
    )
    assert len(ws.cat) == 4
    assert ws.ideal("I_prime").describe() == {"N": ["id_N"], "A": ["s", "t"]}


def test_exactly_one_category_form() -> None:
    with pytest.raises(InputError, match="exactly one"):
        parse_workspace({"generator": {"kind": "gamma"}, "objects": ["N"]})
    with pytest.raises(InputError, match="exactly one"):
        parse_workspace({"ideals": {}})


def test_unknown_keys_are_rejected() -> None:
    with pytest.raises(InputError, match="colour"):
        parse_workspace({"generator": {"kind": "terminal"}, "colour": "blue"})


def test_monoid_table_gap_is_an_input_error() -> None:
    doc = {"generator": {"kind": "monoid", "elements": ["a", "b"], "table": {"a": {"a": "a"}}}}
    with pytest.raises(InputError, match="missing the product"):
        parse_workspace(doc)


def test_invalid_ideal_is_rejected() -> None:
    doc = fixture("cat_l3")
    doc["ideals"] = {"broken": {"x": ["x≤x"]}}
    with pytest.raises(ValidationFailed, match="broken"):
        parse_workspace(doc)


def test_non_admissible_class_is_rejected() -> None:
    doc = fixture("cat_gamma")
    doc["admissible_classes"] = {"Sub": "all-monos"}
    with pytest.raises(ValidationFailed, match="no pullback"):
        parse_workspace(doc)


def test_unknown_names(l3) -> None:
    with pytest.raises(ResolutionError, match="nope"):
        l3.ideal("nope")
    with pytest.raises(ResolutionError):
        l3.admissible("nope")
    with pytest.raises(ResolutionError):
        l3.family("nope")
    doc = fixture("cat_l3")
    doc["ideals"] = {"typo": {"y": ["x≤z"]}}
    with pytest.raises(InputError):
        parse_workspace(doc)


def test_cap_precedence() -> None:
    doc = fixture("cat_l3")
    doc["caps"] = {"max_morphisms": 3}
    with pytest.raises(CapExceededError):
        parse_workspace(doc)
    ws = parse_workspace(doc, {"max_morphisms": 10})
    assert ws.caps.max_morphisms == 10
    assert ws.cap_overrides == {"max_morphisms": 3}


def test_unknown_cap_key() -> None:
    with pytest.raises(InputError, match="Unknown cap"):
        parse_workspace(fixture("cat_1"), {"max_apples": 1})


def test_load_reports_json_position(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text('{"generator": {"kind": "gamma"},\n  "ideals": }\n', encoding="utf-8")
    with pytest.raises(InputError, match="line 2"):
        load_workspace(path)
    with pytest.raises(InputError, match="Cannot read"):
        load_workspace(tmp_path / "missing.json")


def test_written_fixtures_load(tmp_path: Path) -> None:
    paths = write_fixtures(tmp_path)
    assert sorted(p.stem for p in paths) == sorted(FIXTURES)
    ws = load_workspace(tmp_path / "cat_l3.json")
    assert ws.source.endswith("cat_l3.json")
    assert set(ws.classes) == {"M_L3", "Sub"}


def test_fixture_copies_are_independent() -> None:
    first = fixture("cat_1")
    first["ideals"].clear()
    assert fixture("cat_1")["ideals"]
    with pytest.raises(KeyError):
        fixture("cat_2")
