from __future__ import annotations

import json
from pathlib import Path

import pytest

from sievelab import main as cli
from sievelab.fixtures import FIXTURES, write_fixtures


@pytest.fixture()
def workspaces(tmp_path: Path) -> Path:
    directory = tmp_path / "workspaces"
    write_fixtures(directory)
    return directory


def test_omega_report_and_json(workspaces: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out = tmp_path / "reports" / "omega.json"
    code = cli.main([str(workspaces / "cat_l3.json"), "omega", "--json", str(out)])
    assert code == cli.EXIT_OK
    assert "result:    PASS" in capsys.readouterr().out
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["passed"] is True
    assert data["sections"][0]["facts"]["sizes"] == {"x": 2, "y": 3, "1": 4}


def test_command_with_argument(workspaces: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = cli.main([str(workspaces / "cat_l3.json"), "equivariance", "notnot", "M_L3"])
    assert code == cli.EXIT_OK
    assert "equivariance notnot M_L3" in capsys.readouterr().out


def test_fixtures_only(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(["--fixtures", str(tmp_path / "out")]) == cli.EXIT_OK
    written = sorted(p.stem for p in (tmp_path / "out").glob("*.json"))
    assert written == sorted(FIXTURES)
    assert len(capsys.readouterr().out.splitlines()) == len(FIXTURES)


def test_bad_json_is_an_input_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert cli.main([str(path), "validate"]) == cli.EXIT_INPUT
    assert "error: " in capsys.readouterr().err


def test_unknown_name_is_an_input_error(workspaces: Path) -> None:
    assert cli.main([str(workspaces / "cat_l3.json"), "ideal-audit", "missing"]) == cli.EXIT_INPUT


def test_cap_override_exceeded(workspaces: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = cli.main([str(workspaces / "cat_l3.json"), "validate", "--cap", "max_morphisms=2"])
    assert code == cli.EXIT_CAP
    assert "max_morphisms" in capsys.readouterr().err


def test_malformed_cap(workspaces: Path) -> None:
    assert cli.main([str(workspaces / "cat_1.json"), "validate", "--cap", "max_morphisms"]) == cli.EXIT_INPUT


def test_missing_command_is_a_usage_error(workspaces: Path) -> None:
    with pytest.raises(SystemExit) as excinfo:
        cli.main([str(workspaces / "cat_1.json")])
    assert excinfo.value.code == 2


def test_parse_caps() -> None:
    assert cli.parse_caps(["max_elements = 10", "max_nat_trans=3"]) == {"max_elements": "10", "max_nat_trans": "3"}
