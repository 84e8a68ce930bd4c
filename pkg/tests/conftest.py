from __future__ import annotations

import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from sievelab import settings as settings_module
from sievelab.fixtures import FIXTURES, fixture
from sievelab.workspace import Workspace, parse_workspace


def load_fixture(name: str) -> Workspace:
    return parse_workspace(fixture(name), source=name)


def write_settings(path: Path, caps: dict[str, int] | None = None, log_config: str | None = None) -> Path:
    lines = ["caps:"]
    for key, value in (caps or {}).items():
        lines.append(f"  {key}: {value}")
    if len(lines) == 1:
        lines[0] = "caps: {}"
    if log_config is not None:
        lines.append(f'log_config: "{log_config}"')
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    path = write_settings(tmp_path / "settings.yml", log_config=str(tmp_path / "no-logging.yml"))
    monkeypatch.setenv("SIEVELAB_SETTINGS_FILE", str(path))
    monkeypatch.setattr(settings_module, "_settings", None)
    return path


@pytest.fixture()
def cat_1() -> Workspace:
    return load_fixture("cat_1")


@pytest.fixture()
def gamma() -> Workspace:
    return load_fixture("cat_gamma")


@pytest.fixture()
def l3() -> Workspace:
    return load_fixture("cat_l3")


@pytest.fixture()
def diamond() -> Workspace:
    return load_fixture("cat_diamond")


@pytest.fixture()
def mon_e() -> Workspace:
    return load_fixture("mon_e")


@pytest.fixture(params=sorted(FIXTURES))
def zoo(request: pytest.FixtureRequest) -> Workspace:
    return load_fixture(request.param)
