from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import CapExceededError, InputError


REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_SETTINGS_PATH = REPO_ROOT / "config" / "settings.yml"
DEFAULT_LOG_CONFIG = REPO_ROOT / "config" / "logging.yml"
VERSION_FILE = REPO_ROOT / "version.txt"


@dataclass(frozen=True)
class Caps:
    max_morphisms: int = 64
    max_sieves_per_object: int = 4096
    max_elements: int = 4096
    max_subobjects: int = 4096
    max_nat_trans: int = 256
    max_structures: int = 4096

    def merged(self, overrides: Mapping[str, Any] | None) -> Caps:
        """Return a copy with the given keys replaced."""
        if not overrides:
            return self
        known = {f.name for f in fields(self)}
        values: dict[str, int] = {}
        for key, raw in overrides.items():
            if key not in known:
                raise InputError(f"Unknown cap '{key}'; expected one of {sorted(known)}")
            try:
                value = int(raw)
            except (TypeError, ValueError):
                raise InputError(f"Cap '{key}' must be an integer, got {raw!r}") from None
            if value < 0:
                raise InputError(f"Cap '{key}' must be non-negative, got {value}")
            values[key] = value
        return replace(self, **values)

    def check(self, key: str, count: int, context: str = "") -> None:
        limit = getattr(self, key)
        if count > limit:
            raise CapExceededError(key, limit, count, context)


@dataclass
class Settings:
    caps: Caps
    log_config: Path = DEFAULT_LOG_CONFIG


_settings: Settings | None = None


def load_settings(path: Path | None = None) -> Settings:
    """Load settings from YAML, falling back to defaults for missing keys."""
    global _settings
    if path is None:
        env_path = os.getenv("SIEVELAB_SETTINGS_FILE")
        path = Path(env_path) if env_path else DEFAULT_SETTINGS_PATH
    repo_root = path.resolve().parent.parent
    if path.exists():
        with path.open("r", encoding="utf-8") as f:
            data: dict[str, Any] = yaml.safe_load(f) or {}
    else:
        data = {}

    raw_caps = data.get("caps") or {}
    if not isinstance(raw_caps, dict):
        raise InputError(f"'caps' in {path} must be a mapping")
    caps = Caps().merged(raw_caps)
    log_config = _resolve_path(data.get("log_config", DEFAULT_LOG_CONFIG), repo_root)

    _settings = Settings(caps=caps, log_config=log_config)
    return _settings


def get_settings() -> Settings:
    """Return cached settings, loading defaults if needed."""
    global _settings
    if _settings is None:
        return load_settings()
    return _settings


def default_caps() -> Caps:
    return get_settings().caps


def get_version(path: Path = VERSION_FILE) -> str:
    """The release stamped into reports and `--version`; "unknown" outside a checkout."""
    try:
        return path.read_text(encoding="utf-8").strip() or "unknown"
    except OSError:
        return "unknown"


def _resolve_path(raw_path: Any, repo_root: Path) -> Path:
    """Resolve a configured path, allowing relative paths from repo root."""
    candidate = raw_path if isinstance(raw_path, Path) else Path(str(raw_path))
    if not candidate.is_absolute():
        return repo_root / candidate
    return candidate
