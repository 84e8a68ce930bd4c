"""Command line entry point: ``python -m sievelab.main <workspace.json> <command> [args]``."""
from __future__ import annotations

import argparse
import logging
import logging.config
import sys
from pathlib import Path
from typing import Sequence

import yaml

from .errors import (
    CapExceededError,
    CompletenessError,
    CompositionError,
    InputError,
    TheoremViolation,
)
from .fixtures import write_fixtures
from .report import COMMANDS, run
from .settings import REPO_ROOT, Settings, get_version, load_settings
from .workspace import load_workspace


logger = logging.getLogger("sievelab")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_CAP = 3


def configure_logging(settings: Settings) -> None:
    """Apply the dictConfig file, creating directories for file handlers."""
    path = settings.log_config
    if not path.exists():
        logging.basicConfig(level=logging.WARNING)
        return
    with path.open("r", encoding="utf-8") as f:
        config = yaml.safe_load(f) or {}
    for handler in (config.get("handlers") or {}).values():
        filename = handler.get("filename")
        if not filename:
            continue
        target = Path(filename)
        if not target.is_absolute():
            target = REPO_ROOT / target
        target.parent.mkdir(parents=True, exist_ok=True)
        handler["filename"] = str(target)
    logging.config.dictConfig(config)


def parse_caps(items: Sequence[str]) -> dict[str, str]:
    caps: dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--cap expects key=n, got '{item}'")
        caps[key.strip()] = value.strip()
    return caps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sievelab",
        description="Topologies, ideals and monoid actions on presheaves over finite categories.",
    )
    parser.add_argument("workspace", nargs="?", help="Workspace JSON file")
    parser.add_argument("command", nargs="?", help=f"One of: {', '.join(COMMANDS)}")
    parser.add_argument("args", nargs="*", help="Command arguments (names of ideals, classes, ...)")
    parser.add_argument("--json", metavar="PATH", help="Also write the report as JSON")
    parser.add_argument("--cap", action="append", default=[], metavar="KEY=N", help="Override a size cap")
    parser.add_argument("--fixtures", metavar="DIR", help="Write the builtin workspaces to DIR")
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(load_settings())

    if args.fixtures:
        for path in write_fixtures(Path(args.fixtures)):
            print(path)
        if not args.workspace:
            return EXIT_OK
    if not args.workspace or not args.command:
        parser.error("a workspace file and a command are required")

    try:
        ws = load_workspace(Path(args.workspace), parse_caps(args.cap))
        report = run(ws, args.command, args.args)
    except CapExceededError as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, CompletenessError, CompositionError) as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TheoremViolation as exc:
        logger.error("%s", exc)
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED

    sys.stdout.write(report.render_text())
    if args.json:
        json_path = Path(args.json)
        json_path.parent.mkdir(parents=True, exist_ok=True)
        json_path.write_text(report.to_json(), encoding="utf-8")
    if not report.passed:
        logger.warning("checks failed: %s", "; ".join(report.failures()))
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
