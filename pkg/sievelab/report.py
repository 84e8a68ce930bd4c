from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from . import audits
from .checks import Section, TheoremAudit
from .errors import InputError
from .settings import get_version
from .workspace import Workspace


logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"

# command -> number of positional arguments
COMMANDS: dict[str, int] = {
    "validate": 0,
    "omega": 0,
    "ideals": 0,
    "ideal-audit": 1,
    "admissible-audit": 1,
    "action-audit": 1,
    "equivariance": 2,
    "demorgan": 1,
    "family-audit": 1,
    "full-audit": 0,
}

_env = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)
_env.filters["dump"] = lambda value: json.dumps(value, sort_keys=True, ensure_ascii=False)


def _canonical(value: Any) -> Any:
    """Make a value JSON-ready: tuples become lists, sets become sorted lists."""
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((_canonical(v) for v in value), key=lambda v: json.dumps(v, sort_keys=True, ensure_ascii=False))
    return value


@dataclass
class Report:
    workspace: str
    command: str
    args: list[str]
    sections: list[Section] = field(default_factory=list)
    audits: list[TheoremAudit] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sections) and all(a.passed for a in self.audits)

    def failures(self) -> list[str]:
        out = [
            f"{s.title}: {c.name}"
            for s in self.sections
            for c in s.checks
            if c.counts and not c.passed
        ]
        out.extend(a.theorem for a in self.audits if not a.passed)
        return out

    def as_dict(self) -> dict[str, Any]:
        return _canonical(
            {
                "sievelab": get_version(),
                "workspace": self.workspace,
                "command": self.command,
                "args": self.args,
                "passed": self.passed,
                "sections": [s.as_dict() for s in self.sections],
                "theorem_audits": [a.as_dict() for a in self.audits],
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def render_text(self) -> str:
        template = _env.get_template("report.txt.j2")
        return template.render(report=self, data=self.as_dict())


def run(ws: Workspace, command: str, args: Sequence[str] = ()) -> Report:
    """Dispatch one command against a loaded workspace."""
    if command not in COMMANDS:
        raise InputError(f"Unknown command '{command}'; expected one of {sorted(COMMANDS)}")
    args = list(args)
    if len(args) != COMMANDS[command]:
        raise InputError(f"'{command}' takes {COMMANDS[command]} argument(s), got {len(args)}")

    if command == "validate":
        outcome = audits.validate_analysis(ws)
    elif command == "omega":
        outcome = audits.omega_analysis(ws)
    elif command == "ideals":
        outcome = audits.ideals_analysis(ws)
    elif command == "ideal-audit":
        outcome = audits.ideal_audit(ws, ws.ideal(args[0]))
    elif command == "admissible-audit":
        outcome = audits.admissible_audit(ws, ws.admissible(args[0]))
    elif command == "action-audit":
        outcome = audits.action_audit(ws, ws.admissible(args[0]))
    elif command == "equivariance":
        outcome = audits.equivariance_analysis(ws, args[0], ws.admissible(args[1]))
    elif command == "demorgan":
        outcome = audits.demorgan_analysis(ws, args[0])
    elif command == "family-audit":
        outcome = audits.family_audit(ws, ws.family(args[0]))
    else:
        outcome = audits.full_audit(ws)

    report = Report(ws.source, command, args, outcome.sections, outcome.audits)
    logger.info("%s %s: %s", command, " ".join(args), "pass" if report.passed else "fail")
    return report
