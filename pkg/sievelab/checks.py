"""Result records shared by the analyses and the report writer."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

VERIFIED = "verified"
HYPOTHESIS_FAILS = "hypothesis fails"
CONCLUSION_ONLY = "conclusion holds, hypothesis fails"
VIOLATED = "violated"
NOT_IMPLIED = "hypothesis holds, conclusion fails"


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: Any = None
    info: bool = False

    @classmethod
    def from_witness(cls, name: str, witness: Any, info: bool = False) -> CheckResult:
        """A check passes when its search found no witness."""
        return cls(name, witness is None, witness, info)

    @property
    def counts(self) -> bool:
        return not self.info

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.info:
            out["info"] = True
        return out


@dataclass
class TheoremAudit:
    """One implication: hypotheses evaluated on the input, conclusion checked exhaustively."""

    theorem: str
    hypotheses: Mapping[str, bool]
    conclusion: bool
    claimed: bool = True
    witness: Any = None

    @property
    def status(self) -> str:
        holds = all(self.hypotheses.values())
        if holds and self.conclusion:
            return VERIFIED
        if holds:
            return VIOLATED if self.claimed else NOT_IMPLIED
        return CONCLUSION_ONLY if self.conclusion else HYPOTHESIS_FAILS

    @property
    def passed(self) -> bool:
        return self.status != VIOLATED

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "theorem": self.theorem,
            "hypotheses": dict(sorted(self.hypotheses.items())),
            "conclusion": self.conclusion,
            "claimed": self.claimed,
            "status": self.status,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Section:
    title: str
    checks: list[CheckResult] = field(default_factory=list)
    facts: dict[str, Any] = field(default_factory=dict)

    def check(self, name: str, passed: bool, witness: Any = None, info: bool = False) -> CheckResult:
        result = CheckResult(name, bool(passed), witness, info)
        self.checks.append(result)
        return result

    def expect_none(self, name: str, witness: Any, info: bool = False) -> CheckResult:
        result = CheckResult.from_witness(name, witness, info)
        self.checks.append(result)
        return result

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.counts)

    def as_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "facts": self.facts,
        }
