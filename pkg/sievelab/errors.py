"""Exception hierarchy shared by the library and the command line."""
from __future__ import annotations

from typing import Any


class SieveLabError(Exception):
    """Base class for every error raised on purpose by sievelab."""


class InputError(SieveLabError, ValueError):
    """A workspace or argument could not be turned into valid structures."""


class StructureError(InputError):
    """A description references something that does not exist."""


class ResolutionError(InputError):
    """A name given on the command line or in a workspace is unknown."""


class ParentMismatchError(InputError):
    """A subpresheaf was combined with a subpresheaf of another presheaf."""


class ValidationFailed(InputError):
    """A described structure violates its axioms."""

    def __init__(self, what: str, violations: list[str]) -> None:
        self.what = what
        self.violations = list(violations)
        shown = "; ".join(self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"{what} is invalid: {shown}{more}")


class CapExceededError(SieveLabError):
    """An enumeration grew past a configured size cap."""

    def __init__(self, key: str, limit: int, count: int, context: str = "") -> None:
        self.key = key
        self.limit = limit
        self.count = count
        where = f" while {context}" if context else ""
        super().__init__(f"cap '{key}' exceeded{where}: {count} > {limit}")


class CompletenessError(SieveLabError):
    """A pullback needed by a construction does not exist."""

    def __init__(self, f: str, g: str, context: str = "") -> None:
        self.cospan = (f, g)
        where = f" ({context})" if context else ""
        super().__init__(f"no pullback of cospan ({f}, {g}){where}")


class CompositionError(SieveLabError, ValueError):
    """Two arrows or partial maps are not composable."""


class TheoremViolation(SieveLabError, AssertionError):
    """An identity that must hold unconditionally failed on the given data."""

    def __init__(self, claim: str, witness: Any = None) -> None:
        self.claim = claim
        self.witness = witness
        super().__init__(f"{claim} fails; witness: {witness!r}")
