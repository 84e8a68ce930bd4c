"""Lawvere-Tierney topologies, ideals and monoid actions on presheaf toposes over finite categories."""
from __future__ import annotations

from .category import CategoryDescription, FinCat, Morphism
from .errors import (
    CapExceededError,
    CompletenessError,
    CompositionError,
    InputError,
    SieveLabError,
    TheoremViolation,
    ValidationFailed,
)
from .ideals import Ideal, enumerate_ideals, weak_ideal_topology
from .omega import OmegaEndo, Sieve, build_omega, check_weak_topology, double_negation
from .presheaf import Presheaf, Subpresheaf
from .report import Report, run
from .settings import Caps, get_settings, get_version, load_settings
from .workspace import Workspace, load_workspace, parse_workspace

__version__ = get_version()

__all__ = [
    "CapExceededError",
    "Caps",
    "CategoryDescription",
    "CompletenessError",
    "CompositionError",
    "FinCat",
    "Ideal",
    "InputError",
    "Morphism",
    "OmegaEndo",
    "Presheaf",
    "Report",
    "Sieve",
    "SieveLabError",
    "Subpresheaf",
    "TheoremViolation",
    "ValidationFailed",
    "Workspace",
    "__version__",
    "build_omega",
    "check_weak_topology",
    "double_negation",
    "enumerate_ideals",
    "get_settings",
    "get_version",
    "load_settings",
    "load_workspace",
    "parse_workspace",
    "run",
    "weak_ideal_topology",
]
