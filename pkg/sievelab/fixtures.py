"""Builtin workspaces: the small categories every analysis is exercised on."""
from __future__ import annotations

import copy
import json
import logging
from pathlib import Path
from typing import Any


logger = logging.getLogger(__name__)


CAT_1: dict[str, Any] = {
    "generator": {"kind": "terminal"},
    "ideals": {"y": {"*": ["id_*"]}, "0": {}},
    "admissible_classes": {"Sub": "all-monos"},
    "families": {"id": {"*": "id_*"}},
}

CAT_GAMMA: dict[str, Any] = {
    "generator": {"kind": "gamma"},
    "ideals": {
        "I": {},
        "I_prime": {"N": ["id_N"], "A": ["s", "t"]},
    },
    "admissible_classes": {"Id": "identities"},
    "families": {"id": {"N": "id_N", "A": "id_A"}},
}

CAT_L3: dict[str, Any] = {
    "generator": {"kind": "poset", "le": [["x", "y"], ["y", "1"]]},
    "ideals": {
        "y": {"x": ["x≤x"], "y": ["y≤y", "x≤y"], "1": ["1≤1", "x≤1", "y≤1"]},
        "0": {},
        "I_x": {"y": ["x≤y"], "1": ["x≤1"]},
        "down_x": {"x": ["x≤x"], "y": ["x≤y"], "1": ["x≤1"]},
    },
    "admissible_classes": {
        "M_L3": ["x≤x", "y≤y", "1≤1", "x≤y"],
        "Sub": "all-monos",
    },
    "families": {
        "F_L3": {"x": "x≤x", "y": "x≤y", "1": "x≤1"},
        "id": {"x": "x≤x", "y": "y≤y", "1": "1≤1"},
    },
    "presheaves": {
        "const": {
            "sets": {"x": ["p"], "y": ["p"], "1": ["p"]},
            "restrictions": {"x≤y": {"p": "p"}, "x≤1": {"p": "p"}, "y≤1": {"p": "p"}},
        },
    },
}

CAT_DIAMOND: dict[str, Any] = {
    "generator": {"kind": "poset", "le": [["0", "a"], ["0", "b"], ["a", "1"], ["b", "1"]]},
    "ideals": {
        "y": {
            "0": ["0≤0"],
            "a": ["a≤a", "0≤a"],
            "b": ["b≤b", "0≤b"],
            "1": ["1≤1", "0≤1", "a≤1", "b≤1"],
        },
        "bottom": {"0": ["0≤0"], "a": ["0≤a"], "b": ["0≤b"], "1": ["0≤1"]},
    },
    "admissible_classes": {"Sub": "all-monos"},
    "families": {"F_bottom": {"0": "0≤0", "a": "0≤a", "b": "0≤b", "1": "0≤1"}},
}

MON_E: dict[str, Any] = {
    "generator": {"kind": "monoid", "elements": ["e"], "table": {"e": {"e": "e"}}, "unit": "1"},
    "ideals": {"zero": {}, "e": {"*": ["e"]}, "full": {"*": ["1", "e"]}},
    "admissible_classes": {"Sub": "all-monos"},
    "families": {"id": {"*": "1"}},
}

FIXTURES: dict[str, dict[str, Any]] = {
    "cat_1": CAT_1,
    "cat_gamma": CAT_GAMMA,
    "cat_l3": CAT_L3,
    "cat_diamond": CAT_DIAMOND,
    "mon_e": MON_E,
}


def fixture(name: str) -> dict[str, Any]:
    """A fresh copy of a builtin workspace document."""
    try:
        return copy.deepcopy(FIXTURES[name])
    except KeyError:
        raise KeyError(f"Unknown fixture '{name}'; expected one of {sorted(FIXTURES)}") from None


def write_fixtures(directory: Path) -> list[Path]:
    """Write one ``<name>.json`` per builtin workspace."""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, doc in FIXTURES.items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        written.append(path)
    logger.info("wrote %d fixture workspaces to %s", len(written), directory)
    return written
