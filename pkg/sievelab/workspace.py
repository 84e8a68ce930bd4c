from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Mapping

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .action import TranslationFamily, validate_family
from .admissible import ALL_MONOS, IDENTITIES, AdmissibleClass, validate_admissible
from .category import CategoryDescription, FinCat, Morphism
from .errors import InputError, ResolutionError, StructureError
from .generators import gamma_description, monoid_description, poset_description, terminal_description
from .ideals import Ideal, validate_ideal
from .omega import OmegaPresheaf, build_omega
from .presheaf import Presheaf, validate_presheaf
from .settings import Caps, default_caps


logger = logging.getLogger(__name__)


class GeneratorIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["poset", "monoid", "gamma", "terminal"]
    le: list[list[str]] = []
    objects: list[str] | None = None
    elements: list[str] = []
    table: dict[str, dict[str, str]] = {}
    unit: str = "1"


class MorphismIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    dom: str
    cod: str


class CompositionIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    g: str
    f: str
    gf: str


class PresheafIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sets: dict[str, list[str]]
    restrictions: dict[str, dict[str, str]] = {}


class WorkspaceIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generator: GeneratorIn | None = None
    objects: list[str] | None = None
    morphisms: list[MorphismIn] = []
    composition: list[CompositionIn] = []
    identities: dict[str, str] = {}
    ideals: dict[str, dict[str, list[str]]] = {}
    admissible_classes: dict[str, list[str] | Literal["all-monos", "identities"]] = {}
    families: dict[str, dict[str, str]] = {}
    presheaves: dict[str, PresheafIn] = {}
    caps: dict[str, int] = {}

    @model_validator(mode="after")
    def _one_category(self) -> WorkspaceIn:
        if (self.generator is None) == (self.objects is None):
            raise ValueError("give exactly one of 'generator' or 'objects'")
        if self.generator is not None and (self.morphisms or self.composition or self.identities):
            raise ValueError("'morphisms', 'composition' and 'identities' only go with 'objects'")
        return self


@dataclass
class Workspace:
    cat: FinCat
    omega: OmegaPresheaf
    caps: Caps
    ideals: dict[str, Ideal] = field(default_factory=dict)
    classes: dict[str, AdmissibleClass] = field(default_factory=dict)
    families: dict[str, TranslationFamily] = field(default_factory=dict)
    presheaves: dict[str, Presheaf] = field(default_factory=dict)
    cap_overrides: dict[str, int] = field(default_factory=dict)
    source: str = "<memory>"

    def ideal(self, name: str) -> Ideal:
        return _lookup(self.ideals, name, "ideal")

    def admissible(self, name: str) -> AdmissibleClass:
        return _lookup(self.classes, name, "admissible class")

    def family(self, name: str) -> TranslationFamily:
        return _lookup(self.families, name, "family")


def _lookup(table: Mapping[str, Any], name: str, what: str) -> Any:
    try:
        return table[name]
    except KeyError:
        raise ResolutionError(f"Unknown {what} '{name}'; known: {sorted(table)}") from None


def _schema_message(err: ValidationError) -> str:
    parts = []
    for item in err.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<top>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def _description(model: WorkspaceIn) -> CategoryDescription:
    gen = model.generator
    if gen is not None:
        if gen.kind == "poset":
            return poset_description(gen.le, gen.objects)
        if gen.kind == "monoid":
            return monoid_description(gen.elements, gen.table, gen.unit)
        if gen.kind == "gamma":
            return gamma_description()
        return terminal_description()
    composition: dict[tuple[str, str], str] = {}
    for entry in model.composition:
        if (entry.g, entry.f) in composition:
            raise StructureError(f"Composition of ({entry.g}, {entry.f}) is listed twice")
        composition[(entry.g, entry.f)] = entry.gf
    return CategoryDescription(
        objects=list(model.objects or []),
        morphisms=[Morphism(m.name, m.dom, m.cod) for m in model.morphisms],
        composition=composition,
        identity_names=dict(model.identities),
    )


def parse_workspace(
    data: Any,
    cap_overrides: Mapping[str, Any] | None = None,
    source: str = "<memory>",
) -> Workspace:
    """Validate a workspace document and build every structure it names."""
    try:
        model = WorkspaceIn.model_validate(data)
    except ValidationError as err:
        raise InputError(f"Workspace {source} does not match the schema: {_schema_message(err)}") from None

    caps = default_caps().merged(model.caps).merged(cap_overrides)
    cat = FinCat(_description(model), caps)
    omega = build_omega(cat, caps)
    ws = Workspace(cat=cat, omega=omega, caps=caps, cap_overrides=dict(model.caps), source=source)

    for name, members in model.ideals.items():
        ideal = Ideal.from_names(omega, name, members)
        validate_ideal(ideal).raise_if_invalid()
        ws.ideals[name] = ideal

    for name, entry in model.admissible_classes.items():
        if entry == ALL_MONOS:
            cls = AdmissibleClass.all_monos(cat, name)
        elif entry == IDENTITIES:
            cls = AdmissibleClass.identities(cat, name)
        else:
            cls = AdmissibleClass.from_names(cat, name, entry)
        validate_admissible(cls).raise_if_invalid()
        ws.classes[name] = cls

    for name, arrows in model.families.items():
        family = TranslationFamily.from_names(cat, name, arrows)
        validate_family(family, omega).raise_if_invalid()
        ws.families[name] = family

    for name, entry in model.presheaves.items():
        tables = {cat.index(m): table for m, table in entry.restrictions.items()}
        presheaf = Presheaf(cat, entry.sets, tables, name=name)
        validate_presheaf(presheaf).raise_if_invalid()
        ws.presheaves[name] = presheaf

    logger.info(
        "workspace %s: %d objects, %d morphisms, %d ideals, %d classes, %d families",
        source,
        len(cat.objects),
        len(cat),
        len(ws.ideals),
        len(ws.classes),
        len(ws.families),
    )
    return ws


def load_workspace(path: Path, cap_overrides: Mapping[str, Any] | None = None) -> Workspace:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"Cannot read workspace {path}: {err.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(
            f"Workspace {path} is not valid JSON: {err.msg} at line {err.lineno}, column {err.colno}"
        ) from None
    return parse_workspace(data, cap_overrides, source=str(path))


def dump_workspace(ws: Workspace) -> dict[str, Any]:
    """The explicit JSON form of a loaded workspace."""
    cat = ws.cat
    morphisms = []
    composition = []
    for f, fm in enumerate(cat.morphisms):
        if cat.is_identity(f):
            continue
        morphisms.append({"name": fm.name, "dom": fm.dom, "cod": fm.cod})
        for g in cat.out_of(fm.cod):
            if not cat.is_identity(g):
                composition.append({"g": cat.name(g), "f": fm.name, "gf": cat.name(cat.compose(g, f))})

    classes: dict[str, Any] = {}
    for name, cls in ws.classes.items():
        classes[name] = cls.keyword or cls.describe()

    presheaves = {}
    for name, presheaf in ws.presheaves.items():
        presheaves[name] = {
            "sets": {o: list(presheaf.at(o)) for o in cat.objects},
            "restrictions": {
                m.name: presheaf.restriction_table(f)
                for f, m in enumerate(cat.morphisms)
                if not cat.is_identity(f)
            },
        }

    doc: dict[str, Any] = {
        "objects": list(cat.objects),
        "identities": {o: cat.name(cat.identity(o)) for o in cat.objects},
        "morphisms": morphisms,
        "composition": composition,
        "ideals": {name: ideal.describe() for name, ideal in ws.ideals.items()},
        "admissible_classes": classes,
        "families": {name: family.describe() for name, family in ws.families.items()},
        "presheaves": presheaves,
    }
    if ws.cap_overrides:
        doc["caps"] = dict(ws.cap_overrides)
    return doc
