from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Protocol

from .bitsets import bits, mask_of
from .errors import CompositionError, ResolutionError, StructureError, ValidationFailed
from .settings import Caps, default_caps


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Morphism:
    name: str
    dom: str
    cod: str


@dataclass
class CategoryDescription:
    """Raw category data: non-identity arrows plus explicit composites ``(g, f) -> g∘f``."""

    objects: list[str]
    morphisms: list[Morphism]
    composition: dict[tuple[str, str], str] = field(default_factory=dict)
    identity_names: dict[str, str] = field(default_factory=dict)

    def identity_name(self, obj: str) -> str:
        return self.identity_names.get(obj, f"id_{obj}")


@dataclass
class ValidationReport:
    subject: str
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)

    def raise_if_invalid(self) -> None:
        if self.violations:
            raise ValidationFailed(self.subject, self.violations)


class ArrowClass(Protocol):
    def contains(self, f: int) -> bool: ...


def _normalize(name: str) -> str:
    return name.replace("<=", "≤")


class _Draft:
    """Tabulate a description and collect every axiom violation."""

    def __init__(self, desc: CategoryDescription, caps: Caps) -> None:
        self.report = ValidationReport("category")
        objects = list(desc.objects)
        if len(set(objects)) != len(objects):
            dupes = sorted({o for o in objects if objects.count(o) > 1})
            raise StructureError(f"Duplicate object(s) {dupes}")
        object_set = set(objects)

        arrows = [Morphism(desc.identity_name(o), o, o) for o in objects]
        for m in desc.morphisms:
            for end in (m.dom, m.cod):
                if end not in object_set:
                    raise StructureError(f"Morphism '{m.name}' references unknown object '{end}'")
            arrows.append(Morphism(_normalize(m.name), m.dom, m.cod))
        caps.check("max_morphisms", len(arrows), "loading category")

        self.index: dict[str, int] = {}
        for i, m in enumerate(arrows):
            if m.name in self.index:
                raise StructureError(f"Duplicate morphism name '{m.name}'")
            self.index[m.name] = i
        self.objects = objects
        self.arrows = arrows
        self.identity = {o: i for i, o in enumerate(objects)}

        explicit: dict[tuple[int, int], int] = {}
        for (g_name, f_name), gf_name in desc.composition.items():
            g, f, gf = (self._resolve(n) for n in (g_name, f_name, gf_name))
            if arrows[f].cod != arrows[g].dom:
                self.report.add(f"composition entry for non-composable pair ({arrows[g].name}, {arrows[f].name})")
                continue
            explicit[(g, f)] = gf

        table: dict[tuple[int, int], int] = {}
        for g, gm in enumerate(arrows):
            for f, fm in enumerate(arrows):
                if fm.cod != gm.dom:
                    continue
                if (g, f) in explicit:
                    gf = explicit[(g, f)]
                elif f == self.identity[fm.dom]:
                    gf = g
                elif g == self.identity[gm.cod]:
                    gf = f
                else:
                    self.report.add(f"missing composite {gm.name}∘{fm.name}")
                    continue
                got = arrows[gf]
                if got.dom != fm.dom or got.cod != gm.cod:
                    self.report.add(
                        f"composite {gm.name}∘{fm.name} = {got.name} has type "
                        f"{got.dom}→{got.cod}, expected {fm.dom}→{gm.cod}"
                    )
                    continue
                table[(g, f)] = gf
        self.table = table
        if self.report.valid:
            self._check_laws()

    def _resolve(self, name: str) -> int:
        key = _normalize(name)
        if key in self.index:
            return self.index[key]
        if key.startswith("id_") and key[3:] in self.identity:
            return self.identity[key[3:]]
        raise StructureError(f"Composition references unknown morphism '{name}'")

    def _check_laws(self) -> None:
        arrows, table = self.arrows, self.table
        for f, fm in enumerate(arrows):
            left = self.identity[fm.dom]
            right = self.identity[fm.cod]
            if table[(f, left)] != f:
                self.report.add(f"identity-law violation at ({fm.name}, {arrows[left].name})")
            if table[(right, f)] != f:
                self.report.add(f"identity-law violation at ({arrows[right].name}, {fm.name})")
        for (h, g), hg in table.items():
            for f, fm in enumerate(arrows):
                if fm.cod != arrows[g].dom:
                    continue
                if table[(hg, f)] != table[(h, table[(g, f)])]:
                    self.report.add(
                        f"associativity failure at ({arrows[h].name}, {arrows[g].name}, {fm.name})"
                    )


def validate_category(desc: CategoryDescription, caps: Caps | None = None) -> ValidationReport:
    """Check totality of composition, identity laws and associativity."""
    return _Draft(desc, caps or default_caps()).report


class FinCat:
    """A validated finite category with integer-indexed morphisms and eager pullbacks."""

    def __init__(self, desc: CategoryDescription, caps: Caps | None = None) -> None:
        draft = _Draft(desc, caps or default_caps())
        draft.report.raise_if_invalid()
        self.description = desc
        self.objects: tuple[str, ...] = tuple(draft.objects)
        self.morphisms: tuple[Morphism, ...] = tuple(draft.arrows)
        self._index = draft.index
        self._identity = draft.identity
        self._table = draft.table

        self._into: dict[str, tuple[int, ...]] = {o: () for o in self.objects}
        self._out: dict[str, tuple[int, ...]] = {o: () for o in self.objects}
        self._hom: dict[tuple[str, str], tuple[int, ...]] = {
            (a, b): () for a in self.objects for b in self.objects
        }
        for i, m in enumerate(self.morphisms):
            self._into[m.cod] += (i,)
            self._out[m.dom] += (i,)
            self._hom[(m.dom, m.cod)] += (i,)
        self._into_mask = {o: mask_of(arrows) for o, arrows in self._into.items()}
        # (g, h∘g) for every g into dom h
        self._precomp: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple((g, self._table[(h, g)]) for g in self._into[m.dom])
            for h, m in enumerate(self.morphisms)
        )
        self._key = (
            self.objects,
            self.morphisms,
            tuple(sorted(self._table.items())),
        )
        self._hash = hash(self._key)
        self._cone_cache: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.limits = LimitTable(self)
        logger.debug(
            "category loaded: %d objects, %d morphisms, %d pullbacks",
            len(self.objects),
            len(self.morphisms),
            len(self.limits.squares),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinCat) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FinCat(objects={list(self.objects)}, morphisms={len(self.morphisms)})"

    def __len__(self) -> int:
        return len(self.morphisms)

    def index(self, name: str) -> int:
        key = _normalize(name)
        if key in self._index:
            return self._index[key]
        if key.startswith("id_") and key[3:] in self._identity:
            return self._identity[key[3:]]
        raise ResolutionError(f"Unknown morphism '{name}'")

    def name(self, f: int) -> str:
        return self.morphisms[f].name

    def names(self, arrows: Iterable[int]) -> list[str]:
        return [self.morphisms[f].name for f in arrows]

    def dom(self, f: int) -> str:
        return self.morphisms[f].dom

    def cod(self, f: int) -> str:
        return self.morphisms[f].cod

    def require_object(self, obj: str) -> str:
        if obj not in self._identity:
            raise ResolutionError(f"Unknown object '{obj}'")
        return obj

    def identity(self, obj: str) -> int:
        return self._identity[self.require_object(obj)]

    def is_identity(self, f: int) -> bool:
        return self._identity[self.morphisms[f].dom] == f

    def compose(self, g: int, f: int) -> int:
        """Return g∘f."""
        try:
            return self._table[(g, f)]
        except KeyError:
            raise CompositionError(
                f"{self.name(g)}∘{self.name(f)} is not defined: "
                f"cod {self.name(f)} = {self.cod(f)}, dom {self.name(g)} = {self.dom(g)}"
            ) from None

    def compose_all(self, *arrows: int) -> int:
        """Compose left to right as written: compose_all(h, g, f) = h∘g∘f."""
        result = arrows[-1]
        for g in reversed(arrows[:-1]):
            result = self.compose(g, result)
        return result

    def hom(self, a: str, b: str) -> tuple[int, ...]:
        return self._hom[(a, b)]

    def into(self, obj: str) -> tuple[int, ...]:
        return self._into[obj]

    def out_of(self, obj: str) -> tuple[int, ...]:
        return self._out[obj]

    def into_mask(self, obj: str) -> int:
        return self._into_mask[obj]

    def precomposites(self, h: int) -> tuple[tuple[int, int], ...]:
        return self._precomp[h]

    def members(self, mask: int) -> list[int]:
        return list(bits(mask))

    def cospans(self) -> Iterator[tuple[int, int]]:
        for obj in self.objects:
            for f in self._into[obj]:
                for g in self._into[obj]:
                    yield f, g

    def composable_pairs(self) -> Iterator[tuple[int, int]]:
        """Pairs (s, t) with cod s = dom t."""
        for s, sm in enumerate(self.morphisms):
            for t in self._out[sm.cod]:
                yield s, t


@dataclass(frozen=True)
class PullbackSquare:
    """Pullback of the cospan (f, g); ``f_leg`` = f^{-1}(g) lands in dom f."""

    f: int
    g: int
    apex: str
    f_leg: int
    g_leg: int

    @property
    def diagonal(self) -> tuple[int, int]:
        return self.f, self.f_leg


def _cones(cat: FinCat, f: int, g: int) -> list[tuple[int, int]]:
    cached = cat._cone_cache.get((f, g))
    if cached is not None:
        return cached
    a_obj, b_obj = cat.dom(f), cat.dom(g)
    cones = []
    for x in cat.objects:
        for a in cat.hom(x, a_obj):
            fa = cat.compose(f, a)
            for b in cat.hom(x, b_obj):
                if fa == cat.compose(g, b):
                    cones.append((a, b))
    cat._cone_cache[(f, g)] = cones
    return cones


def _universal(cat: FinCat, p: int, q: int, cones: list[tuple[int, int]]) -> bool:
    apex = cat.dom(p)
    for a, b in cones:
        count = 0
        for u in cat.hom(cat.dom(a), apex):
            if cat.compose(p, u) == a and cat.compose(q, u) == b:
                count += 1
                if count > 1:
                    return False
        if count != 1:
            return False
    return True


def is_pullback(cat: FinCat, f: int, g: int, p: int, q: int) -> bool:
    """Whether (p, q) with p into dom f and q into dom g is a pullback of (f, g)."""
    if cat.dom(p) != cat.dom(q) or cat.cod(p) != cat.dom(f) or cat.cod(q) != cat.dom(g):
        return False
    if cat.compose(f, p) != cat.compose(g, q):
        return False
    return _universal(cat, p, q, _cones(cat, f, g))


class LimitTable:
    """Chosen pullback for every cospan that has one, plus a chosen terminal object."""

    def __init__(self, cat: FinCat) -> None:
        self.squares: dict[tuple[int, int], PullbackSquare] = {}
        self.missing: list[tuple[int, int]] = []
        for f, g in cat.cospans():
            square = self._search(cat, f, g)
            if square is None:
                self.missing.append((f, g))
            else:
                self.squares[(f, g)] = square
        self.terminal = _find_terminal(cat)

    @staticmethod
    def _search(cat: FinCat, f: int, g: int) -> PullbackSquare | None:
        cones = _cones(cat, f, g)
        # cones come out in object order then morphism order: the first universal one is canonical
        for p, q in cones:
            if _universal(cat, p, q, cones):
                return PullbackSquare(f=f, g=g, apex=cat.dom(p), f_leg=p, g_leg=q)
        return None


def _find_terminal(cat: FinCat) -> str | None:
    for t in cat.objects:
        if all(len(cat.hom(x, t)) == 1 for x in cat.objects):
            return t
    return None


def terminal_object(cat: FinCat) -> str | None:
    return cat.limits.terminal


def find_pullback(cat: FinCat, f: int, g: int) -> PullbackSquare | None:
    if cat.cod(f) != cat.cod(g):
        raise CompositionError(f"{cat.name(f)} and {cat.name(g)} do not form a cospan")
    return cat.limits.squares.get((f, g))


def pullback_leg(cat: FinCat, f: int, g: int) -> int | None:
    """f^{-1}(g): the pullback of g along f, an arrow into dom f."""
    square = find_pullback(cat, f, g)
    return None if square is None else square.f_leg


def slice_product(cat: FinCat, f: int, h: int) -> int | None:
    """f×h = f∘f^{-1}(h), the product of f and h in the slice over their codomain."""
    square = find_pullback(cat, f, h)
    if square is None:
        return None
    return cat.compose(f, square.f_leg)


def is_mono(cat: FinCat, f: int) -> bool:
    a = cat.dom(f)
    for x in cat.objects:
        seen: dict[int, int] = {}
        for g in cat.hom(x, a):
            fg = cat.compose(f, g)
            if fg in seen and seen[fg] != g:
                return False
            seen[fg] = g
    return True


def is_iso(cat: FinCat, f: int) -> bool:
    return inverse(cat, f) is not None


def inverse(cat: FinCat, f: int) -> int | None:
    for g in cat.hom(cat.cod(f), cat.dom(f)):
        if cat.is_identity(cat.compose(g, f)) and cat.is_identity(cat.compose(f, g)):
            return g
    return None


def slice_iso(cat: FinCat, f: int, g: int) -> int | None:
    """An isomorphism θ: dom f → dom g with g∘θ = f, if any."""
    if cat.cod(f) != cat.cod(g):
        return None
    for theta in cat.hom(cat.dom(f), cat.dom(g)):
        if cat.compose(g, theta) == f and is_iso(cat, theta):
            return theta
    return None


def slice_isomorphic(cat: FinCat, f: int, g: int) -> bool:
    return f == g or slice_iso(cat, f, g) is not None


def subobject_le(cat: FinCat, m: int, n: int) -> bool:
    """m ≤ n: m factors through n."""
    if cat.cod(m) != cat.cod(n):
        return False
    return any(cat.compose(n, p) == m for p in cat.hom(cat.dom(m), cat.dom(n)))


@dataclass(frozen=True)
class StructuralPredicates:
    right_ore: bool
    finitely_complete: bool
    pullback_completion: bool
    m_pullback_completion: bool | None = None
    witnesses: dict[str, list[str]] = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict[str, bool | None]:
        return {
            "right_ore": self.right_ore,
            "finitely_complete": self.finitely_complete,
            "pullback_completion": self.pullback_completion,
            "m_pullback_completion": self.m_pullback_completion,
        }


def _completes(cat: FinCat, s: int, t: int, m_class: ArrowClass | None) -> bool:
    """Is (s, t) the left and bottom side of some pullback square?"""
    d, f_obj = cat.dom(s), cat.cod(t)
    ts = cat.compose(t, s)
    for x in cat.objects:
        for h in cat.hom(x, f_obj):
            if m_class is not None and not m_class.contains(h):
                continue
            for k in cat.hom(d, x):
                if cat.compose(h, k) == ts and is_pullback(cat, t, h, s, k):
                    return True
    return False


def ore_witness(cat: FinCat) -> tuple[int, int] | None:
    """A cospan with no commuting completion, if any."""
    for f, g in cat.cospans():
        if not _cones(cat, f, g):
            return f, g
    return None


def is_right_ore(cat: FinCat) -> bool:
    return ore_witness(cat) is None


def is_finitely_complete(cat: FinCat) -> bool:
    return cat.limits.terminal is not None and not cat.limits.missing


def structural_predicates(cat: FinCat, m_class: ArrowClass | None = None) -> StructuralPredicates:
    witnesses: dict[str, list[str]] = {}

    ore = ore_witness(cat)
    right_ore = ore is None
    if ore is not None:
        witnesses["right_ore"] = cat.names(ore)

    finitely_complete = is_finitely_complete(cat)
    if cat.limits.missing:
        witnesses["finitely_complete"] = cat.names(cat.limits.missing[0])
    elif cat.limits.terminal is None:
        witnesses["finitely_complete"] = ["no terminal object"]

    def completion(restrict: ArrowClass | None, key: str) -> bool:
        for s, t in cat.composable_pairs():
            if restrict is not None and not restrict.contains(s):
                continue
            if not _completes(cat, s, t, restrict):
                witnesses[key] = cat.names((s, t))
                return False
        return True

    pullback_completion = completion(None, "pullback_completion")
    m_completion = completion(m_class, "m_pullback_completion") if m_class is not None else None
    return StructuralPredicates(
        right_ore=right_ore,
        finitely_complete=finitely_complete,
        pullback_completion=pullback_completion,
        m_pullback_completion=m_completion,
        witnesses=witnesses,
    )
