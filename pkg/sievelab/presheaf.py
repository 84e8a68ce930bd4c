from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .bitsets import bits, is_subset, mask_of, unions_of
from .category import FinCat, ValidationReport
from .errors import ParentMismatchError, StructureError
from .settings import Caps, default_caps


logger = logging.getLogger(__name__)

Element = Hashable
RestrictFn = Callable[[int, Element], Element]


class Presheaf:
    """A finite-set-valued presheaf with tabulated restriction maps.

    ``restrict`` maps a morphism index f: D→C to a table at(C) → at(D); it may also be a
    function ``(f, x) -> y`` which is tabulated once. Identity tables may be omitted.
    """

    def __init__(
        self,
        cat: FinCat,
        at: Mapping[str, Sequence[Element]],
        restrict: Mapping[int, Mapping[Element, Element]] | RestrictFn,
        name: str = "F",
    ) -> None:
        self.cat = cat
        self.name = name
        self._at: dict[str, tuple[Element, ...]] = {}
        for obj in cat.objects:
            values = tuple(at.get(obj, ()))
            if len(set(values)) != len(values):
                raise StructureError(f"Presheaf '{name}' lists a duplicate element at '{obj}'")
            self._at[obj] = values
        unknown = set(at) - set(cat.objects)
        if unknown:
            raise StructureError(f"Presheaf '{name}' mentions unknown object(s) {sorted(unknown)}")

        self._restrict: list[dict[Element, Element]] = []
        for f, m in enumerate(cat.morphisms):
            if callable(restrict):
                table = {x: restrict(f, x) for x in self._at[m.cod]}
            elif f in restrict:
                table = dict(restrict[f])
            elif cat.is_identity(f):
                table = {x: x for x in self._at[m.cod]}
            else:
                raise StructureError(f"Presheaf '{name}' has no restriction map for '{m.name}'")
            targets = set(self._at[m.dom])
            for x in self._at[m.cod]:
                if x not in table:
                    raise StructureError(
                        f"Presheaf '{name}': restriction along '{m.name}' is undefined on {x!r}"
                    )
                if table[x] not in targets:
                    raise StructureError(
                        f"Presheaf '{name}': restriction along '{m.name}' sends {x!r} "
                        f"outside at('{m.dom}')"
                    )
            self._restrict.append(table)

        self._flat: list[tuple[str, Element]] = [(o, x) for o in cat.objects for x in self._at[o]]
        self._pos: dict[tuple[str, Element], int] = {item: i for i, item in enumerate(self._flat)}
        self._obj_mask = {
            o: mask_of(self._pos[(o, x)] for x in self._at[o]) for o in cat.objects
        }
        self._key = (
            cat,
            tuple((o, self._at[o]) for o in cat.objects),
            tuple(tuple(t[x] for x in self._at[cat.cod(f)]) for f, t in enumerate(self._restrict)),
        )
        self._hash = hash(self._key)
        self._principal: list[int] | None = None

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Presheaf) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        sizes = {o: len(v) for o, v in self._at.items()}
        return f"Presheaf({self.name!r}, sizes={sizes})"

    def at(self, obj: str) -> tuple[Element, ...]:
        return self._at[obj]

    def restrict(self, f: int, x: Element) -> Element:
        return self._restrict[f][x]

    def restriction_table(self, f: int) -> dict[Element, Element]:
        return self._restrict[f]

    @property
    def size(self) -> int:
        return len(self._flat)

    def position(self, obj: str, x: Element) -> int:
        return self._pos[(obj, x)]

    def element(self, position: int) -> tuple[str, Element]:
        return self._flat[position]

    def object_mask(self, obj: str) -> int:
        return self._obj_mask[obj]

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def principal_masks(self) -> list[int]:
        """For each element x ∈ F(C), the mask of {F(f)(x) | f into C}."""
        if self._principal is None:
            masks = []
            for obj, x in self._flat:
                masks.append(
                    mask_of(self._pos[(self.cat.dom(f), self._restrict[f][x])] for f in self.cat.into(obj))
                )
            self._principal = masks
        return self._principal


def validate_presheaf(presheaf: Presheaf) -> ValidationReport:
    """Check identity and contravariance of the restriction maps."""
    cat = presheaf.cat
    report = ValidationReport(f"presheaf '{presheaf.name}'")
    for obj in cat.objects:
        ident = cat.identity(obj)
        for x in presheaf.at(obj):
            if presheaf.restrict(ident, x) != x:
                report.add(f"restriction along {cat.name(ident)} moves {x!r}")
    for g, gm in enumerate(cat.morphisms):
        for f, gf in cat.precomposites(g):
            for x in presheaf.at(gm.cod):
                expected = presheaf.restrict(f, presheaf.restrict(g, x))
                if presheaf.restrict(gf, x) != expected:
                    report.add(
                        f"contravariance fails at ({cat.name(g)}, {cat.name(f)}) on {x!r}"
                    )
    return report


@dataclass(frozen=True)
class Subpresheaf:
    """A family of subsets of ``parent``, stored as a mask over the parent's flat element index."""

    parent: Presheaf
    mask: int

    @classmethod
    def from_sets(cls, parent: Presheaf, sets: Mapping[str, Iterable[Element]]) -> Subpresheaf:
        positions = []
        for obj, xs in sets.items():
            for x in xs:
                try:
                    positions.append(parent.position(obj, x))
                except KeyError:
                    raise StructureError(
                        f"{x!r} is not an element of {parent.name} at '{obj}'"
                    ) from None
        return cls(parent, mask_of(positions))

    @classmethod
    def full(cls, parent: Presheaf) -> Subpresheaf:
        return cls(parent, parent.full_mask)

    @classmethod
    def empty(cls, parent: Presheaf) -> Subpresheaf:
        return cls(parent, 0)

    @classmethod
    def generated(cls, parent: Presheaf, elements: Iterable[tuple[str, Element]]) -> Subpresheaf:
        principal = parent.principal_masks()
        mask = 0
        for obj, x in elements:
            mask |= principal[parent.position(obj, x)]
        return cls(parent, mask)

    def at(self, obj: str) -> frozenset[Element]:
        return frozenset(
            self.parent.element(p)[1] for p in bits(self.mask & self.parent.object_mask(obj))
        )

    def contains(self, obj: str, x: Element) -> bool:
        return bool(self.mask >> self.parent.position(obj, x) & 1)

    def elements(self) -> Iterator[tuple[str, Element]]:
        for p in bits(self.mask):
            yield self.parent.element(p)

    def is_restriction_closed(self) -> bool:
        principal = self.parent.principal_masks()
        return all(is_subset(principal[p], self.mask) for p in bits(self.mask))

    def le(self, other: Subpresheaf) -> bool:
        _same_parent(self, other)
        return is_subset(self.mask, other.mask)

    def as_presheaf(self, name: str | None = None) -> Presheaf:
        parent = self.parent
        return Presheaf(
            parent.cat,
            {o: [x for x in parent.at(o) if self.contains(o, x)] for o in parent.cat.objects},
            lambda f, x: parent.restrict(f, x),
            name=name or f"sub({parent.name})",
        )

    def describe(self, render: Callable[[Element], object] = str) -> dict[str, list[object]]:
        return {
            o: sorted(render(x) for x in self.at(o)) if self.at(o) else []
            for o in self.parent.cat.objects
        }


def _same_parent(*subs: Subpresheaf) -> None:
    first = subs[0].parent
    for sub in subs[1:]:
        if sub.parent is not first and sub.parent != first:
            raise ParentMismatchError(
                f"Subpresheaves of different presheaves: '{first.name}' and '{sub.parent.name}'"
            )


def enumerate_subpresheaves(presheaf: Presheaf, caps: Caps | None = None) -> list[Subpresheaf]:
    """All subpresheaves, as unions of principal ones; the empty one first."""
    caps = caps or default_caps()
    caps.check("max_elements", presheaf.size, f"enumerating subpresheaves of {presheaf.name}")
    masks = unions_of(
        presheaf.principal_masks(),
        lambda n: caps.check("max_subobjects", n, f"enumerating subpresheaves of {presheaf.name}"),
    )
    logger.debug("%s has %d subpresheaves", presheaf.name, len(masks))
    return [Subpresheaf(presheaf, m) for m in masks]


class SubobjectLattice:
    """The Heyting algebra of subpresheaves of a fixed presheaf."""

    def __init__(self, presheaf: Presheaf) -> None:
        self.presheaf = presheaf
        self._principal = presheaf.principal_masks()

    def _check(self, *subs: Subpresheaf) -> None:
        for sub in subs:
            if sub.parent is not self.presheaf and sub.parent != self.presheaf:
                raise ParentMismatchError(
                    f"Subpresheaf of '{sub.parent.name}' used in the lattice of '{self.presheaf.name}'"
                )

    @property
    def top(self) -> Subpresheaf:
        return Subpresheaf.full(self.presheaf)

    @property
    def bottom(self) -> Subpresheaf:
        return Subpresheaf.empty(self.presheaf)

    def meet(self, g: Subpresheaf, h: Subpresheaf) -> Subpresheaf:
        self._check(g, h)
        return Subpresheaf(self.presheaf, g.mask & h.mask)

    def join(self, g: Subpresheaf, h: Subpresheaf) -> Subpresheaf:
        self._check(g, h)
        return Subpresheaf(self.presheaf, g.mask | h.mask)

    def implies(self, g: Subpresheaf, h: Subpresheaf) -> Subpresheaf:
        """(G⇒H)(C) = {x | every restriction of x lying in G lies in H}."""
        self._check(g, h)
        bad = g.mask & ~h.mask
        mask = 0
        for p, principal in enumerate(self._principal):
            if principal & bad == 0:
                mask |= 1 << p
        return Subpresheaf(self.presheaf, mask)

    def negate(self, g: Subpresheaf) -> Subpresheaf:
        return self.implies(g, self.bottom)

    def negate_pointwise(self, g: Subpresheaf) -> Subpresheaf:
        """¬G(C) = {x | ∀f ∈ t(C), F(f)(x) ∉ G(D_f)}, evaluated arrow by arrow."""
        self._check(g)
        cat, presheaf = self.presheaf.cat, self.presheaf
        kept = []
        for obj in cat.objects:
            for x in presheaf.at(obj):
                if all(not g.contains(cat.dom(f), presheaf.restrict(f, x)) for f in cat.into(obj)):
                    kept.append((obj, x))
        return Subpresheaf(presheaf, mask_of(presheaf.position(o, x) for o, x in kept))

    def le(self, g: Subpresheaf, h: Subpresheaf) -> bool:
        self._check(g, h)
        return is_subset(g.mask, h.mask)


def sub_heyting(presheaf: Presheaf) -> SubobjectLattice:
    return SubobjectLattice(presheaf)


@lru_cache(maxsize=None)
def yoneda(cat: FinCat, obj: str) -> Presheaf:
    """y(C): at(D) = arrows D→C, restriction by precomposition."""
    cat.require_object(obj)
    at = {d: [cat.name(f) for f in cat.hom(d, obj)] for d in cat.objects}
    return Presheaf(
        cat,
        at,
        lambda h, g: cat.name(cat.compose(cat.index(g), h)),
        name=f"y({obj})",
    )


def terminal_presheaf(cat: FinCat) -> Presheaf:
    return Presheaf(cat, {o: ["*"] for o in cat.objects}, lambda f, x: x, name="1")


def product(first: Presheaf, second: Presheaf, name: str | None = None) -> Presheaf:
    cat = first.cat
    if second.cat != cat:
        raise StructureError("Product of presheaves over different categories")
    at = {o: [(x, y) for x in first.at(o) for y in second.at(o)] for o in cat.objects}
    return Presheaf(
        cat,
        at,
        lambda f, xy: (first.restrict(f, xy[0]), second.restrict(f, xy[1])),
        name=name or f"{first.name}×{second.name}",
    )


class NatTrans:
    def __init__(
        self,
        source: Presheaf,
        target: Presheaf,
        components: Mapping[str, Mapping[Element, Element]],
        name: str = "α",
    ) -> None:
        if source.cat != target.cat:
            raise StructureError(f"Transformation '{name}' joins presheaves over different categories")
        self.source = source
        self.target = target
        self.name = name
        self.components: dict[str, dict[Element, Element]] = {}
        for obj in source.cat.objects:
            comp = dict(components.get(obj, {}))
            if set(comp) != set(source.at(obj)):
                raise StructureError(
                    f"Component '{obj}' of '{name}' is not defined exactly on {source.name}({obj})"
                )
            allowed = set(target.at(obj))
            for x, y in comp.items():
                if y not in allowed:
                    raise StructureError(
                        f"Component '{obj}' of '{name}' sends {x!r} outside {target.name}({obj})"
                    )
            self.components[obj] = comp

    def __call__(self, obj: str, x: Element) -> Element:
        return self.components[obj][x]


def validate_nat_trans(alpha: NatTrans) -> ValidationReport:
    """List every naturality square that fails to commute."""
    cat = alpha.source.cat
    report = ValidationReport(f"transformation '{alpha.name}'")
    for f, m in enumerate(cat.morphisms):
        for x in alpha.source.at(m.cod):
            left = alpha(m.dom, alpha.source.restrict(f, x))
            right = alpha.target.restrict(f, alpha(m.cod, x))
            if left != right:
                report.add(f"square at {m.name} fails on {x!r}: {left!r} ≠ {right!r}")
    return report


def identity_nat_trans(presheaf: Presheaf) -> NatTrans:
    return NatTrans(
        presheaf,
        presheaf,
        {o: {x: x for x in presheaf.at(o)} for o in presheaf.cat.objects},
        name=f"id_{presheaf.name}",
    )


def yoneda_map(cat: FinCat, h: int) -> NatTrans:
    """y(h): y(C) → y(D) for h: C → D, by postcomposition."""
    source, target = yoneda(cat, cat.dom(h)), yoneda(cat, cat.cod(h))
    components = {
        e: {g: cat.name(cat.compose(h, cat.index(g))) for g in source.at(e)} for e in cat.objects
    }
    return NatTrans(source, target, components, name=f"y({cat.name(h)})")


def enumerate_nat_trans(source: Presheaf, target: Presheaf, limit: int | None = None) -> list[NatTrans]:
    """Natural transformations source → target by element-wise backtracking, at most ``limit``."""
    if limit is None:
        limit = default_caps().max_nat_trans
    cat = source.cat
    n = source.size
    # edges p --f--> q with q the restriction of p along f
    out_edges: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    in_edges: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for p in range(n):
        obj, x = source.element(p)
        for f in cat.into(obj):
            q = source.position(cat.dom(f), source.restrict(f, x))
            out_edges[p].append((f, q))
            in_edges[q].append((f, p))
    choices = [target.at(source.element(p)[0]) for p in range(n)]
    assignment: list[Element | None] = [None] * n
    results: list[NatTrans] = []

    def consistent(p: int) -> bool:
        y = assignment[p]
        for f, q in out_edges[p]:
            if q <= p and assignment[q] != target.restrict(f, y):
                return False
        for f, r in in_edges[p]:
            if r < p and target.restrict(f, assignment[r]) != y:
                return False
        return True

    def search(p: int) -> None:
        if len(results) >= limit:
            return
        if p == n:
            comps: dict[str, dict[Element, Element]] = {o: {} for o in cat.objects}
            for i, y in enumerate(assignment):
                obj, x = source.element(i)
                comps[obj][x] = y
            results.append(NatTrans(source, target, comps, name=f"α{len(results)}"))
            return
        for y in choices[p]:
            assignment[p] = y
            if consistent(p):
                search(p + 1)
        assignment[p] = None

    search(0)
    return results


def preimage(alpha: NatTrans, sub: Subpresheaf) -> Subpresheaf:
    """α^{-1}(G) as a subpresheaf of the source."""
    if sub.parent != alpha.target:
        raise ParentMismatchError(f"Preimage along '{alpha.name}' of a subpresheaf of '{sub.parent.name}'")
    source = alpha.source
    mask = 0
    for p in range(source.size):
        obj, x = source.element(p)
        if sub.contains(obj, alpha(obj, x)):
            mask |= 1 << p
    return Subpresheaf(source, mask)
