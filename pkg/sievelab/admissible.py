from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable

from .category import (
    FinCat,
    StructuralPredicates,
    ValidationReport,
    find_pullback,
    is_mono,
    pullback_leg,
    slice_isomorphic,
    structural_predicates,
)
from .errors import CompletenessError, CompositionError, StructureError
from .omega import (
    OmegaEndo,
    OmegaPresheaf,
    Sieve,
    TopologyFlags,
    WeakGrothendieck,
    check_weak_topology,
    closure_from_j,
    double_negation,
    grothendieck_from_j,
    omega_j,
)
from .presheaf import Presheaf, Subpresheaf, enumerate_subpresheaves, product, yoneda
from .settings import Caps, default_caps


logger = logging.getLogger(__name__)

ALL_MONOS = "all-monos"
IDENTITIES = "identities"


class AdmissibleClass:
    """A class of monos, taken up to slice isomorphism."""

    def __init__(self, cat: FinCat, arrows: Iterable[int], name: str = "M", keyword: str | None = None) -> None:
        self.cat = cat
        self.name = name
        self.keyword = keyword
        self.generators = frozenset(arrows)
        members = set(self.generators)
        for f in range(len(cat)):
            if f not in members and any(slice_isomorphic(cat, f, g) for g in self.generators):
                members.add(f)
        self.members = frozenset(members)
        self._reps: dict[str, tuple[int, ...]] = {}
        for obj in cat.objects:
            reps: list[int] = []
            for f in sorted(m for m in self.members if cat.cod(m) == obj):
                if not any(slice_isomorphic(cat, f, r) for r in reps):
                    reps.append(f)
            self._reps[obj] = tuple(reps)

    @classmethod
    def all_monos(cls, cat: FinCat, name: str = "Sub") -> AdmissibleClass:
        return cls(cat, [f for f in range(len(cat)) if is_mono(cat, f)], name=name, keyword=ALL_MONOS)

    @classmethod
    def identities(cls, cat: FinCat, name: str = "Id") -> AdmissibleClass:
        return cls(cat, [cat.identity(o) for o in cat.objects], name=name, keyword=IDENTITIES)

    @classmethod
    def from_names(cls, cat: FinCat, name: str, names: Iterable[str]) -> AdmissibleClass:
        return cls(cat, [cat.index(n) for n in names], name=name)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AdmissibleClass) and self.cat == other.cat and self.members == other.members

    def __hash__(self) -> int:
        return hash((self.cat, self.members))

    def __repr__(self) -> str:
        return f"AdmissibleClass({self.name!r}, {sorted(self.cat.names(self.members))})"

    def contains(self, f: int) -> bool:
        return f in self.members

    def at(self, obj: str) -> tuple[int, ...]:
        """Canonical representatives of 𝓜/C."""
        return self._reps[obj]

    def representative(self, f: int) -> int:
        for r in self._reps[self.cat.cod(f)]:
            if slice_isomorphic(self.cat, f, r):
                return r
        raise StructureError(f"'{self.cat.name(f)}' is not in class '{self.name}'")

    def describe(self) -> list[str]:
        return sorted(self.cat.names(self.members))


def validate_admissible(cls: AdmissibleClass) -> ValidationReport:
    cat = cls.cat
    report = ValidationReport(f"admissible class '{cls.name}'")
    for f in sorted(cls.members):
        if not is_mono(cat, f):
            report.add(f"{cat.name(f)} is not monic")
    for obj in cat.objects:
        if not cls.contains(cat.identity(obj)):
            report.add(f"missing identity {cat.name(cat.identity(obj))}")
    for g in sorted(cls.members):
        for f in sorted(cls.members):
            if cat.cod(f) == cat.dom(g) and not cls.contains(cat.compose(g, f)):
                report.add(f"not closed under composition: {cat.name(g)}∘{cat.name(f)}")
    for g, gm in enumerate(cat.morphisms):
        for m in sorted(cls.members):
            if cat.cod(m) != gm.cod:
                continue
            leg = pullback_leg(cat, g, m)
            if leg is None:
                report.add(f"no pullback of {cat.name(m)} along {gm.name}")
            elif not cls.contains(leg):
                report.add(f"pullback of {cat.name(m)} along {gm.name} is {cat.name(leg)}, not in the class")
    return report


def _close(cat: FinCat, seed: Iterable[int], monos: list[int]) -> frozenset[int] | None:
    """Smallest admissible class containing ``seed``, or None if a needed pullback is missing."""
    members = set(seed) | {cat.identity(o) for o in cat.objects}
    changed = True
    while changed:
        changed = False
        extra: set[int] = set()
        for f in monos:
            if f not in members and any(slice_isomorphic(cat, f, g) for g in members):
                extra.add(f)
        for g in members:
            for f in members:
                if cat.cod(f) == cat.dom(g):
                    extra.add(cat.compose(g, f))
        for g in range(len(cat)):
            for m in members:
                if cat.cod(m) == cat.cod(g):
                    leg = pullback_leg(cat, g, m)
                    if leg is None:
                        return None
                    extra.add(leg)
        extra -= members
        if extra:
            members |= extra
            changed = True
    return frozenset(members)


def enumerate_admissible_classes(cat: FinCat, caps: Caps | None = None) -> list[AdmissibleClass]:
    """All admissible classes, grown one generator at a time from the identities."""
    caps = caps or default_caps()
    monos = [f for f in range(len(cat)) if is_mono(cat, f)]
    start = _close(cat, (), monos)
    if start is None:
        return []
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for m in monos:
            if m in current:
                continue
            grown = _close(cat, current | {m}, monos)
            if grown is not None and grown not in seen:
                seen.add(grown)
                caps.check("max_structures", len(seen), "enumerating admissible classes")
                queue.append(grown)
    ordered = sorted(seen, key=lambda s: (len(s), sorted(s)))
    logger.info("found %d admissible classes", len(ordered))
    return [AdmissibleClass(cat, members, name=f"M{i}") for i, members in enumerate(ordered)]


def _leg_or_raise(cat: FinCat, g: int, m: int, context: str) -> int:
    leg = pullback_leg(cat, g, m)
    if leg is None:
        raise CompletenessError(cat.name(g), cat.name(m), context)
    return leg


@lru_cache(maxsize=64)
def m_presheaf(cls: AdmissibleClass) -> Presheaf:
    """M(C) = 𝓜/C up to isomorphism; restriction along k is pullback k^{-1}(−)."""
    cat = cls.cat

    def restrict(k: int, m_name: str) -> str:
        leg = _leg_or_raise(cat, k, cat.index(m_name), f"restricting M[{cls.name}]")
        return cat.name(cls.representative(leg))

    return Presheaf(
        cat,
        {o: cat.names(cls.at(o)) for o in cat.objects},
        restrict,
        name=f"M[{cls.name}]",
    )


@dataclass(frozen=True)
class RelOverYoneda:
    """A subpresheaf U of y(C)×X; elements are pairs (arrow name, element of X)."""

    base: str
    companion: Presheaf
    sub: Subpresheaf

    def pairs(self, obj: str) -> frozenset[tuple[str, Any]]:
        return self.sub.at(obj)  # type: ignore[return-value]

    def contains(self, obj: str, f: str, x: Any) -> bool:
        return self.sub.contains(obj, (f, x))

    def le(self, other: RelOverYoneda) -> bool:
        return self.sub.le(other.sub)


@lru_cache(maxsize=256)
def relation_space(cat: FinCat, obj: str, companion: Presheaf) -> Presheaf:
    return product(yoneda(cat, obj), companion, name=f"y({obj})×{companion.name}")


class Quantifiers:
    """σ_X, ∃_X, ∀_X, T_X and true^X between sieves on C and subpresheaves of y(C)×X."""

    def __init__(self, companion: Presheaf, omega: OmegaPresheaf) -> None:
        self.companion = companion
        self.omega = omega
        self.cat = omega.cat

    def space(self, obj: str) -> Presheaf:
        return relation_space(self.cat, obj, self.companion)

    def relation(self, obj: str, mask: int) -> RelOverYoneda:
        return RelOverYoneda(obj, self.companion, Subpresheaf(self.space(obj), mask))

    def sigma(self, s: Sieve) -> RelOverYoneda:
        """σ(S) = {(f, x) | f ∈ S}."""
        cat, space = self.cat, self.space(s.base)
        mask = 0
        for p in range(space.size):
            _, (f, _x) = space.element(p)
            if cat.index(f) in s:
                mask |= 1 << p
        return self.relation(s.base, mask)

    def exists(self, rel: RelOverYoneda) -> Sieve:
        """∃(U) = {f | ∃x ∈ X(D_f), (f, x) ∈ U(D_f)}."""
        cat = self.cat
        mask = 0
        for _, (f, _x) in rel.sub.elements():
            mask |= 1 << cat.index(f)
        return Sieve(rel.base, mask)

    def forall(self, rel: RelOverYoneda) -> Sieve:
        """∀(U) = {f | ∀h into D_f, ∀x ∈ X(dom h), (fh, x) ∈ U}."""
        cat = self.cat
        mask = 0
        for f in cat.into(rel.base):
            if all(
                rel.contains(cat.dom(h), cat.name(fh), x)
                for h, fh in cat.precomposites(f)
                for x in self.companion.at(cat.dom(h))
            ):
                mask |= 1 << f
        return Sieve(rel.base, mask)

    def t(self, rel: RelOverYoneda) -> RelOverYoneda:
        """T_X = σ_X∘∃_X."""
        return self.sigma(self.exists(rel))

    def true_x(self, obj: str) -> RelOverYoneda:
        return self.relation(obj, self.space(obj).full_mask)

    def relations(self, obj: str, caps: Caps | None = None) -> list[RelOverYoneda]:
        return [
            RelOverYoneda(obj, self.companion, sub)
            for sub in enumerate_subpresheaves(self.space(obj), caps)
        ]

    def forall_sigma(self) -> OmegaEndo:
        return OmegaEndo.from_rule(
            self.omega,
            lambda obj, s: self.forall(self.sigma(s)),
            f"∀∘σ[{self.companion.name}]",
        )

    def galois_witness(self, obj: str, caps: Caps | None = None) -> dict[str, Any] | None:
        """First failure of ∃ ⊣ σ ⊣ ∀ over all U ≤ y(C)×X and S ∈ Ω(C)."""
        for rel in self.relations(obj, caps):
            ex, fa = self.exists(rel), self.forall(rel)
            for s in self.omega.sieves(obj):
                sig = self.sigma(s)
                if ex.within(s) != rel.le(sig):
                    return {"law": "∃ ⊣ σ", "object": obj, "sieve": self.omega.names(s)}
                if sig.le(rel) != s.within(fa):
                    return {"law": "σ ⊣ ∀", "object": obj, "sieve": self.omega.names(s)}
        return None


def quantifiers(companion: Presheaf, omega: OmegaPresheaf) -> Quantifiers:
    return Quantifiers(companion, omega)


def mu_M(cls: AdmissibleClass, omega: OmegaPresheaf, s: Sieve) -> RelOverYoneda:
    """μ_M(S)(D) = {(f, g) ∈ y(C)(D)×M(D) | fg ∈ S}."""
    cat = cls.cat
    q = Quantifiers(m_presheaf(cls), omega)
    space = q.space(s.base)
    mask = 0
    for p in range(space.size):
        _, (f, g) = space.element(p)
        if cat.compose(cat.index(f), cat.index(g)) in s:
            mask |= 1 << p
    return q.relation(s.base, mask)


def rel_pullback(rel: RelOverYoneda, k: int, cat: FinCat) -> RelOverYoneda:
    """Restrict U ≤ y(C)×X along y(k): {(h, x) | (kh, x) ∈ U}."""
    if cat.cod(k) != rel.base:
        raise CompositionError(f"{cat.name(k)} does not land in {rel.base}")
    space = relation_space(cat, cat.dom(k), rel.companion)
    mask = 0
    for p in range(space.size):
        obj, (h, x) = space.element(p)
        if rel.contains(obj, cat.name(cat.compose(k, cat.index(h))), x):
            mask |= 1 << p
    return RelOverYoneda(cat.dom(k), rel.companion, Subpresheaf(space, mask))


@lru_cache(maxsize=64)
def _mu_table(cls: AdmissibleClass, omega: OmegaPresheaf, obj: str) -> dict[int, Sieve]:
    return {mu_M(cls, omega, s).sub.mask: s for s in omega.sieves(obj)}


def char_mu(cls: AdmissibleClass, omega: OmegaPresheaf, rel: RelOverYoneda) -> Sieve:
    """Char(μ_M)(U) = {f | y(f)^*(U) = μ_M(S) for some sieve S on D_f}."""
    cat = cls.cat
    mask = 0
    for f in cat.into(rel.base):
        pulled = rel_pullback(rel, f, cat)
        if pulled.sub.mask in _mu_table(cls, omega, cat.dom(f)):
            mask |= 1 << f
    return Sieve(rel.base, mask)


def j_M_formula(cls: AdmissibleClass, omega: OmegaPresheaf) -> OmegaEndo:
    """{f | ∃g ∈ 𝓜/D_f, fg ∈ S}."""
    cat = cls.cat

    def rule(obj: str, s: Sieve) -> int:
        mask = 0
        for f in cat.into(obj):
            if any(cat.compose(f, g) in s for g in cls.at(cat.dom(f))):
                mask |= 1 << f
        return mask

    return OmegaEndo.from_rule(omega, rule, f"j_{cls.name}")


def sub_topology(omega: OmegaPresheaf) -> OmegaEndo | None:
    """j_Sub, or None when the monos of the category are not an admissible class."""
    sub_class = AdmissibleClass.all_monos(omega.cat)
    if not validate_admissible(sub_class).valid:
        return None
    j = j_M_formula(sub_class, omega)
    j.name = "j_Sub"
    return j


def j_M_quantified(cls: AdmissibleClass, omega: OmegaPresheaf) -> OmegaEndo:
    """∃_M∘μ_M."""
    q = Quantifiers(m_presheaf(cls), omega)
    return OmegaEndo.from_rule(omega, lambda obj, s: q.exists(mu_M(cls, omega, s)), f"∃∘μ[{cls.name}]")


def m_closure_literal(cls: AdmissibleClass, presheaf: Presheaf, sub: Subpresheaf) -> Subpresheaf:
    """Ḡ(C) = {x | ∀f ∈ t(C), ∃g ∈ 𝓜/D_f, F(fg)(x) ∈ G(D_g)}."""
    cat = cls.cat
    mask = 0
    for p in range(presheaf.size):
        obj, x = presheaf.element(p)
        if all(
            any(sub.contains(cat.dom(g), presheaf.restrict(cat.compose(f, g), x)) for g in cls.at(cat.dom(f)))
            for f in cat.into(obj)
        ):
            mask |= 1 << p
    return Subpresheaf(presheaf, mask)


@dataclass
class MTopology:
    admissible: AdmissibleClass
    j_m: OmegaEndo
    j_sub: OmegaEndo | None
    flags: TopologyFlags
    formula_matches: bool
    covers: WeakGrothendieck
    covers_formula: WeakGrothendieck
    chain: dict[str, dict[str, Any] | None]
    closure_mismatches: list[dict[str, Any]] = field(default_factory=list)

    @property
    def covers_agree(self) -> bool:
        return self.covers == self.covers_formula


def topology_from_M(cls: AdmissibleClass, omega: OmegaPresheaf, caps: Caps | None = None) -> MTopology:
    cat = cls.cat
    j_m = j_M_quantified(cls, omega)
    j_m.name = f"j_{cls.name}"
    formula = j_M_formula(cls, omega)
    j_sub = sub_topology(omega)
    notnot = double_negation(omega)
    if j_sub is None:
        chain = {"j_M ≤ ¬¬": j_m.le_witness(notnot)}
    else:
        chain = {"j_M ≤ j_Sub": j_m.le_witness(j_sub), "j_Sub ≤ ¬¬": j_sub.le_witness(notnot)}
    covers_formula = WeakGrothendieck(
        omega,
        {
            o: [s for s in omega.sieves(o) if any(m in s for m in cls.at(o))]
            for o in cat.objects
        },
        name=f"J_{cls.name}",
    )
    mismatches = []
    for obj in cat.objects:
        y = yoneda(cat, obj)
        for sub in enumerate_subpresheaves(y, caps):
            literal = m_closure_literal(cls, y, sub)
            generic = closure_from_j(j_m, y, sub)
            if literal != generic:
                mismatches.append({"presheaf": y.name, "subpresheaf": sub.describe()})
    return MTopology(
        admissible=cls,
        j_m=j_m,
        j_sub=j_sub,
        flags=check_weak_topology(j_m),
        formula_matches=j_m == formula,
        covers=grothendieck_from_j(j_m, name=f"J[j_{cls.name}]"),
        covers_formula=covers_formula,
        chain=chain,
        closure_mismatches=mismatches,
    )


def extensivity_witness(cls: AdmissibleClass, omega: OmegaPresheaf) -> dict[str, Any] | None:
    """S ⊆ Char(μ_M)(σ_M(S)) for every S ∈ Ω_{j_M}(C)."""
    q = Quantifiers(m_presheaf(cls), omega)
    closed = omega_j(j_M_formula(cls, omega))
    for obj in cls.cat.objects:
        for s in omega.sieves(obj):
            if not closed.contains(obj, s):
                continue
            if not s.within(char_mu(cls, omega, q.sigma(s))):
                return {"object": obj, "sieve": omega.names(s)}
    return None


def mu_adjunction_witness(cls: AdmissibleClass, omega: OmegaPresheaf, caps: Caps | None = None) -> dict[str, Any] | None:
    """μ_M(S) ≤ U implies S ⊆ ∃_M(U)."""
    q = Quantifiers(m_presheaf(cls), omega)
    for obj in cls.cat.objects:
        rels = q.relations(obj, caps)
        for s in omega.sieves(obj):
            mu = mu_M(cls, omega, s)
            for rel in rels:
                if mu.le(rel) and not s.within(q.exists(rel)):
                    return {"object": obj, "sieve": omega.names(s)}
    return None


def mu_properties(cls: AdmissibleClass, omega: OmegaPresheaf) -> dict[str, dict[str, Any] | None]:
    """Naturality and objectwise injectivity of μ_M, and σ_M ≤ μ_M."""
    cat = cls.cat
    q = Quantifiers(m_presheaf(cls), omega)
    found: dict[str, dict[str, Any] | None] = {"natural": None, "injective": None, "sigma_below_mu": None}
    for obj in cat.objects:
        images: dict[int, Sieve] = {}
        for s in omega.sieves(obj):
            mu = mu_M(cls, omega, s)
            if mu.sub.mask in images and found["injective"] is None:
                found["injective"] = {"object": obj, "sieves": [omega.names(images[mu.sub.mask]), omega.names(s)]}
            images[mu.sub.mask] = s
            if found["sigma_below_mu"] is None and not q.sigma(s).le(mu):
                found["sigma_below_mu"] = {"object": obj, "sieve": omega.names(s)}
            for k in cat.into(obj):
                if found["natural"] is None and rel_pullback(mu, k, cat) != mu_M(cls, omega, omega.pullback(k, s)):
                    found["natural"] = {"object": obj, "sieve": omega.names(s), "morphism": cat.name(k)}
    return found


@dataclass(frozen=True)
class PartialMap:
    """[(n, f)]: defined on the subobject n: A ↣ C, acting as f: A → B."""

    n: int
    f: int


class PartialMapCategory:
    """𝓜-partial maps, and the subcategory MP(𝓒) built from the classes P_S."""

    def __init__(self, cls: AdmissibleClass, omega: OmegaPresheaf) -> None:
        self.cls = cls
        self.cat = cls.cat
        self.omega = omega

    def source(self, p: PartialMap) -> str:
        return self.cat.cod(p.n)

    def target(self, p: PartialMap) -> str:
        return self.cat.cod(p.f)

    def describe(self, p: PartialMap) -> list[str]:
        return [self.cat.name(p.n), self.cat.name(p.f)]

    def whole(self, f: int) -> PartialMap:
        return PartialMap(self.cat.identity(self.cat.dom(f)), f)

    def identity(self, obj: str) -> PartialMap:
        ident = self.cat.identity(obj)
        return PartialMap(ident, ident)

    def compose(self, q: PartialMap, p: PartialMap) -> PartialMap:
        """[(n, g)]∘[(m, f)] = [(m f^{-1}(n), g n^{-1}(f))]."""
        cat = self.cat
        if self.target(p) != self.source(q):
            raise CompositionError(
                f"partial maps {self.describe(p)} and {self.describe(q)} are not composable"
            )
        square = find_pullback(cat, p.f, q.n)
        if square is None:
            raise CompletenessError(cat.name(p.f), cat.name(q.n), "composing partial maps")
        return PartialMap(cat.compose(p.n, square.f_leg), cat.compose(q.f, square.g_leg))

    def equivalent(self, p: PartialMap, q: PartialMap) -> bool:
        cat = self.cat
        if cat.cod(p.n) != cat.cod(q.n) or cat.cod(p.f) != cat.cod(q.f):
            return False
        for theta in cat.hom(cat.dom(p.n), cat.dom(q.n)):
            if cat.compose(q.n, theta) == p.n and cat.compose(q.f, theta) == p.f:
                if slice_isomorphic(cat, p.n, q.n):
                    return True
        return False

    def le(self, p: PartialMap, q: PartialMap) -> bool:
        """[(n, f)] ≤ [(t, s)] iff some arrow k has s k = f and t k = n."""
        cat = self.cat
        return any(
            cat.compose(q.f, k) == p.f and cat.compose(q.n, k) == p.n
            for k in cat.hom(cat.dom(p.n), cat.dom(q.n))
        )

    def generated(self, s: Sieve) -> list[tuple[int, PartialMap]]:
        """Pairs (f, [(m, fm)]) with f ∈ t(C), m ∈ 𝓜/D_f and fm ∈ S."""
        cat = self.cat
        out = []
        for f in cat.into(s.base):
            for m in self.cls.at(cat.dom(f)):
                fm = cat.compose(f, m)
                if fm in s:
                    out.append((f, PartialMap(m, fm)))
        return out

    def p_of(self, s: Sieve) -> list[PartialMap]:
        """P_S = {[(m, fm)] | m ∈ 𝓜/D_f, fm ∈ S}."""
        seen: list[PartialMap] = []
        for _, p in self.generated(s):
            if p not in seen:
                seen.append(p)
        return seen

    def arrows(self) -> list[PartialMap]:
        """The arrows of MP(𝓒): the union of P_{t(C)}."""
        out: list[PartialMap] = []
        for obj in self.cat.objects:
            out.extend(self.p_of(self.omega.true(obj)))
        return out

    def in_p(self, s: Sieve, p: PartialMap) -> bool:
        cat = self.cat
        if not self.cls.contains(p.n) or p.f not in s:
            return False
        return any(cat.compose(h, p.n) == p.f for h in cat.hom(cat.cod(p.n), s.base))

    def category_check(self) -> dict[str, dict[str, Any] | None]:
        """Identities, closure of each P_S and of MP(𝓒) under composition, associativity, and the P_S identities."""
        cat, omega = self.cat, self.omega
        found: dict[str, dict[str, Any] | None] = {
            "identities": None,
            "closed": None,
            "p_s_closed": None,
            "associative": None,
            "union": None,
            "down_set": None,
        }
        arrows = self.arrows()
        for obj in cat.objects:
            ident = self.identity(obj)
            if not any(self.equivalent(ident, p) for p in self.p_of(omega.true(obj))):
                found["identities"] = {"object": obj}
        by_source: dict[str, list[PartialMap]] = {o: [] for o in cat.objects}
        by_target: dict[str, list[PartialMap]] = {o: [] for o in cat.objects}
        for p in arrows:
            by_source[self.source(p)].append(p)
            by_target[self.target(p)].append(p)
        for p in arrows:
            for q in by_source[self.target(p)]:
                r = self.compose(q, p)
                if found["closed"] is None and not self.in_p(omega.true(self.target(r)), r):
                    found["closed"] = {"first": self.describe(p), "second": self.describe(q)}
                for u in by_source[self.target(q)]:
                    if found["associative"] is None:
                        left = self.compose(u, r)
                        right = self.compose(self.compose(u, q), p)
                        if not self.equivalent(left, right):
                            found["associative"] = {
                                "maps": [self.describe(p), self.describe(q), self.describe(u)]
                            }
        for obj in cat.objects:
            union: set[PartialMap] = set()
            for s in omega.sieves(obj):
                members = self.p_of(s)
                union.update(members)
                for q in members:
                    for p in by_target[self.source(q)]:
                        r = self.compose(q, p)
                        if found["p_s_closed"] is None and not self.in_p(s, r):
                            found["p_s_closed"] = {
                                "sieve": omega.names(s),
                                "first": self.describe(p),
                                "second": self.describe(q),
                            }
                for f, p in self.generated(s):
                    if found["down_set"] is None and not self.le(p, self.whole(f)):
                        found["down_set"] = {"f": cat.name(f), "map": self.describe(p)}
            if found["union"] is None and union != set(self.p_of(omega.true(obj))):
                found["union"] = {"object": obj}
        return found


def partial_maps(cls: AdmissibleClass, omega: OmegaPresheaf) -> PartialMapCategory:
    return PartialMapCategory(cls, omega)


def m_structural_predicates(cls: AdmissibleClass) -> StructuralPredicates:
    return structural_predicates(cls.cat, cls)
