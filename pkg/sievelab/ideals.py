from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .bitsets import bits, is_subset
from .category import ValidationReport, pullback_leg
from .errors import TheoremViolation
from .omega import (
    OmegaEndo,
    OmegaPresheaf,
    Sieve,
    WeakGrothendieck,
    double_negation,
    grothendieck_from_j,
)
from .presheaf import Presheaf, Subpresheaf
from .settings import Caps, default_caps


logger = logging.getLogger(__name__)


class Ideal:
    """A sieve I_C on every object, stable under postcomposition."""

    def __init__(self, omega: OmegaPresheaf, sieves: Mapping[str, Sieve], name: str = "I") -> None:
        self.omega = omega
        self.cat = omega.cat
        self.name = name
        self.sieves: dict[str, Sieve] = {
            obj: sieves.get(obj, omega.empty(obj)) for obj in omega.cat.objects
        }

    @classmethod
    def from_names(cls, omega: OmegaPresheaf, name: str, members: Mapping[str, Iterable[str]]) -> Ideal:
        sieves = {obj: omega.from_names(obj, arrows) for obj, arrows in members.items()}
        return cls(omega, sieves, name)

    def __getitem__(self, obj: str) -> Sieve:
        return self.sieves[obj]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ideal) and self.sieves == other.sieves

    def __hash__(self) -> int:
        return hash(tuple(self.sieves[o].mask for o in self.cat.objects))

    def __repr__(self) -> str:
        return f"Ideal({self.name!r}, {self.describe()})"

    def contains(self, f: int) -> bool:
        return f in self.sieves[self.cat.cod(f)]

    @property
    def nonempty_everywhere(self) -> bool:
        return all(s.mask for s in self.sieves.values())

    def describe(self) -> dict[str, list[str]]:
        return {obj: self.omega.names(s) for obj, s in self.sieves.items()}


def _postcompose(cat, s: Sieve, f: int) -> int:
    mask = 0
    for g in bits(s.mask):
        mask |= 1 << cat.compose(f, g)
    return mask


def validate_ideal(ideal: Ideal) -> ValidationReport:
    cat, omega = ideal.cat, ideal.omega
    report = ValidationReport(f"ideal '{ideal.name}'")
    for obj, s in ideal.sieves.items():
        if s.base != obj or not omega.is_sieve(s):
            report.add(f"I_{obj} = {omega.names(s)} is not a sieve on {obj}")
    for f, m in enumerate(cat.morphisms):
        image = _postcompose(cat, ideal[m.dom], f)
        missing = image & ~ideal[m.cod].mask
        if missing:
            report.add(
                f"not stable under postcomposition with {m.name}: "
                f"{cat.names(bits(missing))} ∉ I_{m.cod}"
            )
    return report


def yoneda_ideal(omega: OmegaPresheaf) -> Ideal:
    return Ideal(omega, {o: omega.true(o) for o in omega.cat.objects}, name="y")


def empty_ideal(omega: OmegaPresheaf) -> Ideal:
    return Ideal(omega, {}, name="0")


def _search_order(omega: OmegaPresheaf) -> list[str]:
    cat = omega.cat
    reach = {o: sum(1 for c in cat.objects if cat.hom(c, o)) for o in cat.objects}
    return sorted(cat.objects, key=lambda o: (reach[o], cat.objects.index(o)))


def enumerate_ideals(omega: OmegaPresheaf, caps: Caps | None = None) -> list[Ideal]:
    """Every ideal, by backtracking over objects and pruning on postcomposition."""
    caps = caps or default_caps()
    cat = omega.cat
    order = _search_order(omega)
    post_cache: dict[tuple[Sieve, int], int] = {}

    def post(s: Sieve, f: int) -> int:
        key = (s, f)
        if key not in post_cache:
            post_cache[key] = _postcompose(cat, s, f)
        return post_cache[key]

    chosen: dict[str, Sieve] = {}
    found: list[dict[str, Sieve]] = []

    def fits(obj: str, s: Sieve) -> bool:
        for other, t in chosen.items():
            for f in cat.hom(other, obj):
                if not is_subset(post(t, f), s.mask):
                    return False
            for f in cat.hom(obj, other):
                if not is_subset(post(s, f), t.mask):
                    return False
        return all(is_subset(post(s, f), s.mask) for f in cat.hom(obj, obj))

    def search(i: int) -> None:
        if i == len(order):
            found.append(dict(chosen))
            caps.check("max_structures", len(found), "enumerating ideals")
            return
        obj = order[i]
        for s in omega.sieves(obj):
            if fits(obj, s):
                chosen[obj] = s
                search(i + 1)
                del chosen[obj]

    search(0)
    ideals = [Ideal(omega, sieves, name=f"I{n}") for n, sieves in enumerate(found)]
    logger.info("found %d ideals", len(ideals))
    return ideals


def ideal_square(ideal: Ideal) -> Ideal:
    """I²(C) = {fg | f ∈ I_C, g ∈ I_{D_f}}."""
    cat = ideal.cat
    sieves = {}
    for obj, s in ideal.sieves.items():
        mask = 0
        for f in bits(s.mask):
            mask |= _postcompose(cat, ideal[cat.dom(f)], f)
        sieves[obj] = Sieve(obj, mask)
    return Ideal(ideal.omega, sieves, name=f"{ideal.name}²")


def is_idempotent(ideal: Ideal) -> bool:
    return ideal_square(ideal) == ideal


def ideal_closure(ideal: Ideal, presheaf: Presheaf, sub: Subpresheaf) -> Subpresheaf:
    """Ḡ(C) = {x ∈ F(C) | ∀f ∈ I_C, F(f)(x) ∈ G(D_f)}."""
    cat = ideal.cat
    mask = 0
    for p in range(presheaf.size):
        obj, x = presheaf.element(p)
        if all(sub.contains(cat.dom(f), presheaf.restrict(f, x)) for f in bits(ideal[obj].mask)):
            mask |= 1 << p
    return Subpresheaf(presheaf, mask)


def weak_ideal_topology(ideal: Ideal) -> OmegaEndo:
    """j^I(S) = {f | ∀g ∈ I_{D_f}, fg ∈ S}."""
    omega, cat = ideal.omega, ideal.cat

    def rule(obj: str, s: Sieve) -> int:
        mask = 0
        for f in cat.into(obj):
            if is_subset(_postcompose(cat, ideal[cat.dom(f)], f), s.mask):
                mask |= 1 << f
        return mask

    return OmegaEndo.from_rule(omega, rule, f"j^{ideal.name}")


@dataclass
class IdealCovers:
    """Both readings of the covers of j^I: {S | I_C ⊆ S} and {S | j^I(S) = t(C)}."""

    formula: WeakGrothendieck
    generic: WeakGrothendieck

    @property
    def agree(self) -> bool:
        return self.formula == self.generic

    def differences(self) -> dict[str, Any]:
        return self.formula.differences(self.generic)


def ideal_grothendieck(ideal: Ideal, j: OmegaEndo | None = None) -> IdealCovers:
    omega = ideal.omega
    formula = WeakGrothendieck(
        omega,
        {o: [s for s in omega.sieves(o) if ideal[o].within(s)] for o in omega.cat.objects},
        name=f"J^{ideal.name}",
    )
    generic = grothendieck_from_j(j or weak_ideal_topology(ideal), name=f"J[j^{ideal.name}]")
    return IdealCovers(formula=formula, generic=generic)


def ideal_double_negation(ideal: Ideal) -> OmegaEndo:
    """¬¬_I(S) = {f | ∀g ∈ I_{D_f}, ∃h ∈ I_{D_g}, fgh ∈ S}; equals ¬¬ when no I_C is empty."""
    omega, cat = ideal.omega, ideal.cat

    def rule(obj: str, s: Sieve) -> int:
        mask = 0
        for f in cat.into(obj):
            ok = True
            for g in bits(ideal[cat.dom(f)].mask):
                fg = cat.compose(f, g)
                if not _postcompose(cat, ideal[cat.dom(g)], fg) & s.mask:
                    ok = False
                    break
            if ok:
                mask |= 1 << f
        return mask

    j = OmegaEndo.from_rule(omega, rule, f"¬¬_{ideal.name}")
    if ideal.nonempty_everywhere:
        diff = j.differences(double_negation(omega))
        if diff:
            raise TheoremViolation("¬¬_I = ¬¬ for an ideal with every I_C nonempty", diff[0])
    return j


@dataclass
class MatchingFamilyResult:
    holds: bool
    witness: dict[str, Any] | None = None


def matching_family_check(ideal: Ideal, obj: str) -> MatchingFamilyResult:
    """For f ∈ I_C and composable g, h: h ∈ I_{D_g} ⟺ gh ∈ I_{D_f}."""
    cat = ideal.cat
    cat.require_object(obj)
    for f in bits(ideal[obj].mask):
        for g in cat.into(cat.dom(f)):
            for h in cat.into(cat.dom(g)):
                left = ideal.contains(h)
                right = ideal.contains(cat.compose(g, h))
                if left and not right:
                    raise TheoremViolation(
                        "h ∈ I_{D_g} implies gh ∈ I_{D_f}",
                        cat.names((f, g, h)),
                    )
                if right and not left:
                    return MatchingFamilyResult(False, {"f": cat.name(f), "g": cat.name(g), "h": cat.name(h)})
    return MatchingFamilyResult(True)


def omega_j_literal(ideal: Ideal) -> Subpresheaf:
    """Sieves T with (∀k ∈ I_{D_h}, hk ∈ T) ⟺ h ∈ T for every h into C."""
    omega, cat = ideal.omega, ideal.cat
    mask = 0
    for obj in cat.objects:
        for t in omega.sieves(obj):
            if all(
                is_subset(_postcompose(cat, ideal[cat.dom(h)], h), t.mask) == (h in t)
                for h in cat.into(obj)
            ):
                mask |= 1 << omega.position(obj, t)
    return Subpresheaf(omega, mask)


@dataclass
class StabilityResult:
    holds: bool
    witness: dict[str, Any] | None = None


def is_ideal_pullback_stable(ideal: Ideal) -> StabilityResult:
    """∀g: D→C, ∀f ∈ I_C, g^{-1}(f) exists and lies in I_D."""
    cat = ideal.cat
    for g, m in enumerate(cat.morphisms):
        for f in bits(ideal[m.cod].mask):
            leg = pullback_leg(cat, g, f)
            if leg is None:
                return StabilityResult(False, {"g": m.name, "f": cat.name(f), "reason": "no pullback"})
            if not ideal.contains(leg):
                return StabilityResult(False, {"g": m.name, "f": cat.name(f), "pullback": cat.name(leg)})
    return StabilityResult(True)


def is_ideal_converse_stable(ideal: Ideal) -> StabilityResult:
    """∀g: D→C, ∀f into C, g^{-1}(f) ∈ I_D implies f ∈ I_C."""
    cat = ideal.cat
    for g, m in enumerate(cat.morphisms):
        for f in cat.into(m.cod):
            leg = pullback_leg(cat, g, f)
            if leg is not None and ideal.contains(leg) and not ideal.contains(f):
                return StabilityResult(False, {"g": m.name, "f": cat.name(f), "pullback": cat.name(leg)})
    return StabilityResult(True)
