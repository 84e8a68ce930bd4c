from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

from .bitsets import bits, is_subset, mask_of, popcount, unions_of
from .category import FinCat, is_right_ore
from .errors import CapExceededError, StructureError, TheoremViolation
from .presheaf import (
    Presheaf,
    Subpresheaf,
    SubobjectLattice,
    enumerate_subpresheaves,
    product,
    terminal_presheaf,
    yoneda,
)
from .settings import Caps, default_caps


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sieve:
    """A sieve on ``base``: a precomposition-closed set of arrows into it, as a morphism mask."""

    base: str
    mask: int

    def __contains__(self, f: int) -> bool:
        return bool(self.mask >> f & 1)

    def arrows(self) -> list[int]:
        return list(bits(self.mask))

    def within(self, other: Sieve) -> bool:
        return self.base == other.base and is_subset(self.mask, other.mask)

    def sort_key(self) -> tuple[str, int, int]:
        return self.base, popcount(self.mask), self.mask


class OmegaPresheaf(Presheaf):
    """The subobject classifier: sieves on each object, restricted by pullback h*."""

    def __init__(self, cat: FinCat, caps: Caps) -> None:
        self._principal_sieve = [
            mask_of(hg for _, hg in cat.precomposites(h)) for h in range(len(cat))
        ]
        sieves: dict[str, list[Sieve]] = {}
        for obj in cat.objects:
            masks = unions_of(
                (self._principal_sieve[f] for f in cat.into(obj)),
                lambda n, o=obj: caps.check("max_sieves_per_object", n, f"enumerating sieves on {o}"),
            )
            sieves[obj] = [Sieve(obj, m) for m in masks]
        self._index = {s: i for obj in cat.objects for i, s in enumerate(sieves[obj])}
        super().__init__(cat, sieves, lambda h, s: self.pullback(h, s), name="Ω")

    def sieves(self, obj: str) -> tuple[Sieve, ...]:
        return self.at(obj)  # type: ignore[return-value]

    def true(self, obj: str) -> Sieve:
        return Sieve(obj, self.cat.into_mask(obj))

    def empty(self, obj: str) -> Sieve:
        return Sieve(obj, 0)

    def meet(self, s: Sieve, t: Sieve) -> Sieve:
        return Sieve(s.base, s.mask & t.mask)

    def join(self, s: Sieve, t: Sieve) -> Sieve:
        return Sieve(s.base, s.mask | t.mask)

    def le(self, s: Sieve, t: Sieve) -> bool:
        return s.within(t)

    def pullback(self, h: int, s: Sieve) -> Sieve:
        """h*(S) = {g | h∘g ∈ S}."""
        mask = 0
        for g, hg in self.cat.precomposites(h):
            if s.mask >> hg & 1:
                mask |= 1 << g
        return Sieve(self.cat.dom(h), mask)

    def principal(self, f: int) -> Sieve:
        return Sieve(self.cat.cod(f), self._principal_sieve[f])

    def principal_mask(self, f: int) -> int:
        return self._principal_sieve[f]

    def is_sieve(self, s: Sieve) -> bool:
        return s in self._index

    def make(self, obj: str, arrows: Iterable[int]) -> Sieve:
        """Sieve on ``obj`` with exactly the given arrows; rejects non-sieves."""
        sieve = Sieve(obj, mask_of(arrows))
        if sieve not in self._index:
            names = self.cat.names(sieve.arrows())
            raise StructureError(f"{names} is not a sieve on '{obj}'")
        return sieve

    def from_names(self, obj: str, names: Iterable[str]) -> Sieve:
        self.cat.require_object(obj)
        arrows = []
        for name in names:
            f = self.cat.index(name)
            if self.cat.cod(f) != obj:
                raise StructureError(f"'{name}' does not have codomain '{obj}'")
            arrows.append(f)
        return self.make(obj, arrows)

    def names(self, s: Sieve) -> list[str]:
        return self.cat.names(s.arrows())


@lru_cache(maxsize=32)
def _build_omega(cat: FinCat, caps: Caps) -> OmegaPresheaf:
    omega = OmegaPresheaf(cat, caps)
    logger.info(
        "Ω built: %s",
        ", ".join(f"|Ω({o})|={len(omega.sieves(o))}" for o in cat.objects),
    )
    return omega


def build_omega(cat: FinCat, caps: Caps | None = None) -> OmegaPresheaf:
    return _build_omega(cat, caps or default_caps())


SieveRule = Callable[[str, Sieve], "Sieve | int"]


class OmegaEndo:
    """An endomap of Ω given componentwise; naturality is checked on construction."""

    def __init__(self, omega: OmegaPresheaf, components: Mapping[str, Mapping[Sieve, Sieve]], name: str) -> None:
        self.omega = omega
        self.name = name
        self.components: dict[str, dict[Sieve, Sieve]] = {}
        for obj in omega.cat.objects:
            comp = dict(components[obj])
            for s in omega.sieves(obj):
                image = comp.get(s)
                if image is None:
                    raise StructureError(f"'{name}' is undefined on a sieve on '{obj}'")
                if image.base != obj or not omega.is_sieve(image):
                    raise StructureError(
                        f"'{name}' sends a sieve on '{obj}' to {omega.names(image)}, which is not a sieve on '{obj}'"
                    )
            self.components[obj] = comp
        self.naturality_witness = self._naturality_witness()

    @classmethod
    def from_rule(cls, omega: OmegaPresheaf, rule: SieveRule, name: str) -> OmegaEndo:
        components: dict[str, dict[Sieve, Sieve]] = {}
        for obj in omega.cat.objects:
            comp = {}
            for s in omega.sieves(obj):
                image = rule(obj, s)
                comp[s] = image if isinstance(image, Sieve) else Sieve(obj, image)
            components[obj] = comp
        return cls(omega, components, name)

    def _naturality_witness(self) -> dict[str, Any] | None:
        omega, cat = self.omega, self.omega.cat
        for h, m in enumerate(cat.morphisms):
            for s in omega.sieves(m.cod):
                left = self.components[m.dom][omega.pullback(h, s)]
                right = omega.pullback(h, self.components[m.cod][s])
                if left != right:
                    return {"morphism": m.name, "sieve": omega.names(s), "object": m.cod}
        return None

    @property
    def natural(self) -> bool:
        return self.naturality_witness is None

    def __call__(self, s: Sieve) -> Sieve:
        return self.components[s.base][s]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, OmegaEndo) and self.omega == other.omega and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.omega)

    def __repr__(self) -> str:
        return f"OmegaEndo({self.name!r})"

    def le(self, other: OmegaEndo) -> bool:
        return self.le_witness(other) is None

    def le_witness(self, other: OmegaEndo) -> dict[str, Any] | None:
        """First sieve with self(S) ⊄ other(S), if any."""
        for obj in self.omega.cat.objects:
            for s in self.omega.sieves(obj):
                if not self(s).within(other(s)):
                    return {"object": obj, "sieve": self.omega.names(s)}
        return None

    def differences(self, other: OmegaEndo) -> list[dict[str, Any]]:
        omega = self.omega
        out = []
        for obj in omega.cat.objects:
            for s in omega.sieves(obj):
                if self(s) != other(s):
                    out.append(
                        {
                            "object": obj,
                            "sieve": omega.names(s),
                            self.name: omega.names(self(s)),
                            other.name: omega.names(other(s)),
                        }
                    )
        return out


@dataclass
class TopologyFlags:
    natural: bool
    preserves_true: bool
    weak: bool
    productive: bool
    idempotent: bool
    monotone: bool
    witnesses: dict[str, Any] = field(default_factory=dict)

    @property
    def topology(self) -> bool:
        return self.natural and self.weak and self.productive and self.idempotent

    def as_dict(self) -> dict[str, bool]:
        return {
            "natural": self.natural,
            "preserves_true": self.preserves_true,
            "weak": self.weak,
            "productive": self.productive,
            "idempotent": self.idempotent,
            "monotone": self.monotone,
            "topology": self.topology,
        }


def check_weak_topology(j: OmegaEndo) -> TopologyFlags:
    """Classify j: weak (j∘true = true, j∘∧ ≤ ∧∘(j×j)), productive, idempotent, monotone."""
    omega = j.omega
    witnesses: dict[str, Any] = {}
    if j.naturality_witness is not None:
        witnesses["natural"] = j.naturality_witness

    preserves_true = True
    sub_meet = True
    productive = True
    idempotent = True
    monotone = True
    for obj in omega.cat.objects:
        top = omega.true(obj)
        if j(top) != top and preserves_true:
            preserves_true = False
            witnesses["preserves_true"] = {"object": obj, "image": omega.names(j(top))}
        sieves = omega.sieves(obj)
        images = {s: j(s).mask for s in sieves}
        for s in sieves:
            if idempotent and j(j(s)) != j(s):
                idempotent = False
                witnesses["idempotent"] = {"object": obj, "sieve": omega.names(s)}
            for t in sieves:
                met = images[Sieve(obj, s.mask & t.mask)]
                both = images[s] & images[t]
                if sub_meet and not is_subset(met, both):
                    sub_meet = False
                    witnesses["weak"] = {"object": obj, "sieves": [omega.names(s), omega.names(t)]}
                if productive and met != both:
                    productive = False
                    witnesses["productive"] = {"object": obj, "sieves": [omega.names(s), omega.names(t)]}
                if monotone and is_subset(s.mask, t.mask) and not is_subset(images[s], images[t]):
                    monotone = False
                    witnesses["monotone"] = {"object": obj, "sieves": [omega.names(s), omega.names(t)]}
    return TopologyFlags(
        natural=j.natural,
        preserves_true=preserves_true,
        weak=preserves_true and sub_meet,
        productive=productive,
        idempotent=idempotent,
        monotone=monotone,
        witnesses=witnesses,
    )


def identity_endo(omega: OmegaPresheaf) -> OmegaEndo:
    return OmegaEndo.from_rule(omega, lambda obj, s: s, "identity")


def true_endo(omega: OmegaPresheaf) -> OmegaEndo:
    """true∘!: every sieve goes to the maximal one."""
    return OmegaEndo.from_rule(omega, lambda obj, s: omega.true(obj), "true")


def characteristic_sieve(presheaf: Presheaf, sub: Subpresheaf, obj: str, x: Any) -> Sieve:
    """{f: D→C | F(f)(x) ∈ G(D)}."""
    cat = presheaf.cat
    mask = 0
    for f in cat.into(obj):
        if sub.contains(cat.dom(f), presheaf.restrict(f, x)):
            mask |= 1 << f
    return Sieve(obj, mask)


def closure_from_j(j: OmegaEndo, presheaf: Presheaf, sub: Subpresheaf) -> Subpresheaf:
    """Ḡ(C) = {x | j_C(char_G(x)) = t(C)}."""
    omega = j.omega
    mask = 0
    for p in range(presheaf.size):
        obj, x = presheaf.element(p)
        if j(characteristic_sieve(presheaf, sub, obj, x)) == omega.true(obj):
            mask |= 1 << p
    return Subpresheaf(presheaf, mask)


class WeakGrothendieck:
    """Covering sieves per object."""

    def __init__(self, omega: OmegaPresheaf, covers: Mapping[str, Iterable[Sieve]], name: str = "J") -> None:
        self.omega = omega
        self.name = name
        self.covers: dict[str, frozenset[Sieve]] = {o: frozenset(covers.get(o, ())) for o in omega.cat.objects}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeakGrothendieck) and self.covers == other.covers

    def __hash__(self) -> int:
        return hash(tuple((o, frozenset(c)) for o, c in sorted(self.covers.items())))

    def covering(self, obj: str) -> list[Sieve]:
        return sorted(self.covers[obj], key=Sieve.sort_key)

    def contains_maximal(self) -> bool:
        return all(self.omega.true(o) in self.covers[o] for o in self.omega.cat.objects)

    def stability_witness(self) -> dict[str, Any] | None:
        omega, cat = self.omega, self.omega.cat
        for h, m in enumerate(cat.morphisms):
            for s in self.covers[m.cod]:
                if omega.pullback(h, s) not in self.covers[m.dom]:
                    return {"morphism": m.name, "sieve": omega.names(s)}
        return None

    @property
    def stable(self) -> bool:
        return self.stability_witness() is None

    def describe(self) -> dict[str, list[list[str]]]:
        return {o: [self.omega.names(s) for s in self.covering(o)] for o in self.omega.cat.objects}

    def differences(self, other: WeakGrothendieck) -> dict[str, dict[str, list[list[str]]]]:
        out = {}
        for obj in self.omega.cat.objects:
            only_self = sorted(self.covers[obj] - other.covers[obj], key=Sieve.sort_key)
            only_other = sorted(other.covers[obj] - self.covers[obj], key=Sieve.sort_key)
            if only_self or only_other:
                out[obj] = {
                    self.name: [self.omega.names(s) for s in only_self],
                    other.name: [self.omega.names(s) for s in only_other],
                }
        return out


def grothendieck_from_j(j: OmegaEndo, name: str | None = None) -> WeakGrothendieck:
    """J(C) = {S | j_C(S) = t(C)}."""
    omega = j.omega
    covers = {
        obj: [s for s in omega.sieves(obj) if j(s) == omega.true(obj)] for obj in omega.cat.objects
    }
    return WeakGrothendieck(omega, covers, name=name or f"J[{j.name}]")


@dataclass(frozen=True)
class SubobjectClassification:
    dense: bool
    closed: bool

    @property
    def label(self) -> str:
        if self.dense and self.closed:
            return "dense+closed"
        if self.dense:
            return "dense"
        if self.closed:
            return "closed"
        return "neither"


def classify_subobject(j: OmegaEndo, presheaf: Presheaf, sub: Subpresheaf) -> SubobjectClassification:
    closure = closure_from_j(j, presheaf, sub)
    return SubobjectClassification(
        dense=closure == Subpresheaf.full(presheaf),
        closed=closure == sub,
    )


def atomic_negation_mask(omega: OmegaPresheaf, s: Sieve) -> int:
    """{k | k*(S) ≠ ∅}."""
    cat = omega.cat
    mask = 0
    for k in cat.into(s.base):
        if omega.principal_mask(k) & s.mask:
            mask |= 1 << k
    return mask


def double_negation(omega: OmegaPresheaf) -> OmegaEndo:
    """¬¬(S) = {f | ∀g ∃h, fgh ∈ S}; checked against {f | f*(S) ≠ ∅} when right Ore holds."""
    cat = omega.cat

    def rule(obj: str, s: Sieve) -> int:
        atomic = atomic_negation_mask(omega, s)
        mask = 0
        for f in cat.into(obj):
            if is_subset(omega.principal_mask(f), atomic):
                mask |= 1 << f
        return mask

    j = OmegaEndo.from_rule(omega, rule, "¬¬")
    if is_right_ore(cat):
        for obj in cat.objects:
            for s in omega.sieves(obj):
                atomic = atomic_negation_mask(omega, s)
                if j(s).mask != atomic:
                    raise TheoremViolation(
                        "double negation equals its atomic form under right Ore",
                        {"object": obj, "sieve": omega.names(s)},
                    )
    return j


@dataclass
class SheafReport:
    separated: bool
    sheaf: bool
    witness: dict[str, Any] | None = None


def matching_families(presheaf: Presheaf, cover: Sieve, limit: int) -> list[tuple[Any, ...]]:
    """Compatible families (x_f)_{f ∈ S}, listed in the order of ``cover.arrows()``."""
    cat = presheaf.cat
    arrows = cover.arrows()
    slot = {f: i for i, f in enumerate(arrows)}
    # constraints F(g)(x_f) = x_{f∘g}, attached to the later of the two slots
    checks: list[list[tuple[int, int, int]]] = [[] for _ in arrows]
    for i, f in enumerate(arrows):
        for g, fg in cat.precomposites(f):
            k = slot[fg]
            checks[max(i, k)].append((i, g, k))
    chosen: list[Any] = [None] * len(arrows)
    found: list[tuple[Any, ...]] = []

    def search(i: int) -> None:
        if i == len(arrows):
            found.append(tuple(chosen))
            if len(found) > limit:
                raise CapExceededError("max_elements", limit, len(found), "listing matching families")
            return
        for x in presheaf.at(cat.dom(arrows[i])):
            chosen[i] = x
            if all(presheaf.restrict(g, chosen[a]) == chosen[b] for a, g, b in checks[i]):
                search(i + 1)
        chosen[i] = None

    search(0)
    return found


def sheaf_check(presheaf: Presheaf, covers: WeakGrothendieck, caps: Caps | None = None) -> SheafReport:
    """Separated: amalgamations are unique; sheaf: they exist and are unique, for every cover."""
    caps = caps or default_caps()
    unstable = covers.stability_witness()
    if unstable is not None:
        raise StructureError(
            f"{covers.name} is not stable under pullback ({unstable['sieve']} along {unstable['morphism']})"
        )
    omega = covers.omega
    separated = True
    sheaf = True
    witness = None
    for obj in omega.cat.objects:
        for cover in covers.covering(obj):
            arrows = cover.arrows()
            families = matching_families(presheaf, cover, caps.max_elements)
            images: dict[tuple[Any, ...], Any] = {}
            for x in presheaf.at(obj):
                image = tuple(presheaf.restrict(f, x) for f in arrows)
                if image in images:
                    separated = sheaf = False
                    witness = witness or {
                        "object": obj,
                        "cover": omega.names(cover),
                        "reason": "two elements with the same restrictions",
                        "elements": [str(images[image]), str(x)],
                    }
                images[image] = x
            if set(images) != set(families):
                sheaf = False
                witness = witness or {
                    "object": obj,
                    "cover": omega.names(cover),
                    "reason": "a matching family has no amalgamation",
                }
    return SheafReport(separated=separated, sheaf=sheaf, witness=witness)


def omega_j(j: OmegaEndo) -> Subpresheaf:
    """Ω_j: the j-closed sieves, j_C(S) = S."""
    omega = j.omega
    mask = 0
    for obj in omega.cat.objects:
        for s in omega.sieves(obj):
            if j(s) == s:
                mask |= 1 << omega.position(obj, s)
    return Subpresheaf(omega, mask)


def default_candidates(j: OmegaEndo) -> list[Presheaf]:
    """Yoneda objects, their binary products, Ω, Ω_j and the terminal presheaf."""
    omega = j.omega
    cat = omega.cat
    candidates: list[Presheaf] = [terminal_presheaf(cat)]
    candidates.extend(yoneda(cat, obj) for obj in cat.objects)
    candidates.append(omega)
    candidates.append(omega_j(j).as_presheaf(f"Ω[{j.name}]"))
    for i, a in enumerate(cat.objects):
        for b in cat.objects[i:]:
            candidates.append(product(yoneda(cat, a), yoneda(cat, b)))
    return candidates


@dataclass
class DeMorganCase:
    candidate: str
    is_sheaf: bool
    checked: int = 0
    passed: bool = True
    witness: dict[str, Any] | None = None
    skipped: str | None = None


@dataclass
class DeMorganReport:
    topology: str
    cases: list[DeMorganCase]

    @property
    def passed(self) -> bool:
        return all(case.passed for case in self.cases)


def de_morgan_check(
    j: OmegaEndo,
    candidates: Sequence[Presheaf] | None = None,
    caps: Caps | None = None,
) -> DeMorganReport:
    """Check cl(cl(¬G) ∨ cl(¬cl(¬G))) = F for every subpresheaf G of every j-sheaf F."""
    caps = caps or default_caps()
    covers = grothendieck_from_j(j)
    cases = []
    for candidate in candidates if candidates is not None else default_candidates(j):
        try:
            status = sheaf_check(candidate, covers, caps)
        except CapExceededError as exc:
            cases.append(DeMorganCase(candidate.name, is_sheaf=False, skipped=str(exc)))
            continue
        case = DeMorganCase(candidate.name, is_sheaf=status.sheaf)
        cases.append(case)
        if not status.sheaf:
            case.skipped = "not a sheaf"
            continue
        try:
            subs = enumerate_subpresheaves(candidate, caps)
        except CapExceededError as exc:
            case.skipped = str(exc)
            continue
        lattice = SubobjectLattice(candidate)

        def close(g: Subpresheaf) -> Subpresheaf:
            return closure_from_j(j, candidate, g)

        for g in subs:
            first = close(lattice.negate(g))
            second = close(lattice.negate(first))
            result = close(lattice.join(first, second))
            case.checked += 1
            if result != lattice.top:
                case.passed = False
                case.witness = {"subpresheaf": g.describe()}
                break
    report = DeMorganReport(topology=j.name, cases=cases)
    logger.info("De Morgan check for %s: %s", j.name, "pass" if report.passed else "fail")
    return report
