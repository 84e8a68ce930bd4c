from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .admissible import AdmissibleClass, j_M_formula, sub_topology
from .category import (
    FinCat,
    ValidationReport,
    pullback_leg,
    slice_isomorphic,
    slice_product,
    structural_predicates,
    subobject_le,
)
from .checks import TheoremAudit
from .errors import CompletenessError, StructureError
from .ideals import Ideal, is_ideal_converse_stable, is_ideal_pullback_stable
from .omega import (
    OmegaEndo,
    OmegaPresheaf,
    Sieve,
    TopologyFlags,
    WeakGrothendieck,
    check_weak_topology,
    closure_from_j,
    grothendieck_from_j,
    omega_j,
)
from .presheaf import Presheaf, Subpresheaf, enumerate_subpresheaves, yoneda
from .settings import Caps


logger = logging.getLogger(__name__)

Witness = dict[str, Any]


def _product_or_raise(cat: FinCat, f: int, h: int, context: str) -> int:
    product = slice_product(cat, f, h)
    if product is None:
        raise CompletenessError(cat.name(f), cat.name(h), context)
    return product


class MonoidOnM:
    """(M, ·, e): slice product on canonical representatives, unit the identity."""

    def __init__(self, cls: AdmissibleClass) -> None:
        self.cls = cls
        self.cat = cls.cat
        self._table: dict[tuple[int, int], int] = {}
        for obj in self.cat.objects:
            for m in cls.at(obj):
                for n in cls.at(obj):
                    raw = _product_or_raise(self.cat, m, n, f"multiplying M[{cls.name}]({obj})")
                    self._table[(m, n)] = cls.representative(raw)

    def unit(self, obj: str) -> int:
        return self.cls.representative(self.cat.identity(obj))

    def mul(self, m: int, n: int) -> int:
        return self._table[(self.cls.representative(m), self.cls.representative(n))]

    def law_witnesses(self) -> dict[str, Witness | None]:
        cat = self.cat
        found: dict[str, Witness | None] = {
            "unit": None,
            "associative": None,
            "commutative": None,
            "pomonoid": None,
        }

        def note(key: str, **witness: Any) -> None:
            if found[key] is None:
                found[key] = witness

        for obj in cat.objects:
            reps = self.cls.at(obj)
            e = self.unit(obj)
            for m in reps:
                if self.mul(m, e) != m or self.mul(e, m) != m:
                    note("unit", object=obj, m=cat.name(m))
                for n in reps:
                    if self.mul(m, n) != self.mul(n, m):
                        note("commutative", object=obj, m=cat.name(m), n=cat.name(n))
                    for p in reps:
                        if self.mul(self.mul(m, n), p) != self.mul(m, self.mul(n, p)):
                            note("associative", object=obj, arrows=cat.names((m, n, p)))
            for m in reps:
                for m2 in reps:
                    if not subobject_le(cat, m, m2):
                        continue
                    for n in reps:
                        for n2 in reps:
                            if subobject_le(cat, n, n2) and not subobject_le(cat, self.mul(m, n), self.mul(m2, n2)):
                                note("pomonoid", object=obj, arrows=cat.names((m, m2, n, n2)))
        return found


def monoid_on_M(cls: AdmissibleClass) -> MonoidOnM:
    return MonoidOnM(cls)


def act(cls: AdmissibleClass, s: Sieve, m: int) -> Sieve:
    """S·m = {h | m×h ∈ S}."""
    cat = cls.cat
    if cat.cod(m) != s.base:
        raise StructureError(f"{cat.name(m)} does not land in {s.base}")
    mask = 0
    for h in cat.into(s.base):
        if _product_or_raise(cat, m, h, "acting on Ω") in s:
            mask |= 1 << h
    return Sieve(s.base, mask)


class OmegaAction:
    """The action Ω×M → Ω, tabulated on canonical representatives."""

    def __init__(self, cls: AdmissibleClass, omega: OmegaPresheaf) -> None:
        self.cls = cls
        self.omega = omega
        self.cat = omega.cat
        self.monoid = MonoidOnM(cls)
        self._table: dict[tuple[Sieve, int], Sieve] = {}
        for obj in self.cat.objects:
            for s in omega.sieves(obj):
                for m in cls.at(obj):
                    self._table[(s, m)] = act(cls, s, m)
        logger.debug("tabulated action of M[%s] on Ω: %d entries", cls.name, len(self._table))

    def __call__(self, s: Sieve, m: int) -> Sieve:
        return self._table[(s, self.cls.representative(m))]

    def restrict_m(self, k: int, m: int) -> int:
        leg = pullback_leg(self.cat, k, m)
        if leg is None:
            raise CompletenessError(self.cat.name(k), self.cat.name(m), "restricting M")
        return self.cls.representative(leg)

    def pairs(self, obj: str) -> Iterable[tuple[Sieve, int]]:
        for s in self.omega.sieves(obj):
            for m in self.cls.at(obj):
                yield s, m

    def law_witnesses(self) -> dict[str, Witness | None]:
        """Action axioms, naturality, independence of the representative and commutativity."""
        cat, omega, monoid = self.cat, self.omega, self.monoid
        found: dict[str, Witness | None] = {
            "unit": None,
            "compatible": None,
            "natural": None,
            "representative": None,
            "commutative": None,
        }

        def note(key: str, s: Sieve, **witness: Any) -> None:
            if found[key] is None:
                found[key] = {"object": s.base, "sieve": omega.names(s), **witness}

        for obj in cat.objects:
            e = monoid.unit(obj)
            for s, m in self.pairs(obj):
                if self(s, e) != s:
                    note("unit", s)
                for n in self.cls.at(obj):
                    if self(s, monoid.mul(m, n)) != self(self(s, m), n):
                        note("compatible", s, m=cat.name(m), n=cat.name(n))
                    if self(s, monoid.mul(m, n)) != self(s, monoid.mul(n, m)):
                        note("commutative", s, m=cat.name(m), n=cat.name(n))
                for k in cat.into(obj):
                    left = omega.pullback(k, self(s, m))
                    right = self(omega.pullback(k, s), self.restrict_m(k, m))
                    if left != right:
                        note("natural", s, m=cat.name(m), k=cat.name(k))
            for s in omega.sieves(obj):
                for m in sorted(self.cls.members):
                    if cat.cod(m) == obj and act(self.cls, s, m) != self(s, m):
                        note("representative", s, m=cat.name(m))
        return found


def preserves_action(j: OmegaEndo, action: OmegaAction) -> bool:
    return equivariance_check(j, action).equivariant


def _poset_meet(cat: FinCat, b: str, c: str) -> str | None:
    lower = [d for d in cat.objects if cat.hom(d, b) and cat.hom(d, c)]
    for d in lower:
        if all(cat.hom(x, d) for x in lower):
            return d
    return None


def is_poset(cat: FinCat) -> bool:
    return all(
        len(cat.hom(a, b)) <= 1 and (a == b or not (cat.hom(a, b) and cat.hom(b, a)))
        for a in cat.objects
        for b in cat.objects
    )


def semilattice_witness(action: OmegaAction) -> Witness | None:
    """On a poset, S·(b≤a) = {c≤a | c∧b ∈ S}; the meet is read off the order directly."""
    cat, omega = action.cat, action.omega
    for obj in cat.objects:
        for s, m in action.pairs(obj):
            b = cat.dom(m)
            mask = 0
            for h in cat.into(obj):
                meet = _poset_meet(cat, b, cat.dom(h))
                if meet is not None and cat.hom(meet, obj)[0] in s:
                    mask |= 1 << h
            if Sieve(obj, mask) != action(s, m):
                return {"object": obj, "sieve": omega.names(s), "m": cat.name(m)}
    return None


def lambda_eval(cls: AdmissibleClass, m: int, g: int, s: Sieve) -> Sieve:
    """(λ_C(m))_D(g, S) = {h | g^{-1}(m)×h ∈ S} for m ∈ M(C), g: D→C and S a sieve on D."""
    cat = cls.cat
    if cat.cod(g) != cat.cod(m):
        raise StructureError(f"{cat.name(g)} and {cat.name(m)} do not share a codomain")
    if cat.dom(g) != s.base:
        raise StructureError(f"sieve on {s.base} cannot be paired with {cat.name(g)}")
    leg = pullback_leg(cat, g, m)
    if leg is None:
        raise CompletenessError(cat.name(g), cat.name(m), "evaluating a translation")
    return act(cls, s, leg)


def lambda_identity_witness(action: OmegaAction) -> Witness | None:
    """λ_C(m)_C(id_C, S) = S·m."""
    cat = action.cat
    for obj in cat.objects:
        for s, m in action.pairs(obj):
            if lambda_eval(action.cls, m, cat.identity(obj), s) != action(s, m):
                return {"object": obj, "sieve": action.omega.names(s), "m": cat.name(m)}
    return None


def _subact_witness(action: OmegaAction, closed: Subpresheaf, label: str) -> Witness | None:
    for obj in action.cat.objects:
        for s, m in action.pairs(obj):
            if closed.contains(obj, s) and not closed.contains(obj, action(s, m)):
                return {
                    "subobject": label,
                    "object": obj,
                    "sieve": action.omega.names(s),
                    "m": action.cat.name(m),
                }
    return None


def w_mu(action: OmegaAction) -> dict[str, list[tuple[Sieve, int]]]:
    """W_μ(C) = {(S, m) | S·m = t(C)}."""
    return {
        obj: [(s, m) for s, m in action.pairs(obj) if action(s, m) == action.omega.true(obj)]
        for obj in action.cat.objects
    }


def w_mu_witness(action: OmegaAction, table: Mapping[str, list[tuple[Sieve, int]]]) -> Witness | None:
    """W_μ is a subpresheaf of Ω×M."""
    cat, omega = action.cat, action.omega
    for obj, pairs in table.items():
        for s, m in pairs:
            for k in cat.into(obj):
                restricted = (omega.pullback(k, s), action.restrict_m(k, m))
                if restricted not in table[cat.dom(k)]:
                    return {"object": obj, "sieve": omega.names(s), "m": cat.name(m), "k": cat.name(k)}
    return None


def true_pullback_witness(phi: OmegaEndo, action: OmegaAction) -> Witness | None:
    """W = φ^{-1}(true) is closed under the action."""
    omega = action.omega
    for obj in action.cat.objects:
        for s, m in action.pairs(obj):
            if phi(s) == omega.true(obj) and phi(action(s, m)) != omega.true(obj):
                return {"endo": phi.name, "object": obj, "sieve": omega.names(s), "m": action.cat.name(m)}
    return None


@dataclass
class FrameReport:
    witnesses: dict[str, Witness | None]
    w_mu: dict[str, list[list[Any]]]
    skipped: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(w is None for w in self.witnesses.values())


def frame_and_subact_checks(
    action: OmegaAction,
    endos: Iterable[OmegaEndo] = (),
) -> FrameReport:
    """M-frame equivariance of ∧, ∨, true and false; subacts; Sub-poset; W_μ; W for each preserving endo."""
    cat, omega, cls = action.cat, action.omega, action.cls
    found: dict[str, Witness | None] = {}

    def first(key: str, witness: Witness | None) -> None:
        if found.get(key) is None:
            found[key] = witness

    for key in ("meet", "join", "top", "bottom"):
        found[key] = None
    for obj in cat.objects:
        sieves = omega.sieves(obj)
        for m in cls.at(obj):
            name = cat.name(m)
            if action(omega.true(obj), m) != omega.true(obj):
                first("top", {"object": obj, "m": name})
            if action(omega.empty(obj), m) != omega.empty(obj):
                first("bottom", {"object": obj, "m": name})
            for s in sieves:
                for t in sieves:
                    if action(omega.meet(s, t), m) != omega.meet(action(s, m), action(t, m)):
                        first("meet", {"object": obj, "sieves": [omega.names(s), omega.names(t)], "m": name})
                    if action(omega.join(s, t), m) != omega.join(action(s, m), action(t, m)):
                        first("join", {"object": obj, "sieves": [omega.names(s), omega.names(t)], "m": name})

    j_m = j_M_formula(cls, omega)
    found["subact_j_M"] = _subact_witness(action, omega_j(j_m), f"Ω[j_{cls.name}]")

    skipped = []
    sub_class = AdmissibleClass.all_monos(cat)
    j_sub = sub_topology(omega)
    sub_objects: tuple[str, ...] = cat.objects
    if j_sub is None:
        skipped.extend(("subact_j_Sub", "sub_poset"))
        sub_objects = ()
    else:
        closed_sub = omega_j(j_sub)
        found["subact_j_Sub"] = _subact_witness(action, closed_sub, "Ω[j_Sub]")
        sub_action = action if cls == sub_class else OmegaAction(sub_class, omega)
        found["sub_poset"] = None
    for obj in sub_objects:
        closed = [s for s in omega.sieves(obj) if closed_sub.contains(obj, s)]
        for s in closed:
            for t in closed:
                if not s.within(t):
                    continue
                for m in sub_class.at(obj):
                    for n in sub_class.at(obj):
                        if subobject_le(cat, m, n) and not sub_action(s, m).within(sub_action(t, n)):
                            first("sub_poset", {
                                "object": obj,
                                "sieves": [omega.names(s), omega.names(t)],
                                "monos": cat.names((m, n)),
                            })

    table = w_mu(action)
    found["w_mu_subpresheaf"] = w_mu_witness(action, table)
    found["lambda_identity"] = lambda_identity_witness(action)
    if is_poset(cat):
        found["semilattice_action"] = semilattice_witness(action)
    else:
        skipped.append("semilattice_action")
    for phi in endos:
        if preserves_action(phi, action):
            found[f"true_pullback[{phi.name}]"] = true_pullback_witness(phi, action)
    rendered = {
        obj: [[omega.names(s), cat.name(m)] for s, m in pairs] for obj, pairs in table.items()
    }
    return FrameReport(witnesses=found, w_mu=rendered, skipped=skipped)


@dataclass
class EquivarianceResult:
    """forward: j(S·m) ⊆ j(S)·m; backward: j(S)·m ⊆ j(S·m)."""

    forward: bool
    backward: bool
    forward_witness: Witness | None = None
    backward_witness: Witness | None = None

    @property
    def equivariant(self) -> bool:
        return self.forward and self.backward

    def as_dict(self) -> dict[str, Any]:
        return {
            "forward": self.forward,
            "backward": self.backward,
            "equivariant": self.equivariant,
            "forward_witness": self.forward_witness,
            "backward_witness": self.backward_witness,
        }


def equivariance_check(j: OmegaEndo, action: OmegaAction) -> EquivarianceResult:
    cat, omega = action.cat, action.omega
    fw: Witness | None = None
    bw: Witness | None = None
    for obj in cat.objects:
        for s, m in action.pairs(obj):
            left, right = j(action(s, m)), action(j(s), m)
            if fw is None and not left.within(right):
                fw = {"object": obj, "sieve": omega.names(s), "m": cat.name(m)}
            if bw is None and not right.within(left):
                bw = {"object": obj, "sieve": omega.names(s), "m": cat.name(m)}
    return EquivarianceResult(fw is None, bw is None, fw, bw)


def equivariance_audits(
    kind: str,
    j: OmegaEndo,
    action: OmegaAction,
    ideal: Ideal | None = None,
) -> tuple[EquivarianceResult, list[TheoremAudit]]:
    """Evaluate the equivariance inclusions of j alongside the hypotheses they are claimed from.

    ``kind`` is one of "notnot", "j_M", "j_Sub", "ideal" or "other".
    """
    cat = action.cat
    result = equivariance_check(j, action)
    fw, bw = result.forward, result.backward
    rows: list[TheoremAudit] = []
    if kind == "notnot":
        preds = structural_predicates(cat)
        rows.append(TheoremAudit("¬¬(S·m) ⊆ ¬¬(S)·m", {}, fw, witness=result.forward_witness))
        rows.append(TheoremAudit(
            "pullback completion ⇒ ¬¬(S)·m ⊆ ¬¬(S·m)",
            {"pullback_completion": preds.pullback_completion},
            bw,
            witness=result.backward_witness,
        ))
    elif kind in ("j_M", "j_Sub"):
        cls = action.cls if kind == "j_M" else AdmissibleClass.all_monos(cat)
        preds = structural_predicates(cat, cls)
        rows.append(TheoremAudit(f"{j.name}(S·m) ⊆ {j.name}(S)·m", {}, fw, witness=result.forward_witness))
        rows.append(TheoremAudit(
            f"𝓜-pullback completion ⇒ {j.name}(S)·m ⊆ {j.name}(S·m)",
            {"m_pullback_completion": bool(preds.m_pullback_completion)},
            bw,
            witness=result.backward_witness,
        ))
    elif kind == "ideal" and ideal is not None:
        preds = structural_predicates(cat)
        stable = is_ideal_pullback_stable(ideal).holds
        co_stable = is_ideal_converse_stable(ideal).holds
        completion = {"pullback_completion": preds.pullback_completion, "converse_stable": co_stable}
        rows.extend([
            TheoremAudit(
                f"pullback-stable ⇒ {j.name}(S)·m ⊆ {j.name}(S·m)",
                {"pullback_stable": stable}, bw, witness=result.backward_witness,
            ),
            TheoremAudit(
                f"completion + converse stability ⇒ {j.name}(S·m) ⊆ {j.name}(S)·m",
                completion, fw, witness=result.forward_witness,
            ),
            TheoremAudit(
                f"pullback-stable ⇒ {j.name}(S·m) ⊆ {j.name}(S)·m",
                {"pullback_stable": stable}, fw, claimed=False,
            ),
            TheoremAudit(
                f"completion + converse stability ⇒ {j.name}(S)·m ⊆ {j.name}(S·m)",
                completion, bw, claimed=False,
            ),
        ])
    return result, rows


class TranslationFamily:
    """A designated arrow f_C into each object C."""

    def __init__(self, cat: FinCat, arrows: Mapping[str, int], name: str = "F") -> None:
        self.cat = cat
        self.name = name
        missing = [o for o in cat.objects if o not in arrows]
        if missing:
            raise StructureError(f"family '{name}' has no arrow for {missing}")
        for obj, f in arrows.items():
            cat.require_object(obj)
            if cat.cod(f) != obj:
                raise StructureError(f"family '{name}': {cat.name(f)} does not land in {obj}")
        self.arrows = {o: arrows[o] for o in cat.objects}

    @classmethod
    def from_names(cls, cat: FinCat, name: str, arrows: Mapping[str, str]) -> TranslationFamily:
        return cls(cat, {obj: cat.index(f) for obj, f in arrows.items()}, name)

    @classmethod
    def identities(cls, cat: FinCat, name: str = "id") -> TranslationFamily:
        return cls(cat, {o: cat.identity(o) for o in cat.objects}, name)

    def __getitem__(self, obj: str) -> int:
        return self.arrows[obj]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TranslationFamily) and self.cat == other.cat and self.arrows == other.arrows

    def __hash__(self) -> int:
        return hash((self.cat, tuple(self.arrows.values())))

    def describe(self) -> dict[str, str]:
        return {obj: self.cat.name(f) for obj, f in self.arrows.items()}

    def translate(self, obj: str, h: int) -> int:
        return _product_or_raise(self.cat, self.arrows[obj], h, f"translating along family '{self.name}'")


def validate_family(family: TranslationFamily, omega: OmegaPresheaf) -> ValidationReport:
    """{h | f_C×h ∈ g*(S_D)} = {h | f_D×(gh) ∈ S_D} for every g: C→D and sieve S_D on D."""
    cat = family.cat
    report = ValidationReport(f"family '{family.name}'")
    for g, gm in enumerate(cat.morphisms):
        c, d = gm.dom, gm.cod
        for s in omega.sieves(d):
            pulled = omega.pullback(g, s)
            left = {h for h in cat.into(c) if family.translate(c, h) in pulled}
            right = {h for h in cat.into(c) if family.translate(d, cat.compose(g, h)) in s}
            if left != right:
                report.add(f"compatibility fails for g = {gm.name}, S_{d} = {omega.names(s)}")
                break
    return report


def sufficient_condition_failures(family: TranslationFamily) -> list[str]:
    """Arrows g: C→D with g^{-1}(f_D) not isomorphic to f_C."""
    cat = family.cat
    failures = []
    for g, gm in enumerate(cat.morphisms):
        leg = pullback_leg(cat, g, family[gm.cod])
        if leg is None or not slice_isomorphic(cat, leg, family[gm.dom]):
            failures.append(gm.name)
    return failures


def alpha_endo(family: TranslationFamily, omega: OmegaPresheaf) -> OmegaEndo:
    """α(S) = {h | f_C×h ∈ S}."""
    cat = family.cat

    def rule(obj: str, s: Sieve) -> int:
        mask = 0
        for h in cat.into(obj):
            if family.translate(obj, h) in s:
                mask |= 1 << h
        return mask

    return OmegaEndo.from_rule(omega, rule, f"α_{family.name}")


def alpha_closure_literal(family: TranslationFamily, presheaf: Presheaf, sub: Subpresheaf) -> Subpresheaf:
    """Ḡ(C) = {x | ∀h into C, F(f_C×h)(x) ∈ G(dom(f_C×h))}."""
    cat = family.cat
    mask = 0
    for p in range(presheaf.size):
        obj, x = presheaf.element(p)
        ok = True
        for h in cat.into(obj):
            fh = family.translate(obj, h)
            if not sub.contains(cat.dom(fh), presheaf.restrict(fh, x)):
                ok = False
                break
        if ok:
            mask |= 1 << p
    return Subpresheaf(presheaf, mask)


@dataclass
class AlphaAnalysis:
    family: TranslationFamily
    alpha: OmegaEndo
    flags: TopologyFlags
    idempotent_arrows: dict[str, bool]
    converse_witness: Witness | None
    covers: WeakGrothendieck
    covers_formula: WeakGrothendieck
    closure_mismatches: list[Witness]
    sufficient_failures: list[str]

    @property
    def all_idempotent(self) -> bool:
        return all(self.idempotent_arrows.values())

    @property
    def covers_agree(self) -> bool:
        return self.covers == self.covers_formula


def duplication_witness(family: TranslationFamily, omega: OmegaPresheaf, endo: OmegaEndo) -> Witness | None:
    """First (C, S, h) where f_C²×h ∈ S and h ∈ endo(S) disagree. With endo = α_𝓕 this is exactly α² ≠ α."""
    cat = family.cat
    for obj in cat.objects:
        f2 = family.translate(obj, family[obj])
        for s in omega.sieves(obj):
            closed = endo(s)
            for h in cat.into(obj):
                if (_product_or_raise(cat, f2, h, "squaring a family arrow") in s) != (h in closed):
                    return {"object": obj, "sieve": omega.names(s), "h": cat.name(h)}
    return None


def translations_alpha(
    family: TranslationFamily,
    omega: OmegaPresheaf,
    caps: Caps | None = None,
) -> AlphaAnalysis:
    validate_family(family, omega).raise_if_invalid()
    cat = family.cat
    alpha = alpha_endo(family, omega)
    flags = check_weak_topology(alpha)

    idempotent = {}
    for obj in cat.objects:
        f = family[obj]
        idempotent[obj] = slice_isomorphic(cat, family.translate(obj, f), f)

    converse = duplication_witness(family, omega, alpha)

    covers_formula = WeakGrothendieck(
        omega,
        {
            o: [s for s in omega.sieves(o) if all(family.translate(o, h) in s for h in cat.into(o))]
            for o in cat.objects
        },
        name=f"J_α[{family.name}]",
    )
    mismatches = []
    for obj in cat.objects:
        y = yoneda(cat, obj)
        for sub in enumerate_subpresheaves(y, caps):
            if alpha_closure_literal(family, y, sub) != closure_from_j(alpha, y, sub):
                mismatches.append({"presheaf": y.name, "subpresheaf": sub.describe()})
    return AlphaAnalysis(
        family=family,
        alpha=alpha,
        flags=flags,
        idempotent_arrows=idempotent,
        converse_witness=converse,
        covers=grothendieck_from_j(alpha, name=f"J[α_{family.name}]"),
        covers_formula=covers_formula,
        closure_mismatches=mismatches,
        sufficient_failures=sufficient_condition_failures(family),
    )
