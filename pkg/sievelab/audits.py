"""Analyses behind each command; every one returns report sections and theorem audits."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .action import (
    EquivarianceResult,
    OmegaAction,
    TranslationFamily,
    alpha_endo,
    equivariance_audits,
    equivariance_check,
    frame_and_subact_checks,
    translations_alpha,
    validate_family,
)
from .admissible import (
    AdmissibleClass,
    Quantifiers,
    char_mu,
    enumerate_admissible_classes,
    extensivity_witness,
    j_M_formula,
    m_presheaf,
    mu_M,
    mu_adjunction_witness,
    mu_properties,
    partial_maps,
    sub_topology,
    topology_from_M,
    validate_admissible,
)
from .category import structural_predicates, terminal_object, validate_category
from .checks import Section, TheoremAudit
from .errors import ResolutionError
from .ideals import (
    Ideal,
    empty_ideal,
    enumerate_ideals,
    ideal_closure,
    ideal_double_negation,
    ideal_grothendieck,
    is_idempotent,
    is_ideal_converse_stable,
    is_ideal_pullback_stable,
    matching_family_check,
    omega_j_literal,
    validate_ideal,
    weak_ideal_topology,
    yoneda_ideal,
)
from .omega import (
    OmegaEndo,
    Sieve,
    check_weak_topology,
    closure_from_j,
    de_morgan_check,
    default_candidates,
    double_negation,
    identity_endo,
    omega_j,
    true_endo,
)
from .presheaf import (
    Presheaf,
    Subpresheaf,
    enumerate_nat_trans,
    enumerate_subpresheaves,
    preimage,
    sub_heyting,
    validate_presheaf,
    yoneda,
)
from .workspace import Workspace


logger = logging.getLogger(__name__)

NOT_ADMISSIBLE = "all monos are not an admissible class"


@dataclass
class Outcome:
    sections: list[Section] = field(default_factory=list)
    audits: list[TheoremAudit] = field(default_factory=list)

    def extend(self, other: Outcome) -> Outcome:
        self.sections.extend(other.sections)
        self.audits.extend(other.audits)
        return self


@dataclass
class Topology:
    """A topology named on the command line, with what the equivariance audit needs to know."""

    kind: str
    j: OmegaEndo
    ideal: Ideal | None = None
    admissible: AdmissibleClass | None = None


def resolve_topology(ws: Workspace, token: str) -> Topology:
    """identity, true, notnot/¬¬, j_Sub, j_M:<class>, alpha:<family>, or an ideal name (j^<name> also accepted)."""
    omega = ws.omega
    if token == "identity":
        return Topology("other", identity_endo(omega))
    if token == "true":
        return Topology("other", true_endo(omega))
    if token in ("notnot", "¬¬"):
        return Topology("notnot", double_negation(omega))
    if token == "j_Sub":
        j = sub_topology(omega)
        if j is None:
            raise ResolutionError(f"j_Sub is undefined on {ws.source}: the monos do not form an admissible class")
        return Topology("j_Sub", j)
    if token.startswith("j_M:"):
        cls = ws.admissible(token[4:])
        return Topology("j_M", j_M_formula(cls, omega), admissible=cls)
    if token.startswith("alpha:"):
        return Topology("other", alpha_endo(ws.family(token[6:]), omega))
    name = token[2:] if token.startswith("j^") and token[2:] in ws.ideals else token
    if name not in ws.ideals:
        raise ResolutionError(
            f"Unknown topology '{token}'; use identity, true, notnot, j_Sub, j_M:<class>, "
            f"alpha:<family> or one of the ideals {sorted(ws.ideals)}"
        )
    ideal = ws.ideals[name]
    return Topology("ideal", weak_ideal_topology(ideal), ideal=ideal)


def sieve_as_subpresheaf(ws: Workspace, s: Sieve) -> Subpresheaf:
    cat = ws.cat
    y = yoneda(cat, s.base)
    sets: dict[str, list[str]] = {}
    for f in s.arrows():
        sets.setdefault(cat.dom(f), []).append(cat.name(f))
    return Subpresheaf.from_sets(y, sets)


def _closure_mismatch(
    literal: Callable[[Presheaf, Subpresheaf], Subpresheaf],
    j: OmegaEndo,
    presheaves: Iterable[Presheaf],
    ws: Workspace,
) -> dict[str, Any] | None:
    for presheaf in presheaves:
        for sub in enumerate_subpresheaves(presheaf, ws.caps):
            if literal(presheaf, sub) != closure_from_j(j, presheaf, sub):
                return {"presheaf": presheaf.name, "subpresheaf": sub.describe()}
    return None


def _closure_law_witnesses(
    closure: Callable[[Presheaf, Subpresheaf], Subpresheaf],
    presheaves: Iterable[Presheaf],
    ws: Workspace,
) -> tuple[dict[str, Any] | None, dict[str, Any] | None]:
    """First failure of G ≤ Ḡ and first failure of G ≤ H ⇒ Ḡ ≤ H̄."""
    extensive = monotone = None
    for presheaf in presheaves:
        subs = enumerate_subpresheaves(presheaf, ws.caps)
        closed = [closure(presheaf, sub) for sub in subs]
        for i, sub in enumerate(subs):
            if extensive is None and not sub.le(closed[i]):
                extensive = {"presheaf": presheaf.name, "subpresheaf": sub.describe()}
            for k, other in enumerate(subs):
                if monotone is None and sub.le(other) and not closed[i].le(closed[k]):
                    monotone = {"presheaf": presheaf.name, "smaller": sub.describe(), "larger": other.describe()}
    return extensive, monotone


def _yonedas(ws: Workspace) -> list[Presheaf]:
    return [yoneda(ws.cat, obj) for obj in ws.cat.objects]


def validate_analysis(ws: Workspace) -> Outcome:
    cat = ws.cat
    section = Section("validate")
    report = validate_category(cat.description, ws.caps)
    section.check("category", report.valid, report.violations or None)
    preds = structural_predicates(cat)
    section.facts.update(
        {
            "objects": list(cat.objects),
            "morphisms": len(cat),
            "terminal_object": terminal_object(cat),
            "structural_predicates": {k: v for k, v in preds.as_dict().items() if v is not None},
            "predicate_witnesses": preds.witnesses,
        }
    )
    for name, ideal in sorted(ws.ideals.items()):
        r = validate_ideal(ideal)
        section.check(f"ideal {name}", r.valid, r.violations or None)
    for name, cls in sorted(ws.classes.items()):
        r = validate_admissible(cls)
        section.check(f"admissible class {name}", r.valid, r.violations or None)
        section.facts[f"m_pullback_completion[{name}]"] = structural_predicates(cat, cls).m_pullback_completion
    for name, family in sorted(ws.families.items()):
        r = validate_family(family, ws.omega)
        section.check(f"family {name}", r.valid, r.violations or None)
    for name, presheaf in sorted(ws.presheaves.items()):
        r = validate_presheaf(presheaf)
        section.check(f"presheaf {name}", r.valid, r.violations or None)
    return Outcome([section])


def omega_analysis(ws: Workspace) -> Outcome:
    cat, omega = ws.cat, ws.omega
    section = Section("omega")
    section.facts["sizes"] = {obj: len(omega.sieves(obj)) for obj in cat.objects}
    section.facts["sieves"] = {obj: [omega.names(s) for s in omega.sieves(obj)] for obj in cat.objects}

    witness = None
    for obj in cat.objects:
        count = len(enumerate_subpresheaves(yoneda(cat, obj), ws.caps))
        if count != len(omega.sieves(obj)) and witness is None:
            witness = {"object": obj, "subpresheaves": count, "sieves": len(omega.sieves(obj))}
    section.expect_none("subpresheaves of y(C) match sieves on C", witness)

    for j in (identity_endo(omega), true_endo(omega)):
        flags = check_weak_topology(j)
        section.check(f"{j.name} is a topology", flags.topology, flags.witnesses or None)

    notnot = double_negation(omega)
    flags = check_weak_topology(notnot)
    section.check("¬¬ is a topology", flags.topology, flags.witnesses or None)
    section.facts["¬¬"] = flags.as_dict()

    witness = None
    for obj in cat.objects:
        lattice = sub_heyting(yoneda(cat, obj))
        for s in omega.sieves(obj):
            heyting = lattice.negate(lattice.negate(sieve_as_subpresheaf(ws, s)))
            if heyting != sieve_as_subpresheaf(ws, notnot(s)) and witness is None:
                witness = {"object": obj, "sieve": omega.names(s)}
    section.expect_none("¬¬ agrees with double Heyting negation in Sub(y(C))", witness)

    j_sub = sub_topology(omega)
    section.facts["j_Sub = ¬¬"] = NOT_ADMISSIBLE if j_sub is None else j_sub == notnot
    return Outcome([section])


def ideals_analysis(ws: Workspace) -> Outcome:
    omega = ws.omega
    section = Section("ideals")
    ideals = enumerate_ideals(omega, ws.caps)
    section.facts["count"] = len(ideals)
    section.facts["ideals"] = [ideal.describe() for ideal in ideals]

    invalid = [ideal.describe() for ideal in ideals if not validate_ideal(ideal).valid]
    section.check("every enumerated ideal revalidates", not invalid, invalid or None)

    witness = None
    idempotent = 0
    for ideal in ideals:
        flags = check_weak_topology(weak_ideal_topology(ideal))
        square = is_idempotent(ideal)
        idempotent += square
        if witness is None and not (flags.weak and flags.productive and flags.topology == square):
            witness = {"ideal": ideal.describe(), "flags": flags.as_dict(), "idempotent_ideal": square}
    section.facts["idempotent"] = idempotent
    section.expect_none("j^I weak and productive; topology iff I² = I", witness)

    missing = sorted(name for name, ideal in ws.ideals.items() if ideal not in ideals)
    section.check("workspace ideals are enumerated", not missing, missing or None)
    return Outcome([section])


def ideal_audit(ws: Workspace, ideal: Ideal) -> Outcome:
    cat, omega = ws.cat, ws.omega
    section = Section(f"ideal-audit {ideal.name}")
    out = Outcome([section])
    j = weak_ideal_topology(ideal)
    flags = check_weak_topology(j)
    idempotent = is_idempotent(ideal)
    section.facts.update(
        {
            "ideal": ideal.describe(),
            "flags": flags.as_dict(),
            "idempotent_ideal": idempotent,
            "nonempty_everywhere": ideal.nonempty_everywhere,
            "pullback_stable": is_ideal_pullback_stable(ideal).holds,
            "converse_stable": is_ideal_converse_stable(ideal).holds,
        }
    )
    section.check("j^I is weak and productive", flags.weak and flags.productive, flags.witnesses or None)
    section.check("j^I is a topology iff I² = I", flags.topology == idempotent)

    presheaves = [*_yonedas(ws), omega]
    section.expect_none(
        "ideal closure agrees with the closure of j^I",
        _closure_mismatch(lambda f, g: ideal_closure(ideal, f, g), j, presheaves, ws),
    )
    extensive, monotone = _closure_law_witnesses(lambda f, g: ideal_closure(ideal, f, g), _yonedas(ws), ws)
    section.expect_none("C^I is extensive", extensive)
    section.expect_none("C^I is monotone", monotone)

    covers = ideal_grothendieck(ideal, j)
    section.check("covers {S | I_C ⊆ S} equal {S | j^I(S) = t(C)}", covers.agree, covers.differences() or None, info=True)
    not_covering = [o for o in cat.objects if j(ideal[o]) != omega.true(o)]
    section.check("every I_C covers", not not_covering, not_covering or None)
    closed = omega_j(j)
    wrong = [o for o in cat.objects if closed.contains(o, ideal[o]) != (ideal[o] == omega.true(o))]
    section.check("I_C is closed iff I_C = t(C)", not wrong, wrong or None)
    section.check("closed sieves match the pointwise description", omega_j_literal(ideal) == closed)

    if ideal == yoneda_ideal(omega):
        section.check("j^y is the identity", j == identity_endo(omega), j.differences(identity_endo(omega)) or None)
    if ideal == empty_ideal(omega):
        section.check("j^0 is true∘!", j == true_endo(omega), j.differences(true_endo(omega)) or None)

    notnot = double_negation(omega)
    nn_i = ideal_double_negation(ideal)
    out.audits.append(
        TheoremAudit(
            f"every I_C nonempty ⇒ ¬¬_{ideal.name} = ¬¬",
            {"nonempty_everywhere": ideal.nonempty_everywhere},
            nn_i == notnot,
        )
    )
    out.audits.append(
        TheoremAudit(
            f"I² = I and every I_C nonempty ⇒ j^{ideal.name} ≤ ¬¬",
            {"idempotent": idempotent, "nonempty_everywhere": ideal.nonempty_everywhere},
            j.le(notnot),
            witness=j.le_witness(notnot),
        )
    )

    families = {}
    for obj in cat.objects:
        result = matching_family_check(ideal, obj)
        families[obj] = result.holds if result.witness is None else result.witness
    section.facts["matching_family_converse"] = families

    witness = None
    for c in cat.objects:
        for d in cat.objects:
            source, target = yoneda(cat, c), yoneda(cat, d)
            subs = enumerate_subpresheaves(target, ws.caps)
            for alpha in enumerate_nat_trans(source, target, ws.caps.max_nat_trans):
                for g in subs:
                    left = preimage(alpha, ideal_closure(ideal, target, g))
                    right = ideal_closure(ideal, source, preimage(alpha, g))
                    if left != right and witness is None:
                        witness = {"source": source.name, "target": target.name, "subpresheaf": g.describe()}
    section.expect_none("closure commutes with preimages along y(C) → y(D)", witness)
    return out


def admissible_audit(ws: Workspace, cls: AdmissibleClass) -> Outcome:
    cat, omega = ws.cat, ws.omega
    section = Section(f"admissible-audit {cls.name}")
    m = m_presheaf(cls)
    q = Quantifiers(m, omega)
    section.facts.update(
        {
            "class": cls.describe(),
            "M": {o: list(m.at(o)) for o in cat.objects},
            "m_pullback_completion": structural_predicates(cat, cls).m_pullback_completion,
        }
    )

    wrong = [
        {"object": o, "sieve": omega.names(s)}
        for o in cat.objects
        for s in omega.sieves(o)
        if q.exists(q.sigma(s)) != s
    ]
    section.check("∃_M∘σ_M = id", not wrong, wrong[:1] or None)

    t_witness = None
    galois = None
    for obj in cat.objects:
        top = q.true_x(obj)
        if q.t(top) != top and t_witness is None:
            t_witness = {"object": obj, "law": "T∘true = true"}
        for rel in q.relations(obj, ws.caps):
            if q.t(q.t(rel)) != q.t(rel) and t_witness is None:
                t_witness = {"object": obj, "law": "T² = T", "relation": rel.sub.describe()}
        galois = galois or q.galois_witness(obj, ws.caps)
    section.expect_none("T_M² = T_M and T_M∘true^M = true^M", t_witness)
    section.expect_none("∃ ⊣ σ ⊣ ∀", galois)
    forall_flags = check_weak_topology(q.forall_sigma())
    section.check("∀_M∘σ_M is a topology", forall_flags.topology, forall_flags.witnesses or None)

    props = mu_properties(cls, omega)
    section.expect_none("μ_M is natural", props["natural"])
    section.expect_none("μ_M is objectwise injective", props["injective"])
    section.expect_none("σ_M ≤ μ_M", props["sigma_below_mu"])

    char_witness = None
    for obj in cat.objects:
        full = q.true_x(obj)
        if char_mu(cls, omega, full) != omega.true(obj):
            char_witness = char_witness or {"object": obj, "relation": "full"}
        for s in omega.sieves(obj):
            if cat.identity(obj) not in char_mu(cls, omega, mu_M(cls, omega, s)):
                char_witness = char_witness or {"object": obj, "sieve": omega.names(s)}
    section.expect_none("Char(μ_M) classifies μ_M and the full relation", char_witness)
    section.expect_none("S ⊆ Char(μ_M)(σ_M(S)) on Ω_{j_M}", extensivity_witness(cls, omega))
    section.expect_none("μ_M(S) ≤ U implies S ⊆ ∃_M(U)", mu_adjunction_witness(cls, omega, ws.caps))

    topo = topology_from_M(cls, omega, ws.caps)
    section.facts["j_M"] = topo.flags.as_dict()
    section.check("j_M is a topology", topo.flags.topology, topo.flags.witnesses or None)
    section.check("∃_M∘μ_M matches {f | ∃g ∈ 𝓜/D_f, fg ∈ S}", topo.formula_matches)
    section.check(
        "J_M = {S | S ∩ M(C) ≠ ∅}",
        topo.covers_agree,
        topo.covers.differences(topo.covers_formula) or None,
    )
    for label, witness in topo.chain.items():
        section.expect_none(label, witness)
    section.check("pointwise closure agrees with the closure of j_M", not topo.closure_mismatches,
                  topo.closure_mismatches[:1] or None)
    section.facts["j_Sub = ¬¬"] = NOT_ADMISSIBLE if topo.j_sub is None else topo.j_sub == double_negation(omega)

    classes = enumerate_admissible_classes(cat, ws.caps)
    section.facts["admissible_classes"] = [c.describe() for c in classes]
    not_topology = [c.describe() for c in classes if not check_weak_topology(j_M_formula(c, omega)).topology]
    section.check("every admissible class gives a topology", not not_topology, not_topology or None)

    for variant, label in ((cls, "MP"), (AdmissibleClass.all_monos(cat), "P′")):
        if not validate_admissible(variant).valid:
            section.facts[f"{label} skipped"] = NOT_ADMISSIBLE
            continue
        found = partial_maps(variant, omega).category_check()
        for key, witness in found.items():
            section.expect_none(f"{label}: {key.replace('_', ' ')}", witness)
    return Outcome([section])


def _topology_endos(ws: Workspace, cls: AdmissibleClass) -> list[OmegaEndo]:
    omega = ws.omega
    endos = [identity_endo(omega), true_endo(omega), double_negation(omega), j_M_formula(cls, omega)]
    j_sub = sub_topology(omega)
    if j_sub is not None:
        endos.append(j_sub)
    endos.extend(weak_ideal_topology(ideal) for _, ideal in sorted(ws.ideals.items()))
    endos.extend(alpha_endo(family, omega) for _, family in sorted(ws.families.items()))
    return endos


def _equivariance_section(section: Section, label: str, result: EquivarianceResult) -> None:
    section.facts[f"equivariance[{label}]"] = result.as_dict()


def action_audit(ws: Workspace, cls: AdmissibleClass) -> Outcome:
    omega = ws.omega
    section = Section(f"action-audit {cls.name}")
    out = Outcome([section])
    action = OmegaAction(cls, omega)

    for key, witness in action.monoid.law_witnesses().items():
        section.expect_none(f"monoid on M: {key}", witness)
    for key, witness in action.law_witnesses().items():
        section.expect_none(f"action on Ω: {key}", witness)

    frame = frame_and_subact_checks(action, _topology_endos(ws, cls))
    for key, witness in sorted(frame.witnesses.items()):
        section.expect_none(key.replace("_", " "), witness)
    section.facts["W_mu"] = frame.w_mu
    if frame.skipped:
        section.facts["skipped"] = frame.skipped

    targets = [
        ("¬¬", resolve_topology(ws, "notnot")),
        (f"j_{cls.name}", Topology("j_M", j_M_formula(cls, omega), admissible=cls)),
        ("j_Sub", resolve_topology(ws, "j_Sub")),
    ]
    targets.extend((f"j^{name}", resolve_topology(ws, name)) for name in sorted(ws.ideals))
    for label, topo in targets:
        result, rows = equivariance_audits(topo.kind, topo.j, action, topo.ideal)
        _equivariance_section(section, label, result)
        out.audits.extend(rows)
    section.check("identity is action preserving", equivariance_check(identity_endo(omega), action).equivariant)
    section.expect_none("S ⊆ Char(μ_M)(σ_M(S)) on Ω_{j_M}", extensivity_witness(cls, omega))
    return out


def equivariance_analysis(ws: Workspace, token: str, cls: AdmissibleClass) -> Outcome:
    section = Section(f"equivariance {token} {cls.name}")
    topo = resolve_topology(ws, token)
    if topo.kind == "j_M" and topo.admissible != cls:
        topo = Topology("other", topo.j)
    action = OmegaAction(cls, ws.omega)
    result, rows = equivariance_audits(topo.kind, topo.j, action, topo.ideal)
    section.facts.update(result.as_dict())
    section.check("action preserving", result.equivariant, info=True)
    return Outcome([section], rows)


def demorgan_analysis(ws: Workspace, token: str) -> Outcome:
    section = Section(f"demorgan {token}")
    topo = resolve_topology(ws, token)
    candidates = [*default_candidates(topo.j), *(p for _, p in sorted(ws.presheaves.items()))]
    report = de_morgan_check(topo.j, candidates, ws.caps)
    preds = structural_predicates(ws.cat)
    section.facts["right_ore"] = preds.right_ore
    section.facts["cases"] = [
        {
            "candidate": case.candidate,
            "sheaf": case.is_sheaf,
            "checked": case.checked,
            "passed": case.passed,
            **({"skipped": case.skipped} if case.skipped else {}),
            **({"witness": case.witness} if case.witness else {}),
        }
        for case in report.cases
    ]
    audits = []
    if topo.ideal is not None:
        audits.append(
            TheoremAudit(
                f"right Ore, I² = I and every I_C nonempty ⇒ De Morgan for j^{topo.ideal.name}",
                {
                    "right_ore": preds.right_ore,
                    "idempotent": is_idempotent(topo.ideal),
                    "nonempty_everywhere": topo.ideal.nonempty_everywhere,
                },
                report.passed,
            )
        )
        section.check("De Morgan on sheaf candidates", report.passed, info=True)
    else:
        section.check("De Morgan on sheaf candidates", report.passed, info=topo.kind != "notnot")
    return Outcome([section], audits)


def family_audit(ws: Workspace, family: TranslationFamily) -> Outcome:
    cat, omega = ws.cat, ws.omega
    section = Section(f"family-audit {family.name}")
    out = Outcome([section])
    analysis = translations_alpha(family, omega, ws.caps)
    alpha, flags = analysis.alpha, analysis.flags
    section.facts.update(
        {
            "family": family.describe(),
            "flags": flags.as_dict(),
            "idempotent_arrows": analysis.idempotent_arrows,
            "sufficient_condition_fails_at": analysis.sufficient_failures,
        }
    )
    section.check("α is natural", flags.natural, alpha.naturality_witness)
    section.check("α is weak", flags.weak, flags.witnesses.get("weak"))
    section.check("α is productive", flags.productive, flags.witnesses.get("productive"))
    out.audits.append(
        TheoremAudit(
            f"every f_C idempotent ⇒ α_{family.name} idempotent",
            {"idempotent_arrows": analysis.all_idempotent},
            flags.idempotent,
        )
    )
    section.check(
        "α idempotent ⟺ (f_C²×h ∈ S ⟺ h ∈ α(S))",
        flags.idempotent == (analysis.converse_witness is None),
        analysis.converse_witness,
    )
    section.check(
        "J_α = {S | ∀h, f_C×h ∈ S}",
        analysis.covers_agree,
        analysis.covers.differences(analysis.covers_formula) or None,
    )
    section.check("pointwise closure agrees with the closure of α", not analysis.closure_mismatches,
                  analysis.closure_mismatches[:1] or None)
    if all(cat.is_identity(f) for f in family.arrows.values()):
        section.check("identity family gives the identity", alpha == identity_endo(omega))
    for name, cls in sorted(ws.classes.items()):
        result = equivariance_check(alpha, OmegaAction(cls, omega))
        section.check(f"α is action preserving for {name}", result.equivariant, None if result.equivariant else result.as_dict())
    return out


def full_audit(ws: Workspace) -> Outcome:
    out = Outcome()
    out.extend(validate_analysis(ws))
    out.extend(omega_analysis(ws))
    out.extend(ideals_analysis(ws))
    for _, ideal in sorted(ws.ideals.items()):
        out.extend(ideal_audit(ws, ideal))
        out.extend(demorgan_analysis(ws, ideal.name))
    for _, cls in sorted(ws.classes.items()):
        out.extend(admissible_audit(ws, cls))
        out.extend(action_audit(ws, cls))
    for _, family in sorted(ws.families.items()):
        out.extend(family_audit(ws, family))
    return out
