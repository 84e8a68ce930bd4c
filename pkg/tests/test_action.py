from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sievelab.action import (
    OmegaAction,
    TranslationFamily,
    act,
    alpha_endo,
    duplication_witness,
    equivariance_audits,
    equivariance_check,
    frame_and_subact_checks,
    lambda_eval,
    monoid_on_M,
    sufficient_condition_failures,
    translations_alpha,
    validate_family,
    w_mu,
)
from sievelab.checks import NOT_IMPLIED, VIOLATED
from sievelab.errors import StructureError, ValidationFailed
from sievelab.fixtures import fixture
from sievelab.ideals import weak_ideal_topology
from sievelab.omega import check_weak_topology, double_negation, identity_endo, true_endo
from sievelab.workspace import parse_workspace

L3 = parse_workspace(fixture("cat_l3"), source="cat_l3")
L3_SUB_ACTION = OmegaAction(L3.admissible("Sub"), L3.omega)
L3_PAIRS = [pair for obj in L3.cat.objects for pair in L3_SUB_ACTION.pairs(obj)]


def test_slice_products(l3, diamond) -> None:
    monoid = monoid_on_M(l3.admissible("Sub"))
    x_y = l3.cat.index("x≤y")
    assert monoid.mul(x_y, x_y) == x_y
    assert monoid.unit("1") == l3.cat.identity("1")
    diamond_monoid = monoid_on_M(diamond.admissible("Sub"))
    cat = diamond.cat
    assert cat.name(diamond_monoid.mul(cat.index("a≤1"), cat.index("b≤1"))) == "0≤1"


def test_monoid_laws(zoo) -> None:
    for cls in zoo.classes.values():
        assert all(w is None for w in monoid_on_M(cls).law_witnesses().values())


def test_action_on_top_sieve(l3) -> None:
    omega, cat = l3.omega, l3.cat
    s = omega.from_names("1", ["x≤1", "y≤1"])
    assert act(l3.admissible("Sub"), s, cat.index("y≤1")) == omega.true("1")
    with pytest.raises(StructureError):
        act(l3.admissible("Sub"), s, cat.index("x≤y"))


def test_action_laws(zoo) -> None:
    for cls in zoo.classes.values():
        action = OmegaAction(cls, zoo.omega)
        assert all(w is None for w in action.law_witnesses().values())


def test_frame_checks_on_chain(l3) -> None:
    action = OmegaAction(l3.admissible("M_L3"), l3.omega)
    report = frame_and_subact_checks(action, [identity_endo(l3.omega), double_negation(l3.omega)])
    assert report.passed, report.witnesses
    assert report.skipped == []
    assert "true_pullback[¬¬]" in report.witnesses


def test_frame_checks_skip_on_gamma(gamma) -> None:
    action = OmegaAction(gamma.admissible("Id"), gamma.omega)
    report = frame_and_subact_checks(action)
    assert {"subact_j_Sub", "sub_poset", "semilattice_action"} <= set(report.skipped)
    assert "subact_j_Sub" not in report.witnesses
    assert report.passed, report.witnesses


def test_w_mu_contains_top(l3) -> None:
    table = w_mu(L3_SUB_ACTION)
    for obj in l3.cat.objects:
        assert (l3.omega.true(obj), l3.cat.identity(obj)) in table[obj]


def test_lambda_at_identity(l3) -> None:
    cls = l3.admissible("Sub")
    cat, omega = l3.cat, l3.omega
    s = omega.from_names("1", ["x≤1"])
    m = cat.index("y≤1")
    assert lambda_eval(cls, m, cat.identity("1"), s) == act(cls, s, m)


def test_double_negation_is_equivariant(l3) -> None:
    action = OmegaAction(l3.admissible("M_L3"), l3.omega)
    result = equivariance_check(double_negation(l3.omega), action)
    assert result.forward and result.backward
    result, rows = equivariance_audits("notnot", double_negation(l3.omega), action)
    assert result.equivariant
    assert all(row.status != VIOLATED for row in rows)


def test_unclaimed_rows_never_fail(l3) -> None:
    action = OmegaAction(l3.admissible("Sub"), l3.omega)
    for ideal in l3.ideals.values():
        _, rows = equivariance_audits("ideal", weak_ideal_topology(ideal), action, ideal)
        assert len(rows) == 4
        assert sum(not row.claimed for row in rows) == 2
        for row in rows:
            assert row.claimed or row.status != VIOLATED
            assert not row.claimed or row.status != NOT_IMPLIED


def test_constant_true_is_equivariant(zoo) -> None:
    for cls in zoo.classes.values():
        assert equivariance_check(true_endo(zoo.omega), OmegaAction(cls, zoo.omega)).equivariant


def test_translation_family_on_chain(l3) -> None:
    omega = l3.omega
    family = l3.family("F_L3")
    alpha = alpha_endo(family, omega)
    assert alpha(omega.from_names("1", ["x≤1"])) == omega.true("1")
    assert check_weak_topology(alpha).topology
    assert alpha == double_negation(omega)
    action = OmegaAction(l3.admissible("M_L3"), omega)
    assert equivariance_check(alpha, action).equivariant


def test_identity_family_gives_identity(zoo) -> None:
    family = TranslationFamily.identities(zoo.cat)
    assert alpha_endo(family, zoo.omega) == identity_endo(zoo.omega)
    assert sufficient_condition_failures(family) == []


def test_incompatible_family(l3) -> None:
    family = TranslationFamily.from_names(l3.cat, "bad", {"x": "x≤x", "y": "y≤y", "1": "x≤1"})
    report = validate_family(family, l3.omega)
    assert not report.valid
    with pytest.raises(ValidationFailed):
        translations_alpha(family, l3.omega)


def test_family_needs_every_object(l3) -> None:
    with pytest.raises(StructureError, match="no arrow"):
        TranslationFamily.from_names(l3.cat, "partial", {"x": "x≤x"})


def test_alpha_analysis(l3) -> None:
    analysis = translations_alpha(l3.family("F_L3"), l3.omega)
    assert analysis.all_idempotent
    assert analysis.flags.idempotent
    assert analysis.converse_witness is None
    assert analysis.covers_agree
    assert analysis.closure_mismatches == []


def test_duplication_flags_an_endo_that_is_not_alpha(l3) -> None:
    family, omega = l3.family("id"), l3.omega
    assert duplication_witness(family, omega, identity_endo(omega)) is None
    witness = duplication_witness(family, omega, double_negation(omega))
    assert witness == {"object": "y", "sieve": ["x≤y"], "h": "y≤y"}
    assert duplication_witness(family, omega, true_endo(omega))["object"] == "x"


def test_alpha_idempotence_matches_duplication(zoo) -> None:
    for family in zoo.families.values():
        analysis = translations_alpha(family, zoo.omega, zoo.caps)
        assert analysis.flags.idempotent == (analysis.converse_witness is None)
        assert analysis.all_idempotent and analysis.flags.idempotent


@given(st.sampled_from(L3_PAIRS), st.sampled_from(L3_PAIRS))
def test_action_distributes_over_meets(first, second) -> None:
    (s, m), (t, _) = first, second
    if s.base != t.base:
        return
    omega = L3.omega
    left = L3_SUB_ACTION(omega.meet(s, t), m)
    assert left == omega.meet(L3_SUB_ACTION(s, m), L3_SUB_ACTION(t, m))


@given(st.sampled_from(L3_PAIRS))
def test_action_is_inflationary_on_monos(pair) -> None:
    s, m = pair
    assert s.within(L3_SUB_ACTION(s, m))
