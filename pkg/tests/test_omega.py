from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sievelab.errors import StructureError
from sievelab.omega import (
    OmegaEndo,
    WeakGrothendieck,
    build_omega,
    check_weak_topology,
    classify_subobject,
    closure_from_j,
    de_morgan_check,
    double_negation,
    grothendieck_from_j,
    identity_endo,
    omega_j,
    sheaf_check,
    true_endo,
)
from sievelab.generators import poset_category
from sievelab.presheaf import Subpresheaf, enumerate_subpresheaves, terminal_presheaf, yoneda

L3_OMEGA = build_omega(poset_category([["x", "y"], ["y", "1"]]))
L3_SIEVES = [s for obj in L3_OMEGA.cat.objects for s in L3_OMEGA.sieves(obj)]


def test_gamma_sizes(gamma) -> None:
    assert {o: len(gamma.omega.sieves(o)) for o in gamma.cat.objects} == {"N": 2, "A": 5}


def test_chain_sizes(l3) -> None:
    assert {o: len(l3.omega.sieves(o)) for o in l3.cat.objects} == {"x": 2, "y": 3, "1": 4}


def test_pullback_of_sieve(l3) -> None:
    omega = l3.omega
    s = omega.from_names("1", ["x≤1"])
    assert omega.names(omega.pullback(l3.cat.index("y≤1"), s)) == ["x≤y"]
    assert omega.pullback(l3.cat.index("x≤1"), s) == omega.true("x")


def test_from_names_rejects_non_sieves(l3) -> None:
    with pytest.raises(StructureError, match="not a sieve"):
        l3.omega.from_names("1", ["y≤1"])


def test_basic_topologies(zoo) -> None:
    for j in (identity_endo(zoo.omega), true_endo(zoo.omega), double_negation(zoo.omega)):
        flags = check_weak_topology(j)
        assert flags.topology, (j.name, flags.witnesses)
        assert flags.monotone


def test_double_negation_on_chain(l3) -> None:
    omega = l3.omega
    notnot = double_negation(omega)
    assert notnot(omega.from_names("1", ["x≤1"])) == omega.true("1")
    assert notnot(omega.empty("1")) == omega.empty("1")


def test_constant_empty_is_not_weak(l3) -> None:
    omega = l3.omega
    empty = OmegaEndo.from_rule(omega, lambda obj, s: 0, "false")
    flags = check_weak_topology(empty)
    assert empty.natural
    assert not flags.preserves_true
    assert not flags.weak
    assert "preserves_true" in flags.witnesses


def test_non_natural_endo(gamma) -> None:
    omega = gamma.omega
    swap = {omega.from_names("A", ["s"]): omega.from_names("A", ["t"])}
    components = {
        obj: {s: swap.get(s, s) for s in omega.sieves(obj)} for obj in gamma.cat.objects
    }
    endo = OmegaEndo(omega, components, "swap-one")
    assert not endo.natural
    assert endo.naturality_witness is not None


def test_identity_closure_and_classification(l3) -> None:
    j = identity_endo(l3.omega)
    y1 = yoneda(l3.cat, "1")
    for sub in enumerate_subpresheaves(y1):
        assert closure_from_j(j, y1, sub) == sub
        assert classify_subobject(j, y1, sub).closed
    assert omega_j(j) == Subpresheaf.full(l3.omega)


def test_true_topology_covers_everything(l3) -> None:
    covers = grothendieck_from_j(true_endo(l3.omega))
    assert covers.contains_maximal()
    assert covers.stable
    assert l3.omega.empty("1") in covers.covering("1")


def test_sheaves_for_extreme_topologies(l3) -> None:
    cat, omega = l3.cat, l3.omega
    identity_covers = grothendieck_from_j(identity_endo(omega))
    true_covers = grothendieck_from_j(true_endo(omega))
    assert sheaf_check(yoneda(cat, "x"), identity_covers).sheaf
    assert sheaf_check(terminal_presheaf(cat), true_covers).sheaf
    report = sheaf_check(yoneda(cat, "x"), true_covers)
    assert not report.sheaf
    assert report.witness is not None


def test_sheaf_check_needs_stable_covers(l3) -> None:
    omega = l3.omega
    covers = WeakGrothendieck(omega, {"y": [omega.from_names("y", ["x≤y"])]}, name="J_bad")
    assert covers.stability_witness() == {"morphism": "x≤y", "sieve": ["x≤y"]}
    with pytest.raises(StructureError, match="J_bad is not stable under pullback"):
        sheaf_check(terminal_presheaf(l3.cat), covers)


def test_sieves_sort_by_size(l3) -> None:
    ordered = sorted(l3.omega.sieves("1"), key=lambda s: s.sort_key())
    assert [len(s.arrows()) for s in ordered] == [0, 1, 2, 3]


def test_de_morgan_for_identity_on_chain(l3) -> None:
    cat = l3.cat
    j = identity_endo(l3.omega)
    candidates = [yoneda(cat, "x"), yoneda(cat, "y"), yoneda(cat, "1"), l3.omega]
    report = de_morgan_check(j, candidates)
    assert report.passed
    assert all(case.is_sheaf and case.checked > 0 for case in report.cases)


@given(st.sampled_from(L3_SIEVES), st.sampled_from(L3_SIEVES))
def test_double_negation_preserves_meets(s, t) -> None:
    if s.base != t.base:
        return
    notnot = double_negation(L3_OMEGA)
    assert notnot(L3_OMEGA.meet(s, t)) == L3_OMEGA.meet(notnot(s), notnot(t))


@given(st.sampled_from(L3_SIEVES))
def test_pullback_along_identity(s) -> None:
    cat = L3_OMEGA.cat
    assert L3_OMEGA.pullback(cat.identity(s.base), s) == s
