from __future__ import annotations

import pytest

from sievelab.category import structural_predicates
from sievelab.errors import ValidationFailed
from sievelab.ideals import (
    Ideal,
    empty_ideal,
    enumerate_ideals,
    ideal_closure,
    ideal_double_negation,
    ideal_grothendieck,
    ideal_square,
    is_ideal_converse_stable,
    is_ideal_pullback_stable,
    is_idempotent,
    matching_family_check,
    omega_j_literal,
    validate_ideal,
    weak_ideal_topology,
    yoneda_ideal,
)
from sievelab.omega import (
    check_weak_topology,
    closure_from_j,
    de_morgan_check,
    default_candidates,
    double_negation,
    identity_endo,
    omega_j,
    true_endo,
)
from sievelab.presheaf import Subpresheaf, enumerate_subpresheaves, yoneda


def test_gamma_ideals(gamma) -> None:
    ideals = enumerate_ideals(gamma.omega)
    # I_N = ∅ leaves I_A free among the five sieves on A; I_N = {id_N} forces s, t ∈ I_A
    assert len(ideals) == 7
    assert gamma.ideal("I") in ideals
    assert gamma.ideal("I_prime") in ideals
    assert yoneda_ideal(gamma.omega) in ideals


def test_monoid_ideals_are_two_sided(mon_e) -> None:
    ideals = enumerate_ideals(mon_e.omega)
    assert sorted(ideal.describe()["*"] for ideal in ideals) == [[], ["1", "e"], ["e"]]


def test_enumerated_ideals_revalidate(zoo) -> None:
    for ideal in enumerate_ideals(zoo.omega):
        assert validate_ideal(ideal).valid


def test_postcomposition_stability_is_enforced(l3) -> None:
    broken = Ideal.from_names(l3.omega, "broken", {"x": ["x≤x"]})
    report = validate_ideal(broken)
    assert not report.valid
    with pytest.raises(ValidationFailed):
        report.raise_if_invalid()


def test_idempotency(gamma, l3) -> None:
    assert is_idempotent(gamma.ideal("I_prime"))
    assert is_idempotent(gamma.ideal("I"))
    assert is_idempotent(yoneda_ideal(l3.omega))
    assert is_idempotent(l3.ideal("down_x"))
    assert not is_idempotent(l3.ideal("I_x"))
    assert ideal_square(l3.ideal("I_x")).describe() == {"x": [], "y": [], "1": []}


def test_topology_iff_idempotent(zoo) -> None:
    for ideal in enumerate_ideals(zoo.omega):
        flags = check_weak_topology(weak_ideal_topology(ideal))
        assert flags.weak and flags.productive
        assert flags.topology == is_idempotent(ideal)


def test_extreme_ideals(zoo) -> None:
    omega = zoo.omega
    assert weak_ideal_topology(yoneda_ideal(omega)) == identity_endo(omega)
    assert weak_ideal_topology(empty_ideal(omega)) == true_endo(omega)


def test_gamma_ideal_topologies(gamma) -> None:
    omega = gamma.omega
    assert weak_ideal_topology(gamma.ideal("I")) == true_endo(omega)
    j = weak_ideal_topology(gamma.ideal("I_prime"))
    both = omega.from_names("A", ["s", "t"])
    assert j(both) == omega.true("A")
    assert j(omega.from_names("A", ["s"])) == omega.from_names("A", ["s"])
    assert ideal_grothendieck(gamma.ideal("I_prime"), j).agree


def test_closure_matches_topology(zoo) -> None:
    for ideal in zoo.ideals.values():
        j = weak_ideal_topology(ideal)
        for obj in zoo.cat.objects:
            y = yoneda(zoo.cat, obj)
            for sub in enumerate_subpresheaves(y):
                assert ideal_closure(ideal, y, sub) == closure_from_j(j, y, sub)


def test_closure_of_extreme_ideals(l3) -> None:
    y1 = yoneda(l3.cat, "1")
    for sub in enumerate_subpresheaves(y1):
        assert ideal_closure(yoneda_ideal(l3.omega), y1, sub) == sub
        assert ideal_closure(empty_ideal(l3.omega), y1, sub) == Subpresheaf.full(y1)


def test_closed_sieves_literal(gamma) -> None:
    for ideal in enumerate_ideals(gamma.omega):
        assert omega_j_literal(ideal) == omega_j(weak_ideal_topology(ideal))


def test_ideal_double_negation(l3, mon_e) -> None:
    for ws in (l3, mon_e):
        assert ideal_double_negation(yoneda_ideal(ws.omega)) == double_negation(ws.omega)
    assert ideal_double_negation(l3.ideal("down_x")) == double_negation(l3.omega)


def test_matching_family_converse(l3) -> None:
    for obj in l3.cat.objects:
        assert matching_family_check(yoneda_ideal(l3.omega), obj).holds
        assert matching_family_check(empty_ideal(l3.omega), obj).holds


def test_stability(l3, gamma) -> None:
    assert is_ideal_pullback_stable(yoneda_ideal(l3.omega)).holds
    assert is_ideal_converse_stable(yoneda_ideal(l3.omega)).holds
    result = is_ideal_pullback_stable(gamma.ideal("I_prime"))
    assert not result.holds
    assert result.witness["reason"] == "no pullback"


def test_double_negation_ignores_nonempty_ideals(zoo) -> None:
    notnot = double_negation(zoo.omega)
    nonempty = [ideal for ideal in enumerate_ideals(zoo.omega) if ideal.nonempty_everywhere]
    assert nonempty
    for ideal in nonempty:
        assert ideal_double_negation(ideal) == notnot


def test_de_morgan_for_idempotent_ideals(zoo) -> None:
    if not structural_predicates(zoo.cat).right_ore:
        pytest.skip(f"{zoo.source} is not right Ore")
    ideals = [
        ideal
        for ideal in enumerate_ideals(zoo.omega)
        if ideal.nonempty_everywhere and is_idempotent(ideal)
    ]
    assert ideals
    for ideal in ideals:
        j = weak_ideal_topology(ideal)
        report = de_morgan_check(j, default_candidates(j), zoo.caps)
        assert report.passed, ideal.describe()
