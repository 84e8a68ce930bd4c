from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sievelab.errors import ParentMismatchError, StructureError
from sievelab.generators import poset_category
from sievelab.presheaf import (
    Presheaf,
    Subpresheaf,
    enumerate_nat_trans,
    enumerate_subpresheaves,
    identity_nat_trans,
    preimage,
    product,
    sub_heyting,
    validate_nat_trans,
    validate_presheaf,
    yoneda,
    yoneda_map,
)

L3 = poset_category([["x", "y"], ["y", "1"]])
Y1 = yoneda(L3, "1")
SUBS_Y1 = enumerate_subpresheaves(Y1)
LATTICE = sub_heyting(Y1)


def test_yoneda_on_gamma(gamma) -> None:
    y_a = yoneda(gamma.cat, "A")
    assert y_a.at("N") == ("s", "t")
    assert y_a.at("A") == ("id_A",)
    assert y_a.restrict(gamma.cat.index("s"), "id_A") == "s"
    assert validate_presheaf(y_a).valid


def test_subpresheaves_of_yoneda_match_sieves(zoo) -> None:
    for obj in zoo.cat.objects:
        assert len(enumerate_subpresheaves(yoneda(zoo.cat, obj))) == len(zoo.omega.sieves(obj))


def test_generated_subpresheaf_and_negation(gamma) -> None:
    y_a = yoneda(gamma.cat, "A")
    g = Subpresheaf.generated(y_a, [("N", "s")])
    assert g.describe() == {"N": ["s"], "A": []}
    lattice = sub_heyting(y_a)
    assert lattice.negate(g).describe() == {"N": ["t"], "A": []}
    assert lattice.negate(g) == lattice.negate_pointwise(g)


def test_restriction_must_land_in_domain(l3) -> None:
    cat = l3.cat
    with pytest.raises(StructureError, match="outside"):
        Presheaf(
            cat,
            {"x": ["p"], "y": ["q"], "1": ["q"]},
            {cat.index("x≤y"): {"q": "q"}, cat.index("x≤1"): {"q": "p"}, cat.index("y≤1"): {"q": "q"}},
            name="bad",
        )


def test_contravariance_violation_is_listed(l3) -> None:
    cat = l3.cat
    twisted = Presheaf(
        cat,
        {"x": ["p", "q"], "y": ["p"], "1": ["p"]},
        {cat.index("x≤y"): {"p": "p"}, cat.index("x≤1"): {"p": "q"}, cat.index("y≤1"): {"p": "p"}},
        name="twisted",
    )
    report = validate_presheaf(twisted)
    assert not report.valid
    assert any("contravariance" in v for v in report.violations)


def test_lattice_rejects_foreign_subpresheaf(l3) -> None:
    other = yoneda(l3.cat, "x")
    with pytest.raises(ParentMismatchError):
        LATTICE.meet(LATTICE.top, Subpresheaf.full(other))


def test_yoneda_transformations(l3) -> None:
    cat = l3.cat
    found = enumerate_nat_trans(yoneda(cat, "x"), yoneda(cat, "1"))
    assert len(found) == 1
    assert validate_nat_trans(found[0]).valid
    assert enumerate_nat_trans(yoneda(cat, "1"), yoneda(cat, "x")) == []
    assert validate_nat_trans(yoneda_map(cat, cat.index("x≤y"))).valid


def test_preimage_along_identity(l3) -> None:
    y1 = yoneda(l3.cat, "1")
    for sub in enumerate_subpresheaves(y1):
        assert preimage(identity_nat_trans(y1), sub) == sub


def test_product_sizes(l3) -> None:
    cat = l3.cat
    both = product(yoneda(cat, "y"), yoneda(cat, "1"))
    assert {o: len(both.at(o)) for o in cat.objects} == {"x": 1, "y": 1, "1": 0}
    assert validate_presheaf(both).valid


@given(st.sampled_from(SUBS_Y1), st.sampled_from(SUBS_Y1))
def test_heyting_modus_ponens(g: Subpresheaf, h: Subpresheaf) -> None:
    assert LATTICE.le(LATTICE.meet(g, LATTICE.implies(g, h)), h)


@given(st.sampled_from(SUBS_Y1), st.sampled_from(SUBS_Y1), st.sampled_from(SUBS_Y1))
def test_heyting_adjunction(g: Subpresheaf, h: Subpresheaf, k: Subpresheaf) -> None:
    assert LATTICE.le(LATTICE.meet(k, g), h) == LATTICE.le(k, LATTICE.implies(g, h))


@given(st.sampled_from(SUBS_Y1))
def test_double_negation_is_inflationary(g: Subpresheaf) -> None:
    assert LATTICE.le(g, LATTICE.negate(LATTICE.negate(g)))
    assert g.is_restriction_closed()
