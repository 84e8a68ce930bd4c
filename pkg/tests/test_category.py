from __future__ import annotations

import pytest

from sievelab.category import (
    CategoryDescription,
    FinCat,
    Morphism,
    find_pullback,
    is_mono,
    pullback_leg,
    slice_product,
    structural_predicates,
    subobject_le,
    terminal_object,
    validate_category,
)
from sievelab.errors import CapExceededError, CompositionError, InputError, ValidationFailed
from sievelab.generators import (
    gamma_category,
    gamma_description,
    monoid_category,
    poset_category,
    terminal_category,
)
from sievelab.settings import Caps


def test_zoo_categories_validate(zoo) -> None:
    report = validate_category(zoo.cat.description, zoo.caps)
    assert report.valid, report.violations


def test_builtin_generators(cat_1, gamma) -> None:
    assert terminal_category() == cat_1.cat
    assert len(terminal_category()) == 1
    assert gamma_category() == gamma.cat
    assert gamma_category().objects == ("N", "A")


def test_gamma_composite_breaking_identity_law() -> None:
    desc = gamma_description()
    desc.composition[("s", "id_N")] = "t"
    report = validate_category(desc)
    assert not report.valid
    assert any("identity-law violation at (s, id_N)" in v for v in report.violations)
    with pytest.raises(ValidationFailed):
        FinCat(desc)


def test_missing_composite_is_reported() -> None:
    desc = CategoryDescription(
        objects=["a", "b", "c"],
        morphisms=[Morphism("f", "a", "b"), Morphism("g", "b", "c")],
    )
    report = validate_category(desc)
    assert report.violations == ["missing composite g∘f"]


def test_gamma_has_no_pullback_of_s_and_t(gamma) -> None:
    cat = gamma.cat
    s, t = cat.index("s"), cat.index("t")
    assert find_pullback(cat, s, t) is None
    assert pullback_leg(cat, s, s) == cat.identity("N")
    preds = structural_predicates(cat)
    assert preds.finitely_complete is False
    assert preds.right_ore is False
    assert terminal_object(cat) is None


def test_cospan_check(gamma) -> None:
    cat = gamma.cat
    with pytest.raises(CompositionError):
        find_pullback(cat, cat.index("s"), cat.identity("N"))


def test_posets_are_finitely_complete(l3, diamond) -> None:
    for ws in (l3, diamond):
        preds = structural_predicates(ws.cat)
        assert preds.finitely_complete
        assert preds.right_ore
        assert terminal_object(ws.cat) == "1"


def test_poset_pullbacks_are_meets(diamond) -> None:
    cat = diamond.cat
    a1, b1 = cat.index("a≤1"), cat.index("b≤1")
    assert cat.name(pullback_leg(cat, a1, b1)) == "0≤a"
    assert cat.name(slice_product(cat, a1, b1)) == "0≤1"


def test_monoid_arrows(mon_e) -> None:
    cat = mon_e.cat
    e = cat.index("e")
    assert cat.compose(e, e) == e
    assert not is_mono(cat, e)
    assert is_mono(cat, cat.identity("*"))


def test_subobject_order(l3) -> None:
    cat = l3.cat
    assert subobject_le(cat, cat.index("x≤1"), cat.index("y≤1"))
    assert not subobject_le(cat, cat.index("y≤1"), cat.index("x≤1"))


def test_ascii_order_names_resolve() -> None:
    cat = poset_category([["x", "y"]])
    assert cat.index("x<=y") == cat.index("x≤y")


def test_monoid_table_must_be_total() -> None:
    with pytest.raises(InputError, match="missing the product"):
        monoid_category(["a", "b"], {"a": {"a": "a", "b": "b"}, "b": {"a": "a"}})


def test_poset_relation_must_be_antisymmetric() -> None:
    with pytest.raises(InputError, match="antisymmetric"):
        poset_category([["x", "y"], ["y", "x"]])


def test_morphism_cap() -> None:
    with pytest.raises(CapExceededError) as info:
        poset_category([["x", "y"], ["y", "1"]], caps=Caps(max_morphisms=3))
    assert info.value.key == "max_morphisms"
    assert info.value.count == 6
