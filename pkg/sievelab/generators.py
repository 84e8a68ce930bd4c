"""Template categories: posets from a Hasse relation, monoids from a table, Γ, the terminal category."""
from __future__ import annotations

from typing import Mapping, Sequence

from .category import CategoryDescription, FinCat, Morphism
from .errors import InputError
from .settings import Caps


def le_name(a: str, b: str) -> str:
    return f"{a}≤{b}"


def poset_description(le: Sequence[Sequence[str]], objects: Sequence[str] | None = None) -> CategoryDescription:
    """Category of a finite poset given by generating pairs a ≤ b."""
    order: list[str] = list(objects or [])
    for pair in le:
        if len(pair) != 2:
            raise InputError(f"Poset relation entries must be pairs, got {list(pair)!r}")
        for x in pair:
            if x not in order:
                if objects:
                    raise InputError(f"Poset relation mentions unknown element '{x}'")
                order.append(x)

    below: dict[str, set[str]] = {x: {x} for x in order}
    for a, b in le:
        below[b].add(a)
    changed = True
    while changed:
        changed = False
        for x in order:
            extra = set().union(*(below[y] for y in below[x])) - below[x]
            if extra:
                below[x] |= extra
                changed = True
    for a in order:
        for b in order:
            if a != b and a in below[b] and b in below[a]:
                raise InputError(f"Poset relation is not antisymmetric: {a} ≤ {b} ≤ {a}")

    morphisms = [
        Morphism(le_name(a, b), a, b)
        for b in order
        for a in order
        if a != b and a in below[b]
    ]
    composition: dict[tuple[str, str], str] = {}
    for c in order:
        for b in order:
            if b == c or b not in below[c]:
                continue
            for a in order:
                if a != b and a in below[b]:
                    composition[(le_name(b, c), le_name(a, b))] = le_name(a, c)
    return CategoryDescription(
        objects=order,
        morphisms=morphisms,
        composition=composition,
        identity_names={x: le_name(x, x) for x in order},
    )


def monoid_description(
    elements: Sequence[str],
    table: Mapping[str, Mapping[str, str]],
    unit: str = "1",
    obj: str = "*",
) -> CategoryDescription:
    """One-object category of a monoid; ``table[a][b]`` is a·b, i.e. the composite a∘b."""
    if unit in elements:
        raise InputError(f"Monoid unit '{unit}' must not be listed among the elements")
    known = set(elements) | {unit}
    composition: dict[tuple[str, str], str] = {}
    for a in elements:
        row = table.get(a, {})
        for b in elements:
            if b not in row:
                raise InputError(f"Monoid table is missing the product {a}·{b}")
            product = row[b]
            if product not in known:
                raise InputError(f"Monoid product {a}·{b} = '{product}' is not an element")
            composition[(a, b)] = product
    for a, row in table.items():
        if a not in known:
            raise InputError(f"Monoid table row '{a}' is not an element")
        for b in row:
            if b not in known:
                raise InputError(f"Monoid table column '{b}' is not an element")
    return CategoryDescription(
        objects=[obj],
        morphisms=[Morphism(a, obj, obj) for a in elements],
        composition=composition,
        identity_names={obj: unit},
    )


def gamma_description() -> CategoryDescription:
    """Two objects N, A with two parallel arrows s, t: N → A."""
    return CategoryDescription(
        objects=["N", "A"],
        morphisms=[Morphism("s", "N", "A"), Morphism("t", "N", "A")],
    )


def terminal_description(obj: str = "*") -> CategoryDescription:
    return CategoryDescription(objects=[obj], morphisms=[])


def poset_category(le: Sequence[Sequence[str]], objects: Sequence[str] | None = None, caps: Caps | None = None) -> FinCat:
    return FinCat(poset_description(le, objects), caps)


def monoid_category(
    elements: Sequence[str],
    table: Mapping[str, Mapping[str, str]],
    unit: str = "1",
    caps: Caps | None = None,
) -> FinCat:
    return FinCat(monoid_description(elements, table, unit), caps)


def gamma_category(caps: Caps | None = None) -> FinCat:
    return FinCat(gamma_description(), caps)


def terminal_category(caps: Caps | None = None) -> FinCat:
    return FinCat(terminal_description(), caps)
