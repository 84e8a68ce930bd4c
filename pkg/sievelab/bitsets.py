"""Integer bitmasks used as finite sets of indices."""
from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Iterator


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits(mask: int) -> Iterator[int]:
    """Yield set bit positions in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def unions_of(generators: Iterable[int], on_grow: Callable[[int], None] | None = None) -> list[int]:
    """All unions of subfamilies of ``generators`` (the empty union included), sorted.

    ``on_grow`` is called with the running count so callers can enforce a cap.
    """
    gens = sorted(set(generators))
    seen = {0}
    queue = deque([0])
    while queue:
        current = queue.popleft()
        for g in gens:
            nxt = current | g
            if nxt not in seen:
                seen.add(nxt)
                if on_grow is not None:
                    on_grow(len(seen))
                queue.append(nxt)
    return sorted(seen, key=lambda m: (popcount(m), m))
