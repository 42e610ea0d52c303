"""Isomorphism-free generation of small posets.

``all_posets`` grows posets by one maximal element at a time; ``ranked_posets``
grows layered posets one level at a time.  Both deduplicate each generation
by canonical form, which is sound because isomorphic prefixes have
isomorphic sets of extensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import IO, Iterable, Iterator

from .core import Poset, bits, canonical_form, rank_structure, width
from .io import poset_document

__all__ = [
    "MAX_ALL_POSETS",
    "MAX_RANKED_SIZE",
    "CorpusFilter",
    "all_posets",
    "ranked_posets",
    "iter_ranked_posets",
    "write_corpus",
]

MAX_ALL_POSETS = 7
MAX_RANKED_SIZE = 10


def _labels(n: int) -> list[str]:
    return [f"e{i}" for i in range(n)]


def _ideals(p: Poset) -> Iterator[int]:
    """Down-closed subsets as bitmasks (including the empty set)."""
    n = len(p)
    order = p.linear_extension

    def rec(k: int, mask: int) -> Iterator[int]:
        if k == n:
            yield mask
            return
        v = order[k]
        # everything below v comes earlier in the linear extension
        yield from rec(k + 1, mask)
        if p.strict_down[v] & ~mask == 0:
            yield from rec(k + 1, mask | (1 << v))

    yield from rec(0, 0)


def _add_maximal(p: Poset, ideal: int) -> Poset:
    n = len(p)
    up = [m | ((1 << n) if (ideal >> v) & 1 else 0) for v, m in enumerate(p.up)] + [1 << n]
    return Poset(_labels(n + 1), up, check=False)


def all_posets(n: int) -> list[Poset]:
    """Every poset on ``n`` elements up to isomorphism (labels ``e0..``)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > MAX_ALL_POSETS:
        raise ValueError(f"unrestricted enumeration is capped at {MAX_ALL_POSETS} elements")
    gen = [Poset([], [], check=False)]
    for _ in range(n):
        seen: dict = {}
        for p in gen:
            for ideal in _ideals(p):
                q = _add_maximal(p, ideal)
                seen.setdefault(canonical_form(q), q)
        gen = list(seen.values())
    return gen


@dataclass(frozen=True)
class CorpusFilter:
    max_size: int
    max_width: int | None = None
    ranked_only: bool = True
    max_rank: int | None = None

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be >= 1")
        cap = MAX_RANKED_SIZE if self.ranked_only else MAX_ALL_POSETS
        if self.max_size > cap:
            raise ValueError(f"max_size {self.max_size} exceeds the cap of {cap}")

    def accepts(self, p: Poset) -> bool:
        if len(p) > self.max_size or len(p) == 0:
            return False
        if self.max_width is not None and width(p) > self.max_width:
            return False
        if self.ranked_only or self.max_rank is not None:
            rs = rank_structure(p)
            if self.ranked_only and not rs.is_ranked:
                return False
            if self.max_rank is not None and rs.height > self.max_rank:
                return False
        return True


def _extend(p: Poset, top: int, new_covers: tuple[int, ...]) -> Poset:
    """Add a level whose ``t``-th element covers the positions in ``new_covers[t]``."""
    n = len(p)
    up = list(p.up)
    for t, lower in enumerate(new_covers):
        me = 1 << (n + t)
        for v in range(n):
            if p.up[v] & lower:
                up[v] |= me
    up += [1 << (n + t) for t in range(len(new_covers))]
    return Poset(_labels(len(up)), up, check=False)


def _level_choices(top: int, max_new: int) -> Iterator[tuple[int, ...]]:
    """Multisets of nonempty subsets of ``top`` that together cover ``top``."""
    members = list(bits(top))
    subsets = []
    for r in range(1, 1 << len(members)):
        subsets.append(sum(1 << members[i] for i in range(len(members)) if (r >> i) & 1))
    for size in range(1, max_new + 1):
        for combo in combinations_with_replacement(subsets, size):
            acc = 0
            for s in combo:
                acc |= s
            if acc == top:
                yield combo


def iter_ranked_posets(filt: CorpusFilter) -> Iterator[Poset]:
    """Ranked posets passing ``filt``, one per isomorphism class, by height then size."""
    if not filt.ranked_only:
        for n in range(1, filt.max_size + 1):
            for p in all_posets(n):
                if filt.accepts(p):
                    yield p
        return
    level_cap = filt.max_width if filt.max_width is not None else filt.max_size
    # generation entries: (poset, mask of its top level)
    gen: list[tuple[Poset, int]] = []
    for k in range(1, min(level_cap, filt.max_size) + 1):
        gen.append((Poset(_labels(k), [1 << i for i in range(k)], check=False), (1 << k) - 1))
    height = 0
    while gen:
        for p, _ in sorted(gen, key=lambda e: len(e[0])):
            if filt.accepts(p):
                yield p
        if filt.max_rank is not None and height >= filt.max_rank:
            return
        seen: dict = {}
        for p, top in gen:
            room = min(level_cap, filt.max_size - len(p))
            n = len(p)
            for combo in _level_choices(top, room):
                q = _extend(p, top, combo)
                if filt.max_width is not None and width(q) > filt.max_width:
                    continue
                new_top = ((1 << len(combo)) - 1) << n
                seen.setdefault(canonical_form(q), (q, new_top))
        gen = list(seen.values())
        height += 1


def ranked_posets(filt: CorpusFilter) -> list[Poset]:
    return list(iter_ranked_posets(filt))


def write_corpus(posets: Iterable[Poset], fh: IO[str], prefix: str = "p") -> int:
    """One JSON document per line; returns the number written."""
    count = 0
    for k, p in enumerate(posets):
        fh.write(json.dumps(poset_document(p, f"{prefix}{k}")) + "\n")
        count += 1
    return count
