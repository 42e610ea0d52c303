"""Exhaustive searches over order-preserving maps.

Every search is a backtracking walk with per-element candidate bitmasks.
Order-preserving maps are assigned along a linear extension (minimal
elements first), so by the time an element is reached every element below
it is assigned and its candidates already respect all lower constraints;
assigning ``f(v) = a`` only has to cut the candidates of the elements above
``v`` down to ``up(a)``.

Searches count nodes against a :class:`SearchBudget`.  Running out raises
:class:`BudgetExhausted`; a search never returns a verdict it did not finish.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator

from .core import OrderMap, Poset, PosetError, bits, popcount, refine_colors

__all__ = [
    "BudgetExhausted",
    "SizeCapExceeded",
    "SearchBudget",
    "Meter",
    "FppVerdict",
    "has_fpp",
    "retraction_exists",
    "enumerate_retractions",
    "automorphisms",
    "fixed_point_free_automorphism",
    "subset_fpf_automorphism",
    "proper_retract_subsets",
    "is_minimal_automorphic",
    "automorphic_proper_retract",
    "count_order_preserving_self_maps",
]

DEFAULT_MAX_NODES = 50_000_000


class BudgetExhausted(RuntimeError):
    """The node budget ran out before the search finished."""


class SizeCapExceeded(ValueError):
    """The input is larger than the search is allowed to handle."""


def _env_nodes() -> int:
    raw = os.environ.get("FPP_LAB_BUDGET_NODES")
    return int(raw) if raw else DEFAULT_MAX_NODES


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = field(default_factory=_env_nodes)
    max_elements: int = 24
    # worker processes used by corpus-level drivers; searches are sequential
    parallel_fanout: int = 0

    def __post_init__(self):
        if self.max_nodes < 1 or self.max_elements < 1 or self.parallel_fanout < 0:
            raise ValueError("budget limits must be positive")

    def meter(self) -> "Meter":
        return Meter(self.max_nodes, self.max_elements)


class Meter:
    """Running node count for one logical search (possibly many sub-searches)."""

    __slots__ = ("limit", "max_elements", "nodes")

    def __init__(self, limit: int, max_elements: int = 24):
        self.limit = limit
        self.max_elements = max_elements
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise BudgetExhausted(f"search exceeded {self.limit} nodes")

    def check_size(self, p: Poset) -> None:
        if len(p) > self.max_elements:
            raise SizeCapExceeded(f"{len(p)} elements exceeds the cap of {self.max_elements}")


def as_meter(budget: "SearchBudget | Meter | None") -> Meter:
    if isinstance(budget, Meter):
        return budget
    return (budget or SearchBudget()).meter()


@dataclass(frozen=True)
class FppVerdict:
    has_fpp: bool
    witness: OrderMap | None = None

    def __bool__(self) -> bool:
        return self.has_fpp


# -- engines --------------------------------------------------------------


def _hom_solutions(p: Poset, doms: list[int], meter: Meter) -> Iterator[tuple[int, ...]]:
    """All order-preserving self-maps with ``f(v)`` drawn from ``doms[v]``."""
    n = len(p)
    if any(not d for d in doms):
        return
    order = p.linear_extension
    above = [list(bits(m)) for m in p.strict_up]
    up = p.up
    img = [0] * n

    def rec(k: int, doms: list[int]) -> Iterator[tuple[int, ...]]:
        if k == n:
            yield tuple(img)
            return
        v = order[k]
        d = doms[v]
        targets = above[v]
        while d:
            low = d & -d
            d ^= low
            a = low.bit_length() - 1
            meter.tick()
            ua = up[a]
            nd = doms.copy()
            for w in targets:
                m = nd[w] & ua
                if not m:
                    break
                nd[w] = m
            else:
                img[v] = a
                yield from rec(k + 1, nd)

    yield from rec(0, list(doms))


def _pin(p: Poset, doms: list[int], fixed: dict[int, int]) -> list[int]:
    """Restrict candidates around pinned values ``v -> a``."""
    doms = list(doms)
    for v, a in fixed.items():
        doms[v] &= 1 << a
        for w in bits(p.strict_up[v]):
            doms[w] &= p.up[a]
        for w in bits(p.strict_down[v]):
            doms[w] &= p.down[a]
    return doms


def _auto_solutions(
    p: Poset,
    within: int,
    doms: list[int],
    meter: Meter,
    cycle_len: dict[int, int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Automorphisms of the subposet on ``within`` (images of other positions are -1).

    ``cycle_len`` optionally demands that ``v`` lie on a cycle of exactly
    that length; shorter cycles are cut as soon as they close.
    """
    elems = sorted(bits(within), key=lambda v: (popcount(doms[v]), p.linear_extension.index(v)))
    if any(not doms[v] for v in elems):
        return
    n = len(p)
    sup = [m & within for m in p.strict_up]
    sdown = [m & within for m in p.strict_down]
    inc = [m & within for m in p.incomparable]
    img = [-1] * n
    total = len(elems)

    def closes_early(v: int, a: int) -> bool:
        want = cycle_len[v]
        x, length = a, 1
        while x != v and img[x] >= 0:
            x = img[x]
            length += 1
        return x == v and length != want

    def rec(k: int, doms: list[int], used: int) -> Iterator[tuple[int, ...]]:
        if k == total:
            yield tuple(img)
            return
        v = elems[k]
        d = doms[v] & ~used
        while d:
            low = d & -d
            d ^= low
            a = low.bit_length() - 1
            meter.tick()
            img[v] = a
            if cycle_len is not None and closes_early(v, a):
                continue
            nused = used | low
            nd = doms.copy()
            ok = True
            for w in elems[k + 1 :]:
                if (sup[v] >> w) & 1:
                    m = nd[w] & sup[a]
                elif (sdown[v] >> w) & 1:
                    m = nd[w] & sdown[a]
                else:
                    m = nd[w] & inc[a]
                m &= ~nused
                if not m:
                    ok = False
                    break
                nd[w] = m
            if ok:
                yield from rec(k + 1, nd, nused)
        img[v] = -1

    yield from rec(0, list(doms), 0)


def _subset_invariant_doms(p: Poset, within: int, fpf: bool) -> list[int] | None:
    """Candidate sets from (down, up) counts inside ``within``.

    Returns ``None`` if some element is alone in its class while ``fpf`` is
    requested: every automorphism would fix it.
    """
    classes: dict[tuple[int, int], int] = {}
    key = {}
    for v in bits(within):
        k = (popcount(p.down[v] & within), popcount(p.up[v] & within))
        key[v] = k
        classes[k] = classes.get(k, 0) | (1 << v)
    doms = [0] * len(p)
    for v, k in key.items():
        m = classes[k]
        if fpf:
            m &= ~(1 << v)
            if not m:
                return None
        doms[v] = m
    return doms


def _full_doms(p: Poset, fpf: bool) -> list[int]:
    colors, _ = refine_colors(p)
    classes: dict[int, int] = {}
    for v, c in enumerate(colors):
        classes[c] = classes.get(c, 0) | (1 << v)
    return [classes[c] & ~((1 << v) if fpf else 0) for v, c in enumerate(colors)]


# -- public searches ------------------------------------------------------


def has_fpp(p: Poset, budget: SearchBudget | Meter | None = None) -> FppVerdict:
    """Decide the fixed point property; a ``False`` verdict carries a witness."""
    meter = as_meter(budget)
    meter.check_size(p)
    if len(p) == 0:
        raise PosetError("the fixed point property is not decided for the empty poset")
    full = p.full_mask
    doms = [full & ~(1 << v) for v in range(len(p))]
    for images in _hom_solutions(p, doms, meter):
        return FppVerdict(False, OrderMap(p, p, images))
    return FppVerdict(True, None)


def _retraction_doms(p: Poset, mask: int, extra: dict[int, int] | None = None) -> list[int]:
    fixed = {q: q for q in bits(mask)}
    if extra:
        fixed.update(extra)
    base = [mask] * len(p)
    return _pin(p, base, fixed)


def _subset_mask(p: Poset, subset: Iterable[str | int]) -> int:
    mask = p.mask_of(subset)
    if not mask:
        raise PosetError("retract subset must be nonempty")
    return mask


def retraction_exists(
    p: Poset, subset: Iterable[str | int], budget: SearchBudget | Meter | None = None
) -> OrderMap | None:
    """A retraction of ``p`` onto ``subset`` (as a self-map of ``p``), or ``None``."""
    meter = as_meter(budget)
    meter.check_size(p)
    mask = _subset_mask(p, subset)
    for images in _hom_solutions(p, _retraction_doms(p, mask), meter):
        return OrderMap(p, p, images)
    return None


def _retraction_exists_mask(p: Poset, mask: int, meter: Meter) -> tuple[int, ...] | None:
    for images in _hom_solutions(p, _retraction_doms(p, mask), meter):
        return images
    return None


def enumerate_retractions(
    p: Poset,
    subset: Iterable[str | int],
    constraints: dict[str | int, str | int] | None = None,
    budget: SearchBudget | Meter | None = None,
) -> list[OrderMap]:
    """Every retraction onto ``subset``, optionally with some values pinned."""
    meter = as_meter(budget)
    meter.check_size(p)
    mask = _subset_mask(p, subset)
    extra = {p.index(k): p.index(v) for k, v in (constraints or {}).items()}
    for k, v in extra.items():
        if not (mask >> v) & 1 or ((mask >> k) & 1 and k != v):
            return []
    doms = _retraction_doms(p, mask, extra)
    return [OrderMap(p, p, img) for img in _hom_solutions(p, doms, meter)]


def automorphisms(p: Poset, budget: SearchBudget | Meter | None = None) -> list[OrderMap]:
    meter = as_meter(budget)
    meter.check_size(p)
    doms = _full_doms(p, fpf=False)
    return [OrderMap(p, p, img) for img in _auto_solutions(p, p.full_mask, doms, meter)]


def fixed_point_free_automorphism(
    p: Poset, budget: SearchBudget | Meter | None = None
) -> OrderMap | None:
    meter = as_meter(budget)
    meter.check_size(p)
    if len(p) == 0:
        return None
    doms = _full_doms(p, fpf=True)
    for img in _auto_solutions(p, p.full_mask, doms, meter):
        return OrderMap(p, p, img)
    return None


def subset_fpf_automorphism(p: Poset, mask: int, meter: Meter) -> tuple[int, ...] | None:
    """Fixed-point-free automorphism of the subposet on ``mask`` (positions of ``p``)."""
    if popcount(mask) < 2:
        return None
    doms = _subset_invariant_doms(p, mask, fpf=True)
    if doms is None:
        return None
    for img in _auto_solutions(p, mask, doms, meter):
        return img
    return None


SubsetFilter = Callable[[Poset, tuple[int, ...]], bool]


def proper_retract_subsets(
    p: Poset,
    filter: SubsetFilter | None = None,
    budget: SearchBudget | Meter | None = None,
    max_elements: int = 15,
    min_size: int = 1,
) -> Iterator[tuple[int, ...]]:
    """Proper nonempty retracts of ``p``, smallest first then lexicographic.

    ``filter(p, subset)`` runs before the retraction search and may reject
    a subset cheaply.
    """
    meter = as_meter(budget)
    if len(p) > max_elements:
        raise SizeCapExceeded(f"{len(p)} elements exceeds the subset-scan cap of {max_elements}")
    n = len(p)
    for size in range(max(1, min_size), n):
        for sub in combinations(range(n), size):
            if filter is not None and not filter(p, sub):
                continue
            mask = 0
            for e in sub:
                mask |= 1 << e
            if _retraction_exists_mask(p, mask, meter) is not None:
                yield sub


def automorphic_proper_retract(
    p: Poset, budget: SearchBudget | Meter | None = None, max_elements: int = 15
) -> tuple[int, ...] | None:
    """Smallest automorphic proper retract of ``p``, or ``None``."""
    meter = as_meter(budget)

    def automorphic(q: Poset, sub: tuple[int, ...]) -> bool:
        mask = 0
        for e in sub:
            mask |= 1 << e
        return subset_fpf_automorphism(q, mask, meter) is not None

    for sub in proper_retract_subsets(p, automorphic, meter, max_elements, min_size=2):
        return sub
    return None


def is_minimal_automorphic(
    p: Poset, budget: SearchBudget | Meter | None = None, max_elements: int = 15
) -> bool:
    """Automorphic, and no proper retract is automorphic."""
    meter = as_meter(budget)
    meter.check_size(p)
    if fixed_point_free_automorphism(p, meter) is None:
        return False
    return automorphic_proper_retract(p, meter, max_elements) is None


def count_order_preserving_self_maps(p: Poset, chunk: int = 1 << 20) -> tuple[int, int]:
    """(order-preserving self-maps, fixed-point-free ones) by plain enumeration.

    No pruning: every one of the ``n**n`` functions is generated and tested.
    """
    import numpy as np

    n = len(p)
    if n > 8:
        raise SizeCapExceeded("unpruned enumeration is capped at 8 elements")
    if n == 0:
        return 1, 1
    leq = p.leq_matrix()
    pairs = p.comparable_pairs
    total = n**n
    powers = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    ident = np.arange(n)
    good = fpf = 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        maps = (codes[:, None] // powers[None, :]) % n
        ok = np.ones(len(codes), dtype=bool)
        for i, j in pairs:
            ok &= leq[maps[:, i], maps[:, j]]
        good += int(ok.sum())
        fpf += int((ok & (maps != ident).all(axis=1)).sum())
    return good, fpf

