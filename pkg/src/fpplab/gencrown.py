"""Circulant bipartite posets and (special) generalized crowns."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .core import OrderMap, Poset, PosetError, build_poset, induced_subposet, irreducible_elements, popcount
from .search import (
    Meter,
    SearchBudget,
    _auto_solutions,
    _retraction_exists_mask,
    _subset_invariant_doms,
    as_meter,
    has_fpp,
)

__all__ = [
    "CirculantSpec",
    "CrownPartition",
    "circulant_bipartite",
    "is_generalized_crown",
    "is_special",
    "restrict_to_blocks",
    "drop_degenerate_blocks",
    "SpecialCrownRetract",
    "find_special_crown_retract",
    "StripStep",
    "strip_irreducibles_keeping_crown",
]


@dataclass(frozen=True)
class CirculantSpec:
    m: int
    n: int
    offsets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(self.offsets))
        if self.m < 2 or self.n < 2:
            raise ValueError("circulant posets need m, n >= 2")
        off = self.offsets
        if any(b <= a for a, b in zip(off, off[1:])):
            raise ValueError("offsets must be strictly increasing")
        if off and not (0 <= off[0] and off[-1] <= self.n - 1):
            raise ValueError("offsets must lie in [0, n-1]")


def circulant_bipartite(spec: CirculantSpec) -> Poset:
    """``x_i < y_{(i+j) mod n}`` for ``i < m`` and each offset ``j``.

    Raises ``ValueError`` when the simultaneous shift is not order-preserving
    (possible only when ``m != n``), since the result would not be circulant.
    """
    m, n = spec.m, spec.n
    xs = [f"x{i}" for i in range(m)]
    ys = [f"y{j}" for j in range(n)]
    pairs = [(xs[i], ys[(i + j) % n]) for i in range(m) for j in spec.offsets]
    p = build_poset(xs + ys, pairs)
    shift = tuple((i + 1) % m for i in range(m)) + tuple(m + (j + 1) % n for j in range(n))
    if not OrderMap(p, p, shift).is_order_preserving():
        raise ValueError(f"offsets {spec.offsets} are not shift-invariant for m={m}, n={n}")
    return p


@dataclass(frozen=True)
class CrownPartition:
    """Blocks ``A_0..A_{k-1}``, each a tuple of positions in its cyclic order."""

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, p: Poset, blocks: Iterable[Sequence[str | int]]) -> "CrownPartition":
        return cls(tuple(tuple(p.index(e) for e in b) for b in blocks))

    def labels(self, p: Poset) -> list[list[str]]:
        return [[p.labels[e] for e in b] for b in self.blocks]

    def block_of(self) -> dict[int, int]:
        return {e: k for k, b in enumerate(self.blocks) for e in b}


def _check_covers(p: Poset, partition: CrownPartition) -> None:
    flat = [e for b in partition.blocks for e in b]
    if len(flat) != len(set(flat)) or set(flat) != set(range(len(p))):
        raise PosetError("partition blocks must cover every element exactly once")


def _pair_is_circulant(p: Poset, lo: Sequence[int], hi: Sequence[int]) -> bool:
    m, n = len(lo), len(hi)
    for s, a in enumerate(lo):
        nxt = lo[(s + 1) % m]
        for t, b in enumerate(hi):
            if (p.up[a] >> b) & 1 and not (p.up[nxt] >> hi[(t + 1) % n]) & 1:
                return False
    return True


def is_generalized_crown(p: Poset, partition: CrownPartition) -> bool:
    """Blocks are antichains of size >= 2 and every pair of blocks is circulant.

    A pair with no comparabilities counts as circulant with no offsets; a
    pair with comparabilities in both directions is not circulant.
    """
    _check_covers(p, partition)
    masks = [sum(1 << e for e in b) for b in partition.blocks]
    for b, mask in zip(partition.blocks, masks):
        if len(b) < 2 or not p.is_antichain(mask):
            return False
    k = len(partition.blocks)
    for i in range(k):
        for j in range(i + 1, k):
            A, B = partition.blocks[i], partition.blocks[j]
            up_ab = any(p.strict_up[a] & masks[j] for a in A)
            up_ba = any(p.strict_up[b] & masks[i] for b in B)
            if up_ab and up_ba:
                return False
            if up_ab and not _pair_is_circulant(p, A, B):
                return False
            if up_ba and not _pair_is_circulant(p, B, A):
                return False
    return True


def is_special(
    p: Poset, partition: CrownPartition, budget: SearchBudget | Meter | None = None
) -> OrderMap | None:
    """An automorphism whose orbits are exactly the partition blocks, or ``None``."""
    _check_covers(p, partition)
    meter = as_meter(budget)
    doms = [0] * len(p)
    cycle_len = {}
    for b in partition.blocks:
        mask = sum(1 << e for e in b)
        for e in b:
            doms[e] = mask
            cycle_len[e] = len(b)
    for img in _auto_solutions(p, p.full_mask, doms, meter, cycle_len):
        f = OrderMap(p, p, img)
        if sorted(map(frozenset, f.orbits())) == sorted(map(frozenset, partition.blocks)):
            return f
    return None


def restrict_to_blocks(
    p: Poset, partition: CrownPartition, keep: Iterable[int]
) -> tuple[Poset, CrownPartition]:
    """Induced subposet on the chosen blocks, with the partition carried over."""
    keep = sorted(set(keep))
    chosen = [partition.blocks[i] for i in keep]
    sub = sorted(e for b in chosen for e in b)
    q = induced_subposet(p, sub)
    pos = {e: k for k, e in enumerate(sub)}
    return q, CrownPartition(tuple(tuple(pos[e] for e in b) for b in chosen))


drop_degenerate_blocks = restrict_to_blocks


@dataclass(frozen=True)
class SpecialCrownRetract:
    subset: tuple[int, ...]  # positions in the original poset
    retraction: OrderMap  # self-map of the original poset onto ``subset``
    crown: Poset  # induced subposet on ``subset``
    partition: CrownPartition  # positions in ``crown``
    automorphism: OrderMap  # of ``crown``, orbits = partition blocks

    def __iter__(self):
        # unpacks as (subset, retraction, partition)
        return iter((self.subset, self.retraction, self.partition))


def find_special_crown_retract(
    p: Poset, budget: SearchBudget | Meter | None = None
) -> SpecialCrownRetract | None:
    """Smallest retract of ``p`` carrying a special generalized crown structure.

    Candidate blocks are the orbits, in cycle order, of each fixed-point-free
    automorphism of the candidate subset.
    """
    meter = as_meter(budget)
    if has_fpp(p, meter):
        return None
    n = len(p)
    for size in range(2, n + 1):
        for sub in combinations(range(n), size):
            mask = sum(1 << e for e in sub)
            doms = _subset_invariant_doms(p, mask, fpf=True)
            if doms is None:
                continue
            retraction = None
            q = None
            for img in _auto_solutions(p, mask, doms, meter):
                if retraction is None:
                    retraction = _retraction_exists_mask(p, mask, meter)
                    if retraction is None:
                        break
                    q = induced_subposet(p, sub)
                pos = {e: k for k, e in enumerate(sub)}
                local = tuple(pos[img[e]] for e in sub)
                f = OrderMap(q, q, local)
                part = CrownPartition(tuple(f.orbits()))
                if is_generalized_crown(q, part):
                    return SpecialCrownRetract(sub, OrderMap(p, p, retraction), q, part, f)
    return None


@dataclass(frozen=True)
class StripStep:
    removed_block: tuple[str, ...]
    retraction: OrderMap


def strip_irreducibles_keeping_crown(
    p: Poset, partition: CrownPartition, steps: list[StripStep] | None = None
) -> tuple[Poset, CrownPartition]:
    """Remove whole blocks of irreducible elements until none are left.

    Each block is an orbit of the special automorphism, so when one element
    of a block is irreducible every element is; this is checked at each step.
    Every element of the removed block goes to its unique cover, which gives
    a retraction, appended to ``steps`` when a list is given.
    """
    _check_covers(p, partition)
    if steps is None:
        steps = []
    cur, part = p, partition
    while True:
        irr = set(irreducible_elements(cur))
        if not irr or len(part.blocks) <= 1:
            return cur, part
        owner = part.block_of()
        extreme = [e for e in sorted(irr) if not cur.strict_up[e] or not cur.strict_down[e]]
        k = owner[(extreme or sorted(irr))[0]]
        block = part.blocks[k]
        if not set(block) <= irr:
            raise RuntimeError(f"block {[cur.labels[e] for e in block]} is only partly irreducible")
        images = list(range(len(cur)))
        for e in block:
            ups, downs = cur.upper_covers[e], cur.lower_covers[e]
            target = ups if popcount(ups) == 1 else downs
            images[e] = target.bit_length() - 1
        f = OrderMap(cur, cur, tuple(images))
        if not (f.is_order_preserving() and f.is_idempotent()):
            raise RuntimeError("block removal is not a retraction")
        steps.append(StripStep(tuple(cur.labels[e] for e in block), f))
        cur, part = restrict_to_blocks(cur, part, [i for i in range(len(part.blocks)) if i != k])
