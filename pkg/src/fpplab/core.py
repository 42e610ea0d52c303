"""Finite posets, order-preserving maps, and the structural measures on them.

A :class:`Poset` stores its order closed: ``up[i]`` is a bitmask of every
``j`` with ``i <= j``.  Elements are positions ``0..n-1``; labels exist for
I/O only.  Every public function that takes elements accepts either labels
(``str``) or positions (``int``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

__all__ = [
    "PosetError",
    "CycleError",
    "Poset",
    "OrderMap",
    "RankProfile",
    "DismantleStep",
    "bits",
    "popcount",
    "build_poset",
    "chain",
    "antichain",
    "dual",
    "disjoint_sum",
    "ordinal_sum",
    "induced_subposet",
    "width",
    "maximum_antichain",
    "rank_structure",
    "irreducible_elements",
    "dismantle",
    "ordinal_blocks",
    "is_isomorphic",
    "canonical_form",
    "refine_colors",
]


class PosetError(ValueError):
    """Malformed poset input: duplicate or unknown labels, bad relations."""


class CycleError(PosetError):
    """The given pairs contain a cycle, so they violate antisymmetry."""


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Poset:
    """Immutable finite partial order on positions ``0..n-1``.

    ``up[i]`` is the bitmask of elements ``>= i`` and ``down[i]`` of
    elements ``<= i`` (both include ``i``).
    """

    def __init__(self, labels: Sequence[str], up: Sequence[int], check: bool = True):
        self.labels = tuple(str(x) for x in labels)
        self.up = tuple(up)
        n = len(self.labels)
        if len(self.up) != n:
            raise PosetError("relation size does not match label count")
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != n:
            dup = next(x for x in self.labels if self.labels.count(x) > 1)
            raise PosetError(f"duplicate label {dup!r}")
        down = [0] * n
        for i, m in enumerate(self.up):
            for j in bits(m):
                down[j] |= 1 << i
        self.down = tuple(down)
        if check:
            self._validate()

    def _validate(self) -> None:
        full = (1 << len(self)) - 1
        for i, m in enumerate(self.up):
            if m & ~full:
                raise PosetError("relation refers to elements outside the poset")
            if not (m >> i) & 1:
                raise PosetError(f"relation is not reflexive at {self.labels[i]!r}")
            if m & self.down[i] != 1 << i:
                raise CycleError(f"antisymmetry fails at {self.labels[i]!r}")
            for j in bits(m):
                if self.up[j] & ~m:
                    raise PosetError("relation is not transitive")

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.labels == other.labels and self.up == other.up

    def __hash__(self) -> int:
        return hash((self.labels, self.up))

    def __repr__(self) -> str:
        cov = ", ".join(f"{self.labels[a]}<{self.labels[b]}" for a, b in self.covers)
        return f"Poset([{', '.join(self.labels)}]; {cov})"

    def __getstate__(self):
        return (self.labels, self.up)

    def __setstate__(self, state):
        labels, up = state
        self.__init__(labels, up, check=False)

    def index(self, ref: str | int) -> int:
        if isinstance(ref, int) and not isinstance(ref, bool):
            if not 0 <= ref < len(self.labels):
                raise PosetError(f"element position {ref} out of range")
            return ref
        try:
            return self._index[ref]
        except KeyError:
            raise PosetError(f"unknown element {ref!r}") from None

    def indices(self, refs: Iterable[str | int]) -> tuple[int, ...]:
        return tuple(sorted({self.index(r) for r in refs}))

    def mask_of(self, refs: Iterable[str | int]) -> int:
        m = 0
        for r in refs:
            m |= 1 << self.index(r)
        return m

    def label_list(self, idx: Iterable[int]) -> list[str]:
        return [self.labels[i] for i in idx]

    def leq(self, a: str | int, b: str | int) -> bool:
        return bool((self.up[self.index(a)] >> self.index(b)) & 1)

    def lt(self, a: str | int, b: str | int) -> bool:
        i, j = self.index(a), self.index(b)
        return i != j and bool((self.up[i] >> j) & 1)

    def comparable(self, a: str | int, b: str | int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    @cached_property
    def strict_up(self) -> tuple[int, ...]:
        return tuple(m & ~(1 << i) for i, m in enumerate(self.up))

    @cached_property
    def strict_down(self) -> tuple[int, ...]:
        return tuple(m & ~(1 << i) for i, m in enumerate(self.down))

    @cached_property
    def incomparable(self) -> tuple[int, ...]:
        full = self.full_mask
        return tuple(full & ~(u | d) for u, d in zip(self.up, self.down))

    @cached_property
    def upper_covers(self) -> tuple[int, ...]:
        out = []
        for s in self.strict_up:
            above = 0
            for j in bits(s):
                above |= self.strict_up[j]
            out.append(s & ~above)
        return tuple(out)

    @cached_property
    def lower_covers(self) -> tuple[int, ...]:
        low = [0] * len(self)
        for i, m in enumerate(self.upper_covers):
            for j in bits(m):
                low[j] |= 1 << i
        return tuple(low)

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Hasse diagram edges ``(lower, upper)`` in position order."""
        return tuple((i, j) for i, m in enumerate(self.upper_covers) for j in bits(m))

    @cached_property
    def linear_extension(self) -> tuple[int, ...]:
        # |down(i)| strictly increases along every strict comparability
        return tuple(sorted(range(len(self)), key=lambda i: (popcount(self.down[i]), i)))

    @cached_property
    def comparable_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, m in enumerate(self.strict_up) for j in bits(m))

    def minimal_elements(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.strict_down) if not m)

    def maximal_elements(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.strict_up) if not m)

    def is_antichain(self, mask: int | None = None) -> bool:
        mask = self.full_mask if mask is None else mask
        return all(not (self.strict_up[i] & mask) for i in bits(mask))

    def leq_matrix(self):
        """The relation as an ``n x n`` numpy boolean array."""
        import numpy as np

        n = len(self)
        mat = np.zeros((n, n), dtype=bool)
        for i, m in enumerate(self.up):
            for j in bits(m):
                mat[i, j] = True
        return mat

    def relabel(self, labels: Sequence[str]) -> "Poset":
        return Poset(labels, self.up, check=False)


@dataclass(frozen=True)
class OrderMap:
    """A function ``source -> target`` given by target positions.

    Retractions are represented as self-maps of the source whose image is
    the retract, so idempotence can be checked by composition.
    """

    source: Poset
    target: Poset
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source):
            raise PosetError("map must assign every source element")

    def __call__(self, ref: str | int) -> str:
        return self.target.labels[self.images[self.source.index(ref)]]

    def as_dict(self) -> dict[str, str]:
        return {self.source.labels[i]: self.target.labels[a] for i, a in enumerate(self.images)}

    def is_order_preserving(self) -> bool:
        up = self.target.up
        img = self.images
        return all((up[img[i]] >> img[j]) & 1 for i, j in self.source.comparable_pairs)

    def fixed_points(self) -> tuple[int, ...]:
        if self.source is not self.target and self.source != self.target:
            return ()
        return tuple(i for i, a in enumerate(self.images) if a == i)

    def is_fixed_point_free(self) -> bool:
        return not self.fixed_points()

    def is_bijective(self) -> bool:
        return len(self.source) == len(self.target) and len(set(self.images)) == len(self.images)

    def is_automorphism(self) -> bool:
        """Bijective, order-preserving, and order-reflecting self-map."""
        if self.source != self.target or not self.is_bijective():
            return False
        up = self.source.up
        img = self.images
        n = len(img)
        return all(
            bool((up[i] >> j) & 1) == bool((up[img[i]] >> img[j]) & 1)
            for i in range(n)
            for j in range(n)
        )

    def image_mask(self) -> int:
        m = 0
        for a in self.images:
            m |= 1 << a
        return m

    def is_idempotent(self) -> bool:
        img = self.images
        return self.source == self.target and all(img[a] == a for a in img)

    def is_retraction_onto(self, subset: Iterable[str | int]) -> bool:
        mask = self.source.mask_of(subset)
        return (
            self.is_idempotent()
            and self.image_mask() == mask
            and self.is_order_preserving()
        )

    def orbits(self) -> list[tuple[int, ...]]:
        """Cycles of a permutation, each starting at its least element."""
        seen = 0
        out = []
        for i in range(len(self.images)):
            if (seen >> i) & 1:
                continue
            cyc = [i]
            seen |= 1 << i
            j = self.images[i]
            while j != i:
                if (seen >> j) & 1:
                    raise PosetError("map is not a permutation")
                cyc.append(j)
                seen |= 1 << j
                j = self.images[j]
            out.append(tuple(cyc))
        return out


@dataclass(frozen=True)
class RankProfile:
    rank_of: tuple[int, ...]
    levels: tuple[tuple[int, ...], ...]
    is_ranked: bool
    height: int

    def level_mask(self, i: int) -> int:
        m = 0
        for e in self.levels[i]:
            m |= 1 << e
        return m

    def band(self, lo: int, hi: int) -> tuple[int, ...]:
        """Positions whose rank lies in ``[lo, hi]``."""
        return tuple(sorted(e for lv in self.levels[lo : hi + 1] for e in lv))


@dataclass(frozen=True)
class DismantleStep:
    removed: str
    target: str
    retraction: OrderMap


# -- construction ---------------------------------------------------------


def _close(n: int, up: list[int]) -> list[int]:
    # Warshall over bitmasks
    for k in range(n):
        bk = 1 << k
        uk = up[k]
        for i in range(n):
            if up[i] & bk:
                up[i] |= uk
    return up


def build_poset(labels: Sequence[str], covers: Iterable[tuple[str, str]] = ()) -> Poset:
    """Reflexive-transitive closure of ``covers`` on ``labels``.

    Redundant pairs are accepted; the stored Hasse diagram is always the
    transitive reduction.
    """
    labels = [str(x) for x in labels]
    index: dict[str, int] = {}
    for i, lab in enumerate(labels):
        if lab in index:
            raise PosetError(f"duplicate label {lab!r}")
        index[lab] = i
    n = len(labels)
    up = [1 << i for i in range(n)]
    for a, b in covers:
        try:
            i, j = index[str(a)], index[str(b)]
        except KeyError as exc:
            raise PosetError(f"unknown element {exc.args[0]!r} in cover pair ({a!r}, {b!r})") from None
        if i == j:
            raise CycleError(f"pair ({a!r}, {b!r}) relates an element to itself")
        up[i] |= 1 << j
    _close(n, up)
    for i in range(n):
        for j in bits(up[i] & ~(1 << i)):
            if (up[j] >> i) & 1:
                raise CycleError(f"cycle detected through {labels[i]!r} and {labels[j]!r}")
    return Poset(labels, up, check=False)


def chain(n: int, prefix: str = "c") -> Poset:
    return build_poset([f"{prefix}{i}" for i in range(n)], [(f"{prefix}{i}", f"{prefix}{i + 1}") for i in range(n - 1)])


def antichain(n: int, prefix: str = "a") -> Poset:
    return build_poset([f"{prefix}{i}" for i in range(n)])


def dual(p: Poset) -> Poset:
    return Poset(p.labels, p.down, check=False)


def _tagged_labels(parts: Sequence[Poset]) -> list[str]:
    flat = [lab for q in parts for lab in q.labels]
    if len(set(flat)) == len(flat):
        return flat
    return [f"p{k}.{lab}" for k, q in enumerate(parts) for lab in q.labels]


def _stack(parts: Sequence[Poset], ordinal: bool) -> Poset:
    labels = _tagged_labels(parts)
    up: list[int] = []
    offset = 0
    total = sum(len(q) for q in parts)
    for q in parts:
        nq = len(q)
        above = ((1 << total) - 1) & ~((1 << (offset + nq)) - 1) if ordinal else 0
        up.extend((m << offset) | above for m in q.up)
        offset += nq
    return Poset(labels, up, check=False)


def disjoint_sum(*parts: Poset) -> Poset:
    """``P + Q``: no element of one part is comparable to one of another.

    Labels are kept when they are globally distinct, otherwise every label
    is tagged ``p{k}.`` with its part index.
    """
    return _stack(parts, ordinal=False)


def ordinal_sum(parts: Sequence[Poset]) -> Poset:
    """Every element of an earlier part lies below every later element."""
    parts = list(parts)
    if not parts:
        raise PosetError("ordinal sum of an empty part list")
    if len(parts) == 1:
        return parts[0]
    return _stack(parts, ordinal=True)


def induced_subposet(p: Poset, subset: Iterable[str | int]) -> Poset:
    idx = p.indices(subset)
    pos = {e: k for k, e in enumerate(idx)}
    up = []
    for e in idx:
        m = 0
        for j in bits(p.up[e]):
            k = pos.get(j)
            if k is not None:
                m |= 1 << k
        up.append(m)
    return Poset([p.labels[e] for e in idx], up, check=False)


# -- width (Dilworth via bipartite matching) ------------------------------


def maximum_antichain(p: Poset) -> tuple[int, ...]:
    """A maximum antichain, from a maximum matching and Konig's theorem."""
    n = len(p)
    if n == 0:
        raise PosetError("width of the empty poset is undefined")
    succ = [list(bits(m)) for m in p.strict_up]
    match_right = [-1] * n
    match_left = [-1] * n

    def augment(i: int, seen: list[bool]) -> bool:
        for j in succ[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_right[j] < 0 or augment(match_right[j], seen):
                match_right[j] = i
                match_left[i] = j
                return True
        return False

    matched = sum(augment(i, [False] * n) for i in range(n))

    # alternating reachability from unmatched left vertices
    reach_left = [match_left[i] < 0 for i in range(n)]
    reach_right = [False] * n
    stack = [i for i in range(n) if reach_left[i]]
    while stack:
        i = stack.pop()
        for j in succ[i]:
            if not reach_right[j] and match_left[i] != j:
                reach_right[j] = True
                k = match_right[j]
                if k >= 0 and not reach_left[k]:
                    reach_left[k] = True
                    stack.append(k)
    anti = tuple(i for i in range(n) if reach_left[i] and not reach_right[i])
    assert len(anti) == n - matched, "Konig construction produced a wrong-size antichain"
    return anti


def width(p: Poset) -> int:
    return len(maximum_antichain(p))


# -- ranks ----------------------------------------------------------------


def rank_structure(p: Poset) -> RankProfile:
    n = len(p)
    if n == 0:
        raise PosetError("rank structure of the empty poset is undefined")
    longest = [0] * n
    shortest = [0] * n
    for v in p.linear_extension:
        low = list(bits(p.lower_covers[v]))
        if low:
            longest[v] = 1 + max(longest[u] for u in low)
            shortest[v] = 1 + min(shortest[u] for u in low)
    height = max(longest)
    ranked = all(shortest[m] == longest[m] == height for m in p.maximal_elements())
    levels = tuple(tuple(i for i in range(n) if longest[i] == r) for r in range(height + 1))
    return RankProfile(tuple(longest), levels, ranked, height)


# -- irreducibles and dismantling -----------------------------------------


def irreducible_elements(p: Poset) -> tuple[int, ...]:
    """Elements with exactly one upper cover or exactly one lower cover."""
    return tuple(
        i
        for i in range(len(p))
        if popcount(p.upper_covers[i]) == 1 or popcount(p.lower_covers[i]) == 1
    )


def _cover_target(p: Poset, i: int) -> int:
    if popcount(p.upper_covers[i]) == 1:
        return p.upper_covers[i].bit_length() - 1
    return p.lower_covers[i].bit_length() - 1


def dismantle(p: Poset) -> tuple[Poset, list[DismantleStep]]:
    """Remove irreducibles one at a time (least position first) until none remain.

    Each step records the retraction of the current poset that sends the
    removed element to its unique cover.
    """
    cur = p
    trace: list[DismantleStep] = []
    while True:
        irr = irreducible_elements(cur)
        if not irr or len(cur) <= 1:
            return cur, trace
        i = irr[0]
        t = _cover_target(cur, i)
        images = tuple(t if k == i else k for k in range(len(cur)))
        f = OrderMap(cur, cur, images)
        trace.append(DismantleStep(cur.labels[i], cur.labels[t], f))
        cur = induced_subposet(cur, [k for k in range(len(cur)) if k != i])


# -- ordinal decomposition ------------------------------------------------


def ordinal_blocks(p: Poset) -> list[tuple[int, ...]]:
    """Finest ordinal-sum decomposition, bottom summand first.

    The summands are the connected components of the incomparability graph.
    """
    n = len(p)
    seen = 0
    comps = []
    for s in range(n):
        if (seen >> s) & 1:
            continue
        comp = 1 << s
        frontier = 1 << s
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= p.incomparable[v]
            frontier = nxt & ~comp
            comp |= nxt
        seen |= comp
        comps.append(tuple(bits(comp)))
    comps.sort(key=lambda c: popcount(p.down[c[0]]))
    return comps


# -- invariants, isomorphism, canonical form ------------------------------


def refine_colors(p: Poset) -> tuple[list[int], tuple]:
    """Iterated colour refinement on the comparability structure.

    Returns per-element colours plus a trace of the signatures seen in each
    round; two isomorphic posets have equal traces, and an isomorphism must
    send each element to one of the same colour.
    """
    n = len(p)
    sigs = [
        (popcount(p.down[i]), popcount(p.up[i]), popcount(p.lower_covers[i]), popcount(p.upper_covers[i]))
        for i in range(n)
    ]
    trace = []
    classes = -1
    while True:
        table = {s: k for k, s in enumerate(sorted(set(sigs)))}
        trace.append(tuple(sorted(table)))
        colors = [table[s] for s in sigs]
        if len(table) == classes:
            return colors, tuple(trace)
        classes = len(table)
        sigs = [
            (
                colors[i],
                tuple(sorted(colors[j] for j in bits(p.strict_up[i]))),
                tuple(sorted(colors[j] for j in bits(p.strict_down[i]))),
                tuple(sorted(colors[j] for j in bits(p.upper_covers[i]))),
            )
            for i in range(n)
        ]


def _relation_code(p: Poset, a: int, b: int) -> int:
    if (p.up[a] >> b) & 1:
        return 1
    if (p.down[a] >> b) & 1:
        return 2
    return 0


def is_isomorphic(p: Poset, q: Poset) -> tuple[int, ...] | None:
    """An order-isomorphism ``p -> q`` as a tuple of q-positions, or ``None``."""
    if len(p) != len(q) or len(p.covers) != len(q.covers):
        return None
    n = len(p)
    if n == 0:
        return ()
    cp, tp = refine_colors(p)
    cq, tq = refine_colors(q)
    if tp != tq:
        return None
    by_color: dict[int, list[int]] = {}
    for j, c in enumerate(cq):
        by_color.setdefault(c, []).append(j)
    order = sorted(range(n), key=lambda i: (len(by_color[cp[i]]), p.linear_extension.index(i)))
    assign = [-1] * n
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for j in by_color[cp[i]]:
            if used[j]:
                continue
            ok = True
            for kk in range(k):
                a = order[kk]
                if _relation_code(p, a, i) != _relation_code(q, assign[a], j):
                    ok = False
                    break
            if ok:
                assign[i] = j
                used[j] = True
                if extend(k + 1):
                    return True
                used[j] = False
        assign[i] = -1
        return False

    return tuple(assign) if extend(0) else None


def canonical_form(p: Poset) -> tuple:
    """Isomorphism-complete certificate: equal iff the posets are isomorphic.

    The lexicographically least relation encoding over all orderings that
    list colour classes in colour order, found by branch and bound.
    """
    n = len(p)
    if n == 0:
        return (0,)
    colors, _ = refine_colors(p)
    cells: dict[int, list[int]] = {}
    for i, c in enumerate(colors):
        cells.setdefault(c, []).append(i)
    slot_color = sorted(colors)
    placed: list[int] = []
    rows: list[int] = []
    best: list[int] | None = None
    used = [False] * n
    up, down = p.up, p.down

    def row_for(e: int) -> int:
        code = 0
        for f in placed:
            code = code * 3 + (1 if (down[e] >> f) & 1 else 2 if (up[e] >> f) & 1 else 0)
        return code

    def search(k: int) -> None:
        nonlocal best
        if k == n:
            if best is None or rows < best:
                best = rows.copy()
            return
        tight = best is not None and rows == best[:k]
        for e in cells[slot_color[k]]:
            if used[e]:
                continue
            r = row_for(e)
            if tight and r > best[k]:
                continue
            used[e] = True
            placed.append(e)
            rows.append(r)
            search(k + 1)
            rows.pop()
            placed.pop()
            used[e] = False
            tight = best is not None and rows == best[:k]

    search(0)
    return (n, tuple(best))
