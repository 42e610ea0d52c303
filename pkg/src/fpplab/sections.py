"""Niederle sections: enumeration, recognition, niceness, and towers of sections.

A section of parameter ``n`` lives on the grid ``[i, k]`` (``i`` mod 3,
``0 <= k <= n``).  Every comparability goes strictly upward in ``k``, so a
rotation-equivariant relation is fixed by which triples ``(k, l, d)`` with
``k < l`` and ``d = j - i mod 3`` are present; ``d = 0`` is forced.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .core import OrderMap, Poset, build_poset, canonical_form, induced_subposet, ordinal_blocks
from .search import (
    Meter,
    SearchBudget,
    _auto_solutions,
    as_meter,
    proper_retract_subsets,
)
from .towers import is_four_tower, six_stack

__all__ = [
    "SectionGrid",
    "SectionTowerDecomposition",
    "SectionSummand",
    "enumerate_section_grids",
    "enumerate_sections",
    "grid_label",
    "is_section",
    "section_labeling",
    "is_nice",
    "NotASectionError",
    "is_tower_of_sections",
    "tower_of_sections_retract",
    "is_very_nice",
    "lemma59_retraction",
    "stacked_4tower_retraction",
    "MAX_ENUMERATION_N",
]

MAX_ENUMERATION_N = 3


class NotASectionError(ValueError):
    pass


def grid_label(i: int, k: int) -> str:
    return f"[{i},{k}]"


@dataclass(frozen=True)
class SectionGrid:
    """Strict order on the ``3 x (n+1)`` grid, as a set of ``((i, k), (j, l))`` pairs."""

    n: int
    comparability: frozenset

    def to_poset(self) -> Poset:
        labels = [grid_label(i, k) for k in range(self.n + 1) for i in range(3)]
        pairs = [(grid_label(*a), grid_label(*b)) for a, b in sorted(self.comparability)]
        return build_poset(labels, pairs)

    def violations(self) -> list[str]:
        """Names of conditions (1)-(4) and order axioms that fail."""
        rel = self.comparability
        n = self.n
        out = []
        if any(((i, k), (i, l)) not in rel for i in range(3) for k in range(n + 1) for l in range(k + 1, n + 1)):
            out.append("(1)")
        if any(a[1] == b[1] for a, b in rel):
            out.append("(2)")
        if any((((a[0] + 1) % 3, a[1]), ((b[0] + 1) % 3, b[1])) not in rel for a, b in rel):
            out.append("(3)")
        for k in range(n):
            if all(((i, k), (j, k + 1)) in rel for i in range(3) for j in range(3)):
                out.append("(4)")
                break
        if any((a, a) in rel for a, _ in rel):
            out.append("irreflexive")
        succ: dict = {}
        for a, b in rel:
            succ.setdefault(a, set()).add(b)
        if any(c not in succ.get(a, ()) for a, b in rel for c in succ.get(b, ())):
            out.append("transitive")
        if any((b, a) in rel for a, b in rel):
            out.append("antisymmetric")
        return out


def _closure(n: int, triples: set[tuple[int, int, int]]) -> set[tuple[int, int, int]]:
    rel = set(triples)
    rel |= {(k, l, 0) for k in range(n + 1) for l in range(k + 1, n + 1)}
    changed = True
    while changed:
        changed = False
        for (k, l, d), (l2, m, e) in product(list(rel), list(rel)):
            if l == l2 and (k, m, (d + e) % 3) not in rel:
                rel.add((k, m, (d + e) % 3))
                changed = True
    return rel


def _grid_from_triples(n: int, rel: set[tuple[int, int, int]]) -> SectionGrid:
    pairs = frozenset(((i, k), ((i + d) % 3, l)) for k, l, d in rel for i in range(3))
    return SectionGrid(n, pairs)


def _condition4(n: int, rel: set[tuple[int, int, int]]) -> bool:
    return all(any((k, k + 1, d) not in rel for d in range(3)) for k in range(n))


def enumerate_section_grids(n: int) -> list[SectionGrid]:
    """One grid per isomorphism class of sections with parameter ``n``."""
    if n < 1:
        raise ValueError("section parameter n must be >= 1")
    if n > MAX_ENUMERATION_N:
        raise ValueError(f"section enumeration is capped at n = {MAX_ENUMERATION_N}")
    free = [(k, l, d) for k in range(n + 1) for l in range(k + 1, n + 1) for d in (1, 2)]
    seen_rel: set[frozenset] = set()
    seen_iso: set = set()
    out = []
    for choice in product((0, 1), repeat=len(free)):
        rel = _closure(n, {t for t, c in zip(free, choice) if c})
        key = frozenset(rel)
        if key in seen_rel:
            continue
        seen_rel.add(key)
        if not _condition4(n, rel):
            continue
        grid = _grid_from_triples(n, rel)
        form = canonical_form(grid.to_poset())
        if form in seen_iso:
            continue
        seen_iso.add(form)
        out.append(grid)
    return out


def enumerate_sections(n: int) -> list[Poset]:
    return [g.to_poset() for g in enumerate_section_grids(n)]


# -- recognition ----------------------------------------------------------


def _is_two_antichain(p: Poset) -> bool:
    return len(p) == 2 and p.is_antichain()


def _order_orbits(p: Poset, orbits: list[tuple[int, ...]]) -> list[tuple[int, ...]] | None:
    """Orbits sorted bottom to top, each rotated so the first entries form a chain."""
    n = len(orbits)
    owner = {e: k for k, o in enumerate(orbits) for e in o}
    # every chain through one element per orbit induces the same orbit order
    chain: list[int] = []

    def extend(used: int) -> bool:
        if len(chain) == n:
            return True
        last = chain[-1] if chain else None
        for k in range(n):
            if (used >> k) & 1:
                continue
            for e in orbits[k]:
                if last is None or (p.strict_up[last] >> e) & 1:
                    chain.append(e)
                    if extend(used | (1 << k)):
                        return True
                    chain.pop()
        return False

    if not extend(0):
        return None
    return [tuple(_rotate(orbits[owner[c]], c)) for c in chain]


def _orbit_mask(orbit: Sequence[int]) -> int:
    return sum(1 << e for e in orbit)


def _rotate(orbit: Sequence[int], start: int) -> list[int]:
    k = list(orbit).index(start)
    return list(orbit[k:]) + list(orbit[:k])


def section_labeling(
    p: Poset, budget: SearchBudget | Meter | None = None
) -> dict[str, tuple[int, int]] | None:
    """Grid coordinates ``label -> (i, k)`` satisfying (1)-(4), or ``None``.

    A labelling is the same thing as an automorphism made of 3-cycles whose
    orbits are antichains (the rotation ``[i, k] -> [i+1, k]``) together with
    a chain meeting every orbit once (the column ``i = 0``).
    """
    size = len(p)
    if size < 6 or size % 3:
        return None
    meter = as_meter(budget)
    doms = list(p.incomparable)
    cycle_len = {v: 3 for v in range(size)}
    for img in _auto_solutions(p, p.full_mask, doms, meter, cycle_len):
        rho = OrderMap(p, p, img)
        orbits = rho.orbits()
        if any(not p.is_antichain(_orbit_mask(o)) for o in orbits):
            continue
        levels = _order_orbits(p, orbits)
        if levels is None:
            continue
        # orbit order within a level follows rho from the column element
        coords = {}
        for k, lv in enumerate(levels):
            e = lv[0]
            for i in range(3):
                coords[p.labels[e]] = (i, k)
                e = img[e]
        n = len(levels) - 1
        # condition (4)
        if any(
            all((p.strict_up[a] >> b) & 1 for a in levels[k] for b in levels[k + 1]) for k in range(n)
        ):
            continue
        return coords
    return None


def is_section(p: Poset, budget: SearchBudget | Meter | None = None) -> bool:
    return _is_two_antichain(p) or section_labeling(p, budget) is not None


def is_nice(p: Poset, budget: SearchBudget | Meter | None = None) -> bool:
    """Every ``a < b`` has ``r > a`` with ``r`` not ``>= b`` and ``s < b`` with ``s`` not ``<= a``.

    The comparisons on ``r`` and ``s`` are read non-strictly; with strict
    comparisons ``r = b`` and ``s = a`` would always qualify.
    """
    if not is_section(p, budget):
        raise NotASectionError("niceness is defined for sections only")
    for a, b in p.comparable_pairs:
        if a == b:
            continue
        if not p.strict_up[a] & ~p.up[b]:
            return False
        if not p.strict_down[b] & ~p.down[a]:
            return False
    return True


@dataclass(frozen=True)
class SectionSummand:
    kind: str  # "antichain2" | "section"
    elements: tuple[str, ...]
    labeling: dict | None = None

    @property
    def n(self) -> int:
        return 0 if self.kind == "antichain2" else len(self.elements) // 3 - 1


@dataclass(frozen=True)
class SectionTowerDecomposition:
    summands: tuple[SectionSummand, ...]

    def to_json(self) -> dict:
        return {
            "summands": [
                {
                    "kind": s.kind,
                    "elements": list(s.elements),
                    "grid": {k: list(v) for k, v in s.labeling.items()} if s.labeling else None,
                }
                for s in self.summands
            ]
        }


def is_tower_of_sections(
    p: Poset, budget: SearchBudget | Meter | None = None
) -> SectionTowerDecomposition | None:
    if len(p) == 0:
        return None
    meter = as_meter(budget)
    out = []
    for comp in ordinal_blocks(p):
        q = induced_subposet(p, comp)
        if _is_two_antichain(q):
            out.append(SectionSummand("antichain2", tuple(q.labels)))
            continue
        lab = section_labeling(q, meter)
        if lab is None:
            return None
        out.append(SectionSummand("section", tuple(q.labels), lab))
    return SectionTowerDecomposition(tuple(out))


def _tower_size_possible(size: int) -> bool:
    # sums of 2s and multiples of 3 that are at least 6
    return size >= 2 and (size % 2 == 0 or size >= 9)


def tower_of_sections_retract(
    p: Poset, budget: SearchBudget | Meter | None = None, max_elements: int = 15
) -> tuple[int, ...] | None:
    """Smallest proper retract of ``p`` that is a tower of sections, or ``None``."""
    meter = as_meter(budget)

    def candidate(q: Poset, sub: tuple[int, ...]) -> bool:
        if not _tower_size_possible(len(sub)):
            return False
        return is_tower_of_sections(induced_subposet(q, sub), meter) is not None

    for sub in proper_retract_subsets(p, candidate, meter, max_elements, min_size=2):
        return sub
    return None


def is_very_nice(p: Poset, budget: SearchBudget | Meter | None = None, max_elements: int = 15) -> bool:
    meter = as_meter(budget)
    if not is_section(p, meter):
        raise NotASectionError("very-niceness is defined for sections only")
    return tower_of_sections_retract(p, meter, max_elements) is None


# -- explicit retractions of 6-stacks onto 4-towers -----------------------

_LEMMA59_MOVES = {"x1": "x0", "y0": "x0", "z1": "y2", "x2": "y1", "z2": "z3", "y3": "z3"}
_LEMMA59_TARGET = ("x0", "z0", "y1", "y2", "x3", "z3")


def _as_retraction(p: Poset, moves: dict[str, str]) -> OrderMap:
    images = tuple(p.index(moves.get(lab, lab)) for lab in p.labels)
    return OrderMap(p, p, images)


def _validate(f: OrderMap, target: Iterable[str]) -> None:
    target = list(target)
    if not f.is_retraction_onto(target):
        raise RuntimeError("constructed map is not a retraction")
    if not is_four_tower(induced_subposet(f.source, target)):
        raise RuntimeError("retract is not a 4-tower")


def lemma59_retraction() -> tuple[Poset, tuple[str, ...], OrderMap]:
    """The 6-stack of rank 3, the 4-tower ``{x0, z0, y1, y2, x3, z3}``, and the retraction onto it."""
    p = six_stack(3)
    f = _as_retraction(p, _LEMMA59_MOVES)
    _validate(f, _LEMMA59_TARGET)
    return p, _LEMMA59_TARGET, f


def _shift(label: str, by: int, mirror: bool) -> str:
    c, r = label[0], int(label[1:])
    if mirror:
        c = {"x": "z", "z": "x"}.get(c, c)
    return f"{c}{r + by}"


def stacked_4tower_retraction(k: int) -> tuple[Poset, tuple[str, ...], OrderMap]:
    """Retraction of the rank-``3k`` 6-stack onto a 4-tower.

    Segment ``t`` (ranks ``3t..3t+3``) uses the rank-3 map shifted up by
    ``3t``; odd segments use its mirror image under ``x <-> z``, which is an
    automorphism of the stack.  The two maps then agree on every shared rank.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    p = six_stack(3 * k)
    moves: dict[str, str] = {}
    target: list[str] = []
    for t in range(k):
        mirror = t % 2 == 1
        for a, b in _LEMMA59_MOVES.items():
            src, dst = _shift(a, 3 * t, mirror), _shift(b, 3 * t, mirror)
            if moves.get(src, dst) != dst:
                raise RuntimeError(f"segments disagree at {src}")
            moves[src] = dst
        for a in _LEMMA59_TARGET:
            lab = _shift(a, 3 * t, mirror)
            if lab not in target:
                target.append(lab)
    target = [lab for lab in p.labels if lab in target]
    f = _as_retraction(p, moves)
    _validate(f, target)
    return p, tuple(target), f
