"""Crowns, 4-towers, 6-stacks, 8-stacks and the towers built from them.

Also holds the catalogue of bipartite 4+4 layers that may appear between
consecutive ranks of an 8-stack, recomputed by exhaustive enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Sequence, Union

from .core import (
    OrderMap,
    Poset,
    PosetError,
    bits,
    build_poset,
    canonical_form,
    induced_subposet,
    ordinal_blocks,
    ordinal_sum,
    popcount,
    rank_structure,
)
from .search import Meter, SearchBudget, _auto_solutions, _full_doms, _retraction_exists_mask, as_meter

__all__ = [
    "crown",
    "four_tower",
    "six_stack",
    "eight_stack",
    "layer_poset",
    "layer_masks",
    "Antichain2",
    "SixStack",
    "EightStack",
    "TowerSpec",
    "build_tower",
    "cycle_type",
    "parse_type",
    "LayerCatalogEntry",
    "enumerate_admissible_layers",
    "layer_catalog",
    "layer_name",
    "RankTypeAssignment",
    "StackShapeError",
    "NotRankedError",
    "LevelSizeError",
    "NonCatalogLayerError",
    "InadmissibleStackError",
    "is_admissible_8stack",
    "six_stack_automorphism",
    "canonical_tower_automorphism",
    "CANONICAL_PERMS",
    "invariant_layers",
    "enumerate_admissible_8stacks",
    "TowerBlock",
    "TowerDecomposition",
    "classify_tower",
    "is_four_tower",
    "is_4crown_tower",
    "is_4cycle_tower",
    "detect_4crown_tower",
    "detect_4cycle_tower",
]


# -- basic families -------------------------------------------------------


def crown(n: int) -> Poset:
    """The 2n-crown: ``x_i < y_i`` and ``x_i < y_{i-1}`` (indices mod n)."""
    if n < 2:
        raise ValueError("a crown needs n >= 2")
    xs = [f"x{i}" for i in range(n)]
    ys = [f"y{i}" for i in range(n)]
    pairs = [(xs[i], ys[i]) for i in range(n)] + [(xs[i], ys[(i - 1) % n]) for i in range(n)]
    return build_poset(xs + ys, pairs)


def four_tower(r: int) -> Poset:
    """Ordinal sum of ``r + 1`` two-element antichains; ``r = 0`` is the 2-antichain."""
    if r < 0:
        raise ValueError("4-tower rank must be >= 0")
    labels = [f"{c}{i}" for i in range(r + 1) for c in "ab"]
    pairs = [(f"{c}{i}", f"{d}{i + 1}") for i in range(r) for c in "ab" for d in "ab"]
    return build_poset(labels, pairs)


def six_stack(n: int) -> Poset:
    """The 6-stack of rank ``n``: ``x_{i+1} > x_i, y_i``; ``y_{i+1} > x_i, z_i``; ``z_{i+1} > y_i, z_i``."""
    if n < 1:
        raise ValueError("6-stack rank must be >= 1")
    labels = [f"{c}{i}" for i in range(n + 1) for c in "xyz"]
    pairs = []
    for i in range(n):
        j = i + 1
        pairs += [(f"x{i}", f"x{j}"), (f"y{i}", f"x{j}")]
        pairs += [(f"x{i}", f"y{j}"), (f"z{i}", f"y{j}")]
        pairs += [(f"y{i}", f"z{j}"), (f"z{i}", f"z{j}")]
    return build_poset(labels, pairs)


Layer = tuple[int, int, int, int]


def layer_poset(masks: Sequence[int]) -> Poset:
    """Bipartite layer on ``b0..b{s-1}`` below ``t0..t{s-1}``; ``masks[b]`` lists tops above ``b``."""
    s = len(masks)
    bottoms = [f"b{i}" for i in range(s)]
    tops = [f"t{i}" for i in range(s)]
    return build_poset(bottoms + tops, [(bottoms[b], tops[t]) for b in range(s) for t in bits(masks[b])])


def layer_masks(layer: Poset) -> Layer:
    """Inverse of :func:`layer_poset` for a rank-1 layer; levels taken in position order."""
    rs = rank_structure(layer)
    if rs.height != 1:
        raise PosetError("a layer must have rank 1")
    bottoms, tops = rs.levels
    pos = {t: k for k, t in enumerate(tops)}
    return tuple(sum(1 << pos[t] for t in bits(layer.strict_up[b])) for b in bottoms)


def eight_stack(layers: Sequence[Union[Sequence[int], Poset]]) -> Poset:
    """Stack 4+4 layers, gluing the tops of one layer to the bottoms of the next by position.

    Elements are ``a{k} b{k} c{k} d{k}`` at rank ``k``.
    """
    if not layers:
        raise ValueError("an 8-stack needs at least one layer")
    masks = [layer_masks(x) if isinstance(x, Poset) else tuple(x) for x in layers]
    for m in masks:
        if len(m) != 4 or any(not 0 <= v < 16 for v in m):
            raise ValueError("each 8-stack layer must be four 4-bit masks")
    names = "abcd"
    labels = [f"{names[p]}{k}" for k in range(len(masks) + 1) for p in range(4)]
    pairs = [
        (f"{names[b]}{k}", f"{names[t]}{k + 1}")
        for k, m in enumerate(masks)
        for b in range(4)
        for t in bits(m[b])
    ]
    return build_poset(labels, pairs)


# -- tower specifications -------------------------------------------------


@dataclass(frozen=True)
class Antichain2:
    def realize(self) -> Poset:
        return build_poset(["u", "v"])

    def to_json(self):
        return "antichain2"


@dataclass(frozen=True)
class SixStack:
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("6-stack rank must be >= 1")

    def realize(self) -> Poset:
        return six_stack(self.rank)

    def to_json(self):
        return {"six_stack": self.rank}


@dataclass(frozen=True)
class EightStack:
    layers: tuple[Layer, ...]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("8-stack layer list must be nonempty")
        object.__setattr__(self, "layers", tuple(tuple(m) for m in self.layers))

    def realize(self) -> Poset:
        return eight_stack(self.layers)

    def to_json(self):
        return {"eight_stack": [list(m) for m in self.layers]}


Summand = Union[Antichain2, SixStack, EightStack]


@dataclass(frozen=True)
class TowerSpec:
    summands: tuple[Summand, ...]

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        if not self.summands:
            raise ValueError("a tower needs at least one summand")

    def to_json(self) -> dict:
        return {"summands": [s.to_json() for s in self.summands]}

    @classmethod
    def from_json(cls, data: dict) -> "TowerSpec":
        out: list[Summand] = []
        for item in data["summands"]:
            if item == "antichain2":
                out.append(Antichain2())
            elif isinstance(item, dict) and "six_stack" in item:
                out.append(SixStack(int(item["six_stack"])))
            elif isinstance(item, dict) and "eight_stack" in item:
                layers = []
                for lay in item["eight_stack"]:
                    if isinstance(lay, str):
                        layers.append(_named_layer(lay))
                    else:
                        layers.append(tuple(int(v) for v in lay))
                out.append(EightStack(tuple(layers)))
            else:
                raise ValueError(f"unrecognised tower summand {item!r}")
        return cls(tuple(out))

    @property
    def size(self) -> int:
        total = 0
        for s in self.summands:
            if isinstance(s, Antichain2):
                total += 2
            elif isinstance(s, SixStack):
                total += 3 * s.rank + 3
            else:
                total += 4 * len(s.layers) + 4
        return total


class InadmissibleStackError(ValueError):
    pass


def build_tower(spec: TowerSpec) -> Poset:
    """Ordinal sum of the realized summands (8-stacks must be admissible)."""
    parts = []
    for s in spec.summands:
        q = s.realize()
        if isinstance(s, EightStack) and is_admissible_8stack(q) is None:
            raise InadmissibleStackError(f"8-stack summand {s.layers} is not admissible")
        parts.append(q)
    return ordinal_sum(parts)


# -- cycle types ----------------------------------------------------------

TYPE_4 = "(4)"
TYPE_22 = "(2)(2)"
TYPE_3 = "(3)"


def parse_type(tag: str) -> str:
    t = str(tag).replace(" ", "").replace(",", "")
    table = {"4": TYPE_4, "(4)": TYPE_4, "22": TYPE_22, "(2)(2)": TYPE_22, "3": TYPE_3, "(3)": TYPE_3}
    try:
        return table[t]
    except KeyError:
        raise ValueError(f"unknown cycle type {tag!r}; expected (4), (2)(2) or (3)") from None


def cycle_type(perm: Sequence[int], domain: Iterable[int] | None = None) -> str:
    """Cycle type of ``perm`` restricted to ``domain`` as e.g. ``(2)(2)``."""
    dom = list(range(len(perm))) if domain is None else list(domain)
    seen: set[int] = set()
    lengths = []
    for s in dom:
        if s in seen:
            continue
        k, x = 0, s
        while x not in seen:
            seen.add(x)
            x = perm[x]
            k += 1
        lengths.append(k)
    return "".join(f"({k})" for k in sorted(lengths, reverse=True))


@lru_cache(maxsize=None)
def _perms_of_type(s: int, tag: str) -> tuple[tuple[int, ...], ...]:
    return tuple(p for p in permutations(range(s)) if cycle_type(p) == tag)


# -- layer catalogue ------------------------------------------------------


@dataclass(frozen=True)
class LayerCatalogEntry:
    layer: Poset
    bottom_type: str
    top_type: str
    name: str
    # permutations of bottom positions and of top positions
    witness_pair: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def masks(self) -> Layer:
        return layer_masks(self.layer)

    def witness_map(self) -> OrderMap:
        sb, st = self.witness_pair
        s = len(sb)
        return OrderMap(self.layer, self.layer, tuple(sb) + tuple(s + t for t in st))

    def to_document(self) -> dict:
        from .io import poset_document

        return poset_document(
            self.layer,
            name=self.name,
            metadata={
                "bottom_type": self.bottom_type,
                "top_type": self.top_type,
                "witness_bottom": list(self.witness_pair[0]),
                "witness_top": list(self.witness_pair[1]),
            },
        )


def _type_size(tag: str) -> int:
    return 3 if tag == TYPE_3 else 4


@lru_cache(maxsize=None)
def _raw_layers(bottom_type: str, top_type: str) -> tuple[tuple[Poset, tuple, tuple], ...]:
    s = _type_size(bottom_type)
    if _type_size(top_type) != s:
        raise ValueError("bottom and top cycle types must act on levels of equal size")
    full = (1 << s) - 1
    pb = _perms_of_type(s, bottom_type)
    pt = _perms_of_type(s, top_type)
    seen: dict[tuple, int] = {}
    out = []
    rows = [m for m in range(1 << s) if popcount(m) >= 2]
    for masks in product(rows, repeat=s):
        if all(m == full for m in masks):
            continue
        indeg = [sum((m >> t) & 1 for m in masks) for t in range(s)]
        if min(indeg) < 2:
            continue
        witness = None
        for sb in pb:
            for st in pt:
                if all(
                    masks[sb[b]] == sum(1 << st[t] for t in bits(masks[b])) for b in range(s)
                ):
                    witness = (sb, st)
                    break
            if witness:
                break
        if witness is None:
            continue
        layer = layer_poset(masks)
        key = canonical_form(layer)
        if key in seen:
            continue
        seen[key] = len(out)
        out.append((layer, witness[0], witness[1]))
    return tuple(out)


def _connected(p: Poset) -> bool:
    if len(p) == 0:
        return True
    comp = frontier = 1
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= p.up[v] | p.down[v]
        frontier = nxt & ~comp
        comp |= nxt
    return comp == p.full_mask


def _degree_signature(layer: Poset) -> tuple[str, str, bool]:
    rs = rank_structure(layer)
    lo = "".join(str(d) for d in sorted(popcount(layer.strict_up[b]) for b in rs.levels[0]))
    hi = "".join(str(d) for d in sorted(popcount(layer.strict_down[t]) for t in rs.levels[1]))
    return lo, hi, _connected(layer)


_SIGNATURE_NAMES = {
    ("2222", "2222", True): "C_8",
    ("2222", "2222", False): "C_4+C_4",
    ("3333", "3333", True): "K44bar",
    ("3333", "2244", True): "Z_1",
    ("2244", "3333", True): "Z_1_dual",
    ("2244", "2244", True): "Z_4",
    ("3344", "3344", True): "Z_5",
    ("222", "222", True): "C_6",
}


@lru_cache(maxsize=None)
def _name_table() -> dict[tuple, str]:
    classes: dict[tuple, Poset] = {}
    for bt, tt in product((TYPE_4, TYPE_22), repeat=2):
        for layer, _, _ in _raw_layers(bt, tt):
            classes.setdefault(canonical_form(layer), layer)
    for layer, _, _ in _raw_layers(TYPE_3, TYPE_3):
        classes.setdefault(canonical_form(layer), layer)
    table = {}
    ambiguous = []
    for key, layer in classes.items():
        sig = _degree_signature(layer)
        if sig[:2] == ("2233", "2233"):
            ambiguous.append(key)
        else:
            table[key] = _SIGNATURE_NAMES.get(sig, "unnamed")
    # Z_2 / Z_3 share a degree signature; the smaller certificate is Z_2
    ambiguous.sort()
    for key, name in zip(ambiguous, ("Z_2", "Z_3")):
        table[key] = name
    for key in ambiguous[2:]:
        table[key] = "unnamed"
    return table


def layer_name(layer: Poset) -> str:
    return _name_table().get(canonical_form(layer), "unnamed")


def enumerate_admissible_layers(bottom_type: str, top_type: str) -> list[LayerCatalogEntry]:
    """Isomorphism classes of bipartite layers with a compatible fixed-point-free pair.

    Candidates are all bipartite orders on ``s`` labelled minimal and ``s``
    labelled maximal elements (``s = 4``, or 3 for type ``(3)``) with no
    irreducible element, not complete bipartite, and preserved by some
    permutation pair of the requested cycle types.
    """
    bt, tt = parse_type(bottom_type), parse_type(top_type)
    names = _name_table()
    return [
        LayerCatalogEntry(layer, bt, tt, names.get(canonical_form(layer), "unnamed"), (sb, st))
        for layer, sb, st in _raw_layers(bt, tt)
    ]


@lru_cache(maxsize=None)
def layer_catalog() -> dict[str, Poset]:
    """One representative per named 4+4 layer class, keyed by name."""
    out: dict[str, Poset] = {}
    for bt, tt in product((TYPE_4, TYPE_22), repeat=2):
        for e in enumerate_admissible_layers(bt, tt):
            out.setdefault(e.name, e.layer)
    return dict(sorted(out.items()))


@lru_cache(maxsize=None)
def _catalog_keys() -> frozenset:
    return frozenset(canonical_form(q) for q in layer_catalog().values())


def _named_layer(name: str) -> Layer:
    cat = layer_catalog()
    if name not in cat:
        raise ValueError(f"unknown layer name {name!r}; known: {', '.join(cat)}")
    return layer_masks(cat[name])


# -- admissible 8-stacks --------------------------------------------------


class StackShapeError(ValueError):
    """The poset does not have the shape of an 8-stack."""


class NotRankedError(StackShapeError):
    pass


class LevelSizeError(StackShapeError):
    pass


class NonCatalogLayerError(StackShapeError):
    pass


@dataclass(frozen=True)
class RankTypeAssignment:
    types: tuple[str, ...]
    automorphism: OrderMap


def _check_8stack_shape(p: Poset):
    rs = rank_structure(p)
    if not rs.is_ranked:
        raise NotRankedError("an 8-stack must be ranked")
    if rs.height < 1:
        raise LevelSizeError("an 8-stack has rank at least 1")
    for i, lv in enumerate(rs.levels):
        if len(lv) != 4:
            raise LevelSizeError(f"level {i} has {len(lv)} elements, expected 4")
    keys = _catalog_keys()
    for i in range(rs.height):
        if canonical_form(induced_subposet(p, rs.band(i, i + 1))) not in keys:
            raise NonCatalogLayerError(f"levels {i},{i + 1} do not form a catalogued layer")
    return rs


def is_admissible_8stack(
    p: Poset, budget: SearchBudget | Meter | None = None
) -> RankTypeAssignment | None:
    """Rank-preserving fixed-point-free automorphism with per-rank type (4) or (2)(2)."""
    rs = _check_8stack_shape(p)
    meter = as_meter(budget)
    doms = _full_doms(p, fpf=True)
    for img in _auto_solutions(p, p.full_mask, doms, meter):
        types = tuple(cycle_type(img, lv) for lv in rs.levels)
        if all(t in (TYPE_4, TYPE_22) for t in types):
            return RankTypeAssignment(types, OrderMap(p, p, img))
    return None


# -- canonical tower automorphisms ----------------------------------------


def six_stack_automorphism(n: int) -> OrderMap:
    """Rank-wise 3-cycles: ``x->y->z`` on even ranks, ``x->z->y`` on odd ranks.

    Each rank-(i+1) element is determined by the rank-i element it does not
    cover, which reverses the cyclic direction from one rank to the next.
    """
    p = six_stack(n)
    img = []
    for i in range(n + 1):
        base = 3 * i
        step = (1, 2, 0) if i % 2 == 0 else (2, 0, 1)
        img += [base + s for s in step]
    return OrderMap(p, p, tuple(img))


# rank-wise permutations read off an admissible diagram: rotate all four, or
# swap the two leftmost and the two rightmost
CANONICAL_PERMS = {TYPE_4: (1, 2, 3, 0), TYPE_22: (1, 0, 3, 2)}


def _diagram_automorphism(layers: Sequence[Layer]) -> tuple[int, ...] | None:
    """Images for the first per-rank assignment of canonical permutations that preserves every layer."""
    r = len(layers)
    for types in product((TYPE_4, TYPE_22), repeat=r + 1):
        perms = [CANONICAL_PERMS[t] for t in types]
        ok = all(
            layers[k][perms[k][b]] == sum(1 << perms[k + 1][t] for t in bits(layers[k][b]))
            for k in range(r)
            for b in range(4)
        )
        if ok:
            return tuple(4 * k + perms[k][i] for k in range(r + 1) for i in range(4))
    return None


@lru_cache(maxsize=None)
def invariant_layers(bottom_type: str, top_type: str) -> tuple[Layer, ...]:
    """Catalogued layers (as masks) preserved by the canonical permutations of the two types."""
    pb, pt = CANONICAL_PERMS[parse_type(bottom_type)], CANONICAL_PERMS[parse_type(top_type)]
    orbits: list[frozenset] = []
    seen = set()
    for b in range(4):
        for t in range(4):
            if (b, t) in seen:
                continue
            orb = set()
            x = (b, t)
            while x not in orb:
                orb.add(x)
                x = (pb[x[0]], pt[x[1]])
            seen |= orb
            orbits.append(frozenset(orb))
    keys = _catalog_keys()
    out = []
    for choice in product((0, 1), repeat=len(orbits)):
        masks = [0, 0, 0, 0]
        for orb, c in zip(orbits, choice):
            if c:
                for b, t in orb:
                    masks[b] |= 1 << t
        if canonical_form(layer_poset(masks)) in keys:
            out.append(tuple(masks))
    return tuple(sorted(out))


def enumerate_admissible_8stacks(rank: int) -> list[EightStack]:
    """One admissible 8-stack per isomorphism class of the given rank.

    Every admissible stack can be relabelled rank by rank so that its
    automorphism acts by the canonical permutations, so stacking invariant
    layers for every type sequence reaches every class.
    """
    if rank < 1:
        raise ValueError("8-stack rank must be >= 1")
    seen: dict = {}
    for types in product((TYPE_4, TYPE_22), repeat=rank + 1):
        choices = [invariant_layers(types[k], types[k + 1]) for k in range(rank)]
        for layers in product(*choices):
            key = canonical_form(eight_stack(layers))
            seen.setdefault(key, EightStack(tuple(layers)))
    return list(seen.values())


def canonical_tower_automorphism(spec: TowerSpec) -> OrderMap:
    """Fixed-point-free automorphism of :func:`build_tower` assembled summand by summand.

    8-stacks first try the canonical rank-wise permutations; stacks drawn
    in another labelling fall back to a search.
    """
    images: list[int] = []
    offset = 0
    for s in spec.summands:
        if isinstance(s, Antichain2):
            local = (1, 0)
        elif isinstance(s, SixStack):
            local = six_stack_automorphism(s.rank).images
        else:
            local = _diagram_automorphism(s.layers)
            if local is None:
                a = is_admissible_8stack(s.realize())
                if a is None:
                    raise InadmissibleStackError(f"8-stack summand {s.layers} is not admissible")
                local = a.automorphism.images
        images.extend(offset + x for x in local)
        offset += len(local)
    p = build_tower(spec)
    return OrderMap(p, p, tuple(images))


# -- recognising towers ---------------------------------------------------


@dataclass(frozen=True)
class TowerBlock:
    kind: str  # "antichain2" | "six_stack" | "eight_stack"
    elements: tuple[str, ...]
    summand: Summand
    assignment: RankTypeAssignment | None = None


@dataclass(frozen=True)
class TowerDecomposition:
    blocks: tuple[TowerBlock, ...]
    family: str | None  # "4-tower" | "6-tower" | "8-tower", None if not a tower
    failure: str | None = None
    offending_block: tuple[str, ...] | None = None

    @property
    def is_tower(self) -> bool:
        return self.failure is None

    def to_spec(self) -> TowerSpec:
        if not self.is_tower:
            raise ValueError("not a tower")
        return TowerSpec(tuple(b.summand for b in self.blocks))

    def to_json(self) -> dict:
        return {
            "is_tower": self.is_tower,
            "family": self.family,
            "failure": self.failure,
            "offending_block": list(self.offending_block) if self.offending_block else None,
            "blocks": [
                {
                    "kind": b.kind,
                    "elements": list(b.elements),
                    "summand": b.summand.to_json(),
                    "rank_types": list(b.assignment.types) if b.assignment else None,
                }
                for b in self.blocks
            ],
        }


def _is_six_stack_block(q: Poset) -> int | None:
    rs = rank_structure(q)
    if not rs.is_ranked or rs.height < 1 or any(len(lv) != 3 for lv in rs.levels):
        return None
    c6 = canonical_form(crown(3))
    for i in range(rs.height):
        if canonical_form(induced_subposet(q, rs.band(i, i + 1))) != c6:
            return None
    return rs.height


def _eight_stack_summand(q: Poset, budget) -> tuple[EightStack, RankTypeAssignment] | str:
    try:
        assignment = is_admissible_8stack(q, budget)
    except StackShapeError as exc:
        return str(exc)
    if assignment is None:
        return "8-stack without an admissible automorphism"
    rs = rank_structure(q)
    layers = []
    for i in range(rs.height):
        pos = {t: k for k, t in enumerate(rs.levels[i + 1])}
        layers.append(tuple(sum(1 << pos[t] for t in bits(q.upper_covers[b])) for b in rs.levels[i]))
    return EightStack(tuple(layers)), assignment


def classify_tower(p: Poset, budget: SearchBudget | Meter | None = None) -> TowerDecomposition:
    """Parse ``p`` as an ordinal sum of 2-antichains, 6-stacks and admissible 8-stacks."""
    if len(p) == 0:
        return TowerDecomposition((), None, "empty poset", ())
    meter = as_meter(budget)
    blocks: list[TowerBlock] = []
    for comp in ordinal_blocks(p):
        q = induced_subposet(p, comp)
        labels = tuple(q.labels)
        if len(q) == 2 and q.is_antichain():
            blocks.append(TowerBlock("antichain2", labels, Antichain2()))
            continue
        r = _is_six_stack_block(q)
        if r is not None:
            blocks.append(TowerBlock("six_stack", labels, SixStack(r)))
            continue
        if len(q) % 4 == 0 and len(q) >= 8:
            got = _eight_stack_summand(q, meter)
            if not isinstance(got, str):
                blocks.append(TowerBlock("eight_stack", labels, got[0], got[1]))
                continue
            reason = got
        else:
            reason = f"block of {len(q)} elements is not a 2-antichain, 6-stack or 8-stack"
        return TowerDecomposition(tuple(blocks), None, reason, labels)
    kinds = {b.kind for b in blocks}
    family = "4-tower" if kinds == {"antichain2"} else "6-tower" if "eight_stack" not in kinds else "8-tower"
    return TowerDecomposition(tuple(blocks), family)


def is_four_tower(q: Poset) -> bool:
    if len(q) < 2:
        return False
    return all(len(c) == 2 and not (q.strict_up[c[0]] >> c[1]) & 1 and not (q.strict_up[c[1]] >> c[0]) & 1 for c in ordinal_blocks(q))


def _tower_levels(p: Poset, mask: int) -> list[int] | None:
    """Level masks (positions of ``p``) if the subposet on ``mask`` is a 4-tower."""
    idx = list(bits(mask))
    q = induced_subposet(p, idx)
    if not is_four_tower(q):
        return None
    return [(1 << idx[c[0]]) | (1 << idx[c[1]]) for c in ordinal_blocks(q)]


def _upper_bounds(p: Poset, mask: int) -> int:
    out = p.full_mask
    for v in bits(mask):
        out &= p.up[v]
    return out


def _lower_bounds(p: Poset, mask: int) -> int:
    out = p.full_mask
    for v in bits(mask):
        out &= p.down[v]
    return out


def _crowns_condition(p: Poset, levels: list[int]) -> bool:
    below = 0
    for lv in levels:
        ub = _upper_bounds(p, below)
        for t in bits(lv):
            if p.strict_down[t] & ub:
                return False
        below |= lv
    return True


def _cycle_condition(p: Poset, levels: list[int]) -> bool:
    return all(
        not (_upper_bounds(p, levels[i]) & _lower_bounds(p, levels[i + 1]))
        for i in range(len(levels) - 1)
    )


def is_4crown_tower(p: Poset, subset: Iterable[str | int]) -> bool:
    """Each element of the 4-tower is minimal among upper bounds of the tower elements below it."""
    levels = _tower_levels(p, p.mask_of(subset))
    return levels is not None and _crowns_condition(p, levels)


def is_4cycle_tower(p: Poset, subset: Iterable[str | int]) -> bool:
    """No element sits above one tower level and below the next."""
    levels = _tower_levels(p, p.mask_of(subset))
    return levels is not None and _cycle_condition(p, levels)


def _detect(p: Poset, condition, require_retract: bool, budget) -> tuple[int, ...] | None:
    meter = as_meter(budget)
    n = len(p)
    for size in range(2, n + 1, 2):
        for sub in combinations(range(n), size):
            mask = sum(1 << e for e in sub)
            levels = _tower_levels(p, mask)
            if levels is None or not condition(p, levels):
                continue
            if require_retract and _retraction_exists_mask(p, mask, meter) is None:
                continue
            return sub
    return None


def detect_4crown_tower(
    p: Poset, require_retract: bool = False, budget: SearchBudget | Meter | None = None
) -> tuple[int, ...] | None:
    """Smallest 4-crowns tower of ``p`` (optionally also a retract), or ``None``."""
    return _detect(p, _crowns_condition, require_retract, budget)


def detect_4cycle_tower(
    p: Poset, require_retract: bool = False, budget: SearchBudget | Meter | None = None
) -> tuple[int, ...] | None:
    """Smallest 4-cycle tower of ``p`` (optionally also a retract), or ``None``."""
    return _detect(p, _cycle_condition, require_retract, budget)
