from itertools import combinations

import pytest

from fpplab.core import OrderMap, antichain, build_poset, chain, disjoint_sum, is_isomorphic, irreducible_elements
from fpplab.enumeration import all_posets
from fpplab.gencrown import (
    CirculantSpec,
    CrownPartition,
    circulant_bipartite,
    drop_degenerate_blocks,
    find_special_crown_retract,
    is_generalized_crown,
    is_special,
    restrict_to_blocks,
    strip_irreducibles_keeping_crown,
)
from fpplab.search import has_fpp
from fpplab.towers import crown, layer_catalog, six_stack, six_stack_automorphism


def test_circulant_examples():
    assert is_isomorphic(circulant_bipartite(CirculantSpec(3, 3, (0, 2))), crown(3)) is not None
    assert is_isomorphic(circulant_bipartite(CirculantSpec(4, 4, (0, 1, 2))), layer_catalog()["K44bar"]) is not None
    assert circulant_bipartite(CirculantSpec(2, 2, ())).is_antichain()


def test_circulant_spec_validation():
    with pytest.raises(ValueError):
        CirculantSpec(1, 3, (0,))
    with pytest.raises(ValueError):
        CirculantSpec(3, 3, (2, 1))
    with pytest.raises(ValueError):
        CirculantSpec(3, 3, (0, 3))


def test_shift_is_an_automorphism_on_a_grid():
    checked = 0
    for m in range(2, 7):
        for n in range(2, 7):
            for k in range(0, min(n, 3) + 1):
                for offs in combinations(range(n), k):
                    try:
                        p = circulant_bipartite(CirculantSpec(m, n, offs))
                    except ValueError:
                        assert m != n
                        continue
                    shift = tuple((i + 1) % m for i in range(m)) + tuple(m + (j + 1) % n for j in range(n))
                    assert OrderMap(p, p, shift).is_automorphism()
                    checked += 1
    assert checked > 100


def test_unequal_sides_can_fail_shift():
    with pytest.raises(ValueError):
        circulant_bipartite(CirculantSpec(2, 3, (0,)))


def _rank_blocks(n, alternate=True):
    blocks = []
    for i in range(n + 1):
        order = "xyz" if (i % 2 == 0 or not alternate) else "xzy"
        blocks.append([f"{c}{i}" for c in order])
    return blocks


@pytest.mark.parametrize("n", [1, 2, 3])
def test_six_stack_rank_partition(n):
    p = six_stack(n)
    part = CrownPartition.of(p, _rank_blocks(n))
    assert is_generalized_crown(p, part)
    f = is_special(p, part)
    assert f is not None and f.is_fixed_point_free()
    assert sorted(map(sorted, f.orbits())) == sorted(map(sorted, part.blocks))


def test_six_stack_uniform_cyclic_order_fails():
    p = six_stack(1)
    assert not is_generalized_crown(p, CrownPartition.of(p, _rank_blocks(1, alternate=False)))


def test_crown2_bipartition_special(c4):
    part = CrownPartition.of(c4, [["x0", "x1"], ["y0", "y1"]])
    assert is_generalized_crown(c4, part)
    f = is_special(c4, part)
    assert f.as_dict() == {"x0": "x1", "x1": "x0", "y0": "y1", "y1": "y0"}


def test_chain_partition_fails():
    p = chain(3)
    assert not is_generalized_crown(p, CrownPartition.of(p, [["c0"], ["c1"], ["c2"]]))


def test_partition_must_cover():
    p = chain(3)
    with pytest.raises(ValueError):
        is_generalized_crown(p, CrownPartition.of(p, [["c0", "c1"]]))


def test_interleaved_two_crowns_are_special():
    p = disjoint_sum(crown(2), crown(2))
    a = [lab for lab in p.labels if ".x" in lab]
    b = [lab for lab in p.labels if ".y" in lab]
    # interleave the two components so the component swap is a 4-cycle
    lows = [a[0], a[2], a[1], a[3]]
    highs = [b[0], b[2], b[1], b[3]]
    part = CrownPartition.of(p, [lows, highs])
    assert is_generalized_crown(p, part)
    f = is_special(p, part)
    assert f is not None and all(len(o) == 4 for o in f.orbits())


def test_mixed_direction_pair_fails():
    p = build_poset(["a", "b", "c", "d"], [("a", "c"), ("d", "b")])
    assert not is_generalized_crown(p, CrownPartition.of(p, [["a", "b"], ["c", "d"]]))


def test_restrict_to_blocks():
    p = six_stack(2)
    part = CrownPartition.of(p, _rank_blocks(2))
    q, sub = restrict_to_blocks(p, part, [0, 2])
    assert len(q) == 6 and all(q.lt(f"{c}0", f"{d}2") for c in "xyz" for d in "xyz")
    assert is_special(q, sub) is not None
    q1, sub1 = drop_degenerate_blocks(p, part, [1])
    assert q1.is_antichain() and is_special(q1, sub1) is not None
    q_all, _ = restrict_to_blocks(p, part, range(3))
    assert q_all == p


def test_lemma32_on_sub_collections():
    for n in (1, 2, 3):
        p = six_stack(n)
        part = CrownPartition.of(p, _rank_blocks(n))
        k = len(part.blocks)
        for r in range(1, k + 1):
            for keep in combinations(range(k), r):
                q, sub = restrict_to_blocks(p, part, keep)
                assert is_generalized_crown(q, sub)
                assert is_special(q, sub) is not None


def test_find_special_crown_retract_examples(c4):
    got = find_special_crown_retract(c4)
    assert got is not None and len(got.subset) == 4
    p = build_poset(["b", "x0", "x1", "y0", "y1"],
                    [("b", "x0"), ("x0", "y0"), ("x0", "y1"), ("x1", "y0"), ("x1", "y1")])
    got = find_special_crown_retract(p)
    subset, retraction, partition = got
    assert len(subset) == 4 and retraction.is_retraction_onto(subset)
    assert find_special_crown_retract(chain(3)) is None
    # a least element forces the fixed point property
    bottom = build_poset(["b", "x0", "x1", "y0", "y1"],
                         [("b", "x0"), ("b", "x1"), ("x0", "y0"), ("x0", "y1"), ("x1", "y0"), ("x1", "y1")])
    assert has_fpp(bottom) and find_special_crown_retract(bottom) is None


def test_lemma31_on_small_posets():
    for n in range(1, 6):
        for p in all_posets(n):
            if has_fpp(p):
                continue
            got = find_special_crown_retract(p)
            assert got is not None
            assert got.retraction.is_retraction_onto(got.subset)
            assert is_generalized_crown(got.crown, got.partition)
            assert got.automorphism.is_automorphism() and got.automorphism.is_fixed_point_free()


def test_strip_irreducibles(c4):
    q = build_poset(["x0", "x1", "y0", "y1", "u", "v"],
                    [("x0", "y0"), ("x0", "y1"), ("x1", "y0"), ("x1", "y1"), ("y0", "u"), ("y1", "v")])
    part = CrownPartition.of(q, [["x0", "x1"], ["y0", "y1"], ["u", "v"]])
    assert is_special(q, part) is not None
    steps = []
    core, core_part = strip_irreducibles_keeping_crown(q, part, steps)
    assert core.labels == ("x0", "x1", "y0", "y1")
    assert irreducible_elements(core) == ()
    assert steps[0].removed_block == ("u", "v")
    assert is_special(core, core_part) is not None


def test_strip_leaves_irreducible_free_input_alone(c4):
    part = CrownPartition.of(c4, [["x0", "x1"], ["y0", "y1"]])
    assert strip_irreducibles_keeping_crown(c4, part) == (c4, part)
    a = antichain(3)
    apart = CrownPartition.of(a, [list(a.labels)])
    assert strip_irreducibles_keeping_crown(a, apart)[0] == a


def test_every_fpf_automorphism_gives_special_crown():
    p = six_stack(2)
    f = six_stack_automorphism(2)
    part = CrownPartition(tuple(f.orbits()))
    assert is_generalized_crown(p, part)
