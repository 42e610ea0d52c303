import pickle

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_width, posets
from fpplab.core import (
    CycleError,
    OrderMap,
    PosetError,
    antichain,
    build_poset,
    canonical_form,
    chain,
    disjoint_sum,
    dismantle,
    dual,
    induced_subposet,
    irreducible_elements,
    is_isomorphic,
    maximum_antichain,
    ordinal_blocks,
    ordinal_sum,
    rank_structure,
    width,
)


def test_transitive_closure_and_covers():
    p = build_poset(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert p.leq("a", "c") and p.lt("a", "c")
    assert [(p.labels[i], p.labels[j]) for i, j in p.covers] == [("a", "b"), ("b", "c")]


def test_cycle_rejected():
    with pytest.raises(CycleError):
        build_poset(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(CycleError):
        build_poset(["a"], [("a", "a")])


def test_unknown_and_duplicate_labels():
    with pytest.raises(PosetError, match="unknown element 'z'"):
        build_poset(["a"], [("a", "z")])
    with pytest.raises(PosetError, match="duplicate"):
        build_poset(["a", "a"])


def test_width_and_antichain(c4):
    assert width(c4) == 2
    assert width(chain(5)) == 1
    assert width(antichain(4)) == 4
    assert len(maximum_antichain(c4)) == 2


def test_empty_poset_width_raises():
    with pytest.raises(PosetError):
        width(build_poset([]))
    with pytest.raises(PosetError):
        rank_structure(build_poset([]))


@settings(max_examples=80, deadline=None)
@given(posets(max_size=7))
def test_width_matches_brute_force(p):
    assert width(p) == brute_width(p)
    anti = maximum_antichain(p)
    assert p.is_antichain(sum(1 << e for e in anti))


def test_rank_structure():
    rs = rank_structure(chain(3))
    assert rs.is_ranked and rs.height == 2
    # a 3-chain next to a 2-chain: maximal chains of different length
    p = disjoint_sum(chain(3, "a"), chain(2, "b"))
    assert not rank_structure(p).is_ranked


def test_ranked_needs_equal_maximal_chains():
    # a < b < c and a < c' : c' maximal at height 1
    p = build_poset(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("a", "d")])
    assert not rank_structure(p).is_ranked


def test_dual_reverses_order(c4):
    d = dual(c4)
    assert d.leq("y0", "x0") and not d.leq("x0", "y0")
    assert dual(d) == c4


def test_ordinal_sum_and_blocks():
    p = ordinal_sum([antichain(2, "a"), antichain(2, "b"), antichain(3, "c")])
    assert len(p) == 7
    assert p.leq("a0", "c2")
    assert [len(b) for b in ordinal_blocks(p)] == [2, 2, 3]
    assert ordinal_sum([chain(2)]) == chain(2)
    with pytest.raises(PosetError):
        ordinal_sum([])


def test_sum_tags_colliding_labels():
    p = disjoint_sum(chain(2), chain(2))
    assert len(set(p.labels)) == 4
    assert all(lab.startswith(("p0.", "p1.")) for lab in p.labels)


def test_induced_subposet_keeps_order():
    p = chain(4)
    q = induced_subposet(p, ["c0", "c3"])
    assert q.labels == ("c0", "c3") and q.lt("c0", "c3")


def test_irreducibles_and_dismantle():
    p = chain(4)
    core, steps = dismantle(p)
    assert len(core) == 1 and len(steps) == 3
    for s in steps:
        f = s.retraction
        assert f.is_order_preserving() and f.is_idempotent()


def test_crown_has_no_irreducibles(c4):
    assert irreducible_elements(c4) == ()
    core, steps = dismantle(c4)
    assert core == c4 and steps == []


def test_ordermap_predicates(c4):
    swap = OrderMap(c4, c4, (1, 0, 3, 2))
    assert swap.is_automorphism() and swap.is_fixed_point_free()
    assert swap.orbits() == [(0, 1), (2, 3)]
    assert OrderMap(c4, c4, (0, 0, 0, 0)).is_order_preserving()
    # sending a bottom above a top breaks x0 < y0
    assert not OrderMap(c4, c4, (2, 1, 0, 3)).is_order_preserving()


@settings(max_examples=60, deadline=None)
@given(posets(max_size=7), st.randoms(use_true_random=False))
def test_canonical_form_is_relabelling_invariant(p, rnd):
    perm = list(range(len(p)))
    rnd.shuffle(perm)
    # rebuild with elements listed in a shuffled order
    labels = [p.labels[i] for i in perm]
    pairs = [(p.labels[a], p.labels[b]) for a, b in p.covers]
    q = build_poset(labels, pairs)
    assert canonical_form(p) == canonical_form(q)
    iso = is_isomorphic(p, q)
    assert iso is not None
    assert all(bool((p.up[i] >> j) & 1) == bool((q.up[iso[i]] >> iso[j]) & 1) for i in range(len(p)) for j in range(len(p)))


def test_non_isomorphic_distinguished():
    assert is_isomorphic(chain(3), antichain(3)) is None
    assert canonical_form(chain(3)) != canonical_form(dual(build_poset(["a", "b", "c"], [("a", "b"), ("a", "c")])))


def test_pickle_roundtrip(c4):
    q = pickle.loads(pickle.dumps(c4))
    assert q == c4 and q.covers == c4.covers
