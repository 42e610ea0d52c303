import os
import subprocess
import sys

import pytest
from hypothesis import given, settings

from conftest import brute_automorphisms, brute_fpp, brute_retractions, posets
from fpplab.core import antichain, build_poset, chain
from fpplab.search import (
    BudgetExhausted,
    SearchBudget,
    SizeCapExceeded,
    automorphic_proper_retract,
    automorphisms,
    count_order_preserving_self_maps,
    enumerate_retractions,
    fixed_point_free_automorphism,
    has_fpp,
    is_minimal_automorphic,
    proper_retract_subsets,
    retraction_exists,
)
from fpplab.towers import crown, six_stack


@settings(max_examples=120, deadline=None)
@given(posets(max_size=5))
def test_has_fpp_matches_brute_force(p):
    verdict = has_fpp(p)
    assert bool(verdict) == brute_fpp(p)
    if not verdict:
        f = verdict.witness
        assert f.is_order_preserving() and f.is_fixed_point_free()


@settings(max_examples=80, deadline=None)
@given(posets(min_size=2, max_size=5))
def test_retraction_exists_matches_brute_force(p):
    sub = [0, len(p) - 1]
    brute = brute_retractions(p, sub)
    got = retraction_exists(p, sub)
    assert (got is not None) == bool(brute)
    if got is not None:
        assert got.is_retraction_onto(sub)
    assert sorted(f.images for f in enumerate_retractions(p, sub)) == sorted(brute)


@settings(max_examples=80, deadline=None)
@given(posets(max_size=6))
def test_automorphisms_match_brute_force(p):
    assert sorted(f.images for f in automorphisms(p)) == sorted(brute_automorphisms(p))


def test_c4_has_four_automorphisms(c4):
    # dihedral reflections reverse the order, so only the Klein group survives
    auts = automorphisms(c4)
    assert len(auts) == 4
    assert len(brute_automorphisms(c4)) == 4


def test_c4_witness_and_minimality(c4):
    v = has_fpp(c4)
    assert not v and v.witness.is_automorphism()
    assert is_minimal_automorphic(c4)


def test_chain_and_bottom_have_fpp():
    assert has_fpp(chain(4))
    p = build_poset(["b", "x", "y"], [("b", "x"), ("b", "y")])
    assert has_fpp(p)


def test_empty_poset_raises():
    with pytest.raises(ValueError):
        has_fpp(build_poset([]))


def test_count_self_maps_small_cases():
    assert count_order_preserving_self_maps(antichain(2)) == (4, 1)
    assert count_order_preserving_self_maps(chain(2)) == (3, 0)
    with pytest.raises(SizeCapExceeded):
        count_order_preserving_self_maps(antichain(9))


def test_constrained_retraction_count():
    p = six_stack(3)
    target = ["x0", "z0", "y1", "y2", "x3", "z3"]
    maps = enumerate_retractions(p, target, {"x1": "x0"})
    assert len(maps) == 1
    assert maps[0]("y0") == "x0" and maps[0]("y3") == "z3"
    # pinning an element of the subset elsewhere is impossible
    assert enumerate_retractions(p, target, {"x0": "z0"}) == []


def test_budget_exhaustion():
    with pytest.raises(BudgetExhausted):
        fixed_point_free_automorphism(six_stack(4), SearchBudget(max_nodes=3))


def test_budget_from_environment():
    code = "from fpplab.search import SearchBudget; print(SearchBudget().max_nodes)"
    env = dict(os.environ, FPP_LAB_BUDGET_NODES="1234")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "1234"


def test_size_cap():
    with pytest.raises(SizeCapExceeded):
        list(proper_retract_subsets(antichain(16)))
    with pytest.raises(SizeCapExceeded):
        has_fpp(antichain(30))


def test_proper_retracts_smallest_first():
    p = crown(2)
    subs = list(proper_retract_subsets(p))
    assert [len(s) for s in subs] == sorted(len(s) for s in subs)
    assert all(len(s) < len(p) for s in subs)


def test_automorphic_proper_retract_in_c4_plus_tail(c4):
    p = build_poset(["b", "x0", "x1", "y0", "y1"],
                    [("b", "x0"), ("x0", "y0"), ("x0", "y1"), ("x1", "y0"), ("x1", "y1")])
    sub = automorphic_proper_retract(p)
    assert sub is not None and [p.labels[e] for e in sub] in (["x0", "x1", "y0", "y1"], ["b", "x1", "y0", "y1"])
    assert not is_minimal_automorphic(p)


def test_six_stacks_minimal_automorphic():
    assert is_minimal_automorphic(six_stack(1))
    assert is_minimal_automorphic(six_stack(2))
    assert not is_minimal_automorphic(six_stack(3))
