import io
import json
from itertools import combinations

import pytest

from fpplab.core import build_poset, canonical_form, is_isomorphic, rank_structure, width
from fpplab.enumeration import CorpusFilter, all_posets, ranked_posets, write_corpus
from fpplab.towers import crown, four_tower

KNOWN = [1, 1, 2, 5, 16, 63, 318, 2045]


@pytest.mark.parametrize("n", range(0, 7))
def test_all_posets_counts(n):
    assert len(all_posets(n)) == KNOWN[n]


def test_all_posets_seven():
    assert len(all_posets(7)) == 2045


def _brute(n):
    pairs = list(combinations(range(n), 2))
    forms = set()
    for mask in range(1 << len(pairs)):
        rel = [(f"e{a}", f"e{b}") for k, (a, b) in enumerate(pairs) if (mask >> k) & 1]
        # pairs respect a fixed order, so every choice closes to a poset
        forms.add(canonical_form(build_poset([f"e{i}" for i in range(n)], rel)))
    return forms


@pytest.mark.parametrize("n", [3, 4])
def test_all_posets_against_brute_force(n):
    assert {canonical_form(p) for p in all_posets(n)} == _brute(n)


def test_all_posets_distinct_and_capped():
    ps = all_posets(5)
    assert len({canonical_form(p) for p in ps}) == len(ps)
    with pytest.raises(ValueError):
        all_posets(8)


@pytest.mark.parametrize("n", range(1, 7))
def test_ranked_generation_matches_filter(n):
    ranked = {canonical_form(p) for p in all_posets(n) if rank_structure(p).is_ranked}
    got = {canonical_form(p) for p in ranked_posets(CorpusFilter(n)) if len(p) == n}
    assert got == ranked


def test_ranked_filter_examples():
    ps = ranked_posets(CorpusFilter(6, 3))
    assert any(is_isomorphic(p, crown(3)) for p in ps)
    assert all(rank_structure(p).is_ranked and width(p) <= 3 for p in ps)
    assert len({canonical_form(p) for p in ps}) == len(ps)
    small = ranked_posets(CorpusFilter(4, 2))
    assert any(is_isomorphic(p, four_tower(1)) for p in small)


def test_max_rank_filter():
    ps = ranked_posets(CorpusFilter(6, 3, max_rank=1))
    assert ps and all(rank_structure(p).height <= 1 for p in ps)


def test_filter_caps():
    with pytest.raises(ValueError):
        CorpusFilter(11)
    with pytest.raises(ValueError):
        CorpusFilter(8, ranked_only=False)


def test_unranked_corpus_uses_all_posets():
    ps = ranked_posets(CorpusFilter(4, ranked_only=False))
    assert len(ps) == 1 + 2 + 5 + 16


def test_write_corpus_jsonl():
    buf = io.StringIO()
    assert write_corpus(all_posets(3), buf) == 5
    lines = buf.getvalue().splitlines()
    assert [json.loads(x)["name"] for x in lines] == [f"p{k}" for k in range(5)]
