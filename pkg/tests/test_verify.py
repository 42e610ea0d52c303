import json

import pytest

from fpplab.search import SearchBudget
from fpplab.verify import CLAIMS, ClaimError, verify


def test_registry_has_all_claims():
    for cid in ["width2", "prop41", "prop42", "cor36_fwd", "cor36_bwd", "thm35_fwd", "thm35_bwd", "table21",
                "prop511", "thm512", "lemma31", "lemma59", "lemmas56_58"]:
        assert cid in CLAIMS


def test_prop41_rank2():
    r = verify("prop41", {"max_rank": 2})
    assert r.status == "verified" and r.exit_code == 0
    assert r.details["results"][1] == {"rank": 2, "labelled_stackings": 36, "classes": 1}


def test_lemma59_and_table21():
    r = verify("lemma59")
    assert r.status == "verified"
    assert r.details["results"][0]["constrained_retractions"] == 1
    t = verify("table21")
    assert t.details["results"][0]["counts"] == [3, 2, 2, 9]


def test_unknown_claim_and_bad_params():
    with pytest.raises(ClaimError):
        verify("nope")
    with pytest.raises(ClaimError):
        verify("prop41", {"bogus": 1})
    with pytest.raises(ClaimError):
        verify("prop41", {"max_rank": "x"})


def test_cap_flips_to_budget_exhausted():
    r = verify("prop41", {"max_rank": 9})
    assert r.status == "budget-exhausted" and r.exit_code == 2
    assert r.params["max_rank"] == 4
    assert r.details["capped"]


def test_node_budget_flips_to_budget_exhausted():
    r = verify("prop511", {"max_n": 2}, budget=SearchBudget(max_nodes=5))
    assert r.status == "budget-exhausted"
    assert r.details["budget_exhausted_instances"] == 2


def test_reports_are_byte_identical_across_runs_and_jobs():
    a = verify("lemma31", {"max_size": 5}).to_json()
    b = verify("lemma31", {"max_size": 5}).to_json()
    c = verify("lemma31", {"max_size": 5}, jobs=2).to_json()
    assert a == b == c
    assert "wall_time" not in json.loads(a)
    assert "wall_time" in json.loads(verify("table21").to_json(timing=True))


def test_counterexample_status_shape():
    r = verify("width2", {"max_size": 5})
    assert r.status == "verified"
    assert r.counterexamples == []
