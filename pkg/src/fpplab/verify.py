"""Replayable verification suites for the structural claims.

Each claim expands into a deterministic list of instances.  Every instance
is checked with its own node budget, so the report does not depend on the
order of evaluation or on ``jobs``.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable

from .core import OrderMap, Poset, antichain, canonical_form, disjoint_sum, induced_subposet, rank_structure, width
from .enumeration import CorpusFilter, all_posets, iter_ranked_posets
from .gencrown import CirculantSpec, circulant_bipartite, find_special_crown_retract, is_generalized_crown
from .io import poset_document
from .search import (
    BudgetExhausted,
    SearchBudget,
    count_order_preserving_self_maps,
    enumerate_retractions,
    fixed_point_free_automorphism,
    has_fpp,
    is_minimal_automorphic,
    proper_retract_subsets,
)
from .sections import (
    enumerate_sections,
    is_nice,
    is_section,
    is_very_nice,
    lemma59_retraction,
    stacked_4tower_retraction,
    tower_of_sections_retract,
)
from .towers import (
    TYPE_22,
    TYPE_4,
    Antichain2,
    SixStack,
    TowerSpec,
    build_tower,
    canonical_tower_automorphism,
    classify_tower,
    crown,
    detect_4crown_tower,
    enumerate_admissible_8stacks,
    enumerate_admissible_layers,
    is_four_tower,
    layer_catalog,
    six_stack,
)

__all__ = ["Report", "ClaimError", "CLAIMS", "verify", "EXIT_CODES"]

EXIT_CODES = {"verified": 0, "refuted": 1, "budget-exhausted": 2}


class ClaimError(ValueError):
    pass


@dataclass
class Report:
    claim: str
    params: dict
    instances: int
    counterexamples: list
    status: str
    wall_time: float
    details: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "claim": self.claim,
            "params": self.params,
            "instances": self.instances,
            "counterexamples": self.counterexamples,
            "status": self.status,
            "details": self.details,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def to_json(self, timing: bool = False) -> str:
        """Canonical JSON; wall time is left out unless asked for, keeping runs byte-identical."""
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2) + "\n"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


# -- outcomes -------------------------------------------------------------
# A check returns a dict: {"ok": bool, "info": json-able, "witness": ...}.


def _ok(info: Any = None) -> dict:
    return {"ok": True, "info": info}


def _bad(p: Poset | None, context: dict, info: Any = None) -> dict:
    witness = {"context": context}
    if p is not None:
        witness["poset"] = poset_document(p, "counterexample")
    return {"ok": False, "info": info, "witness": witness}


def _map_doc(f: OrderMap) -> dict:
    return f.as_dict()


# -- oracle: pruned search against plain enumeration ----------------------


def _oracle_instances(prm):
    return [p for n in range(1, prm["max_size"] + 1) for p in all_posets(n)]


def _oracle_check(p: Poset, budget: SearchBudget, prm) -> dict:
    verdict = has_fpp(p, budget)
    _, fpf = count_order_preserving_self_maps(p)
    if bool(verdict) != (fpf == 0):
        return _bad(p, {"search_fpp": bool(verdict), "fixed_point_free_maps": fpf})
    if not verdict and not (verdict.witness.is_order_preserving() and verdict.witness.is_fixed_point_free()):
        return _bad(p, {"invalid_witness": _map_doc(verdict.witness)})
    return _ok(bool(verdict))


# -- width 2 --------------------------------------------------------------


def _width2_instances(prm):
    return [p for n in range(1, prm["max_size"] + 1) for p in all_posets(n) if width(p) <= 2]


def _width2_check(p: Poset, budget: SearchBudget, prm) -> dict:
    fpp = bool(has_fpp(p, budget))
    tower = detect_4crown_tower(p, require_retract=True, budget=budget)
    if fpp == (tower is None):
        return _ok(fpp)
    ctx = {"fpp": fpp, "crown_tower_retract": [p.labels[e] for e in tower] if tower else None}
    return _bad(p, ctx)


# -- uniqueness of 6-stacks -----------------------------------------------


def _crown_layers() -> list[tuple[tuple[int, int], ...]]:
    """The six labelled 6-crowns on fixed 3+3 sets, as (bottom, top) cover lists."""
    out = []
    for missing in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        out.append(tuple((b, t) for t in range(3) for b in range(3) if b != missing[t]))
    return out


def _labelled_stack(n: int, code: tuple[int, ...]) -> Poset:
    from .core import build_poset

    layers = _crown_layers()
    labels = [f"v{k}_{i}" for k in range(n + 1) for i in range(3)]
    pairs = [(f"v{k}_{b}", f"v{k + 1}_{t}") for k, c in enumerate(code) for b, t in layers[c]]
    return build_poset(labels, pairs)


def _prop41_instances(prm):
    return [n for n in range(1, prm["max_rank"] + 1)]


def _prop41_check(n: int, budget: SearchBudget, prm) -> dict:
    forms = set()
    count = 0
    for code in product(range(6), repeat=n):
        forms.add(canonical_form(_labelled_stack(n, code)))
        count += 1
    info = {"rank": n, "labelled_stackings": count, "classes": len(forms)}
    if len(forms) != 1 or canonical_form(six_stack(n)) not in forms:
        return _bad(six_stack(n), info, info)
    return _ok(info)


# -- ranked nice sections -------------------------------------------------


def _prop42_instances(prm):
    return [n for n in range(1, prm["max_n"] + 1)]


def _prop42_check(n: int, budget: SearchBudget, prm) -> dict:
    secs = enumerate_sections(n)
    ranked = [s for s in secs if rank_structure(s).is_ranked]
    nice = [s for s in ranked if is_nice(s, budget)]
    target = canonical_form(six_stack(n))
    forms = {canonical_form(s) for s in nice}
    info = {"n": n, "sections": len(secs), "ranked": len(ranked), "ranked_nice": len(nice)}
    if forms != {target}:
        extra = [s for s in nice if canonical_form(s) != target]
        return _bad(extra[0] if extra else six_stack(n), {"six_stack_found": target in forms, **info}, info)
    return _ok(info)


def _prop42_extra(prm, budget) -> list[dict]:
    a = antichain(2)
    ok = is_section(a) and is_nice(a)
    return [] if ok else [{"context": {"two_antichain_is_nice_section": False}}]


# -- towers are automorphic -----------------------------------------------


def _compositions(sizes: dict[Any, int], limit: int) -> list[tuple]:
    out = []

    def rec(prefix: tuple, total: int):
        if prefix:
            out.append(prefix)
        for key, sz in sizes.items():
            if total + sz <= limit:
                rec(prefix + (key,), total + sz)

    rec((), 0)
    return out


def _six_tower_specs(limit: int, eight: bool) -> list[TowerSpec]:
    pieces: dict[Any, int] = {Antichain2(): 2}
    for r in range(1, (limit - 3) // 3 + 1):
        pieces[SixStack(r)] = 3 * r + 3
    if eight:
        for r in range(1, (limit - 4) // 4 + 1):
            for e in enumerate_admissible_8stacks(r):
                pieces[e] = 4 * r + 4
    specs = [TowerSpec(c) for c in _compositions(pieces, limit)]
    if eight:
        # 8-towers not already covered by the 6-tower suite
        specs = [s for s in specs if any(not isinstance(x, (Antichain2, SixStack)) for x in s.summands)]
    return specs


def _tower_check(spec: TowerSpec, budget: SearchBudget, prm) -> dict:
    p = build_tower(spec)
    f = canonical_tower_automorphism(spec)
    ctx = {"spec": spec.to_json()}
    if not (f.is_automorphism() and f.is_fixed_point_free()):
        return _bad(p, {**ctx, "canonical_map_invalid": _map_doc(f)})
    if fixed_point_free_automorphism(p, budget) is None:
        return _bad(p, {**ctx, "search_found_none": True})
    return _ok()


def _cor36_fwd_instances(prm):
    return _six_tower_specs(prm["max_size"], eight=False)


def _thm35_fwd_instances(prm):
    return _six_tower_specs(prm["max_size"], eight=True)


# -- minimal automorphic ranked posets are towers -------------------------


def _corpus(prm, w):
    return list(iter_ranked_posets(CorpusFilter(prm["max_size"], w)))


def _bwd_check(p: Poset, budget: SearchBudget, prm, allowed: set[str]) -> dict:
    if fixed_point_free_automorphism(p, budget) is None:
        return _ok("not automorphic")
    if not is_minimal_automorphic(p, budget):
        return _ok("automorphic, not minimal")
    dec = classify_tower(p, budget)
    if dec.family not in allowed:
        return _bad(p, {"family": dec.family, "failure": dec.failure}, "minimal automorphic")
    return _ok("minimal automorphic")


def _cor36_bwd_check(p, budget, prm):
    return _bwd_check(p, budget, prm, {"4-tower", "6-tower"})


def _thm35_bwd_check(p, budget, prm):
    return _bwd_check(p, budget, prm, {"4-tower", "6-tower", "8-tower"})


# -- layer catalogue ------------------------------------------------------


def _table21_instances(prm):
    return [None]


def _table21_check(_, budget: SearchBudget, prm) -> dict:
    from .core import dual

    pairs = [(TYPE_4, TYPE_4), (TYPE_4, TYPE_22), (TYPE_22, TYPE_4), (TYPE_22, TYPE_22)]
    counts, names = [], {}
    for bt, tt in pairs:
        entries = enumerate_admissible_layers(bt, tt)
        counts.append(len(entries))
        names[f"{bt}{tt}"] = sorted(e.name for e in entries)
    down = {canonical_form(e.layer) for e in enumerate_admissible_layers(TYPE_22, TYPE_4)}
    up = {canonical_form(dual(e.layer)) for e in enumerate_admissible_layers(TYPE_4, TYPE_22)}
    cat = layer_catalog()
    direct = {
        "C_8": crown(4),
        "K44bar": circulant_bipartite(CirculantSpec(4, 4, (0, 1, 2))),
        "C_4+C_4": disjoint_sum(crown(2), crown(2)),
    }
    matches = {k: k in cat and canonical_form(cat[k]) == canonical_form(q) for k, q in direct.items()}
    info = {"counts": counts, "names": names, "dual_pair_matches": down == up, "direct_constructions": matches}
    if counts != [3, 2, 2, 9] or down != up or not all(matches.values()):
        return _bad(None, info, info)
    return _ok(info)


# -- 6-stacks: minimal automorphic / very nice ----------------------------


def _stack_instances(prm):
    return list(range(1, prm["max_n"] + 1))


def _prop511_check(n: int, budget: SearchBudget, prm) -> dict:
    p = six_stack(n)
    expect = n % 3 != 0
    minimal = is_minimal_automorphic(p, budget)
    tos = tower_of_sections_retract(p, budget)
    info = {"n": n, "minimal_automorphic": minimal, "tower_of_sections_retract": tos is not None}
    if minimal != expect or (tos is not None) == expect:
        return _bad(p, info, info)
    return _ok(info)


def _thm512_check(n: int, budget: SearchBudget, prm) -> dict:
    p = six_stack(n)
    expect = n % 3 != 0
    very_nice = is_very_nice(p, budget)
    info: dict = {"n": n, "very_nice": very_nice}
    if not very_nice:
        sub = tower_of_sections_retract(p, budget)
        info["retract"] = [p.labels[e] for e in sub]
        info["retract_is_4_tower"] = is_four_tower(induced_subposet(p, sub))
        if not info["retract_is_4_tower"]:
            return _bad(p, info, info)
    if very_nice != expect:
        return _bad(p, info, info)
    return _ok(info)


# -- special generalized crown retracts -----------------------------------


def _lemma31_instances(prm):
    return [p for n in range(1, prm["max_size"] + 1) for p in all_posets(n)]


def _lemma31_check(p: Poset, budget: SearchBudget, prm) -> dict:
    if has_fpp(p, budget):
        return _ok("fpp")
    got = find_special_crown_retract(p, budget)
    if got is None:
        return _bad(p, {"special_crown_retract": None})
    sub = [p.labels[e] for e in got.subset]
    valid = (
        got.retraction.is_retraction_onto(got.subset)
        and is_generalized_crown(got.crown, got.partition)
        and got.automorphism.is_automorphism()
        and sorted(map(sorted, got.automorphism.orbits())) == sorted(map(sorted, got.partition.blocks))
    )
    if not valid:
        return _bad(p, {"invalid_witness": sub})
    return _ok("special crown retract")


# -- explicit retraction of the rank-3 stack ------------------------------


def _lemma59_instances(prm):
    return ["lemma"] + [k for k in range(1, prm["max_k"] + 1)]


def _lemma59_check(item, budget: SearchBudget, prm) -> dict:
    if item == "lemma":
        p, target, f = lemma59_retraction()
        maps = enumerate_retractions(p, target, {"x1": "x0"}, budget)
        info = {
            "constrained_retractions": len(maps),
            "f(y0)": maps[0]("y0") if maps else None,
            "f(y3)": maps[0]("y3") if maps else None,
            "matches_explicit_map": bool(maps) and maps[0].images == f.images,
        }
        ok = len(maps) == 1 and info["f(y0)"] == "x0" and info["f(y3)"] == "z3" and info["matches_explicit_map"]
        return _ok(info) if ok else _bad(p, info, info)
    try:
        p, target, f = stacked_4tower_retraction(item)
    except RuntimeError as exc:
        return _bad(six_stack(3 * item), {"k": item, "error": str(exc)})
    info = {"k": item, "retract_size": len(target), "family": classify_tower(induced_subposet(p, target)).family}
    return _ok(info)


# -- 4-tower retracts of 6-stacks -----------------------------------------


def _lemmas56_instances(prm):
    return list(range(prm["min_n"], prm["max_n"] + 1))


def _four_tower_retracts(p: Poset, budget) -> list[tuple[int, ...]]:
    def filt(q, sub):
        return len(sub) % 2 == 0 and is_four_tower(induced_subposet(q, sub))

    return list(proper_retract_subsets(p, filt, budget, min_size=2))


def _lemmas56_check(n: int, budget: SearchBudget, prm) -> dict:
    p = six_stack(n)
    rs = rank_structure(p)
    bottom = set(rs.levels[0])
    retracts = _four_tower_retracts(p, budget)
    upper = induced_subposet(p, rs.band(3, n)) if n >= 3 else None
    upper_has = None
    for sub in retracts:
        q = induced_subposet(p, sub)
        q_bottom = {sub[e] for e in q.minimal_elements()}
        if not q_bottom & bottom:
            return _bad(p, {"n": n, "retract": [p.labels[e] for e in sub], "meets_bottom": False})
        if n < 3:
            return _bad(p, {"n": n, "retract": [p.labels[e] for e in sub], "rank_below_3": True})
        if upper_has is None:
            upper_has = bool(_four_tower_retracts(upper, budget)) or is_four_tower(upper)
        if not upper_has:
            return _bad(p, {"n": n, "retract": [p.labels[e] for e in sub], "upper_part_has_retract": False})
    return _ok({"n": n, "four_tower_retracts": len(retracts)})


# -- registry -------------------------------------------------------------


@dataclass(frozen=True)
class Claim:
    id: str
    summary: str
    defaults: dict
    caps: dict
    instances: Callable
    check: Callable
    extra: Callable | None = None


CLAIMS: dict[str, Claim] = {
    c.id: c
    for c in [
        Claim("oracle", "pruned fixed-point search agrees with plain self-map enumeration",
              {"max_size": 6}, {"max_size": 7}, _oracle_instances, _oracle_check),
        Claim("width2", "width <= 2: fixed point property iff no 4-crown tower retract",
              {"max_size": 7}, {"max_size": 7}, _width2_instances, _width2_check),
        Claim("prop41", "all labelled 6-crown stackings of rank n are isomorphic",
              {"max_rank": 3}, {"max_rank": 4}, _prop41_instances, _prop41_check),
        Claim("prop42", "ranked nice sections are the 2-antichains and 6-stacks",
              {"max_n": 3}, {"max_n": 3}, _prop42_instances, _prop42_check, _prop42_extra),
        Claim("cor36_fwd", "every 6-tower is automorphic",
              {"max_size": 12}, {"max_size": 15}, _cor36_fwd_instances, _tower_check),
        Claim("cor36_bwd", "ranked width <= 3 minimal automorphic posets are 6-towers",
              {"max_size": 10}, {"max_size": 10}, lambda prm: _corpus(prm, 3), _cor36_bwd_check),
        Claim("thm35_fwd", "every 8-tower is automorphic",
              {"max_size": 12}, {"max_size": 12}, _thm35_fwd_instances, _tower_check),
        Claim("thm35_bwd", "ranked width <= 4 minimal automorphic posets are 8-towers",
              {"max_size": 9}, {"max_size": 10}, lambda prm: _corpus(prm, 4), _thm35_bwd_check),
        Claim("table21", "admissible layer classes per cycle-type pair are 3, 2, 2, 9",
              {}, {}, _table21_instances, _table21_check),
        Claim("prop511", "six_stack(n) is minimal automorphic iff 3 does not divide n",
              {"max_n": 3}, {"max_n": 4}, _stack_instances, _prop511_check),
        Claim("thm512", "six_stack(n) is very nice iff 3 does not divide n",
              {"max_n": 3}, {"max_n": 4}, _stack_instances, _thm512_check),
        Claim("lemma31", "posets without the fixed point property retract onto a special generalized crown",
              {"max_size": 6}, {"max_size": 7}, _lemma31_instances, _lemma31_check),
        Claim("lemma59", "unique constrained retraction of the rank-3 6-stack; stacked versions",
              {"max_k": 2}, {"max_k": 4}, _lemma59_instances, _lemma59_check),
        Claim("lemmas56_58", "4-tower retracts of 6-stacks meet the bottom rank and recur above rank 3",
              {"min_n": 3, "max_n": 4}, {"min_n": 1, "max_n": 4}, _lemmas56_instances, _lemmas56_check),
    ]
}


def _resolve_params(claim: Claim, params: dict | None) -> tuple[dict, list[str]]:
    prm = dict(claim.defaults)
    clamped = []
    for key, raw in (params or {}).items():
        if key not in claim.defaults:
            raise ClaimError(f"claim {claim.id!r} has no parameter {key!r}; known: {sorted(claim.defaults)}")
        try:
            val = int(raw)
        except (TypeError, ValueError):
            raise ClaimError(f"parameter {key!r} must be an integer, got {raw!r}") from None
        if val < 1:
            raise ClaimError(f"parameter {key!r} must be positive")
        cap = claim.caps[key]
        if key.startswith("min_"):
            if val < cap:
                clamped.append(f"{key}={val} below the floor {cap}")
                val = cap
        elif val > cap:
            clamped.append(f"{key}={val} exceeds the cap {cap}")
            val = cap
        prm[key] = val
    return prm, clamped


def _run_one(args) -> dict:
    claim_id, item, prm, max_nodes = args
    budget = SearchBudget(max_nodes=max_nodes)
    try:
        return CLAIMS[claim_id].check(item, budget, prm)
    except BudgetExhausted as exc:
        return {"ok": None, "info": None, "budget": str(exc)}


def verify(
    claim: str,
    params: dict | None = None,
    budget: SearchBudget | None = None,
    jobs: int = 1,
) -> Report:
    """Run one claim's suite and summarise it."""
    if claim not in CLAIMS:
        raise ClaimError(f"unknown claim {claim!r}; known: {', '.join(CLAIMS)}")
    spec = CLAIMS[claim]
    prm, clamped = _resolve_params(spec, params)
    max_nodes = (budget or SearchBudget()).max_nodes
    start = time.perf_counter()
    items = spec.instances(prm)
    args = [(claim, item, prm, max_nodes) for item in items]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        outcomes = [_run_one(a) for a in args]
    counterexamples = [o["witness"] for o in outcomes if o["ok"] is False]
    if spec.extra is not None:
        counterexamples += spec.extra(prm, budget)
    exhausted = sum(1 for o in outcomes if o["ok"] is None)
    details: dict = {"summary": spec.summary}
    infos = [o["info"] for o in outcomes if o.get("info") is not None]
    if infos and all(isinstance(i, str) or isinstance(i, bool) for i in infos):
        tally: dict = {}
        for i in infos:
            tally[str(i)] = tally.get(str(i), 0) + 1
        details["tally"] = dict(sorted(tally.items()))
    elif infos:
        details["results"] = infos
    if exhausted:
        details["budget_exhausted_instances"] = exhausted
    if clamped:
        details["capped"] = clamped
    if counterexamples:
        status = "refuted"
    elif exhausted or clamped:
        status = "budget-exhausted"
    else:
        status = "verified"
    return Report(claim, prm, len(items), counterexamples, status, time.perf_counter() - start, details)
