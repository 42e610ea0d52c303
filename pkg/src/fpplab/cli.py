"""Command-line front end.

Exit codes: 0 success / property holds / verified, 1 property fails /
refuted, 2 search budget exhausted, 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .core import PosetError, rank_structure, width
from .io import PosetFormatError, document_from_poset, emit_dot, emit_poset, parse_poset
from .search import (
    BudgetExhausted,
    SearchBudget,
    SizeCapExceeded,
    enumerate_retractions,
    fixed_point_free_automorphism,
    has_fpp,
    is_minimal_automorphic,
    retraction_exists,
)

EXIT_OK, EXIT_FALSE, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str):
    doc = parse_poset(_read(path))
    return doc.name, doc.to_poset()


def _budget(args) -> SearchBudget:
    if args.budget_nodes is not None:
        return SearchBudget(max_nodes=args.budget_nodes)
    return SearchBudget()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# -- gen ------------------------------------------------------------------


def _gen_posets(args):
    from . import towers

    kind = args.kind
    if kind == "crown":
        return [(f"crown{args.n}", towers.crown(args.n), {})]
    if kind == "four-tower":
        return [(f"four_tower{args.r}", towers.four_tower(args.r), {})]
    if kind == "six-stack":
        return [(f"six_stack{args.n}", towers.six_stack(args.n), {})]
    if kind == "tower":
        try:
            spec = towers.TowerSpec.from_json(json.loads(_read(args.specfile)))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise PosetFormatError(f"bad tower spec: {exc}") from None
        return [("tower", towers.build_tower(spec), {"spec": spec.to_json()})]
    if kind == "layers":
        entries = towers.enumerate_admissible_layers(args.bottom, args.top)
        return [(e.name, e.layer, e.to_document().get("metadata", {})) for e in entries]
    if kind == "sections":
        from .sections import enumerate_sections

        return [(f"section{args.n}_{k}", p, {}) for k, p in enumerate(enumerate_sections(args.n))]
    if kind == "corpus":
        from .enumeration import CorpusFilter, iter_ranked_posets

        filt = CorpusFilter(args.max_size, args.max_width, not args.all, args.max_rank)
        return [(f"p{k}", p, {}) for k, p in enumerate(iter_ranked_posets(filt))]
    raise UsageError(f"unknown generator {kind}")


def cmd_gen(args) -> int:
    items = _gen_posets(args)
    lines = [emit_poset(document_from_poset(p, name, meta)) + "\n" for name, p, meta in items]
    _write(args.out, "".join(lines))
    if args.dot:
        _write(args.dot, "".join(emit_dot(p, name) for name, p, _ in items))
    return EXIT_OK


# -- check ----------------------------------------------------------------


def _check(prop: str, p, budget: SearchBudget) -> tuple[bool, dict]:
    if prop == "fpp":
        v = has_fpp(p, budget)
        return bool(v), ({} if v else {"witness": v.witness.as_dict()})
    if prop == "automorphic":
        f = fixed_point_free_automorphism(p, budget)
        return f is not None, ({"witness": f.as_dict()} if f else {})
    if prop == "minimal-automorphic":
        return is_minimal_automorphic(p, budget), {}
    from . import sections

    if prop == "section":
        lab = sections.section_labeling(p, budget)
        if lab is not None:
            return True, {"grid": {k: list(v) for k, v in lab.items()}}
        return sections.is_section(p, budget), {}
    if prop == "tower-of-sections":
        dec = sections.is_tower_of_sections(p, budget)
        return dec is not None, (dec.to_json() if dec else {})
    if prop in ("nice", "very-nice"):
        if not sections.is_section(p, budget):
            return False, {"reason": "not a section"}
        if prop == "nice":
            return sections.is_nice(p, budget), {}
        sub = sections.tower_of_sections_retract(p, budget)
        return sub is None, ({"retract": [p.labels[e] for e in sub]} if sub else {})
    raise UsageError(f"unknown property {prop}")


def cmd_check(args) -> int:
    name, p = _load(args.poset)
    if len(p) == 0:
        raise UsageError("this check needs a nonempty poset")
    holds, info = _check(args.property, p, _budget(args))
    if args.json:
        print(json.dumps({"poset": name, "property": args.property, "holds": holds, **info}, sort_keys=True))
    else:
        print(f"{name}: {args.property} {'holds' if holds else 'fails'}")
        for key, val in info.items():
            print(f"  {key}: {json.dumps(val, sort_keys=True)}")
    return EXIT_OK if holds else EXIT_FALSE


# -- retract --------------------------------------------------------------


def cmd_retract(args) -> int:
    name, p = _load(args.poset)
    subset = [s for s in args.subset.split(",") if s]
    for s in subset:
        if s not in p.labels:
            raise UsageError(f"--subset names unknown element {s!r}")
    where = {}
    for item in args.where or []:
        if "=" not in item:
            raise UsageError(f"--where expects a=b, got {item!r}")
        a, b = item.split("=", 1)
        for x in (a, b):
            if x not in p.labels:
                raise UsageError(f"--where names unknown element {x!r}")
        where[a] = b
    budget = _budget(args)
    if args.enumerate or where:
        maps = enumerate_retractions(p, subset, where or None, budget)
        if args.json:
            print(json.dumps({"poset": name, "count": len(maps), "retractions": [f.as_dict() for f in maps]}, sort_keys=True))
        else:
            print(f"{len(maps)} retraction(s)")
            for f in maps:
                print("  " + ", ".join(f"{k}->{v}" for k, v in f.as_dict().items() if k != v))
        return EXIT_OK if maps else EXIT_FALSE
    f = retraction_exists(p, subset, budget)
    if args.json:
        print(json.dumps({"poset": name, "retract": f is not None, "map": f.as_dict() if f else None}, sort_keys=True))
    elif f is None:
        print("not a retract")
    else:
        print("retract via " + ", ".join(f"{k}->{v}" for k, v in f.as_dict().items() if k != v))
    return EXIT_OK if f else EXIT_FALSE


# -- classify -------------------------------------------------------------


def cmd_classify(args) -> int:
    from .sections import is_section, is_tower_of_sections
    from .towers import classify_tower

    name, p = _load(args.poset)
    if len(p) == 0:
        raise UsageError("classify needs a nonempty poset")
    budget = _budget(args)
    rs = rank_structure(p)
    dec = classify_tower(p, budget)
    tos = is_tower_of_sections(p, budget)
    out = {
        "poset": name,
        "size": len(p),
        "width": width(p),
        "height": rs.height,
        "ranked": rs.is_ranked,
        "level_sizes": [len(lv) for lv in rs.levels],
        "tower": dec.to_json(),
        "section": is_section(p, budget),
        "tower_of_sections": tos.to_json() if tos else None,
    }
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        print(f"{name}: {len(p)} elements, width {out['width']}, height {rs.height}, "
              f"{'ranked' if rs.is_ranked else 'not ranked'}")
        if rs.is_ranked:
            print(f"  level sizes: {out['level_sizes']}")
        print(f"  tower: {dec.family if dec.is_tower else 'no (' + dec.failure + ')'}")
        if dec.is_tower:
            print("  summands: " + " + ".join(b.kind for b in dec.blocks))
        print(f"  section: {'yes' if out['section'] else 'no'}")
        print(f"  tower of sections: {'yes' if tos else 'no'}")
    return EXIT_OK


# -- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verify import ClaimError, verify

    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        params[k] = v
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        report = verify(args.claim, params, _budget(args), jobs=args.jobs)
    except ClaimError as exc:
        raise UsageError(str(exc)) from None
    text = report.to_json(timing=args.timing)
    if args.report:
        _write(args.report, text)
    if args.json or not args.report:
        sys.stdout.write(text)
    else:
        print(f"{report.claim}: {report.status} ({report.instances} instances, "
              f"{len(report.counterexamples)} counterexamples)")
    return report.exit_code


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .verify import CLAIMS

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget-nodes", type=int, default=None, metavar="N",
                        help="search node budget (default from FPP_LAB_BUDGET_NODES)")

    parser = _Parser(prog="fpplab", description="Fixed point property laboratory for finite posets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    out_opts = argparse.ArgumentParser(add_help=False, parents=[common])
    out_opts.add_argument("--out", help="write JSON here instead of stdout")
    out_opts.add_argument("--dot", help="also write Graphviz DOT here")
    gen = sub.add_parser("gen", help="generate posets as JSON documents (one per line)")
    kinds = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    kinds.add_parser("crown", parents=[out_opts]).add_argument("n", type=int)
    kinds.add_parser("four-tower", parents=[out_opts]).add_argument("r", type=int)
    kinds.add_parser("six-stack", parents=[out_opts]).add_argument("n", type=int)
    kinds.add_parser("tower", parents=[out_opts]).add_argument("specfile")
    lay = kinds.add_parser("layers", parents=[out_opts])
    lay.add_argument("bottom", help="cycle type, e.g. '(4)' or '(2)(2)'")
    lay.add_argument("top")
    kinds.add_parser("sections", parents=[out_opts]).add_argument("n", type=int)
    cor = kinds.add_parser("corpus", parents=[out_opts])
    cor.add_argument("--max-size", type=int, required=True)
    cor.add_argument("--max-width", type=int)
    cor.add_argument("--max-rank", type=int)
    cor.add_argument("--all", action="store_true", help="all posets, not only ranked ones")

    chk = sub.add_parser("check", help="test a property of a poset", parents=[common])
    chk.add_argument("property", choices=["fpp", "automorphic", "minimal-automorphic", "section", "nice",
                                          "very-nice", "tower-of-sections"])
    chk.add_argument("poset", help="poset JSON file, or - for stdin")

    ret = sub.add_parser("retract", help="retractions onto a subset", parents=[common])
    ret.add_argument("poset")
    ret.add_argument("--subset", required=True, help="comma-separated element names")
    ret.add_argument("--enumerate", action="store_true", help="list every retraction")
    ret.add_argument("--where", action="append", metavar="A=B", help="require the map to send A to B")

    cls = sub.add_parser("classify", help="width, ranks, tower and section structure", parents=[common])
    cls.add_argument("poset")

    ver = sub.add_parser("verify", help="run a verification suite", parents=[common])
    ver.add_argument("claim", choices=sorted(CLAIMS))
    ver.add_argument("--param", action="append", metavar="K=V")
    ver.add_argument("--report", help="write the JSON report here")
    ver.add_argument("--jobs", type=int, default=1)
    ver.add_argument("--timing", action="store_true", help="include wall time in the report")
    return parser


COMMANDS = {"gen": cmd_gen, "check": cmd_check, "retract": cmd_retract, "classify": cmd_classify, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except BudgetExhausted as exc:
        print(f"fpplab: search budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SizeCapExceeded as exc:
        print(f"fpplab: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, PosetFormatError, PosetError, ValueError) as exc:
        print(f"fpplab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
