"""Command-line entry point.

Exit codes: 0 when the checked property holds, 1 when a violation or
countermodel was found (details as JSON on stdout), 2 on usage or input
errors. Every report is a single JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .algebra import check_algebra, check_inequation, derive_residuals
from .canonical import canonical_extension, check_completion
from .certify import (algebra_round_trip, frame_round_trip, priestley_specialisation)
from .duality import complex_algebra, dual_frame
from .enumeration import SearchConfig, enumerate_frames
from .frames import frame_valid, holds, validate_frame, validate_model
from .io import (FormatError, algebra_to_json, dump, frame_to_json, load_algebra, load_frame, load_model,
                 load_signature_file)
from .report import BudgetExceeded, CheckReport, PreconditionError, default_budget
from .saturation import SUBSTITUTION_NOTE, UniverseTooLarge, saturate
from .search import countermodel, soundness_sweep
from .syntax import (FormulaSyntaxError, STRUCTURAL_NAMES, all_structural_axioms, base_axioms, parse_formula,
                     parse_sequent, print_formula, print_sequent, structural_axioms, subexp_axioms,
                     validate_signature)


class UsageError(Exception):
    pass


def _emit(doc) -> None:
    print(dump(doc))


def _report(rep: CheckReport) -> int:
    _emit(rep.to_json())
    return 0 if rep.passed else 1


def _validity(v, extra: dict) -> int:
    doc = {"valid": v.valid, **extra, "checked": v.checked}
    if not v.valid:
        doc["counterexample"] = {k: sorted(x) if isinstance(x, frozenset) else x for k, x in v.counterexample}
    _emit(doc)
    return 0 if v.valid else 1


def _config(args) -> SearchConfig:
    budget = args.budget if getattr(args, "budget", None) is not None else default_budget()
    return SearchConfig(max_worlds=args.max_size, max_valuations=budget,
                        dedup_iso=getattr(args, "dedup", False),
                        formula_universe_depth=getattr(args, "depth", 2))


# ---------------------------------------------------------------------------
# verbs

def cmd_parse(args) -> int:
    text = args.text
    if "|-" in text:
        s = parse_sequent(text)
        _emit({"kind": "sequent", "printed": print_sequent(s), "ast": repr(s)})
    else:
        f = parse_formula(text)
        _emit({"kind": "formula", "printed": print_formula(f), "ast": repr(f)})
    return 0


def cmd_frame_check(args) -> int:
    return _report(validate_frame(load_frame(args.file), limit=None))


def cmd_frame_validity(args) -> int:
    F = load_frame(args.file)
    s = parse_sequent(args.sequent)
    return _validity(frame_valid(F, s, budget=args.budget), {"sequent": print_sequent(s)})


def cmd_frame_countermodel(args) -> int:
    s = parse_sequent(args.sequent)
    res = countermodel(s, _config(args))
    _emit({"sequent": print_sequent(s), **res.to_json()})
    return 1 if res.found else 0


def cmd_frame_enumerate(args) -> int:
    frames = []
    count = 0
    for F in enumerate_frames(_config(args)):
        count += 1
        if args.limit is None or len(frames) < args.limit:
            frames.append(frame_to_json(F))
    _emit({"max_worlds": args.max_size, "dedup_iso": args.dedup, "count": count, "frames": frames})
    return 0


def cmd_model_check(args) -> int:
    M = load_model(args.file)
    rep = validate_model(M)
    if not rep.passed or args.sequent is None:
        return _report(rep)
    s = parse_sequent(args.sequent)
    ok = holds(M, s)
    _emit({"sequent": print_sequent(s), "holds": ok})
    return 0 if ok else 1


def cmd_algebra_check(args) -> int:
    return _report(check_algebra(load_algebra(args.file)))


def cmd_algebra_ineq(args) -> int:
    A = derive_residuals(load_algebra(args.file))
    s = parse_sequent(args.sequent)
    return _validity(check_inequation(A, s, budget=args.budget), {"sequent": print_sequent(s)})


def cmd_algebra_canonical(args) -> int:
    C = canonical_extension(load_algebra(args.file))
    rep = check_completion(C)
    E = C.extension
    doc = {**algebra_to_json(E),
           "embed": {C.base.elements[a]: E.elements[C.embed[a]] for a in range(C.base.n)},
           "report": rep.to_json()}
    _emit(doc)
    return 0 if rep.passed else 1


def cmd_dualize_frame(args) -> int:
    _emit(algebra_to_json(complex_algebra(load_frame(args.file))))
    return 0


def cmd_dualize_algebra(args) -> int:
    _emit(frame_to_json(dual_frame(derive_residuals(load_algebra(args.file)))))
    return 0


def _suites(results) -> int:
    _emit({"results": [r.to_json() for r in results]})
    return 0 if all(r.passed for r in results) else 1


def cmd_verify_duality(args) -> int:
    return _suites([*frame_round_trip(args.max_size), algebra_round_trip(args.max_size)])


def cmd_verify_priestley(args) -> int:
    return _suites(list(priestley_specialisation(args.max_size)))


def cmd_verify_soundness(args) -> int:
    return _report(soundness_sweep(_config(args)))


def cmd_sig_check(args) -> int:
    return _report(validate_signature(load_signature_file(args.file)))


def cmd_sig_axioms(args) -> int:
    sig = load_signature_file(args.file)
    rep = validate_signature(sig)
    if not rep.passed:
        return _report(rep)
    seqs = subexp_axioms(sig)
    _emit({"signature": sig.to_json(), "count": len(seqs), "axioms": [print_sequent(s) for s in seqs]})
    return 0


def cmd_derive(args) -> int:
    axioms = base_axioms()
    for name in args.structural or ():
        axioms += all_structural_axioms() if name == "all" else structural_axioms(name)
    try:
        res = saturate(args.goal, axioms, _config(args))
    except UniverseTooLarge as exc:
        _emit({"goal": args.goal, "error": str(exc), "note": SUBSTITUTION_NOTE})
        return 2
    _emit(res.to_json())
    return 0 if res.derivable else 1


# ---------------------------------------------------------------------------
# parser

def _sized(p: argparse.ArgumentParser, default: int = 3) -> None:
    p.add_argument("--max-size", type=int, default=default, help="largest number of worlds")


def _budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=int, default=None,
                   help="valuation budget (default: WORKBENCH_BUDGET or built-in)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lambekmodal",
                                 description="Model checking, duality and search for distributive modal Lambek logics")
    ap.add_argument("--seed", type=int, default=None, help="accepted and ignored; all results are deterministic")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a formula or sequent")
    p.add_argument("text")
    p.set_defaults(func=cmd_parse)

    frame = sub.add_parser("frame").add_subparsers(dest="action", required=True)
    p = frame.add_parser("check", help="check the frame conditions")
    p.add_argument("file")
    p.set_defaults(func=cmd_frame_check)
    p = frame.add_parser("validity", help="check a sequent under all valuations")
    p.add_argument("file")
    p.add_argument("--sequent", required=True)
    _budget(p)
    p.set_defaults(func=cmd_frame_validity)
    p = frame.add_parser("countermodel", help="search enumerated frames for a countermodel")
    p.add_argument("--sequent", required=True)
    _sized(p)
    _budget(p)
    p.set_defaults(func=cmd_frame_countermodel)
    p = frame.add_parser("enumerate", help="enumerate all frames up to a size")
    _sized(p, 1)
    p.add_argument("--dedup", action="store_true", help="one frame per isomorphism class")
    p.add_argument("--limit", type=int, default=None, help="print at most this many frames")
    p.set_defaults(func=cmd_frame_enumerate)

    model = sub.add_parser("model").add_subparsers(dest="action", required=True)
    p = model.add_parser("check", help="check a model, optionally a sequent in it")
    p.add_argument("file")
    p.add_argument("--sequent")
    p.set_defaults(func=cmd_model_check)

    alg = sub.add_parser("algebra").add_subparsers(dest="action", required=True)
    p = alg.add_parser("check", help="check the algebra laws")
    p.add_argument("file")
    p.set_defaults(func=cmd_algebra_check)
    p = alg.add_parser("ineq", help="check a sequent as an inequation")
    p.add_argument("file")
    p.add_argument("--sequent", required=True)
    _budget(p)
    p.set_defaults(func=cmd_algebra_ineq)
    p = alg.add_parser("canonical", help="build and certify the canonical extension")
    p.add_argument("file")
    p.set_defaults(func=cmd_algebra_canonical)

    dual = sub.add_parser("dualize").add_subparsers(dest="action", required=True)
    p = dual.add_parser("frame", help="complex algebra of a frame")
    p.add_argument("file")
    p.set_defaults(func=cmd_dualize_frame)
    p = dual.add_parser("algebra", help="dual frame of an algebra")
    p.add_argument("file")
    p.set_defaults(func=cmd_dualize_algebra)

    ver = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    for name, func, default in (("duality", cmd_verify_duality, 2), ("priestley", cmd_verify_priestley, 2),
                                ("soundness", cmd_verify_soundness, 2)):
        p = ver.add_parser(name, help=f"exhaustive {name} sweep")
        _sized(p, default)
        p.set_defaults(func=func)

    sig = sub.add_parser("sig").add_subparsers(dest="action", required=True)
    p = sig.add_parser("check", help="validate a subexponential signature")
    p.add_argument("file")
    p.set_defaults(func=cmd_sig_check)
    p = sig.add_parser("axioms", help="list the generated polymodal axioms")
    p.add_argument("file")
    p.set_defaults(func=cmd_sig_axioms)

    p = sub.add_parser("derive", help="saturation-based derivability from the base axioms")
    p.add_argument("goal")
    p.add_argument("--structural", action="append", choices=(*STRUCTURAL_NAMES, "all"),
                   help="add a structural schema (repeatable)")
    p.add_argument("--depth", type=int, default=2, help="formula universe depth")
    p.set_defaults(func=cmd_derive, max_size=1)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (FormulaSyntaxError, FormatError, PreconditionError, BudgetExceeded, OSError,
            json.JSONDecodeError, ValueError, KeyError) as exc:
        doc = {"error": type(exc).__name__, "message": str(exc)}
        progress = getattr(exc, "progress", None)
        if progress:
            doc["progress"] = progress
        _emit(doc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
