"""The twelve acceptance criteria, each run exhaustively at zero tolerance.

Every test prints one ``PASS``/``FAIL`` line, also under captured output.
Two criteria are red and marked as strict expected failures, so their lines
still print and the run flags them if they ever turn green:

* C2: frames whose box rows are not up-closed (or dia rows not
  down-closed) share their complex algebra with their closure, so the
  round trip returns the closure. The companion test shows the round trip
  is exact relative to the closure and on closed frames.
* C12: the box relation of the dual frame with its arguments in the printed
  order disagrees with the prime-filter relation. The relation with the
  swapped order agrees everywhere, which the companion test shows.

Run ``python3 tests/test_acceptance.py`` to get only the twelve lines.
"""

from __future__ import annotations

import json
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from lambekmodal.algebra import check_inequation  # noqa: E402
from lambekmodal.certify import (algebra_round_trip, canonicity_suite, completion_suite,  # noqa: E402
                                 filter_lemma_suite, frame_round_trip, kappa_suite, priestley_specialisation)
from lambekmodal.enumeration import SearchConfig  # noqa: E402
from lambekmodal.frames import frame_valid  # noqa: E402
from lambekmodal.io import frame_to_json  # noqa: E402
from lambekmodal.saturation import saturate  # noqa: E402
from lambekmodal.search import countermodel, soundness_sweep  # noqa: E402
from lambekmodal.sweep import logic_equality_sweep, validity_sweep  # noqa: E402
from lambekmodal.syntax import (all_structural_axioms, base_axioms, base_schemata, make_signature,  # noqa: E402
                                parse_sequent, subexp_axioms, validate_signature)

from test_signature import hand_count  # noqa: E402

WORLDS = 3
FIXTURE = HERE / "fixtures" / "noncommutative.json"


@lru_cache(maxsize=None)
def _round_trip():
    return frame_round_trip(WORLDS)


@lru_cache(maxsize=None)
def _priestley():
    return priestley_specialisation(WORLDS)


def line(label: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} {label}: {detail}"


@pytest.fixture
def say(capsys):
    def emit(label: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print("\n" + line(label, ok, detail))
    return emit


def _sweep_detail(*results) -> str:
    return "; ".join(f"{r.name} {r.failures}/{r.checked} failed ({r.seconds:.1f}s)" for r in results)


# ---------------------------------------------------------------------------
# criteria, each returning (ok, detail)

def c1_soundness():
    assert len(base_schemata()) == 12
    t0 = time.perf_counter()
    rep = soundness_sweep(SearchConfig(max_worlds=WORLDS))
    seconds = time.perf_counter() - t0
    return rep.passed and seconds < 300, f"{'; '.join(rep.notes)} ({seconds:.1f}s)"


def c2_frame_round_trip():
    plain, closure, closed = _round_trip()
    return plain.passed, _sweep_detail(plain, closure, closed)


def c3_algebra_round_trip():
    res = algebra_round_trip(WORLDS)
    return res.passed, _sweep_detail(res)


def c4_frame_vs_algebra():
    res = logic_equality_sweep(base_axioms() + all_structural_axioms(), WORLDS)
    return res.passed, _sweep_detail(res)


def c5_filter_lemma():
    res = filter_lemma_suite(WORLDS, 5)
    return res.passed, _sweep_detail(res)


def c6_kappa():
    res = kappa_suite(WORLDS, 5)
    return res.passed, _sweep_detail(res)


def c7_canonical_extension():
    res = completion_suite(WORLDS, 5)
    return res.passed, _sweep_detail(res)


def c8_canonicity():
    seqs = [parse_sequent("box p * box q |- box (p * q)")] + all_structural_axioms()
    res = canonicity_suite(seqs, WORLDS, 5)
    return res.passed, f"{len(seqs)} sequents; " + _sweep_detail(res)


def c9_noncommutativity():
    doc = json.loads(FIXTURE.read_text())
    s = parse_sequent(doc["sequent"])
    t0 = time.perf_counter()
    res = countermodel(s, SearchConfig(max_worlds=4))
    seconds = time.perf_counter() - t0
    ok = (res.found and res.frame.n <= 4 and seconds < 60
          and frame_to_json(res.frame) == {k: doc[k] for k in frame_to_json(res.frame)}
          and {a: sorted(ws) for a, ws in res.valuation} == doc["valuation"]
          and res.checked == doc["valuations_checked"]
          and not frame_valid(res.frame, s).valid)
    return ok, f"{res.frame.n} worlds after {res.checked} valuations ({seconds:.1f}s), fixture match {ok}"


def c10_signature():
    sig = make_signature(["s", "t"], [("s", "t")], W=["t"], C=["t"], E=["t"])
    got = len(subexp_axioms(sig))
    want = hand_count(sig.indices, sig.below, sig.W, sig.C, sig.E)
    mutated = make_signature(["s", "t"], [("s", "t")], W=["t"], C=["t"], E=[])
    rep = validate_signature(mutated)
    ok = (got == want == 34 and validate_signature(sig).passed
          and [v.condition for v in rep.violations] == ["W-C-within-E"])
    return ok, f"{got} axioms, hand count {want}, mutation rejected by {[v.condition for v in rep.violations]}"


def _closure(M: np.ndarray) -> np.ndarray:
    M = M | np.eye(len(M), dtype=bool)
    while True:
        N = M | ((M.astype(np.float32) @ M.astype(np.float32)) > 0)
        if (N == M).all():
            return M
        M = N


def c11_saturation():
    sat = saturate("p |- p", base_axioms(), SearchConfig(formula_universe_depth=2))
    S = sat.sequents
    gens = S.generators()
    pos = {f: k for k, f in enumerate(S.universe)}
    G = np.zeros_like(S.matrix)
    for g in gens:
        G[pos[g.lhs], pos[g.rhs]] = True
    # validity on a frame is closed under reflexivity and cut, so valid
    # generators make the whole closure valid
    regenerates = bool((_closure(G) == S.matrix).all())
    every = validity_sweep(list(S), 2, name="all-derived")
    big = validity_sweep(gens, WORLDS, name="generators")
    ok = regenerates and every.passed and big.passed
    return ok, (f"{len(S)} derived over {len(S.universe)} formulas, {len(gens)} generators "
                f"(regenerate {regenerates}); " + _sweep_detail(every, big))


def c12_priestley():
    spaces, clup, agree, printed = _priestley()
    ok = spaces.passed and clup.passed and agree.passed and printed.passed
    return ok, _sweep_detail(spaces, clup, agree, printed) + "; " + " ".join(printed.notes)


CRITERIA = [
    ("C1 soundness", c1_soundness),
    ("C2 frame round trip", c2_frame_round_trip),
    ("C3 algebra round trip", c3_algebra_round_trip),
    ("C4 frame validity equals algebra validity", c4_frame_vs_algebra),
    ("C5 filter lemma", c5_filter_lemma),
    ("C6 kappa", c6_kappa),
    ("C7 canonical extension", c7_canonical_extension),
    ("C8 canonicity", c8_canonicity),
    ("C9 noncommutativity witness", c9_noncommutativity),
    ("C10 subexponential axioms", c10_signature),
    ("C11 saturation soundness", c11_saturation),
    ("C12 Priestley specialisation", c12_priestley),
]

RED = {
    "C2 frame round trip": "non-closed frames collapse to their closure",
    "C12 Priestley specialisation": "the printed box order disagrees with the prime-filter relation",
}


def _params():
    for label, fn in CRITERIA:
        marks = [pytest.mark.xfail(strict=True, reason=RED[label])] if label in RED else []
        yield pytest.param(label, fn, id=label.split()[0], marks=marks)


@pytest.mark.parametrize("label,criterion", list(_params()))
def test_criterion(label, criterion, say):
    ok, detail = criterion()
    say(label, ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# companions of the red criteria

def test_round_trip_is_exact_up_to_closure(say):
    plain, closure, closed = _round_trip()
    say("C2 companion", closure.passed and closed.passed, _sweep_detail(closure, closed))
    assert closure.passed and closed.passed
    assert plain.failures == closure.checked - closed.checked


def test_swapped_box_order_agrees(say):
    spaces, clup, agree, printed = _priestley()
    ok = spaces.passed and clup.passed and agree.passed
    say("C12 companion", ok, _sweep_detail(spaces, clup, agree))
    assert ok and not printed.passed


def test_c4_uses_both_routes():
    # the sweep pits the frame semantics against the algebra tables; spot-check one frame by hand
    from lambekmodal.duality import complex_algebra
    from lambekmodal.sweep import slices
    sl = next(slices(2))
    F = sl.frame(0, 0)
    for s in base_axioms() + all_structural_axioms():
        assert frame_valid(F, s).valid == check_inequation(complex_algebra(F), s).valid


if __name__ == "__main__":
    failed = 0
    for label, fn in CRITERIA:
        ok, detail = fn()
        print(line(label, ok, detail), flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
