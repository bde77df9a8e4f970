import pytest

from lambekmodal.algebra import check_inequation
from lambekmodal.duality import check_algebra_iso, check_frame_iso, complex_algebra, dual_frame
from lambekmodal.frames import frame_valid
from lambekmodal.sweep import (BitsetEvaluator, TableEvaluator, algebra_iso_masks, all_slices, complex_algebra_of,
                               count_disjoint, frame_iso_masks, logic_equality_sweep, validity_sweep)
from lambekmodal.syntax import all_structural_axioms, atoms, base_axioms, parse_sequent

SLICES2 = list(all_slices(2))
PROBES = [parse_sequent(t) for t in (
    "p * q |- q * p", "box p |- p", "p |- dia p", "p * (p \\ q) |- q", "(q / p) * p |- q",
    "dia (p * q) |- dia p * dia q", "box p |- box box p", "1 |- box 1", "p & 1 |- p * p")]


def test_slices_cover_every_frame():
    assert sum(sl.count for sl in SLICES2) == 1712


@pytest.mark.parametrize("s", PROBES, ids=str)
def test_bitset_engine_matches_frame_valid(s):
    names = sorted(atoms(s))
    for sl in SLICES2:
        ev = BitsetEvaluator(sl, names)
        ok = ev.valid_frames(s)
        for b in range(len(sl.boxes)):
            for d in range(len(sl.dias)):
                res = frame_valid(sl.frame(b, d), s)
                assert bool(ok[b, d]) == res.valid
                if not res.valid:
                    assert ev.first_failing_valuation(s, b, d) == res.checked - 1


@pytest.mark.parametrize("s", PROBES, ids=str)
def test_table_engine_matches_check_inequation(s):
    names = sorted(atoms(s))
    for sl in SLICES2:
        A = complex_algebra_of(sl)
        holds = TableEvaluator(A, sl.box_names, sl.dia_names, names).holds(s)
        for b in range(len(sl.boxes)):
            for d in range(len(sl.dias)):
                assert bool(holds[b, d]) == bool(check_inequation(complex_algebra(sl.frame(b, d)), s))


def test_factored_frame_iso_matches_direct_search():
    for sl in SLICES2:
        F = sl.polymodal()
        D = dual_frame(complex_algebra(F))
        _, bm, dm = frame_iso_masks(F, D, sl.box_names, sl.dia_names)
        for b in range(len(sl.boxes)):
            for d in range(len(sl.dias)):
                Fm = sl.frame(b, d)
                direct = check_frame_iso(Fm, dual_frame(complex_algebra(Fm))) is not None
                assert direct == bool(bm[b] & dm[d])


def test_factored_algebra_iso_matches_direct_search():
    for sl in SLICES2:
        A = complex_algebra_of(sl)
        B = complex_algebra(dual_frame(A))
        _, bm, dm = algebra_iso_masks(A, B, sl.box_names, sl.dia_names)
        for b in range(len(sl.boxes)):
            for d in range(len(sl.dias)):
                Am = complex_algebra(sl.frame(b, d))
                direct = check_algebra_iso(Am, complex_algebra(dual_frame(Am))) is not None
                assert direct == bool(bm[b] & dm[d])


def test_count_disjoint():
    assert count_disjoint([0b01, 0b10], [0b01, 0b11]) == (1, (1, 0))
    assert count_disjoint([0b1], [0b1]) == (0, None)


def test_sweeps_at_two_worlds():
    res = validity_sweep(base_axioms(), 2)
    assert res.passed and res.checked == 1712 * len(base_axioms())
    bad = validity_sweep(["p * q |- q * p"], 2)
    assert bad.passed          # every two-world frame is commutative
    bad = validity_sweep(["box p |- p"], 2)
    assert not bad.passed and bad.first["sequent"] == "box p |- p"
    eq = logic_equality_sweep(base_axioms() + all_structural_axioms(), 2)
    assert eq.passed
