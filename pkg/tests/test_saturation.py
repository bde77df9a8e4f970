import pytest

from lambekmodal.enumeration import SearchConfig
from lambekmodal.saturation import (DERIVABLE, NOT_DERIVED, SUBSTITUTION_NOTE, UniverseTooLarge, build_universe,
                                    saturate)
from lambekmodal.sweep import validity_sweep
from lambekmodal.syntax import And, Atom, Box, Sequent, base_axioms, make_signature, parse_sequent

AXIOMS = base_axioms()


@pytest.fixture(scope="module")
def identity_closure():
    return saturate("p |- p", AXIOMS)


def test_identity_is_derivable(identity_closure):
    assert identity_closure.verdict == DERIVABLE


def test_axiom_instance_is_derivable():
    assert saturate("dia (p | q) |- dia p | dia q", AXIOMS).derivable


def test_box_distributes_over_meet():
    # projection, box monotonicity twice, then meet on the right
    res = saturate("box (p & q) |- box p & box q", AXIOMS)
    assert res.derivable
    S = res.sequents
    assert "p & q |- p" in S and "box (p & q) |- box p" in S and "box (p & q) |- box q" in S


def test_commutativity_is_not_derived():
    res = saturate("p * q |- q * p", AXIOMS)
    assert res.verdict == NOT_DERIVED
    assert res.to_json()["note"] == SUBSTITUTION_NOTE


def test_residuation_rules(identity_closure):
    S = identity_closure.sequents
    # the unit laws p * 1 |- p and 1 * p |- p residuate to both forms
    assert "1 |- p \\ p" in S
    assert "1 |- p / p" in S
    assert "p |- p / 1" in S and "p |- 1 \\ p" in S


def test_universe_guard():
    with pytest.raises(UniverseTooLarge):
        saturate("p & (q | r) |- p & q | p & r", AXIOMS)


def test_universe_members_are_closed(identity_closure):
    S = identity_closure.sequents
    for s in S.generators()[:200]:
        assert S.index(s.lhs) is not None and S.index(s.rhs) is not None


def test_generators_regenerate_the_closure():
    res = saturate("p |- p", AXIOMS[:3], SearchConfig(formula_universe_depth=1))
    S = res.sequents
    import numpy as np
    n = len(S.universe)
    M = np.eye(n, dtype=bool)
    for s in S.generators():
        M[S.index(s.lhs), S.index(s.rhs)] = True
    while True:
        N = M | ((M.astype(np.int32) @ M.astype(np.int32)) > 0)
        if (N == M).all():
            break
        M = N
    assert (M == S.matrix).all()


def test_indexed_monotonicity_follows_the_preorder():
    sig = make_signature(["s", "t"], [("s", "t")])
    ax = base_axioms(sig)
    p, q = Atom("p"), Atom("q")
    # from p & q |- p, the rule gives box_t (p & q) |- box_s p for s below t, not the reverse
    res = saturate(Sequent(Box("t", And(p, q)), Box("s", p)), ax, sig=sig)
    assert res.derivable
    res = saturate(Sequent(Box("s", And(p, q)), Box("t", p)), ax, sig=sig)
    assert not res.derivable


def test_derived_generators_are_frame_valid(identity_closure):
    gens = identity_closure.sequents.generators()
    assert validity_sweep(gens, 2).passed
