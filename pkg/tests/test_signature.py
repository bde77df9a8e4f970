"""Polymodal axiom generation for a two-index signature."""

import json
from itertools import product
from pathlib import Path

from lambekmodal.io import load_signature_file
from lambekmodal.syntax import (Atom, Box, Mul, Sequent, Unit, make_signature, structural_axioms, subexp_axioms,
                                validate_signature)

FIXTURE = Path(__file__).parent / "fixtures" / "signature_st.json"


def hand_count(indices, below, W, C, E):
    """Count the generated axioms straight from the side conditions."""
    promotion = sum(1 for s, s1, s2 in product(indices, repeat=3) if below(s, s1) and below(s, s2))
    per_index = 0
    for s in indices:
        per_index += 2                      # box p |- p, box p |- box box p
        per_index += 2 if s in C else 0     # contraction pair
        per_index += 2 if s in E else 0     # exchange pair
        per_index += 1 if s in W else 0     # box p |- 1
        per_index += 4                      # box over meet and top, both directions
        per_index += 4                      # dia over join and bot, both directions
        per_index += 2                      # p |- dia p, dia dia p |- dia p
    return promotion + per_index


def st_signature():
    return make_signature(["s", "t"], [("s", "t")], W=["t"], C=["t"], E=["t"])


def test_generated_count_matches_hand_count():
    sig = st_signature()
    seqs = subexp_axioms(sig)
    expected = hand_count(sig.indices, sig.below, sig.W, sig.C, sig.E)
    assert expected == 34
    assert len(seqs) == expected == json.loads(FIXTURE.read_text())["axiom_count"]
    assert len(set(seqs)) == len(seqs)


def test_promotion_instances():
    seqs = subexp_axioms(st_signature())
    promo = {(s.rhs.index, s.lhs.l.index, s.lhs.r.index) for s in seqs
             if isinstance(s.lhs, Mul) and isinstance(s.rhs, Box)}
    assert promo == {("s", "s", "s"), ("s", "s", "t"), ("s", "t", "s"), ("s", "t", "t"), ("t", "t", "t")}


def test_structural_schemata_only_for_t():
    seqs = set(subexp_axioms(st_signature()))
    for name in ("exch", "weak-contr-l", "weak-contr-r", "weak"):
        assert set(structural_axioms(name, "t")) <= seqs
        assert not set(structural_axioms(name, "s")) & seqs


def test_signature_is_accepted_and_mutation_rejected():
    assert validate_signature(st_signature()).passed
    assert validate_signature(load_signature_file(FIXTURE)).passed
    bad = make_signature(["s", "t"], [("s", "t")], W=["t"], C=["t"], E=[])
    rep = validate_signature(bad)
    assert [(v.condition, v.witness) for v in rep.violations] == [("W-C-within-E", ("t",))]


def test_upward_closure_is_enforced():
    rep = validate_signature(make_signature(["s", "t"], [("s", "t")], W=["s"]))
    assert [(v.condition, v.witness) for v in rep.violations] == [("W-upward-closed", ("s", "t"))]


def test_signature_without_rules():
    sig = make_signature(["s", "t"], [("s", "t")])
    seqs = subexp_axioms(sig)
    assert len(seqs) == hand_count(sig.indices, sig.below, sig.W, sig.C, sig.E) == 29
    assert Sequent(Box("t", Atom("p")), Unit()) not in seqs
