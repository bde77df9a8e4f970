import json
import pathlib

import pytest

from lambekmodal.enumeration import SearchConfig
from lambekmodal.frames import frame_valid, holds
from lambekmodal.io import frame_to_json, load_model
from lambekmodal.report import BudgetExceeded
from lambekmodal.search import countermodel, soundness_sweep

FIXTURE = pathlib.Path(__file__).parent / "fixtures" / "noncommutative.json"


def test_identity_is_never_refuted():
    for budget in (1, 1000):
        for engine in ("bitset", "generic"):
            res = countermodel("p |- p", SearchConfig(max_worlds=2, max_valuations=budget), engine)
            assert not res.found and res.frames == 1712


def test_noncommutativity_countermodel_matches_fixture():
    doc = json.loads(FIXTURE.read_text())
    res = countermodel("p * q |- q * p", SearchConfig(max_worlds=4, max_valuations=10_000))
    assert res.found and res.frame.n == 3
    assert frame_to_json(res.frame) == {k: doc[k] for k in frame_to_json(res.frame)}
    assert {a: sorted(ws) for a, ws in res.valuation} == doc["valuation"]
    assert res.checked == doc["valuations_checked"] == 493
    assert not holds(load_model(FIXTURE), "p * q |- q * p")
    assert not frame_valid(res.frame, "p * q |- q * p")


@pytest.mark.parametrize("text", ["box p |- p", "p |- dia p", "p * q |- q * p"])
def test_engines_agree(text):
    cfg = SearchConfig(max_worlds=2)
    fast = countermodel(text, cfg, engine="bitset")
    slow = countermodel(text, cfg, engine="generic")
    assert fast.found == slow.found
    if fast.found:
        assert fast.frame == slow.frame and fast.valuation == slow.valuation


def test_sound_axiom_is_exhausted():
    res = countermodel("box p * box q |- box (p * q)", SearchConfig(max_worlds=3, max_valuations=10_000_000))
    assert not res.found and res.frames == 40_884_255


def test_budget_exhaustion_reports_progress():
    with pytest.raises(BudgetExceeded) as exc:
        countermodel("p * q |- q * p", SearchConfig(max_worlds=3, max_valuations=50))
    assert exc.value.progress["budget"] == 50
    assert "worlds" in exc.value.progress


def test_polymodal_sequent_uses_generic_engine():
    res = countermodel("box[s] p |- p", SearchConfig(max_worlds=1, modalities=("s",)))
    assert res.found
    assert not frame_valid(res.frame, "box[s] p |- p")
    with pytest.raises(ValueError):
        countermodel("box[s] p |- p", SearchConfig(max_worlds=1, modalities=("s",)), engine="bitset")


def test_soundness_sweep_two_worlds():
    rep = soundness_sweep(SearchConfig(max_worlds=2))
    assert rep.passed


def test_soundness_sweep_reports_failures():
    rep = soundness_sweep(SearchConfig(max_worlds=1), ["box p |- p"])
    assert not rep.passed


def test_soundness_sweep_refuses_large_frames():
    with pytest.raises(BudgetExceeded):
        soundness_sweep(SearchConfig(max_worlds=4))
