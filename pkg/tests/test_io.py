import json

import pytest

from lambekmodal.algebra import derive_residuals
from lambekmodal.duality import complex_algebra
from lambekmodal.enumeration import SearchConfig, enumerate_frames
from lambekmodal.frames import make_model
from lambekmodal.io import (FormatError, algebra_from_json, algebra_to_json, frame_from_json, frame_to_json,
                            load_frame, load_signature_file, model_from_json, model_to_json)


def test_frame_round_trip():
    for F in enumerate_frames(SearchConfig(max_worlds=2)):
        assert frame_from_json(json.loads(json.dumps(frame_to_json(F)))) == F


def test_bare_list_modal_entry(F1):
    doc = {"worlds": ["w"], "leq": [["w", "w"]], "R": [["w", "w", "w"]], "O": ["w"],
           "box": [["w", "w"]], "dia": [["w", "w"]]}
    assert frame_from_json(doc) == F1


def test_model_round_trip(F1):
    M = make_model(F1, {"p": ["w"], "q": []})
    assert model_from_json(model_to_json(M)) == M


def test_algebra_round_trip(square, F1):
    for A in (square, complex_algebra(F1)):
        doc = algebra_to_json(A)
        assert "ldiv" in doc and "rdiv" in doc
        B = derive_residuals(algebra_from_json(json.loads(json.dumps(doc))))
        assert B == A


def test_malformed_documents(tmp_path):
    with pytest.raises(FormatError):
        frame_from_json({"leq": []})
    with pytest.raises(FormatError):
        frame_from_json({"worlds": ["w"], "leq": [["w", "x"]], "R": [], "O": []})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(FormatError):
        load_frame(bad)
    with pytest.raises(FormatError):
        load_frame(tmp_path / "missing.json")


def test_signature_file(tmp_path):
    path = tmp_path / "sig.json"
    path.write_text(json.dumps({"indices": ["s", "t"], "preceq": [["s", "t"]]}))
    sig = load_signature_file(path)
    assert sig.below("s", "t") and sig.below("s", "s") and not sig.below("t", "s")
