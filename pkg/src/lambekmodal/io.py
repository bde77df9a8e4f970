"""JSON readers and writers for frames, models, algebras and signatures."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .algebra import Algebra, derive_residuals, make_algebra
from .frames import Frame, Model, bits, make_frame, make_model
from .syntax import DEFAULT_INDEX, Signature, signature_from_json


class FormatError(ValueError):
    """Malformed input document."""


def _need(doc: Mapping, key: str, kind: str) -> Any:
    if not isinstance(doc, Mapping):
        raise FormatError(f"{kind} document must be a JSON object")
    if key not in doc:
        raise FormatError(f"{kind} document lacks {key!r}")
    return doc[key]


def _names(xs) -> list[str]:
    if not isinstance(xs, list):
        raise FormatError("expected a list of names")
    return [str(x) for x in xs]


# ---------------------------------------------------------------------------
# frames and models

def frame_to_json(F: Frame) -> dict:
    w = F.worlds
    pairs = lambda rel: [[w[a], w[b]] for a, b in sorted(rel)]
    return {
        "worlds": list(w),
        "leq": pairs(F.leq),
        "R": [[w[a], w[b], w[c]] for a, b, c in sorted(F.R)],
        "O": [w[o] for o in sorted(F.O)],
        "modalities": list(F.modalities),
        "box": {i: pairs(r) for i, r in F.box},
        "dia": {i: pairs(r) for i, r in F.dia},
    }


def _modal_doc(doc: Mapping, key: str) -> dict:
    """A modal entry is an object keyed by index, or a bare list for the default index."""
    raw = doc.get(key, {})
    if isinstance(raw, list):
        raw = {DEFAULT_INDEX: raw}
    return {str(i): rel for i, rel in raw.items()}


def frame_from_json(doc: Mapping) -> Frame:
    worlds = _names(_need(doc, "worlds", "frame"))
    try:
        mods = [str(i) for i in doc.get("modalities", [])]
        box = _modal_doc(doc, "box")
        dia = _modal_doc(doc, "dia")
        for i in mods:
            box.setdefault(i, [])
            dia.setdefault(i, [])
        return make_frame(worlds,
                          [tuple(map(str, p)) for p in _need(doc, "leq", "frame")],
                          [tuple(map(str, t)) for t in _need(doc, "R", "frame")],
                          [str(o) for o in _need(doc, "O", "frame")],
                          {i: [tuple(map(str, p)) for p in rel] for i, rel in box.items()} or None,
                          {i: [tuple(map(str, p)) for p in rel] for i, rel in dia.items()} or None)
    except (TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed frame: {exc}") from exc


def model_to_json(M: Model) -> dict:
    doc = frame_to_json(M.frame)
    doc["valuation"] = {a: [M.frame.worlds[i] for i in bits(m)] for a, m in M.valuation}
    return doc


def model_from_json(doc: Mapping) -> Model:
    F = frame_from_json(doc)
    val = _need(doc, "valuation", "model")
    if not isinstance(val, Mapping):
        raise FormatError("valuation must be an object")
    try:
        return make_model(F, {str(a): [str(x) for x in ws] for a, ws in val.items()})
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed valuation: {exc}") from exc


# ---------------------------------------------------------------------------
# algebras

def algebra_to_json(A: Algebra, residuals: bool = True) -> dict:
    e = A.elements
    n = A.n
    table = lambda t: [[e[a], e[b], e[t[a][b]]] for a in range(n) for b in range(n)]
    doc = {
        "elements": list(e),
        "leq": [[e[a], e[b]] for a, b in sorted(A.leq)],
        "mul": table(A.mul),
        "eps": e[A.eps],
        "box": {i: [[e[a], e[t[a]]] for a in range(n)] for i, t in A.box},
        "dia": {i: [[e[a], e[t[a]]] for a in range(n)] for i, t in A.dia},
    }
    if residuals:
        try:
            B = A if A.ldiv is not None else derive_residuals(A)
        except ValueError:
            B = None
        if B is not None:
            doc["ldiv"] = table(B.ldiv)
            doc["rdiv"] = table(B.rdiv)
    return doc


def algebra_from_json(doc: Mapping) -> Algebra:
    """Residual tables in the document are ignored; they are always derived."""
    elements = _names(_need(doc, "elements", "algebra"))
    try:
        box = {i: [tuple(map(str, p)) for p in t] for i, t in _modal_doc(doc, "box").items()} or None
        dia = {i: [tuple(map(str, p)) for p in t] for i, t in _modal_doc(doc, "dia").items()} or None
        return make_algebra(elements,
                            [tuple(map(str, p)) for p in _need(doc, "leq", "algebra")],
                            [tuple(map(str, t)) for t in _need(doc, "mul", "algebra")],
                            str(_need(doc, "eps", "algebra")), box, dia)
    except (TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed algebra: {exc}") from exc


# ---------------------------------------------------------------------------
# files

def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def load_frame(path: str | Path) -> Frame:
    return frame_from_json(read_json(path))


def load_model(path: str | Path) -> Model:
    return model_from_json(read_json(path))


def load_algebra(path: str | Path) -> Algebra:
    return algebra_from_json(read_json(path))


def load_signature_file(path: str | Path) -> Signature:
    try:
        return signature_from_json(read_json(path))
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
