"""Countermodel search and soundness sweeps over enumerated frames."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .enumeration import MAX_ENUMERATION_WORLDS, SearchConfig, enumerate_frames
from .frames import Frame, Model, frame_valid, make_model
from .io import frame_to_json
from .report import BudgetExceeded, CheckReport
from .sweep import BitsetEvaluator, all_slices, first_false, validity_sweep
from .syntax import (DEFAULT_INDEX, Box, Dia, subformulas, Sequent, as_sequent, atoms, base_axioms, default_signature,
                     modal_indices)


@dataclass(frozen=True)
class Countermodel:
    frame: Frame
    valuation: tuple[tuple[str, frozenset[str]], ...]
    checked: int

    found = True

    @property
    def model(self) -> Model:
        return make_model(self.frame, {a: ws for a, ws in self.valuation})

    def to_json(self) -> dict:
        return {"found": True, "frame": frame_to_json(self.frame),
                "valuation": {a: sorted(ws) for a, ws in self.valuation}, "valuations_checked": self.checked}


@dataclass(frozen=True)
class Exhausted:
    max_worlds: int
    frames: int
    checked: int

    found = False

    def to_json(self) -> dict:
        return {"found": False, "max_worlds": self.max_worlds, "frames": self.frames,
                "valuations_checked": self.checked}


def _fast_path(s: Sequent, cfg: SearchConfig) -> bool:
    return modal_indices(s) <= {DEFAULT_INDEX} and tuple(cfg.modalities) == (DEFAULT_INDEX,)


def countermodel(s: Sequent | str, cfg: SearchConfig | None = None,
                 engine: str = "auto") -> Countermodel | Exhausted:
    """The first enumerated frame and valuation refuting ``s``.

    Frames come in :func:`enumerate_frames` order and valuations in
    :func:`frame_valid` order, so the answer is deterministic. Deduplication
    cannot change it: the first refuting frame is the first of its class.
    ``engine`` is ``"auto"``, ``"bitset"`` (monomodal only) or ``"generic"``.

    The budget counts distinct evaluations: with the bitset engine a sequent
    without boxes is evaluated once per (base, dia relation), not once per
    box relation, and likewise for dias.
    """
    s = as_sequent(s)
    cfg = cfg or SearchConfig()
    if engine not in ("auto", "bitset", "generic"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "generic" or (engine == "auto" and not _fast_path(s, cfg)):
        return _countermodel_generic(s, cfg)
    if not _fast_path(s, cfg):
        raise ValueError("the bitset engine handles the default modal index only")
    names = sorted(atoms(s))
    # identical sides hold under every valuation, so the search space is exhausted unseen
    trivial = s.lhs == s.rhs
    kinds = {type(g) for g in subformulas(s.lhs) + subformulas(s.rhs)}
    uses_box, uses_dia = Box in kinds, Dia in kinds
    checked = frames = 0
    for sl in all_slices(cfg.max_worlds, cfg.min_worlds):
        if trivial:
            frames += sl.count
            continue
        ev = BitsetEvaluator(sl, names)
        # relations a sequent never mentions cannot change its truth, so only
        # the components it depends on multiply the evaluation count
        nb = len(sl.boxes) if uses_box else 1
        nd = len(sl.dias) if uses_dia else 1
        ok = ev.valid_frames(s)
        hit = first_false(ok)
        need = nb * nd * ev.nval
        if hit is not None:
            b, d = hit
            k = ev.first_failing_valuation(s, b, d)
            need = ((b if uses_box else 0) * nd + (d if uses_dia else 0)) * ev.nval + k + 1
        if checked + need > cfg.max_valuations:
            raise BudgetExceeded("valuation budget exhausted before the search finished",
                                 {"worlds": sl.n, "base": sl.position, "frames": frames,
                                  "valuations": checked, "budget": cfg.max_valuations})
        checked += need
        if hit is None:
            frames += sl.count
            continue
        F = sl.frame(b, d)
        res = frame_valid(F, s, budget=cfg.max_valuations)
        if res.valid or res.checked != k + 1:
            raise AssertionError("bitset engine and frame_valid disagree on the countermodel")
        return Countermodel(F, res.counterexample, checked)
    return Exhausted(cfg.max_worlds, frames, checked)


def _countermodel_generic(s: Sequent, cfg: SearchConfig) -> Countermodel | Exhausted:
    needed = tuple(sorted(modal_indices(s) | set(cfg.modalities)))
    cfg2 = SearchConfig(cfg.max_worlds, cfg.max_valuations, False, cfg.formula_universe_depth,
                        needed, cfg.min_worlds)
    checked = frames = 0
    for F in enumerate_frames(cfg2):
        if s.lhs == s.rhs:
            frames += 1
            continue
        res = frame_valid(F, s, budget=cfg.max_valuations)
        checked += res.checked
        if checked > cfg.max_valuations:
            raise BudgetExceeded("valuation budget exhausted before the search finished",
                                 {"worlds": F.n, "frames": frames, "valuations": checked,
                                  "budget": cfg.max_valuations})
        if not res.valid:
            return Countermodel(F, res.counterexample, checked)
        frames += 1
    return Exhausted(cfg.max_worlds, frames, checked)


def soundness_sweep(cfg: SearchConfig | None = None, sequents: Iterable[Sequent | str] | None = None) -> CheckReport:
    """Frame validity of the base schemata (or ``sequents``) on every enumerated frame.

    Each failure is a bug witness: a frame passing the frame conditions on
    which a supposedly valid schema fails.
    """
    cfg = cfg or SearchConfig()
    if cfg.max_worlds > MAX_ENUMERATION_WORLDS:
        raise BudgetExceeded(f"exhaustive sweeps are limited to {MAX_ENUMERATION_WORLDS} worlds",
                             {"requested": cfg.max_worlds})
    seqs = [as_sequent(s) for s in (sequents if sequents is not None else base_axioms(default_signature()))]
    res = validity_sweep(seqs, cfg.max_worlds, name="soundness", min_worlds=cfg.min_worlds)
    rep = res.report()
    notes = [f"{len(seqs)} sequent(s) on every frame with at most {cfg.max_worlds} world(s)"]
    if res.first:
        notes.append(f"first failure: {res.first['sequent']}")
    return CheckReport.build(rep.violations, list(rep.notes) + notes, name="soundness")
