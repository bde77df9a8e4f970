import os
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from lambekmodal.duality import check_frame_iso, relabel
from lambekmodal.enumeration import (MAX_ENUMERATION_WORLDS, SearchConfig, bases, count_frames, enumerate_frames,
                                     iter_bases, lattices, posets)
from lambekmodal.frames import Frame, make_frame, validate_frame
from lambekmodal.report import BudgetExceeded

from conftest import one_point


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def brute_force_frames(n):
    """Every structure on n labeled worlds that passes validate_frame.

    Box and dia relations enter only the box-product and persistence
    conditions, so bases are validated with empty modal relations first
    and the modal relations are then checked one at a time.
    """
    W = range(n)
    pairs = [(a, b) for a in W for b in W]
    triples = list(product(W, repeat=3))
    out = set()
    for leq in _subsets(pairs):
        if not all((a, a) in leq for a in W):
            continue
        for O in _subsets(W):
            for R in _subsets(triples):
                F = make_frame(n, leq, R, O, box=[], dia=[])
                if not validate_frame(F, limit=1).passed:
                    continue
                boxes = [b for b in _subsets(pairs)
                         if validate_frame(make_frame(n, leq, R, O, box=b, dia=[]), limit=1).passed]
                dias = [d for d in _subsets(pairs)
                        if validate_frame(make_frame(n, leq, R, O, box=[], dia=d), limit=1).passed]
                for b, d in product(boxes, dias):
                    out.add(make_frame(n, leq, R, O, box=b, dia=d))
    return out


def test_one_world_count_and_contents():
    frames = list(enumerate_frames(SearchConfig(max_worlds=1)))
    assert len(frames) == 4 == count_frames(1)
    assert any(check_frame_iso(one_point(), F) for F in frames)
    assert not any(F.O == frozenset() for F in frames)
    assert brute_force_frames(1) == set(frames)


def test_two_world_enumeration_matches_brute_force():
    frames = list(enumerate_frames(SearchConfig(max_worlds=2, min_worlds=2)))
    assert len(frames) == len(set(frames)) == 1708 == count_frames(2)
    assert set(frames) == brute_force_frames(2)


def test_three_world_count():
    assert len(bases(3)) == 1000
    assert count_frames(3) == 40_882_543


def test_enumeration_is_deterministic():
    cfg = SearchConfig(max_worlds=2)
    assert list(enumerate_frames(cfg)) == list(enumerate_frames(cfg))


def test_dedup_counts_orbits():
    raw = [F for F in enumerate_frames(SearchConfig(max_worlds=2, min_worlds=2))]
    fixed = sum(1 for F in raw if relabel(F, (1, 0), F.worlds) == F)
    # Burnside over the two permutations of two worlds
    orbits = (len(raw) + fixed) // 2
    dedup = list(enumerate_frames(SearchConfig(max_worlds=2, min_worlds=2, dedup_iso=True)))
    assert len(dedup) == orbits <= len(raw)
    assert len(list(enumerate_frames(SearchConfig(max_worlds=2, dedup_iso=True)))) == 866


def test_dedup_representatives_cover_every_frame():
    dedup = list(enumerate_frames(SearchConfig(max_worlds=2, min_worlds=2, dedup_iso=True)))
    raw = list(enumerate_frames(SearchConfig(max_worlds=2, min_worlds=2)))
    reps = set(dedup)
    for F in raw[::17]:
        if F not in reps:
            assert relabel(F, (1, 0), F.worlds) in reps


REPS2 = list(enumerate_frames(SearchConfig(max_worlds=2, min_worlds=2, dedup_iso=True)))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(REPS2), st.sampled_from(REPS2))
def test_representatives_are_pairwise_non_isomorphic(F, G):
    assert (check_frame_iso(F, G) is not None) == (F == G)


def test_enumerated_frames_are_valid():
    for F in enumerate_frames(SearchConfig(max_worlds=2)):
        assert validate_frame(F, limit=1).passed


def test_polymodal_enumeration():
    cfg = SearchConfig(max_worlds=1, modalities=("s", "t"))
    frames = list(enumerate_frames(cfg))
    assert len(frames) == count_frames(1, modalities=2) == 16
    assert all(F.modalities == ("s", "t") for F in frames)


def test_posets():
    assert [len(posets(n)) for n in (1, 2, 3)] == [1, 3, 19]


def test_lattices():
    assert len(lattices(5)) == 8
    assert len(lattices(5, distributive_only=False)) == 10


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(max_worlds=0)
    with pytest.raises(ValueError):
        SearchConfig(max_valuations=0)


def test_four_worlds_are_lazy():
    with pytest.raises(BudgetExceeded):
        bases(MAX_ENUMERATION_WORLDS + 1)
    first = next(iter_bases(4))
    assert first.n == 4
    F = next(enumerate_frames(SearchConfig(max_worlds=4, min_worlds=4)))
    assert validate_frame(F).passed


def test_budget_env_var(monkeypatch):
    monkeypatch.setenv("WORKBENCH_BUDGET", "123")
    assert SearchConfig().max_valuations == 123
