import pathlib
from itertools import product

import pytest

from lambekmodal.algebra import check_inequation, filters, make_algebra
from lambekmodal.canonical import (FINITE_CANONICITY_NOTE, Completion, canonical_extension, check_canonicity,
                                   check_compactness, check_completion, check_density, ideals,
                                   minimal_compactness_witnesses, pi_extend_map, pi_extend_residuals,
                                   sigma_extend_binary, sigma_extend_map)
from lambekmodal.duality import check_algebra_iso, complex_algebra
from lambekmodal.io import load_frame
from lambekmodal.report import PreconditionError

FIXTURE = pathlib.Path(__file__).parent / "fixtures" / "noncommutative.json"


def test_extension_of_chains_and_square(chain2, chain3, square):
    for A, nfilters in ((chain2, 2), (chain3, 3), (square, 4)):
        C = canonical_extension(A)
        assert C.extension.n == A.n
        assert len(C.filters) == len(filters(A)) == nfilters
        assert len(C.ideals) == len(ideals(A))
        assert check_algebra_iso(A, C.extension) is not None
        assert check_completion(C).passed


def test_embed_is_the_evident_map(chain3):
    C = canonical_extension(chain3)
    E = C.extension
    for a, b in product(range(3), repeat=2):
        assert chain3.le(a, b) == E.le(C.embed[a], C.embed[b])


def test_extension_requires_distributive_lattice(m3_order):
    M3 = make_algebra(*m3_order, lambda a, b: 0, "1")
    with pytest.raises(PreconditionError):
        canonical_extension(M3)


def test_density_and_compactness_pass(chain2, square):
    for A in (chain2, square):
        C = canonical_extension(A)
        assert check_density(C).passed and check_compactness(C).passed


def test_corrupted_extension_fails_density(chain2, square):
    # the square with the 2-chain sent to its bounds: a and b are not joins of filter elements
    C = Completion(chain2, square, (square.index_of("0"), square.index_of("1")))
    rep = check_density(C)
    assert "join-of-filter-elements" in rep.failed_conditions()
    assert ("join-of-filter-elements", ("a",)) in rep.violations


def test_chain_compactness_witnesses_are_singletons(chain3):
    # in a chain, min S <= max T already holds for one element of each side
    for S, T in product(range(1, 8), repeat=2):
        s = [x for x in range(3) if S >> x & 1]
        t = [x for x in range(3) if T >> x & 1]
        if min(s) <= max(t):
            assert any(a <= b for a in s for b in t)
    assert minimal_compactness_witnesses(canonical_extension(chain3)) == (1, 1)


def test_square_compactness_witnesses(square):
    # a & b <= 0 needs both meetands
    assert minimal_compactness_witnesses(canonical_extension(square)) == (2, 2)


def test_sigma_extension_of_identity_and_operations(chain2, square, F1):
    for A in (chain2, square, complex_algebra(F1)):
        C = canonical_extension(A)
        E, emb = C.extension, C.embed
        assert sigma_extend_map(C, list(range(A.n))) == tuple(range(E.n))
        for i, t in A.box:
            ext = sigma_extend_map(C, t)
            assert all(ext[emb[a]] == emb[t[a]] for a in range(A.n))
            assert pi_extend_map(C, t) == ext
        mul = sigma_extend_binary(C, A.mul)
        assert all(mul[emb[a]][emb[b]] == emb[A.mul[a][b]] for a in range(A.n) for b in range(A.n))


def test_non_monotone_map_rejected(chain2):
    with pytest.raises(ValueError):
        sigma_extend_map(canonical_extension(chain2), [1, 0])


def test_pi_residuals_match_base(chain2, F1):
    for A in (chain2, complex_algebra(F1)):
        C = canonical_extension(A)
        ldiv, rdiv = pi_extend_residuals(C)
        emb = C.embed
        for a, b in product(range(A.n), repeat=2):
            assert ldiv[emb[a]][emb[b]] == emb[A.ldiv[a][b]]
            assert rdiv[emb[a]][emb[b]] == emb[A.rdiv[a][b]]


def test_residuation_on_extension(square):
    E = canonical_extension(square).extension
    for a, b, c in product(range(E.n), repeat=3):
        mid = E.le(E.mul[a][b], c)
        assert E.le(b, E.ldiv[a][c]) == mid == E.le(a, E.rdiv[c][b])


def test_canonicity(chain3, square):
    for A in (chain3, square):
        for s in ("box p * box q |- box (p * q)", "box p * q |- box p * q * box p"):
            rep = check_canonicity(A, s)
            assert rep.passed and FINITE_CANONICITY_NOTE in rep.notes
            assert not any("premise false" in n for n in rep.notes)


def test_canonicity_with_false_premise():
    A = complex_algebra(load_frame(FIXTURE))
    assert not check_inequation(A, "p * q |- q * p")
    rep = check_canonicity(A, "p * q |- q * p")
    assert rep.passed
    assert any("premise false" in n for n in rep.notes)
