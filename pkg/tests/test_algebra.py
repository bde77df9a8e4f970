from itertools import product

import pytest

from lambekmodal.algebra import (NotResiduated, check_algebra, check_filter_lemma, check_inequation,
                                 check_kappa, check_lattice, check_perfect, check_rdma, derive_residuals,
                                 eval_term, filter_product, filters, join_irreducibles, kappa, lattice_algebra,
                                 make_algebra, meet_irreducibles, prime_filters, principal_filter, with_modal)
from lambekmodal.duality import complex_algebra
from lambekmodal.syntax import base_axioms


def names(A, xs):
    return [A.elements[x] for x in xs]


def test_lattice_checks(chain2, square, m3_order):
    assert check_lattice(chain2).passed
    assert check_lattice(square).passed
    M3 = make_algebra(*m3_order, lambda a, b: 0, "1")
    rep = check_lattice(M3)
    assert rep.failed_conditions() == {"distributivity"}
    a, b, c = rep.violations[0].witness
    i = M3.index_of
    meet, join = M3.meet, M3.join
    assert meet[i(a)][join[i(b)][i(c)]] != join[meet[i(a)][i(b)]][meet[i(a)][i(c)]]


def test_chain_residuals_by_brute_force(chain2):
    # a\c is the largest b with min(a, b) <= c
    for a, c in product(range(2), repeat=2):
        expected = max(b for b in range(2) if min(a, b) <= c)
        assert chain2.ldiv[a][c] == expected == (1 if a <= c else c)
    for a, b, c in product(range(2), repeat=3):
        assert (b <= chain2.ldiv[a][c]) == (min(a, b) <= c) == (a <= chain2.rdiv[c][b])


def test_complex_algebra_of_one_point(F1):
    A = complex_algebra(F1)
    assert A.elements == ("{}", "{w}")
    w, empty = A.index_of("{w}"), A.index_of("{}")
    assert A.ldiv[w][empty] == empty
    assert A.mul[w][w] == w and A.eps == w
    assert check_rdma(A).passed


def test_non_monotone_product_is_rejected():
    A = make_algebra(["0", "1"], [("0", "0"), ("0", "1"), ("1", "1")], [["1", "0"], ["0", "0"]], "1")
    with pytest.raises(NotResiduated) as exc:
        derive_residuals(A)
    assert exc.value.witness


def test_rdma_violation(square):
    # monotone, keeps the top, but box(a & b) = 0 while box a & box b = 1
    one = square.index_of("1")
    A = with_modal(square, box={"0": [0, one, one, one]})
    rep = check_rdma(A)
    assert "box-meet" in rep.failed_conditions()


def test_chain_with_identity_modalities(chain2):
    assert check_rdma(chain2).passed
    assert check_algebra(chain2).passed


def test_irreducibles(chain2, chain3, square):
    assert names(square, join_irreducibles(square)) == ["a", "b"]
    assert names(chain3, join_irreducibles(chain3)) == ["m", "1"]
    assert names(chain3, meet_irreducibles(chain3)) == ["0", "m"]
    assert names(chain2, join_irreducibles(chain2)) == ["1"]
    assert names(chain2, meet_irreducibles(chain2)) == ["0"]


def test_kappa(chain2, chain3, square):
    assert chain2.elements[kappa(chain2, "1")] == "0"
    assert square.elements[kappa(square, "a")] == "b"
    # direct from the definition: join of everything not above j
    for j in join_irreducibles(chain3):
        outside = [x for x in range(3) if not chain3.le(j, x)]
        assert kappa(chain3, j) == max(outside)
    assert chain3.elements[kappa(chain3, "m")] == "0"
    assert chain3.elements[kappa(chain3, "1")] == "m"
    with pytest.raises(ValueError):
        kappa(chain3, "0")
    for A in (chain2, chain3, square):
        assert check_kappa(A).passed


def _brute_filters(A):
    out = []
    for m in range(1, 1 << A.n):
        S = {x for x in range(A.n) if m >> x & 1}
        if all(y in S for x in S for y in range(A.n) if A.le(x, y)) and \
                all(A.meet[x][y] in S for x in S for y in S):
            out.append(S)
    return out


def test_filters(chain2, chain3, square):
    up = lambda A, x: {y for y in range(A.n) if A.le(A.index_of(x), y)}
    got = [set(F.members) for F in filters(chain3)]
    assert sorted(map(sorted, got)) == sorted(map(sorted, _brute_filters(chain3)))
    assert sorted(map(sorted, got)) == sorted(map(sorted, [up(chain3, "1"), up(chain3, "m"), up(chain3, "0")]))
    primes = lambda A: sorted(sorted(F.members) for F in prime_filters(A))
    assert primes(chain3) == sorted([sorted(up(chain3, "1")), sorted(up(chain3, "m"))])
    assert primes(square) == sorted([sorted(up(square, "a")), sorted(up(square, "b"))])
    assert [set(F.members) for F in prime_filters(chain2)] == [up(chain2, "1")]


def test_prime_filters_match_irreducibles(chain3, square):
    for A in (chain3, square):
        assert sorted(F.mask for F in prime_filters(A)) == sorted(A.up[j] for j in join_irreducibles(A))


def test_filter_product(F1, chain3):
    for Y in filters(chain3):
        assert filter_product(chain3, principal_filter(chain3, chain3.eps), Y).mask == Y.mask
    m = chain3.index_of("m")
    assert filter_product(chain3, chain3.up[m], chain3.up[m]).mask == chain3.up[m]
    A = complex_algebra(F1)
    w = A.index_of("{w}")
    assert filter_product(A, A.up[w], A.up[w]).mask == A.up[w]


def test_filter_lemma(chain2, chain3, square):
    for A in (chain2, chain3, square):
        assert check_filter_lemma(A).passed


def test_perfect(chain3):
    assert check_perfect(chain3).passed


def test_eval_term(F1, chain3, square):
    A = complex_algebra(F1)
    assert eval_term(A, {"p": "{w}"}, "box p * box p") == "{w}"
    for B in (chain3, square):
        for x in B.elements:
            assert eval_term(B, {"p": x}, "1 * p") == x
            assert eval_term(B, {"p": x}, "p & top") == x
    with pytest.raises(KeyError):
        eval_term(chain3, {}, "p")


def test_check_inequation(chain3, square, F1):
    for A in (chain3, square, complex_algebra(F1)):
        assert check_inequation(A, "p |- p")
        assert check_inequation(A, "box p * box q |- box (p * q)")
        for s in base_axioms():
            assert check_inequation(A, s)


def test_noncommutative_complex_algebra():
    from lambekmodal.io import load_frame
    import pathlib
    F = load_frame(pathlib.Path(__file__).parent / "fixtures" / "noncommutative.json")
    A = complex_algebra(F)
    res = check_inequation(A, "p * q |- q * p")
    assert not res
    asg = res.assignment
    lhs = eval_term(A, asg, "p * q")
    rhs = eval_term(A, asg, "q * p")
    assert not A.le(A.index_of(lhs), A.index_of(rhs))


def test_lattice_algebra_is_heyting(square):
    for a, b in product(range(4), repeat=2):
        assert square.mul[a][b] == square.meet[a][b]
    assert square.eps == square.top
