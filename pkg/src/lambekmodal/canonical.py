"""Canonical extensions of finite algebras via the filter/ideal polarity.

For a finite distributive lattice the completion is the lattice itself; the
construction is carried out anyway so that stable sets, filter and ideal
elements, and the σ/π formulas are all computed from their definitions and
can be cross-checked against the base operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .algebra import (Algebra, check_inequation, check_lattice, check_residuation, derive_residuals,
                      filters)
from .duality import check_homomorphism
from .frames import bits, mask_of
from .report import CheckReport, PreconditionError, _Collector
from .syntax import Sequent, as_sequent

FINITE_CANONICITY_NOTE = ("finite algebra: the canonical extension is isomorphic to the base, "
                          "so a pass certifies the extension machinery, not canonicity in general")


def is_ideal(A: Algebra, mask: int) -> bool:
    if mask == 0:
        return False
    for x in bits(mask):
        if A.down[x] & ~mask:
            return False
    return all(mask >> A.join[a][b] & 1 for a in bits(mask) for b in bits(mask))


def ideals(A: Algebra) -> list[int]:
    """All ideals as masks, by increasing mask (principal ones above 16 elements)."""
    if A.n <= 16:
        return [m for m in range(1, 1 << A.n) if is_ideal(A, m)]
    return sorted({A.down[a] for a in range(A.n)})


@dataclass(frozen=True)
class Completion:
    """A completion of ``base`` with ``embed`` mapping base elements into ``extension``.

    ``filter_elements`` and ``ideal_elements`` index extension elements and
    are aligned with ``filters`` and ``ideals`` (masks over the base).
    ``stable_sets`` lists, for each extension element, the set of filters it
    consists of (empty for hand-built completions).
    """

    base: Algebra
    extension: Algebra
    embed: tuple[int, ...]
    filters: tuple[int, ...] = ()
    ideals: tuple[int, ...] = ()
    filter_elements: tuple[int, ...] = ()
    ideal_elements: tuple[int, ...] = ()
    stable_sets: tuple[int, ...] = ()


def polarity_stable_sets(A: Algebra, fl: Sequence[int], il: Sequence[int]) -> list[int]:
    """Galois-closed sets of filters for the relation ``F ∩ I ≠ ∅``.

    Every closed set is an intersection of the sets ``{F | F ∩ I ≠ ∅}``;
    these are closed under intersection starting from the full set.
    """
    full = (1 << len(fl)) - 1
    columns = [mask_of(k for k, F in enumerate(fl) if F & I) for I in il]
    closed = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for S in frontier:
            for c in columns:
                T = S & c
                if T not in closed:
                    closed.add(T)
                    nxt.append(T)
        frontier = nxt
    return sorted(closed, key=lambda m: (bin(m).count("1"), m))


def galois_closure(fl: Sequence[int], il: Sequence[int], S: int) -> int:
    """``S''`` for a set ``S`` of filter positions."""
    up = [I for I in il if all(fl[k] & I for k in bits(S))]
    return mask_of(k for k, F in enumerate(fl) if all(F & I for I in up))


def _lattice_of_sets(names: Sequence[str], sets: Sequence[int], eps: int) -> Algebra:
    k = len(sets)
    leq = frozenset((a, b) for a in range(k) for b in range(k) if sets[a] & ~sets[b] == 0)
    zero = tuple(tuple(0 for _ in range(k)) for _ in range(k))
    return Algebra(tuple(names), leq, zero, eps, (), ())


def canonical_extension(A: Algebra) -> Completion:
    """Polarity completion of ``A`` with σ-extended product and modalities and
    π-extended residuals."""
    rep = check_lattice(A)
    if not rep.passed:
        raise PreconditionError("canonical extension needs a distributive lattice", rep)
    if A.ldiv is None:
        A = derive_residuals(A)
    fl = [F.mask for F in filters(A)]
    il = ideals(A)
    stable = polarity_stable_sets(A, fl, il)
    pos = {S: k for k, S in enumerate(stable)}
    embed = []
    for a in range(A.n):
        S = mask_of(k for k, F in enumerate(fl) if F >> a & 1)
        if S not in pos:
            raise AssertionError("embedded element is not a stable set")
        embed.append(pos[S])

    def label(S: int) -> str:
        pre = [a for a in range(A.n) if stable[embed[a]] == S]
        if pre:
            return f"[{A.elements[pre[0]]}]"
        return "{" + ",".join(f"F{k}" for k in bits(S)) + "}"

    lat = _lattice_of_sets([label(S) for S in stable], stable, 0)
    lat = Algebra(lat.elements, lat.leq, lat.mul, embed[A.eps], (), ())
    fe = tuple(lat.meet_of(mask_of(embed[a] for a in bits(F))) for F in fl)
    ie = tuple(lat.join_of(mask_of(embed[a] for a in bits(I))) for I in il)
    C0 = Completion(A, lat, tuple(embed), tuple(fl), tuple(il), fe, ie, tuple(stable))
    mul = sigma_extend_binary(C0, A.mul)
    box = tuple((i, sigma_extend_map(C0, t)) for i, t in A.box)
    dia = tuple((i, sigma_extend_map(C0, t)) for i, t in A.dia)
    ext = Algebra(lat.elements, lat.leq, mul, embed[A.eps], box, dia)
    ldiv, rdiv = pi_extend_residuals(Completion(A, ext, C0.embed, C0.filters, C0.ideals, fe, ie, C0.stable_sets))
    ext = Algebra(ext.elements, ext.leq, mul, ext.eps, box, dia, ldiv, rdiv)
    return Completion(A, ext, C0.embed, C0.filters, C0.ideals, fe, ie, C0.stable_sets)


# ---------------------------------------------------------------------------
# extensions of maps

def _is_monotone1(A: Algebra, f: Sequence[int]) -> bool:
    return all(A.le(f[a], f[b]) for a, b in A.leq)


def sigma_extend_map(C: Completion, f: Sequence[int] | Callable[[int], int]) -> tuple[int, ...]:
    """σ-extension of a monotone unary map given as a table on the base.

    On filter elements ``k``: ``⋀{f(a) | k ≤ a}``; on arbitrary ``x``:
    ``⋁{f^σ(k) | k ≤ x, k a filter element}``.
    """
    A, E, emb = C.base, C.extension, C.embed
    f = tuple(f(a) for a in range(A.n)) if callable(f) else tuple(f)
    if not _is_monotone1(A, f):
        raise ValueError("map is not monotone")
    on_k = {}
    for k in set(C.filter_elements):
        above = mask_of(emb[f[a]] for a in range(A.n) if E.le(k, emb[a]))
        on_k[k] = E.meet_of(above)
    return tuple(E.join_of(mask_of(on_k[k] for k in on_k if E.le(k, x))) for x in range(E.n))


def pi_extend_map(C: Completion, f: Sequence[int]) -> tuple[int, ...]:
    """π-extension of a monotone unary map: dual of :func:`sigma_extend_map`."""
    A, E, emb = C.base, C.extension, C.embed
    f = tuple(f)
    if not _is_monotone1(A, f):
        raise ValueError("map is not monotone")
    on_o = {}
    for o in set(C.ideal_elements):
        below = mask_of(emb[f[a]] for a in range(A.n) if E.le(emb[a], o))
        on_o[o] = E.join_of(below)
    return tuple(E.meet_of(mask_of(on_o[o] for o in on_o if E.le(x, o))) for x in range(E.n))


def sigma_extend_binary(C: Completion, table: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """σ-extension of a binary map monotone in both arguments.

    ``k ·σ k' = ⋀{x·x' | k ≤ x, k' ≤ x'}`` on filter elements and
    ``a ·σ b = ⋁{k ·σ k' | k ≤ a, k' ≤ b}`` in general.
    """
    A, E, emb = C.base, C.extension, C.embed
    for a, b in A.leq:
        for c in range(A.n):
            if not (A.le(table[a][c], table[b][c]) and A.le(table[c][a], table[c][b])):
                raise ValueError("binary map is not monotone")
    K = sorted(set(C.filter_elements))
    above = {k: [x for x in range(A.n) if E.le(k, emb[x])] for k in K}
    on_k = {(k, k2): E.meet_of(mask_of(emb[table[x][y]] for x in above[k] for y in above[k2]))
            for k in K for k2 in K}
    return tuple(tuple(E.join_of(mask_of(on_k[k, k2] for k in K if E.le(k, a) for k2 in K if E.le(k2, b)))
                       for b in range(E.n)) for a in range(E.n))


def pi_extend_residuals(C: Completion) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """π-extensions of both residuals.

    ``k \\π o = ⋁{x\\y | k ≤ x, y ≤ o}`` for a filter element ``k`` and an
    ideal element ``o``; then ``a \\π b = ⋀{k \\π o | k ≤ a, b ≤ o}``.
    Symmetrically ``o /π k = ⋁{y/x | y ≤ o, k ≤ x}`` and
    ``b /π a = ⋀{o /π k | b ≤ o, k ≤ a}``.
    """
    A, E, emb = C.base, C.extension, C.embed
    if A.ldiv is None or A.rdiv is None:
        raise PreconditionError("base residuals not derived")
    K = sorted(set(C.filter_elements))
    Oe = sorted(set(C.ideal_elements))
    above = {k: [x for x in range(A.n) if E.le(k, emb[x])] for k in K}
    below = {o: [y for y in range(A.n) if E.le(emb[y], o)] for o in Oe}
    l_ko = {(k, o): E.join_of(mask_of(emb[A.ldiv[x][y]] for x in above[k] for y in below[o]))
            for k in K for o in Oe}
    r_ok = {(o, k): E.join_of(mask_of(emb[A.rdiv[y][x]] for y in below[o] for x in above[k]))
            for o in Oe for k in K}
    ldiv = tuple(tuple(E.meet_of(mask_of(l_ko[k, o] for k in K if E.le(k, a) for o in Oe if E.le(b, o)))
                       for b in range(E.n)) for a in range(E.n))
    rdiv = tuple(tuple(E.meet_of(mask_of(r_ok[o, k] for o in Oe if E.le(b, o) for k in K if E.le(k, a)))
                       for a in range(E.n)) for b in range(E.n))
    return ldiv, rdiv


# ---------------------------------------------------------------------------
# certification

def _extension_filter_elements(C: Completion) -> tuple[list[int], list[int]]:
    """Filter and ideal elements computed inside the extension from the embedded image."""
    E, emb = C.extension, C.embed
    fl = [F.mask for F in filters(C.base)]
    il = ideals(C.base)
    K = sorted({_glb(E, mask_of(emb[a] for a in bits(F))) for F in fl} - {None})
    O = sorted({_lub(E, mask_of(emb[a] for a in bits(I))) for I in il} - {None})
    return K, O


def _glb(E: Algebra, mask: int) -> int | None:
    lower = ((1 << E.n) - 1)
    for x in bits(mask):
        lower &= E.down[x]
    return E._greatest(lower)


def _lub(E: Algebra, mask: int) -> int | None:
    upper = ((1 << E.n) - 1)
    for x in bits(mask):
        upper &= E.up[x]
    return E._least(upper)


def check_density(C: Completion) -> CheckReport:
    """Every element is a join of filter elements and a meet of ideal elements."""
    E = C.extension
    K, O = _extension_filter_elements(C)
    col = _Collector()
    for x in range(E.n):
        if _lub(E, mask_of(k for k in K if E.le(k, x))) != x:
            col.add("join-of-filter-elements", E.elements[x])
        if _glb(E, mask_of(o for o in O if E.le(x, o))) != x:
            col.add("meet-of-ideal-elements", E.elements[x])
    return col.report("density")


def _min_subsets(A_n: int, value: Callable[[int], int | None]) -> list[dict[int, int]]:
    """For every subset S, the least size of a subset of S realizing each value."""
    best: list[dict[int, int]] = [dict() for _ in range(1 << A_n)]
    for S in range(1 << A_n):
        cur: dict[int, int] = {}
        v = value(S)
        if v is not None:
            cur[v] = bin(S).count("1")
        for x in bits(S):
            for val, sz in best[S & ~(1 << x)].items():
                if sz < cur.get(val, 1 << 30):
                    cur[val] = sz
        best[S] = cur
    return best


COMPACTNESS_LIMIT = 10


def check_compactness(C: Completion) -> CheckReport:
    """For all subsets S, T of the base with ⋀S ≤ ⋁T in the extension, find the
    smallest S' ⊆ S, T' ⊆ T with ⋀S' ≤ ⋁T'; the report notes the largest
    minimal witness."""
    E, emb, n = C.extension, C.embed, C.base.n
    col = _Collector()
    if n > COMPACTNESS_LIMIT:
        col.note(f"base has {n} > {COMPACTNESS_LIMIT} elements; compactness holds trivially (finite)")
        return col.report("compactness")
    glb = [_glb(E, mask_of(emb[a] for a in bits(S))) for S in range(1 << n)]
    lub = [_lub(E, mask_of(emb[a] for a in bits(T))) for T in range(1 << n)]
    meets = _min_subsets(n, glb.__getitem__)
    joins = _min_subsets(n, lub.__getitem__)
    big = 1 << 20
    le = np.zeros((E.n, E.n), dtype=bool)
    for x, y in E.leq:
        le[x, y] = True

    def size_table(best: list[dict[int, int]]) -> np.ndarray:
        out = np.full((len(best), E.n), big, dtype=np.int64)
        for S, d in enumerate(best):
            for v, sz in d.items():
                out[S, v] = sz
        return out

    MS, JS = size_table(meets), size_table(joins)
    jv = np.array([-1 if v is None else v for v in lub])
    worst = (0, 0)
    for S in range(1 << n):
        m = glb[S]
        if m is None:
            continue
        rows = np.nonzero((jv >= 0) & le[m, np.maximum(jv, 0)])[0]
        if not len(rows):
            continue
        # key orders witnesses by total size, then by meetand count
        key = (MS[S][None, :, None] + JS[rows][:, None, :]) * 32 + MS[S][None, :, None]
        best = np.where(le[None], key, big * 64).min(axis=(1, 2))
        missing = rows[best >= big * 32]
        for T in missing[:1]:
            col.add("no-finite-witness", tuple(bits(S)), tuple(bits(int(T))))
        found = best[best < big * 32]
        if len(found):
            ms = found % 32
            js = found // 32 - ms
            worst = (max(worst[0], int(ms.max())), max(worst[1], int(js.max())))
    col.note(f"largest minimal witness sizes: {worst[0]} meetand(s), {worst[1]} joinand(s)")
    return col.report("compactness")


def minimal_compactness_witnesses(C: Completion) -> tuple[int, int]:
    """Largest (|S'|, |T'|) over all minimal compactness witnesses."""
    rep = check_compactness(C)
    for note in rep.notes:
        if note.startswith("largest minimal witness sizes:"):
            parts = note.split(":")[1].split(",")
            return int(parts[0].split()[0]), int(parts[1].split()[0])
    raise ValueError("compactness witnesses unavailable")


def check_completion(C: Completion) -> CheckReport:
    """The full certification: iso to base along embed, filter/ideal element
    posets, density, compactness, smoothness, restriction, and residuation."""
    A, E, emb = C.base, C.extension, C.embed
    col = _Collector()
    if len(set(emb)) != A.n:
        col.add("embed-injective", tuple(emb))
    # filter elements against Filt(A) under reverse inclusion, ideals under inclusion
    for (i, F), (j, G) in product(enumerate(C.filters), repeat=2):
        if (G & ~F == 0) != E.le(C.filter_elements[i], C.filter_elements[j]):
            col.add("filter-elements-order", i, j)
    if len(set(C.filter_elements)) != len(C.filters):
        col.add("filter-elements-injective", len(C.filters))
    for (i, I), (j, J) in product(enumerate(C.ideals), repeat=2):
        if (I & ~J == 0) != E.le(C.ideal_elements[i], C.ideal_elements[j]):
            col.add("ideal-elements-order", i, j)
    if len(set(C.ideal_elements)) != len(C.ideals):
        col.add("ideal-elements-injective", len(C.ideals))
    iso = check_homomorphism(A, E, emb, require_bijective=True)
    out = col.report().merged(iso, check_density(C), check_compactness(C), check_residuation(E))
    for i, t in A.box:
        if pi_extend_map(C, t) != E.box_tab(i):
            out = out.merged(CheckReport.build([("box-smooth", (i,))]))
    for i, t in A.dia:
        if pi_extend_map(C, t) != E.dia_tab(i):
            out = out.merged(CheckReport.build([("dia-smooth", (i,))]))
    return out.merged(name="completion")


def check_canonicity(A: Algebra, s: Sequent | str) -> CheckReport:
    """If ``A`` satisfies ``s``, check that its canonical extension does too."""
    s = as_sequent(s)
    if A.ldiv is None:
        A = derive_residuals(A)
    notes = [FINITE_CANONICITY_NOTE]
    base = check_inequation(A, s)
    if not base:
        notes.append("premise false: the base algebra does not satisfy the sequent")
        return CheckReport.build((), notes, name="canonicity")
    C = canonical_extension(A)
    ext = check_inequation(C.extension, s)
    viol = [] if ext else [("extension-fails", ext.counterexample)]
    return CheckReport.build(viol, notes, name="canonicity")
