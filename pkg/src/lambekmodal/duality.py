"""Discrete duality between finite frames and finite RDMAs, its prime-filter
form, and isomorphism certification.

Orientation used throughout (``A`` an algebra, J its join-irreducibles):

* the dual frame orders J by the reverse of A's order;
* ``R x y z`` iff ``z ≤ x·y``;
* ``O = {j | j ≤ ε}``;
* ``x R□ y`` iff ``□κ(y) ≤ κ(x)`` and ``x R◇ y`` iff ``x ≤ ◇y``.

With these choices ``a ↦ {j ∈ J | j ≤ a}`` is an isomorphism onto the
complex algebra of the dual frame, and ``j ↦ ↑j`` is an isomorphism onto the
prime filter space.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product
from typing import Iterable, Mapping, Sequence

from .algebra import (Algebra, check_algebra, check_lattice, derive_residuals, join_irreducibles,
                      kappa, prime_filters, set_product)
from .frames import Frame, _as_map, bits, is_bounded_morphism, mask_of, validate_frame
from .report import BudgetExceeded, CheckReport, PreconditionError, _Collector


def upset_name(F: Frame, mask: int) -> str:
    return "{" + ",".join(F.worlds[i] for i in bits(mask)) + "}"


# ---------------------------------------------------------------------------
# frame -> algebra

def complex_operations(F: Frame, ups: Sequence[int]) -> dict:
    """Operation tables of the upset algebra as masks, keyed by operation name."""
    n, pt = F.n, F.product_table
    W = range(n)

    def prod(A: int, B: int) -> int:
        out = 0
        for u in bits(A):
            for v in bits(B):
                out |= pt[u][v]
        return out

    def ldiv(A: int, B: int) -> int:
        return mask_of(w for w in W if all(pt[u][w] & ~B == 0 for u in bits(A)))

    def rdiv(B: int, A: int) -> int:
        return mask_of(w for w in W if all(pt[w][u] & ~B == 0 for u in bits(A)))

    ops = {
        "mul": {(a, b): prod(a, b) for a in ups for b in ups},
        "ldiv": {(a, b): ldiv(a, b) for a in ups for b in ups},
        "rdiv": {(a, b): rdiv(a, b) for a in ups for b in ups},
        "box": {i: {a: mask_of(w for w in W if s[w] & ~a == 0) for a in ups}
                for i, s in F.box_succ.items()},
        "dia": {i: {a: mask_of(w for w in W if s[w] & a) for a in ups}
                for i, s in F.dia_succ.items()},
    }
    return ops


def complex_algebra(F: Frame, check: bool = True) -> Algebra:
    """The algebra of upsets of ``F`` with the frame-induced operations.

    Residuals are computed by their quantifier formulas and compared with
    the residuals derived from the product; a mismatch raises.
    """
    if check:
        rep = validate_frame(F, limit=1)
        if not rep.passed:
            raise PreconditionError("frame fails its conditions", rep)
    ups = list(F.upsets)
    pos = {m: k for k, m in enumerate(ups)}
    ops = complex_operations(F, ups)

    def look(m: int, what: str) -> int:
        if m not in pos:
            raise PreconditionError(f"{what} produced a set that is not an upset: {upset_name(F, m)}")
        return pos[m]

    k = len(ups)
    tab = {name: tuple(tuple(look(ops[name][ups[a], ups[b]], name) for b in range(k)) for a in range(k))
           for name in ("mul", "ldiv", "rdiv")}
    box = tuple((i, tuple(look(t[u], "box") for u in ups)) for i, t in ops["box"].items())
    dia = tuple((i, tuple(look(t[u], "dia") for u in ups)) for i, t in ops["dia"].items())
    leq = frozenset((a, b) for a in range(k) for b in range(k) if ups[a] & ~ups[b] == 0)
    A = Algebra(tuple(upset_name(F, m) for m in ups), leq, tab["mul"], look(F.O_mask, "unit"),
                box, dia, tab["ldiv"], tab["rdiv"])
    if check:
        derived = derive_residuals(replace(A, ldiv=None, rdiv=None))
        if derived.ldiv != A.ldiv or derived.rdiv != A.rdiv:
            raise AssertionError("quantifier residuals differ from derived residuals")
    return A


def clopen_upset_algebra(X: Frame, check: bool = True) -> Algebra:
    """Clopen upsets of a finite (hence discrete) space: every upset is clopen,
    so this is the complex algebra."""
    return complex_algebra(X, check)


def space_conditions(X: Frame) -> CheckReport:
    """Topological side conditions of a modal ordered space on a finite carrier."""
    return CheckReport.build((), [
        "Priestley separation: holds trivially (finite)",
        "clopen preservation by the relations: holds trivially (finite)",
        "closedness of relation images: holds trivially (finite)",
    ], name="space")


# ---------------------------------------------------------------------------
# algebra -> frame

def _require_algebra(A: Algebra) -> Algebra:
    B = A if A.ldiv is not None else derive_residuals(A)
    rep = check_algebra(B)
    if not rep.passed:
        raise PreconditionError("algebra fails its checks", rep)
    return B


def dual_relations(A: Algebra, J: Sequence[int]) -> dict:
    """Relations of the dual frame over positions in ``J``."""
    kap = {j: kappa(A, j) for j in J}
    le, mul = A.le, A.mul
    pos = range(len(J))
    return {
        "leq": frozenset((a, b) for a in pos for b in pos if le(J[b], J[a])),
        "R": frozenset((a, b, c) for a in pos for b in pos for c in pos if le(J[c], mul[J[a]][J[b]])),
        "O": frozenset(a for a in pos if le(J[a], A.eps)),
        "box": tuple((i, frozenset((a, b) for a in pos for b in pos if le(t[kap[J[b]]], kap[J[a]])))
                     for i, t in A.box),
        "dia": tuple((i, frozenset((a, b) for a in pos for b in pos if le(J[a], t[J[b]])))
                     for i, t in A.dia),
    }


def dual_frame(A: Algebra, check: bool = True) -> Frame:
    """Frame on the join-irreducibles of ``A`` (see module docstring)."""
    if check:
        A = _require_algebra(A)
    J = join_irreducibles(A)
    rel = dual_relations(A, J)
    return Frame(tuple(A.elements[j] for j in J), rel["leq"], rel["R"], rel["O"], rel["box"], rel["dia"])


def literal_box_relation(A: Algebra, J: Sequence[int], index: str) -> frozenset[tuple[int, int]]:
    """``x R□ y`` iff ``□κ(x) ≤ κ(y)``: the argument order as printed, kept for comparison."""
    t = A.box_tab(index)
    pos = range(len(J))
    return frozenset((a, b) for a in pos for b in pos if A.le(t[kappa(A, J[a])], kappa(A, J[b])))


def raney_map(A: Algebra) -> list[int]:
    """``η(a)`` as a mask over positions in ``join_irreducibles(A)``."""
    J = join_irreducibles(A)
    return [mask_of(k for k, j in enumerate(J) if A.le(j, a)) for a in range(A.n)]


def raney_check(A: Algebra) -> CheckReport:
    """η is an isomorphism onto the complex algebra of the dual frame."""
    A = _require_algebra(A)
    D = dual_frame(A, check=False)
    C = complex_algebra(D, check=False)
    eta = raney_map(A)
    pos = {m: k for k, m in enumerate(D.upsets)}
    col = _Collector()
    e = A.elements
    image = []
    for a in range(A.n):
        if eta[a] not in pos:
            col.add("eta-upset", e[a])
            image.append(-1)
        else:
            image.append(pos[eta[a]])
    if col.items:
        return col.report("raney")
    rep = check_homomorphism(A, C, image, require_bijective=True)
    return rep.merged(name="raney")


# ---------------------------------------------------------------------------
# prime filter space

def filter_name(A: Algebra, mask: int) -> str:
    gen = A._least(mask)
    return f"up({A.elements[gen]})" if gen is not None else "{" + ",".join(A.elements[i] for i in bits(mask)) + "}"


def prime_filter_space(A: Algebra, check: bool = True) -> Frame:
    """Frame of proper prime filters ordered by inclusion.

    ``R(X, Y, Z)`` iff ``X•Y ⊆ Z``; ``X R□ Y`` iff ``□a ∈ X`` implies
    ``a ∈ Y``; ``X R◇ Y`` iff ``b ∈ Y`` implies ``◇b ∈ X``; the unit set is
    the primes containing ε.
    """
    if check:
        A = _require_algebra(A)
    P = [F.mask for F in prime_filters(A)]
    pos = range(len(P))
    bullet = {(x, y): A.up_closure(set_product(A, P[x], P[y])) for x in pos for y in pos}
    R = frozenset((x, y, z) for x in pos for y in pos for z in pos if bullet[x, y] & ~P[z] == 0)
    leq = frozenset((x, y) for x in pos for y in pos if P[x] & ~P[y] == 0)
    O = frozenset(x for x in pos if P[x] >> A.eps & 1)
    box = tuple((i, frozenset((x, y) for x in pos for y in pos
                              if all(P[y] >> a & 1 for a in range(A.n) if P[x] >> t[a] & 1)))
                for i, t in A.box)
    dia = tuple((i, frozenset((x, y) for x in pos for y in pos
                              if all(P[x] >> t[b] & 1 for b in bits(P[y]))))
                for i, t in A.dia)
    return Frame(tuple(filter_name(A, m) for m in P), leq, R, O, box, dia)


def check_modal_agreement(A: Algebra) -> CheckReport:
    """Compare the irreducible-based and prime-filter-based relations under j ↦ ↑j.

    Every relation of :func:`dual_frame` must coincide with its
    prime-filter counterpart. The argument order of the box relation as
    printed (``□κ(x) ≤ κ(y)``) is compared too; its disagreements go into
    the notes and do not fail the report.
    """
    A = _require_algebra(A)
    J = join_irreducibles(A)
    P = [F.mask for F in prime_filters(A)]
    col = _Collector()
    e = A.elements
    to_filter = []
    for j in J:
        if A.up[j] not in P:
            col.add("prime-is-principal", e[j])
            to_filter.append(-1)
        else:
            to_filter.append(P.index(A.up[j]))
    if len(P) != len(J):
        col.add("prime-count", len(P), len(J))
    if col.items:
        return col.report("modal-agreement")
    D = dual_frame(A, check=False)
    X = prime_filter_space(A, check=False)
    g = to_filter
    k = len(J)
    pairs = [(a, b) for a in range(k) for b in range(k)]
    for name, r1, r2 in (("order", D.leq, X.leq),):
        for a, b in pairs:
            if ((a, b) in r1) != ((g[a], g[b]) in r2):
                col.add(name, e[J[a]], e[J[b]])
    for a, b, c in product(range(k), repeat=3):
        if ((a, b, c) in D.R) != ((g[a], g[b], g[c]) in X.R):
            col.add("ternary", e[J[a]], e[J[b]], e[J[c]])
    for a in range(k):
        if (a in D.O) != (g[a] in X.O):
            col.add("unit", e[J[a]])
    for kind, rels1, frame2 in (("box", D.box, X), ("dia", D.dia, X)):
        for i, r1 in rels1:
            r2 = frame2.box_rel(i) if kind == "box" else frame2.dia_rel(i)
            for a, b in pairs:
                if ((a, b) in r1) != ((g[a], g[b]) in r2):
                    col.add(kind, i, e[J[a]], e[J[b]])
    for i, diff in printed_box_disagreements(A).items():
        a, b = diff[0]
        col.note(f"box[{i}]: printed argument order disagrees with the prime-filter relation "
                 f"on {len(diff)} pair(s), first ({e[a]}, {e[b]})")
    return col.report("modal-agreement")


def printed_box_disagreements(A: Algebra) -> dict[str, list[tuple[int, int]]]:
    """Pairs of join-irreducibles (element indices) on which ``□κ(x) ≤ κ(y)``
    and the prime-filter box relation under ``j ↦ ↑j`` differ, by modal index.

    Indices without a disagreement are left out.
    """
    A = _require_algebra(A)
    J = join_irreducibles(A)
    P = [F.mask for F in prime_filters(A)]
    if any(A.up[j] not in P for j in J):
        raise PreconditionError("some prime filter is not principal on a join-irreducible")
    g = [P.index(A.up[j]) for j in J]
    X = prime_filter_space(A, check=False)
    pairs = [(a, b) for a in range(len(J)) for b in range(len(J))]
    out = {}
    for i, _ in A.box:
        lit = literal_box_relation(A, J, i)
        rel = X.box_rel(i)
        diff = [(J[a], J[b]) for a, b in pairs if ((a, b) in lit) != ((g[a], g[b]) in rel)]
        if diff:
            out[i] = diff
    return out


# ---------------------------------------------------------------------------
# homomorphisms

def check_homomorphism(A: Algebra, B: Algebra, h: Sequence[int], require_bijective: bool = False) -> CheckReport:
    """``h`` (element indices A → B) preserves all operations and the order.

    With ``require_bijective`` the map must also be a bijection that
    reflects the order, i.e. an isomorphism.
    """
    col = _Collector(5)
    e = A.elements
    n = A.n
    if len(h) != n or any(not 0 <= x < B.n for x in h):
        col.add("total", tuple(h))
        return col.report("homomorphism")
    for a, b in product(range(n), repeat=2):
        if B.meet[h[a]][h[b]] != h[A.meet[a][b]]:
            col.add("meet", e[a], e[b])
        if B.join[h[a]][h[b]] != h[A.join[a][b]]:
            col.add("join", e[a], e[b])
        if B.mul[h[a]][h[b]] != h[A.mul[a][b]]:
            col.add("mul", e[a], e[b])
        if A.ldiv is not None and B.ldiv is not None and B.ldiv[h[a]][h[b]] != h[A.ldiv[a][b]]:
            col.add("ldiv", e[a], e[b])
        if A.rdiv is not None and B.rdiv is not None and B.rdiv[h[a]][h[b]] != h[A.rdiv[a][b]]:
            col.add("rdiv", e[a], e[b])
        if A.le(a, b) and not B.le(h[a], h[b]):
            col.add("order", e[a], e[b])
        if require_bijective and B.le(h[a], h[b]) and not A.le(a, b):
            col.add("order-reflect", e[a], e[b])
    if h[A.bottom] != B.bottom:
        col.add("bottom")
    if h[A.top] != B.top:
        col.add("top")
    if h[A.eps] != B.eps:
        col.add("eps")
    bm, dm = dict(B.box), dict(B.dia)
    for kind, tabs, other in (("box", A.box, bm), ("dia", A.dia, dm)):
        for i, t in tabs:
            if i not in other:
                col.add(kind, i, "missing")
                continue
            for a in range(n):
                if other[i][h[a]] != h[t[a]]:
                    col.add(kind, i, e[a])
    if require_bijective and (len(set(h)) != n or B.n != n):
        col.add("bijective", tuple(h))
    return col.report("homomorphism")


@dataclass(frozen=True)
class AlgebraHom:
    table: tuple[int, ...]
    report: CheckReport


def dual_of_frame_morphism(F1: Frame, F2: Frame, f: Mapping | Sequence) -> AlgebraHom:
    """Preimage map from the upsets of ``F2`` to the upsets of ``F1``, verified
    to be a homomorphism of the complex algebras."""
    g = _as_map(F1, F2, f)
    bm = is_bounded_morphism(F1, F2, g)
    if not bm.passed:
        raise PreconditionError("map is not a bounded morphism", bm)
    A1, A2 = complex_algebra(F1, check=False), complex_algebra(F2, check=False)
    pos1 = {m: k for k, m in enumerate(F1.upsets)}
    col = _Collector()
    table = []
    for k, m in enumerate(F2.upsets):
        pre = mask_of(w for w in range(F1.n) if m >> g[w] & 1)
        if pre not in pos1:
            col.add("preimage-upset", A2.elements[k])
            table.append(-1)
        else:
            table.append(pos1[pre])
    rep = col.report("frame-morphism-dual")
    if rep.passed:
        rep = check_homomorphism(A2, A1, table).merged(name="frame-morphism-dual")
        if len(set(g)) == F2.n and len(set(table)) != len(table):
            rep = rep.merged(CheckReport.build([("injective", tuple(table))]))
    return AlgebraHom(tuple(table), rep)


# ---------------------------------------------------------------------------
# isomorphism search

@dataclass(frozen=True)
class FrameIso:
    forward: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.forward)

    def to_json(self) -> dict:
        return {"forward": self.as_dict()}


@dataclass(frozen=True)
class AlgebraIso:
    forward: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.forward)

    def to_json(self) -> dict:
        return {"forward": self.as_dict()}


ISO_WORLD_LIMIT = 12


def _world_invariants(F: Frame) -> list[tuple]:
    n = F.n
    inv = []
    for w in range(n):
        r = [0, 0, 0]
        for t in F.R:
            for k in range(3):
                if t[k] == w:
                    r[k] += 1
        modal = tuple((i, len([1 for a, b in rel if a == w]), len([1 for a, b in rel if b == w]))
                      for i, rel in sorted(F.box + tuple(("dia:" + i, rel) for i, rel in F.dia)))
        inv.append((w in F.O, bin(F.up[w]).count("1"), bin(F.down[w]).count("1"), tuple(r),
                    (w, w, w) in F.R, modal))
    return inv


def check_frame_iso(F1: Frame, F2: Frame, limit: int = ISO_WORLD_LIMIT) -> FrameIso | None:
    """Search for an isomorphism; ``None`` certifies that none exists."""
    if max(F1.n, F2.n) > limit:
        raise BudgetExceeded(f"isomorphism search limited to {limit} worlds")
    if F1.n != F2.n or sorted(F1.modalities) != sorted(F2.modalities) \
            or sorted(i for i, _ in F1.dia) != sorted(i for i, _ in F2.dia):
        return None
    if len(F1.leq) != len(F2.leq) or len(F1.R) != len(F2.R) or len(F1.O) != len(F2.O):
        return None
    n = F1.n
    inv1, inv2 = _world_invariants(F1), _world_invariants(F2)
    if sorted(inv1) != sorted(inv2):
        return None
    rels1 = [F1.leq] + [F1.box_rel(i) for i in F1.modalities] + [F1.dia_rel(i) for i in F1.modalities]
    rels2 = [F2.leq] + [F2.box_rel(i) for i in F1.modalities] + [F2.dia_rel(i) for i in F1.modalities]
    order = sorted(range(n), key=lambda w: (sum(1 for v in range(n) if inv1[v] == inv1[w]), w))
    g = [-1] * n
    used = [False] * n

    def consistent(k: int) -> bool:
        w = order[k]
        done = order[:k + 1]
        for r1, r2 in zip(rels1, rels2):
            for v in done:
                if ((w, v) in r1) != ((g[w], g[v]) in r2) or ((v, w) in r1) != ((g[v], g[w]) in r2):
                    return False
        for a in done:
            for b in done:
                if w not in (a, b):
                    if ((a, b, w) in F1.R) != ((g[a], g[b], g[w]) in F2.R):
                        return False
                    continue
                for c in done:
                    if ((a, b, c) in F1.R) != ((g[a], g[b], g[c]) in F2.R):
                        return False
        return True

    def search(k: int) -> bool:
        if k == n:
            return True
        w = order[k]
        for x in range(n):
            if used[x] or inv2[x] != inv1[w]:
                continue
            g[w], used[x] = x, True
            if consistent(k) and search(k + 1):
                return True
            g[w], used[x] = -1, False
        return False

    if not search(0):
        return None
    if not _is_frame_iso(F1, F2, g):
        raise AssertionError("isomorphism search returned an uncertified map")
    return FrameIso(tuple((F1.worlds[w], F2.worlds[g[w]]) for w in range(n)))


def _is_frame_iso(F1: Frame, F2: Frame, g: Sequence[int]) -> bool:
    if sorted(g) != list(range(F2.n)):
        return False
    img2 = lambda rel: frozenset((g[a], g[b]) for a, b in rel)
    if img2(F1.leq) != F2.leq or frozenset(g[o] for o in F1.O) != F2.O:
        return False
    if frozenset((g[a], g[b], g[c]) for a, b, c in F1.R) != F2.R:
        return False
    return all(img2(F1.box_rel(i)) == F2.box_rel(i) and img2(F1.dia_rel(i)) == F2.dia_rel(i)
               for i in F1.modalities)


def check_algebra_iso(A1: Algebra, A2: Algebra) -> AlgebraIso | None:
    """Search bijections of join-irreducibles that preserve and reflect the
    order, extend each by joins, and certify the extension."""
    for A in (A1, A2):
        if not check_lattice(A).passed:
            raise PreconditionError("isomorphism search needs distributive lattices")
    if A1.n != A2.n or sorted(A1.modalities) != sorted(A2.modalities):
        return None
    J1, J2 = join_irreducibles(A1), join_irreducibles(A2)
    if len(J1) != len(J2):
        return None
    k = len(J1)

    def level(A: Algebra, j: int) -> tuple[int, int]:
        return (bin(A.down[j]).count("1"), bin(A.up[j]).count("1"))

    lv1 = [level(A1, j) for j in J1]
    lv2 = [level(A2, j) for j in J2]
    gm = [-1] * k
    used = [False] * k
    e1, e2 = A1.elements, A2.elements

    def extend() -> list[int] | None:
        h = []
        for a in range(A1.n):
            acc = A2.bottom
            for t, j in enumerate(J1):
                if A1.le(j, a):
                    acc = A2.join[acc][J2[gm[t]]]
            h.append(acc)
        if len(set(h)) != A1.n:
            return None
        return h

    def search(t: int) -> list[int] | None:
        if t == k:
            h = extend()
            if h is not None and check_homomorphism(A1, A2, h, require_bijective=True).passed:
                return h
            return None
        for x in range(k):
            if used[x] or lv1[t] != lv2[x]:
                continue
            if any(A1.le(J1[t], J1[s]) != A2.le(J2[x], J2[gm[s]]) or
                   A1.le(J1[s], J1[t]) != A2.le(J2[gm[s]], J2[x]) for s in range(t)):
                continue
            gm[t], used[x] = x, True
            h = search(t + 1)
            if h is not None:
                return h
            gm[t], used[x] = -1, False
        return None

    h = search(0)
    if h is None:
        return None
    return AlgebraIso(tuple((e1[a], e2[h[a]]) for a in range(A1.n)))


# ---------------------------------------------------------------------------
# round trips and closure

def frame_closure(F: Frame) -> Frame:
    """Replace each box row by its up-closure and each dia row by its down-closure.

    The complex algebra only sees these closures, so ``F`` and its closure
    have the same complex algebra.
    """
    n = F.n
    box = tuple((i, frozenset((a, b) for a in range(n) for b in bits(F.up_closure(s[a]))))
                for i, s in F.box_succ.items())
    down = F.down

    def dclose(m: int) -> int:
        out = 0
        for x in bits(m):
            out |= down[x]
        return out

    dia = tuple((i, frozenset((a, b) for a in range(n) for b in bits(dclose(s[a]))))
                for i, s in F.dia_succ.items())
    return Frame(F.worlds, F.leq, F.R, F.O, box, dia)


def is_closed_frame(F: Frame) -> bool:
    return frame_closure(F) == F


def frame_round_trip(F: Frame) -> FrameIso | None:
    return check_frame_iso(F, dual_frame(complex_algebra(F, check=False), check=False))


def algebra_round_trip(A: Algebra) -> AlgebraIso | None:
    A = _require_algebra(A)
    return check_algebra_iso(A, complex_algebra(dual_frame(A, check=False), check=False))


def relabel(F: Frame, perm: Sequence[int], names: Iterable[str] | None = None) -> Frame:
    """Image of ``F`` under the world permutation ``perm`` (old index -> new index)."""
    n = F.n
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    worlds = tuple(names) if names is not None else tuple(F.worlds[inv[k]] for k in range(n))
    r2 = lambda rel: frozenset((perm[a], perm[b]) for a, b in rel)
    return Frame(worlds, r2(F.leq), frozenset((perm[a], perm[b], perm[c]) for a, b, c in F.R),
                 frozenset(perm[o] for o in F.O),
                 tuple((i, r2(rel)) for i, rel in F.box), tuple((i, r2(rel)) for i, rel in F.dia))
