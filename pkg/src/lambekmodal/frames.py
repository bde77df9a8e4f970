"""Finite ternary Kripke frames and models.

Worlds are stored as indices ``0..n-1`` with display names alongside; sets of
worlds are handled internally as integer bitmasks (bit ``i`` is world ``i``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

from .report import BudgetExceeded, CheckReport, PreconditionError, _Collector, default_budget
from .syntax import (DEFAULT_INDEX, And, Atom, Bot, Box, Dia, Formula, LDiv, Mul, Or, RDiv,
                     Sequent, Top, Unit, as_formula, as_sequent, atoms, subformulas)

Rel2 = frozenset[tuple[int, int]]
Rel3 = frozenset[tuple[int, int, int]]


class UnknownAtomWarning(UserWarning):
    pass


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class Frame:
    """⟨W, ≤, R, R□, R◇, O⟩ with one box and one dia relation per modal index."""

    worlds: tuple[str, ...]
    leq: Rel2
    R: Rel3
    O: frozenset[int]
    box: tuple[tuple[str, Rel2], ...] = ((DEFAULT_INDEX, frozenset()),)
    dia: tuple[tuple[str, Rel2], ...] = ((DEFAULT_INDEX, frozenset()),)

    @property
    def n(self) -> int:
        return len(self.worlds)

    @property
    def modalities(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.box)

    def box_rel(self, index: str = DEFAULT_INDEX) -> Rel2:
        for i, rel in self.box:
            if i == index:
                return rel
        raise KeyError(f"frame has no box relation for modal index {index!r}")

    def dia_rel(self, index: str = DEFAULT_INDEX) -> Rel2:
        for i, rel in self.dia:
            if i == index:
                return rel
        raise KeyError(f"frame has no dia relation for modal index {index!r}")

    # derived bitmask views -------------------------------------------------
    @cached_property
    def full(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def up(self) -> tuple[int, ...]:
        """``up[i]`` is the mask of worlds above ``i``."""
        out = [0] * self.n
        for a, b in self.leq:
            out[a] |= 1 << b
        return tuple(out)

    @cached_property
    def down(self) -> tuple[int, ...]:
        out = [0] * self.n
        for a, b in self.leq:
            out[b] |= 1 << a
        return tuple(out)

    @cached_property
    def O_mask(self) -> int:
        return mask_of(self.O)

    @cached_property
    def product_table(self) -> tuple[tuple[int, ...], ...]:
        """``product_table[u][v]`` is the mask of w with R u v w."""
        t = [[0] * self.n for _ in range(self.n)]
        for u, v, w in self.R:
            t[u][v] |= 1 << w
        return tuple(tuple(row) for row in t)

    @cached_property
    def box_succ(self) -> dict[str, tuple[int, ...]]:
        return {i: _successors(self.n, rel) for i, rel in self.box}

    @cached_property
    def dia_succ(self) -> dict[str, tuple[int, ...]]:
        return {i: _successors(self.n, rel) for i, rel in self.dia}

    def is_upset(self, mask: int) -> bool:
        return all(self.up[i] & ~mask == 0 for i in bits(mask))

    def up_closure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    @cached_property
    def upsets(self) -> tuple[int, ...]:
        """All upsets as masks, in increasing integer order."""
        if self.n > 20:
            raise BudgetExceeded(f"refusing to list upsets of a {self.n}-world frame")
        return tuple(m for m in range(1 << self.n) if self.is_upset(m))

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.worlds[i] for i in bits(mask))

    def index_of(self, world: str | int) -> int:
        if isinstance(world, int):
            if not 0 <= world < self.n:
                raise ValueError(f"world index {world} out of range")
            return world
        try:
            return self.worlds.index(world)
        except ValueError:
            raise ValueError(f"unknown world {world!r}") from None

    def mask(self, worlds: Iterable[str | int]) -> int:
        return mask_of(self.index_of(w) for w in worlds)


def _successors(n: int, rel: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    out = [0] * n
    for a, b in rel:
        out[a] |= 1 << b
    return tuple(out)


def make_frame(worlds: Sequence[str] | int, leq: Iterable, R: Iterable, O: Iterable,
               box: Mapping[str, Iterable] | Iterable | None = None,
               dia: Mapping[str, Iterable] | Iterable | None = None) -> Frame:
    """Build a frame from world names (or a count) and relations over names or indices.

    A ``box``/``dia`` argument that is not a mapping is taken as the
    relation of the default modal index.
    """
    names = tuple(f"w{i}" for i in range(worlds)) if isinstance(worlds, int) else tuple(map(str, worlds))
    if len(set(names)) != len(names):
        raise ValueError("duplicate world names")
    lookup = {nm: i for i, nm in enumerate(names)}

    def idx(x) -> int:
        if isinstance(x, int) and not isinstance(x, bool):
            if not 0 <= x < len(names):
                raise ValueError(f"world index {x} out of range")
            return x
        if x not in lookup:
            raise ValueError(f"unknown world {x!r}")
        return lookup[x]

    def modal(arg) -> tuple[tuple[str, Rel2], ...] | None:
        if arg is None:
            return None
        if not isinstance(arg, Mapping):
            arg = {DEFAULT_INDEX: arg}
        return tuple((str(i), frozenset((idx(a), idx(b)) for a, b in rel)) for i, rel in arg.items())

    bx = modal(box)
    dx = modal(dia)
    if bx is None and dx is None:
        bx = dx = ((DEFAULT_INDEX, frozenset()),)
    elif bx is None:
        bx = tuple((i, frozenset()) for i, _ in dx)
    elif dx is None:
        dx = tuple((i, frozenset()) for i, _ in bx)
    return Frame(names,
                 frozenset((idx(a), idx(b)) for a, b in leq),
                 frozenset((idx(a), idx(b), idx(c)) for a, b, c in R),
                 frozenset(idx(o) for o in O), bx, dx)


# ---------------------------------------------------------------------------
# frame conditions

CONDITIONS = {
    "box-product": 1, "associativity": 2, "monotonicity": 3, "unit-commutation": 4,
    "unit-order": 5, "unit-upset": 6, "box-persistence": 7, "dia-persistence": 7,
}


def check_order(F: Frame, col: _Collector) -> bool:
    n = F.n
    ok = True
    for a in range(n):
        if (a, a) not in F.leq:
            col.add("order-reflexive", F.worlds[a])
            ok = False
    for a, b in sorted(F.leq):
        if a != b and (b, a) in F.leq and a < b:
            col.add("order-antisymmetric", F.worlds[a], F.worlds[b])
            ok = False
        for c in range(n):
            if (b, c) in F.leq and (a, c) not in F.leq:
                col.add("order-transitive", F.worlds[a], F.worlds[b], F.worlds[c])
                ok = False
    return ok


def validate_frame(F: Frame, limit: int | None = 20) -> CheckReport:
    """Exhaustively check the order axioms and the seven frame conditions.

    Each violation carries world names as its witness; modal conditions
    carry the modal index first. At most ``limit`` witnesses are kept per
    condition id.
    """
    col = _Collector(limit)
    if {i for i, _ in F.box} != {i for i, _ in F.dia} or len(F.box) != len({i for i, _ in F.box}):
        col.add("modalities", tuple(i for i, _ in F.box), tuple(i for i, _ in F.dia))
    check_order(F, col)
    W, nm = range(F.n), F.worlds
    Rset, leq, O = F.R, F.leq, F.O

    for i, rel in F.box:
        for (u, v, w) in sorted(Rset):
            for w2 in W:
                if (w, w2) not in rel:
                    continue
                if not any((x, y, w2) in Rset and (u, x) in rel and (v, y) in rel
                           for x in W for y in W):
                    col.add("box-product", i, nm[u], nm[v], nm[w], nm[w2])

    # associativity: ∃x (R u w x & R x u2 v2) ⇔ ∃y (R w u2 y & R u y v2)
    for u, w, u2, v2 in product(W, repeat=4):
        left = any((u, w, x) in Rset and (x, u2, v2) in Rset for x in W)
        right = any((w, u2, y) in Rset and (u, y, v2) in Rset for y in W)
        if left != right:
            col.add("associativity", nm[u], nm[w], nm[u2], nm[v2])

    for (u, v, w) in sorted(Rset):
        for x in W:
            if (x, u) in leq and (x, v, w) not in Rset:
                col.add("monotonicity", "first", nm[u], nm[v], nm[w], nm[x])
            if (x, v) in leq and (u, x, w) not in Rset:
                col.add("monotonicity", "second", nm[u], nm[v], nm[w], nm[x])
            if (w, x) in leq and (u, v, x) not in Rset:
                col.add("monotonicity", "third", nm[u], nm[v], nm[w], nm[x])

    for o in sorted(O):
        for v, w in product(W, repeat=2):
            if ((v, o, w) in Rset) != ((o, v, w) in Rset):
                col.add("unit-commutation", nm[o], nm[v], nm[w])

    for v, w in product(W, repeat=2):
        if ((v, w) in leq) != any((v, o, w) in Rset for o in O):
            col.add("unit-order", nm[v], nm[w])

    for o in sorted(O):
        for x in W:
            if (o, x) in leq and x not in O:
                col.add("unit-upset", nm[o], nm[x])

    for i, rel in F.box:
        for (u, v) in sorted(leq):
            for w in W:
                if (v, w) in rel and (u, w) not in rel:
                    col.add("box-persistence", i, nm[u], nm[v], nm[w])
    for i, rel in F.dia:
        for (u, v) in sorted(leq):
            for w in W:
                if (u, w) in rel and (v, w) not in rel:
                    col.add("dia-persistence", i, nm[u], nm[v], nm[w])
    return col.report("frame")


# ---------------------------------------------------------------------------
# models and evaluation

@dataclass(frozen=True)
class Model:
    frame: Frame
    valuation: tuple[tuple[str, int], ...]   # atom name -> world mask, sorted by name

    def value(self, atom: str) -> int | None:
        for name, m in self.valuation:
            if name == atom:
                return m
        return None

    @property
    def masks(self) -> dict[str, int]:
        return dict(self.valuation)


def make_model(F: Frame, valuation: Mapping[str, Iterable[str | int] | int]) -> Model:
    """Valuation values may be world collections or ready-made masks."""
    items = []
    for name, val in valuation.items():
        m = val if isinstance(val, int) and not isinstance(val, bool) else F.mask(val)
        if m & ~F.full:
            raise ValueError(f"valuation of {name!r} mentions worlds outside the frame")
        items.append((str(name), m))
    return Model(F, tuple(sorted(items)))


def validate_model(M: Model) -> CheckReport:
    col = _Collector()
    F = M.frame
    for name, m in M.valuation:
        for a in bits(m):
            for b in bits(F.up[a] & ~m):
                col.add("valuation-upset", name, F.worlds[a], F.worlds[b])
    return col.report("model")


def evaluate_mask(F: Frame, masks: Mapping[str, int], f: Formula,
                  memo: dict[Formula, int] | None = None, warn: bool = True) -> int:
    """Truth set of ``f`` as a bitmask, by the semantic clauses.

    Atoms missing from ``masks`` are false everywhere.
    """
    memo = {} if memo is None else memo
    n = F.n
    W = range(n)
    pt = F.product_table
    for g in subformulas(f):
        if g in memo:
            continue
        if isinstance(g, Atom):
            if g.name not in masks:
                if warn:
                    warnings.warn(f"atom {g.name!r} has no valuation; treated as empty",
                                  UnknownAtomWarning, stacklevel=3)
                val = 0
            else:
                val = masks[g.name]
        elif isinstance(g, Top):
            val = F.full
        elif isinstance(g, Bot):
            val = 0
        elif isinstance(g, Unit):
            val = F.O_mask
        elif isinstance(g, Mul):
            A, B = memo[g.l], memo[g.r]
            val = 0
            for u in bits(A):
                for v in bits(B):
                    val |= pt[u][v]
        elif isinstance(g, LDiv):
            # w ⊨ φ\ψ iff for all u,v: R u w v and u ⊨ φ imply v ⊨ ψ
            A, B = memo[g.l], memo[g.r]
            val = 0
            for w in W:
                if all(pt[u][w] & ~B == 0 for u in bits(A)):
                    val |= 1 << w
        elif isinstance(g, RDiv):
            # w ⊨ ψ/φ iff for all u,v: R w u v and u ⊨ φ imply v ⊨ ψ
            B, A = memo[g.l], memo[g.r]
            val = 0
            for w in W:
                if all(pt[w][u] & ~B == 0 for u in bits(A)):
                    val |= 1 << w
        elif isinstance(g, And):
            val = memo[g.l] & memo[g.r]
        elif isinstance(g, Or):
            val = memo[g.l] | memo[g.r]
        elif isinstance(g, Box):
            succ = _modal_rows(F.box_succ, g.index, "box")
            A = memo[g.arg]
            val = mask_of(w for w in W if succ[w] & ~A == 0)
        elif isinstance(g, Dia):
            succ = _modal_rows(F.dia_succ, g.index, "dia")
            A = memo[g.arg]
            val = mask_of(w for w in W if succ[w] & A)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = val
    return memo[f]


def _modal_rows(table: dict[str, tuple[int, ...]], index: str, kind: str) -> tuple[int, ...]:
    if index not in table:
        raise KeyError(f"frame has no {kind} relation for modal index {index!r}")
    return table[index]


class PersistenceError(ValueError):
    pass


def truth_mask(M: Model, f: Formula | str) -> int:
    f = as_formula(f)
    val = evaluate_mask(M.frame, M.masks, f)
    if not M.frame.is_upset(val):
        raise PersistenceError(f"truth set of {f} is not an upset; the frame violates its conditions")
    return val


def truth_set(M: Model, f: Formula | str) -> frozenset[str]:
    """Worlds (by name) where ``f`` holds."""
    return M.frame.names(truth_mask(M, f))


def holds(M: Model, s: Sequent | str) -> bool:
    s = as_sequent(s)
    memo: dict[Formula, int] = {}
    lhs = evaluate_mask(M.frame, M.masks, s.lhs, memo)
    rhs = evaluate_mask(M.frame, M.masks, s.rhs, memo)
    return lhs & ~rhs == 0


@dataclass(frozen=True)
class Validity:
    """Verdict of an exhaustive validity check; falsy when a counterexample exists.

    ``counterexample`` maps atoms to world names (frames) or to elements
    (algebras), in the order the atoms were enumerated.
    """

    valid: bool
    counterexample: tuple[tuple[str, object], ...] | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.valid

    @property
    def assignment(self) -> dict[str, object] | None:
        return None if self.counterexample is None else dict(self.counterexample)


def frame_valid(F: Frame, s: Sequent | str, budget: int | None = None) -> Validity:
    """Check ``s`` under every valuation of its atoms into upsets.

    Valuations are enumerated as the product over the sorted atom names,
    the first atom varying slowest, each ranging over upsets in increasing
    mask order. The first failing valuation is returned.
    """
    s = as_sequent(s)
    names = sorted(atoms(s))
    ups = F.upsets
    total = len(ups) ** len(names)
    budget = default_budget() if budget is None else budget
    if total > budget:
        raise BudgetExceeded(f"{total} valuations exceed the budget of {budget}",
                             {"valuations": total, "budget": budget})
    checked = 0
    for choice in product(ups, repeat=len(names)):
        masks = dict(zip(names, choice))
        memo: dict[Formula, int] = {}
        lhs = evaluate_mask(F, masks, s.lhs, memo, warn=False)
        rhs = evaluate_mask(F, masks, s.rhs, memo, warn=False)
        checked += 1
        if lhs & ~rhs:
            return Validity(False, tuple((a, F.names(m)) for a, m in masks.items()), checked)
    return Validity(True, None, checked)


# ---------------------------------------------------------------------------
# bounded morphisms

def _as_map(F1: Frame, F2: Frame, f: Mapping | Sequence) -> list[int]:
    if isinstance(f, Mapping):
        out = [-1] * F1.n
        for a, b in f.items():
            out[F1.index_of(a)] = F2.index_of(b)
        if -1 in out:
            raise ValueError("map is not total")
        return out
    out = [F2.index_of(b) for b in f]
    if len(out) != F1.n:
        raise ValueError("map is not total")
    return out


def is_bounded_morphism(F1: Frame, F2: Frame, f: Mapping | Sequence, limit: int | None = 20) -> CheckReport:
    """Check monotonicity and the six bounded-morphism conditions.

    The back conditions use the order relaxations in the direction
    ``v' ≤ f(v)``, ``f(w) ≤ w'`` exactly as stated for this calculus.
    """
    col = _Collector(limit)
    g = _as_map(F1, F2, f)
    n1, n2 = F1.n, F2.n
    W1, W2 = range(n1), range(n2)
    a1, a2 = F1.worlds, F2.worlds
    R1, R2, leq2 = F1.R, F2.R, F2.leq

    for x, y in sorted(F1.leq):
        if (g[x], g[y]) not in leq2:
            col.add("monotone", a1[x], a1[y])
    for u, v, w in sorted(R1):
        if (g[u], g[v], g[w]) not in R2:
            col.add("forth", a1[u], a1[v], a1[w])
    for u in W1:
        for v2, w2 in product(W2, repeat=2):
            if (g[u], v2, w2) in R2 and not any(
                    (v2, g[v]) in leq2 and (g[w], w2) in leq2 and (u, v, w) in R1
                    for v in W1 for w in W1):
                col.add("back-first", a1[u], a2[v2], a2[w2])
    for v in W1:
        for u2, w2 in product(W2, repeat=2):
            if (u2, g[v], w2) in R2 and not any(
                    (u2, g[u]) in leq2 and (g[w], w2) in leq2 and (u, v, w) in R1
                    for u in W1 for w in W1):
                col.add("back-second", a1[v], a2[u2], a2[w2])
    for w in W1:
        for u2, v2 in product(W2, repeat=2):
            if (u2, v2, g[w]) in R2 and not any(
                    (u2, g[u]) in leq2 and (v2, g[v]) in leq2 and (u, v, w) in R1
                    for u in W1 for v in W1):
                col.add("back-third", a1[w], a2[u2], a2[v2])
    for kind, rels1, succ2 in (("box", F1.box, F2.box_succ), ("dia", F1.dia, F2.dia_succ)):
        for i, rel in rels1:
            if i not in succ2:
                col.add("modal-image", kind, i, "missing in target")
                continue
            for x in W1:
                image = mask_of(g[y] for y in W1 if (x, y) in rel)
                if image != succ2[i][g[x]]:
                    col.add("modal-image", kind, i, a1[x])
    pre = mask_of(x for x in W1 if g[x] in F2.O)
    if pre != F1.O_mask:
        for x in bits(pre ^ F1.O_mask):
            col.add("unit-preimage", a1[x])
    return col.report("bounded-morphism")


def check_truth_preservation(M1: Model, M2: Model, f: Mapping | Sequence,
                             formulas: Iterable[Formula | str]) -> CheckReport:
    """Verify ``M1, w ⊨ φ ⇔ M2, f(w) ⊨ φ`` for each world and supplied formula.

    Raises :class:`PreconditionError` when ``f`` is not a bounded morphism
    or disagrees with the valuations on atoms.
    """
    F1, F2 = M1.frame, M2.frame
    g = _as_map(F1, F2, f)
    fs = [as_formula(x) for x in formulas]
    bm = is_bounded_morphism(F1, F2, g)
    if not bm.passed:
        raise PreconditionError("map is not a bounded morphism", bm)
    col = _Collector()
    names = sorted(set(M1.masks) | set(M2.masks) | {a for x in fs for a in atoms(x)})
    for a in names:
        m1, m2 = M1.masks.get(a, 0), M2.masks.get(a, 0)
        for w in range(F1.n):
            if bool(m1 >> w & 1) != bool(m2 >> g[w] & 1):
                col.add("atom-agreement", a, F1.worlds[w])
    pre = col.report("truth-preservation")
    if not pre.passed:
        raise PreconditionError("map does not agree with the valuations on atoms", pre)
    memo1: dict[Formula, int] = {}
    memo2: dict[Formula, int] = {}
    for phi in fs:
        t1 = evaluate_mask(F1, M1.masks, phi, memo1, warn=False)
        t2 = evaluate_mask(F2, M2.masks, phi, memo2, warn=False)
        for w in range(F1.n):
            if bool(t1 >> w & 1) != bool(t2 >> g[w] & 1):
                col.add("preservation", str(phi), F1.worlds[w])
    return col.report("truth-preservation")


def image_model(M1: Model, F2: Frame, f: Sequence[int]) -> Model:
    """Pushforward valuation along a surjection, correct when atoms are saturated."""
    masks = {}
    for a, m in M1.valuation:
        masks[a] = mask_of(f[w] for w in bits(m))
    return Model(F2, tuple(sorted(masks.items())))
