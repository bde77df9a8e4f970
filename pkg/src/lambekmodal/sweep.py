"""Exhaustive checks over the factored frame space.

Every frame is a base plus one box and one dia relation (see
:mod:`lambekmodal.enumeration`). For a fixed base all box relations and all
dia relations are processed at once:

* :class:`BitsetEvaluator` computes truth sets by the semantic clauses, with
  the valuations of a sequent packed into uint64 words. Arrays have shape
  ``(boxes, dias, worlds, words)`` where either leading axis may be 1 when
  a formula does not depend on that relation.
* :class:`TableEvaluator` evaluates terms in a finite algebra by table
  lookup, one algebra per (box table, dia table) pair, again vectorised.

The two evaluators share no code. Per-frame verdicts are exact; nothing is
sampled.

Isomorphism questions factor the same way: candidates are the bijections
that respect the base, and each box (dia) component keeps the subset of
candidates that also respects it. A frame passes iff the two subsets meet.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .algebra import Algebra, join_irreducibles
from .enumeration import MAX_ENUMERATION_WORLDS, Base, bases, box_relations, dia_relations, iter_bases
from .frames import Frame, bits
from .report import CheckReport
from .syntax import (And, Atom, Bot, Box, DEFAULT_INDEX, Dia, Formula, LDiv, Mul, Or, RDiv, Sequent,
                     Top, Unit, as_sequent, atoms, print_sequent, subformulas)

ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
MAX_SWEEP_VALUATIONS = 1 << 12


def _single_index(f: Formula) -> None:
    if isinstance(f, (Box, Dia)) and f.index != DEFAULT_INDEX:
        raise ValueError(f"the sweep engine is monomodal; got modal index {f.index!r}")


# ---------------------------------------------------------------------------
# one base with all of its modal relations

@dataclass
class Slice:
    """A base together with every admissible box and dia relation."""

    position: int
    base: Base
    boxes: tuple[tuple[int, ...], ...]
    dias: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def count(self) -> int:
        return len(self.boxes) * len(self.dias)

    @property
    def width(self) -> int:
        return max(len(self.boxes), len(self.dias))

    @staticmethod
    def index_name(k: int) -> str:
        return f"m{k}"

    def _rel(self, rows: Sequence[int]) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for a in range(self.n) for b in bits(rows[a]))

    def _frame(self, box, dia) -> Frame:
        b = self.base
        return Frame(tuple(f"w{i}" for i in range(b.n)), b.poset.leq, b.R, frozenset(bits(b.O)), box, dia)

    def frame(self, b: int, d: int) -> Frame:
        """The monomodal frame with box relation ``b`` and dia relation ``d``."""
        return self._frame(((DEFAULT_INDEX, self._rel(self.boxes[b])),),
                           ((DEFAULT_INDEX, self._rel(self.dias[d])),))

    def polymodal(self) -> Frame:
        """One frame carrying every relation: index ``m<k>`` has box ``k`` and dia ``k``.

        The shorter list is padded with its last entry so both index sets agree.
        """
        K = self.width
        bx = tuple((self.index_name(k), self._rel(self.boxes[min(k, len(self.boxes) - 1)])) for k in range(K))
        dx = tuple((self.index_name(k), self._rel(self.dias[min(k, len(self.dias) - 1)])) for k in range(K))
        return self._frame(bx, dx)

    @property
    def box_names(self) -> list[str]:
        return [self.index_name(k) for k in range(len(self.boxes))]

    @property
    def dia_names(self) -> list[str]:
        return [self.index_name(k) for k in range(len(self.dias))]


def slices(n: int) -> Iterator[Slice]:
    source = bases(n) if n <= MAX_ENUMERATION_WORLDS else iter_bases(n)
    for k, b in enumerate(source):
        yield Slice(k, b, box_relations(b), dia_relations(b.poset))


def all_slices(max_worlds: int, min_worlds: int = 1) -> Iterator[Slice]:
    for n in range(min_worlds, max_worlds + 1):
        yield from slices(n)


# ---------------------------------------------------------------------------
# semantic route

def _pack(bools: np.ndarray) -> np.ndarray:
    """Pack a boolean vector into little-endian uint64 words."""
    nw = max(1, -(-bools.shape[-1] // 64))
    pad = np.zeros(bools.shape[:-1] + (nw * 64,), dtype=np.uint64)
    pad[..., :bools.shape[-1]] = bools
    shifts = np.arange(64, dtype=np.uint64)
    return np.bitwise_or.reduce(pad.reshape(bools.shape[:-1] + (nw, 64)) << shifts, axis=-1)


class BitsetEvaluator:
    """Truth sets over all box/dia relations of a base and all valuations of ``names``.

    Valuation ``k`` assigns atom ``names[i]`` the upset with digit
    ``(k // m**(len-1-i)) % m``, upsets in increasing mask order: the same
    order :func:`lambekmodal.frames.frame_valid` uses.
    """

    def __init__(self, sl: Slice, names: Sequence[str]):
        n = sl.n
        self.slice = sl
        self.n = n
        self.T = sl.base.T
        ups = np.array(sl.base.poset.upsets, dtype=np.int64)
        m = len(ups)
        self.names = list(names)
        self.nval = m ** len(self.names)
        if self.nval > MAX_SWEEP_VALUATIONS:
            raise ValueError(f"{self.nval} valuations per frame exceed the sweep limit")
        idx = np.arange(self.nval)
        self.atom_bits = {}
        for i, a in enumerate(self.names):
            digit = (idx // m ** (len(self.names) - 1 - i)) % m
            masks = ups[digit]
            world_bools = np.stack([(masks >> w) & 1 for w in range(n)]).astype(bool)
            self.atom_bits[a] = _pack(world_bools)[None, None]
        self.valid = _pack(np.ones(self.nval, dtype=bool))
        nw = self.valid.shape[0]
        self.nw = nw
        self.ones = np.full((1, 1, n, nw), ALL, dtype=np.uint64)
        unit = np.zeros((1, 1, n, nw), dtype=np.uint64)
        for o in bits(sl.base.O):
            unit[0, 0, o] = ALL
        self.unit = unit

        def rowsel(rows_list):
            arr = np.zeros((len(rows_list), n, n), dtype=bool)
            for k, rows in enumerate(rows_list):
                for w in range(n):
                    for v in bits(rows[w]):
                        arr[k, w, v] = True
            return arr

        bsel = rowsel(sl.boxes)
        dsel = rowsel(sl.dias)
        self.box_miss = np.where(bsel, np.uint64(0), ALL)[:, None, :, :, None]
        self.dia_hit = np.where(dsel, ALL, np.uint64(0))[None, :, :, :, None]

    def truth(self, f: Formula, memo: dict | None = None) -> np.ndarray:
        memo = {} if memo is None else memo
        n, T = self.n, self.T
        for g in subformulas(f):
            if g in memo:
                continue
            _single_index(g)
            if isinstance(g, Atom):
                val = self.atom_bits.get(g.name)
                if val is None:
                    val = np.zeros((1, 1, n, self.nw), dtype=np.uint64)
            elif isinstance(g, Top):
                val = self.ones
            elif isinstance(g, Bot):
                val = np.zeros_like(self.ones)
            elif isinstance(g, Unit):
                val = self.unit
            elif isinstance(g, (And, Or)):
                A, B = memo[g.l], memo[g.r]
                val = A & B if isinstance(g, And) else A | B
            elif isinstance(g, Mul):
                A, B = memo[g.l], memo[g.r]
                val = np.zeros(np.broadcast_shapes(A.shape, B.shape), dtype=np.uint64)
                for u in range(n):
                    for v in range(n):
                        if T[u][v]:
                            both = A[:, :, u] & B[:, :, v]
                            for w in bits(T[u][v]):
                                val[:, :, w] |= both
            elif isinstance(g, LDiv):
                # w ⊨ A\B iff for all u, v with R u w v: u ∈ A implies v ∈ B
                A, B = memo[g.l], memo[g.r]
                val = np.full(np.broadcast_shapes(A.shape, B.shape), ALL, dtype=np.uint64)
                for u in range(n):
                    for w in range(n):
                        for v in bits(T[u][w]):
                            val[:, :, w] &= ~A[:, :, u] | B[:, :, v]
            elif isinstance(g, RDiv):
                # w ⊨ B/A iff for all u, v with R w u v: u ∈ A implies v ∈ B
                B, A = memo[g.l], memo[g.r]
                val = np.full(np.broadcast_shapes(A.shape, B.shape), ALL, dtype=np.uint64)
                for w in range(n):
                    for u in range(n):
                        for v in bits(T[w][u]):
                            val[:, :, w] &= ~A[:, :, u] | B[:, :, v]
            elif isinstance(g, Box):
                A = memo[g.arg]
                val = None
                for v in range(n):
                    part = A[:, :, v:v + 1] | self.box_miss[:, :, :, v]
                    val = part if val is None else val & part
            elif isinstance(g, Dia):
                A = memo[g.arg]
                val = None
                for v in range(n):
                    part = A[:, :, v:v + 1] & self.dia_hit[:, :, :, v]
                    val = part if val is None else val | part
            else:
                raise TypeError(f"not a formula: {g!r}")
            memo[g] = val
        return memo[f]

    def violations(self, s: Sequent, memo: dict | None = None) -> np.ndarray:
        """Per-frame bitset of failing valuations, shape ``(boxes, dias, words)``."""
        memo = {} if memo is None else memo
        L = self.truth(s.lhs, memo)
        R = self.truth(s.rhs, memo)
        bad = np.bitwise_or.reduce(L & ~R, axis=2) & self.valid
        return np.broadcast_to(bad, (len(self.slice.boxes), len(self.slice.dias), self.nw))

    def valid_frames(self, s: Sequent, memo: dict | None = None) -> np.ndarray:
        """Boolean ``(boxes, dias)`` array: does the frame validate ``s``?"""
        return ~np.any(self.violations(s, memo), axis=-1)

    def first_failing_valuation(self, s: Sequent, b: int, d: int) -> int | None:
        bad = self.violations(s)[b, d]
        for k, word in enumerate(bad.tolist()):
            if word:
                return 64 * k + (int(word) & -int(word)).bit_length() - 1
        return None


# ---------------------------------------------------------------------------
# algebraic route

class TableEvaluator:
    """Term values in one algebra per (box, dia) table pair, for every assignment.

    Assignment ``k`` gives atom ``names[i]`` the element with digit
    ``(k // m**(len-1-i)) % m`` in carrier order, matching
    :func:`lambekmodal.algebra.check_inequation`.
    """

    def __init__(self, A: Algebra, box_indices: Sequence[str], dia_indices: Sequence[str],
                 names: Sequence[str]):
        m = A.n
        self.m = m
        self.le = np.zeros((m, m), dtype=bool)
        for a, b in A.leq:
            self.le[a, b] = True
        arr = lambda t: np.array(t, dtype=np.int16)
        self.meet, self.join, self.mul = arr(A.meet), arr(A.join), arr(A.mul)
        self.ldiv, self.rdiv = arr(A.ldiv), arr(A.rdiv)
        self.top, self.bottom, self.eps = A.top, A.bottom, A.eps
        self.box = arr([A.box_tab(i) for i in box_indices])
        self.dia = arr([A.dia_tab(i) for i in dia_indices])
        self.nb, self.nd = len(box_indices), len(dia_indices)
        self.names = list(names)
        self.nval = m ** len(self.names)
        if self.nval > MAX_SWEEP_VALUATIONS:
            raise ValueError(f"{self.nval} assignments per algebra exceed the sweep limit")
        idx = np.arange(self.nval)
        self.atom_vals = {a: ((idx // m ** (len(self.names) - 1 - i)) % m).astype(np.int16)[None, None]
                          for i, a in enumerate(self.names)}
        self.bidx = np.arange(self.nb)[:, None, None]
        self.didx = np.arange(self.nd)[None, :, None]

    def value(self, f: Formula, memo: dict | None = None) -> np.ndarray:
        memo = {} if memo is None else memo
        const = lambda c: np.full((1, 1, self.nval), c, dtype=np.int16)
        for g in subformulas(f):
            if g in memo:
                continue
            _single_index(g)
            if isinstance(g, Atom):
                if g.name not in self.atom_vals:
                    raise KeyError(f"no assignment for atom {g.name!r}")
                val = self.atom_vals[g.name]
            elif isinstance(g, Top):
                val = const(self.top)
            elif isinstance(g, Bot):
                val = const(self.bottom)
            elif isinstance(g, Unit):
                val = const(self.eps)
            elif isinstance(g, Mul):
                val = self.mul[memo[g.l], memo[g.r]]
            elif isinstance(g, LDiv):
                val = self.ldiv[memo[g.l], memo[g.r]]
            elif isinstance(g, RDiv):
                val = self.rdiv[memo[g.l], memo[g.r]]
            elif isinstance(g, And):
                val = self.meet[memo[g.l], memo[g.r]]
            elif isinstance(g, Or):
                val = self.join[memo[g.l], memo[g.r]]
            elif isinstance(g, Box):
                val = self.box[self.bidx, memo[g.arg]]
            elif isinstance(g, Dia):
                val = self.dia[self.didx, memo[g.arg]]
            else:
                raise TypeError(f"not a formula: {g!r}")
            memo[g] = val
        return memo[f]

    def holds(self, s: Sequent, memo: dict | None = None) -> np.ndarray:
        """Boolean ``(boxes, dias)`` array: does ``lhs ≤ rhs`` hold for all assignments?"""
        memo = {} if memo is None else memo
        ok = self.le[self.value(s.lhs, memo), self.value(s.rhs, memo)].all(axis=-1)
        return np.broadcast_to(ok, (self.nb, self.nd))


# ---------------------------------------------------------------------------
# results

@dataclass
class SweepResult:
    """Outcome of an exhaustive check: how many items were checked, how many failed,
    and the first failure in enumeration order."""

    name: str
    checked: int = 0
    failures: int = 0
    first: dict | None = None
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def fail(self, count: int, witness: Callable[[], dict]) -> None:
        if count and self.first is None:
            self.first = witness()
        self.failures += count

    def report(self) -> CheckReport:
        viol = [] if self.passed else [(self.name, (self.failures, self.first))]
        notes = [f"checked {self.checked}", *self.notes]
        return CheckReport.build(viol, notes, name=self.name)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked, "failures": self.failures,
                "first": self.first, "seconds": round(self.seconds, 3), "notes": list(self.notes)}

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f"; first failure: {self.first}" if self.first else ""
        return f"{status} {self.name}: {self.failures} failure(s) out of {self.checked} ({self.seconds:.1f}s){tail}"


def frame_witness(sl: Slice, b: int, d: int) -> dict:
    from .io import frame_to_json
    return {"worlds": sl.n, "base": sl.position, "box": b, "dia": d, "frame": frame_to_json(sl.frame(b, d))}


def first_false(ok: np.ndarray) -> tuple[int, int] | None:
    bad = np.argwhere(~ok)
    return None if len(bad) == 0 else (int(bad[0][0]), int(bad[0][1]))


# ---------------------------------------------------------------------------
# sweeps

def validity_sweep(sequents: Iterable[Sequent | str], max_worlds: int = 3, name: str = "validity",
                   min_worlds: int = 1, progress: Callable[[Slice], None] | None = None) -> SweepResult:
    """Frame validity of every sequent on every frame with at most ``max_worlds`` worlds."""
    seqs = [as_sequent(s) for s in sequents]
    groups: dict[tuple[str, ...], list[Sequent]] = {}
    for s in seqs:
        groups.setdefault(tuple(sorted(atoms(s))), []).append(s)
    res = SweepResult(name)
    t0 = time.perf_counter()
    for sl in all_slices(max_worlds, min_worlds):
        for names, group in groups.items():
            ev = BitsetEvaluator(sl, names)
            memo: dict = {}
            for s in group:
                ok = ev.valid_frames(s, memo)
                res.checked += sl.count
                bad = int(sl.count - ok.sum())
                if bad:
                    b, d = first_false(ok)
                    k = ev.first_failing_valuation(s, b, d)
                    res.fail(bad, lambda: {"sequent": print_sequent(s), "valuation": k,
                                           **frame_witness(sl, b, d)})
        if progress:
            progress(sl)
    res.seconds = time.perf_counter() - t0
    return res


def complex_algebra_of(sl: Slice) -> Algebra:
    from .duality import complex_algebra
    return complex_algebra(sl.polymodal(), check=True)


def logic_equality_sweep(sequents: Iterable[Sequent | str], max_worlds: int = 3,
                         name: str = "frame-vs-algebra") -> SweepResult:
    """Frame validity equals validity in the complex algebra, frame by frame."""
    seqs = [as_sequent(s) for s in sequents]
    res = SweepResult(name)
    t0 = time.perf_counter()
    for sl in all_slices(max_worlds):
        A = complex_algebra_of(sl)
        for s in seqs:
            names = sorted(atoms(s))
            sem = BitsetEvaluator(sl, names).valid_frames(s)
            alg = TableEvaluator(A, sl.box_names, sl.dia_names, names).holds(s)
            res.checked += sl.count
            diff = sem != alg
            bad = int(diff.sum())
            if bad:
                b, d = first_false(~diff)
                res.fail(bad, lambda: {"sequent": print_sequent(s), "frame_valid": bool(sem[b, d]),
                                       "algebra": bool(alg[b, d]), **frame_witness(sl, b, d)})
    res.seconds = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# factored isomorphism

def frame_iso_candidates(F1: Frame, F2: Frame) -> list[tuple[int, ...]]:
    """Bijections ``W1 → W2`` preserving and reflecting order, ``R`` and ``O``."""
    n = F1.n
    if F2.n != n or len(F1.R) != len(F2.R) or len(F1.O) != len(F2.O) or len(F1.leq) != len(F2.leq):
        return []
    out = []
    for g in permutations(range(n)):
        if all((g[a], g[b]) in F2.leq for a, b in F1.leq) and \
           all((g[a], g[b], g[c]) in F2.R for a, b, c in F1.R) and \
           all(g[o] in F2.O for o in F1.O):
            out.append(g)
    return out


def frame_iso_masks(F1: Frame, F2: Frame, box_names: Sequence[str], dia_names: Sequence[str]):
    """Candidate masks per box index and per dia index."""
    cands = frame_iso_candidates(F1, F2)

    def masks(get1, get2, names):
        out = []
        for i in names:
            r1, r2 = get1(i), get2(i)
            out.append(sum(1 << c for c, g in enumerate(cands)
                           if len(r1) == len(r2) and all((g[a], g[b]) in r2 for a, b in r1)))
        return out

    return cands, masks(F1.box_rel, F2.box_rel, box_names), masks(F1.dia_rel, F2.dia_rel, dia_names)


def algebra_iso_candidates(A1: Algebra, A2: Algebra) -> list[tuple[int, ...]]:
    """Element bijections that are isomorphisms of the lattice-ordered monoids.

    Built as in :func:`lambekmodal.duality.check_algebra_iso`: every order
    isomorphism of the join-irreducibles, extended by joins, then certified.
    """
    if A1.n != A2.n:
        return []
    J1, J2 = join_irreducibles(A1), join_irreducibles(A2)
    if len(J1) != len(J2):
        return []
    out = []
    for img in permutations(J2):
        f = dict(zip(J1, img))
        if any(A1.le(a, b) != A2.le(f[a], f[b]) for a in J1 for b in J1):
            continue
        h = tuple(A2.join_of(sum(1 << f[j] for j in J1 if A1.le(j, a))) for a in range(A1.n))
        if len(set(h)) != A1.n:
            continue
        if any(A1.le(a, b) != A2.le(h[a], h[b]) for a in range(A1.n) for b in range(A1.n)):
            continue
        if h[A1.eps] != A2.eps:
            continue
        ok = True
        for t1, t2 in ((A1.mul, A2.mul), (A1.ldiv, A2.ldiv), (A1.rdiv, A2.rdiv)):
            if any(h[t1[a][b]] != t2[h[a]][h[b]] for a in range(A1.n) for b in range(A1.n)):
                ok = False
                break
        if ok:
            out.append(h)
    return out


def algebra_iso_masks(A1: Algebra, A2: Algebra, box_names: Sequence[str], dia_names: Sequence[str]):
    cands = algebra_iso_candidates(A1, A2)

    def masks(tab1, tab2, names):
        out = []
        for i in names:
            t1, t2 = tab1(i), tab2(i)
            out.append(sum(1 << c for c, h in enumerate(cands)
                           if all(h[t1[a]] == t2[h[a]] for a in range(A1.n))))
        return out

    return cands, masks(A1.box_tab, A2.box_tab, box_names), masks(A1.dia_tab, A2.dia_tab, dia_names)


def count_disjoint(box_masks: Sequence[int], dia_masks: Sequence[int]) -> tuple[int, tuple[int, int] | None]:
    """Number of (box, dia) pairs whose masks do not meet, and the first one."""
    cb, cd = Counter(box_masks), Counter(dia_masks)
    total = sum(x * y for mb, x in cb.items() for md, y in cd.items() if mb & md == 0)
    if not total:
        return 0, None
    dm = np.array(dia_masks, dtype=np.int64)
    for b, mb in enumerate(box_masks):
        hit = np.nonzero((dm & mb) == 0)[0]
        if len(hit):
            return total, (b, int(hit[0]))
    return total, None


def iso_sweep(name: str, pair: Callable[[Slice], tuple], kind: str, max_worlds: int = 3,
              min_worlds: int = 1) -> SweepResult:
    """Generic factored isomorphism sweep.

    ``pair(slice)`` returns the two polymodal objects to compare; ``kind`` is
    ``"frame"`` or ``"algebra"``.
    """
    res = SweepResult(name)
    t0 = time.perf_counter()
    masks_of = frame_iso_masks if kind == "frame" else algebra_iso_masks
    for sl in all_slices(max_worlds, min_worlds):
        X, Y = pair(sl)
        _, bm, dm = masks_of(X, Y, sl.box_names, sl.dia_names)
        res.checked += sl.count
        bad, first = count_disjoint(bm, dm)
        if bad:
            res.fail(bad, lambda: frame_witness(sl, *first))
    res.seconds = time.perf_counter() - t0
    return res
