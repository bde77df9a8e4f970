"""Enumeration of finite frames, factored into independent components.

A frame is split into its *base* ``(O, ≤, R)``, a box relation and a dia
relation. Conditions 2 to 6 only involve the base, condition 1 and the box
half of condition 7 involve base and box, and the dia half of condition 7
involves only the order and the dia relation. The frame space is therefore
the disjoint union over bases of ``boxes(base) × dias(order)``.

Stream order: world count, then ``O`` (increasing mask), then the order,
then ``R`` (depth-first over product-table cells), then box, then dia. Box
and dia relations are ordered by their row code ``Σ rows[w] << (n·w)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product
from typing import Iterator, Sequence

from .frames import Frame, bits, mask_of
from .report import BudgetExceeded, default_budget
from .syntax import DEFAULT_INDEX


# ---------------------------------------------------------------------------
# posets

@dataclass(frozen=True)
class Poset:
    n: int
    up: tuple[int, ...]      # up[i]: worlds above i (including i)

    @property
    def leq(self) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for a in range(self.n) for b in bits(self.up[a]))

    @property
    def down(self) -> tuple[int, ...]:
        out = [0] * self.n
        for a in range(self.n):
            for b in bits(self.up[a]):
                out[b] |= 1 << a
        return tuple(out)

    def is_upset(self, m: int) -> bool:
        return all(self.up[i] & ~m == 0 for i in bits(m))

    @property
    def upsets(self) -> tuple[int, ...]:
        return tuple(m for m in range(1 << self.n) if self.is_upset(m))

    def pairs(self) -> list[tuple[int, int]]:
        """Strictly comparable pairs (a < b)."""
        return [(a, b) for a in range(self.n) for b in bits(self.up[a]) if a != b]


@lru_cache(maxsize=None)
def posets(n: int) -> tuple[Poset, ...]:
    """All partial orders on ``n`` labeled points, by increasing off-diagonal code."""
    off = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = []
    for code in range(1 << len(off)):
        up = [1 << a for a in range(n)]
        for k, (a, b) in enumerate(off):
            if code >> k & 1:
                up[a] |= 1 << b
        ok = True
        for a in range(n):
            for b in bits(up[a]):
                if b != a and up[b] >> a & 1:
                    ok = False
                if up[b] & ~up[a]:
                    ok = False
            if not ok:
                break
        if ok:
            out.append(Poset(n, tuple(up)))
    return tuple(out)


# ---------------------------------------------------------------------------
# bases

# Materialising every base is affordable up to three worlds (1000 bases);
# four worlds is only reachable as a lazy stream.
MAX_ENUMERATION_WORLDS = 3


def _check_worlds(n: int) -> None:
    if n > MAX_ENUMERATION_WORLDS:
        raise BudgetExceeded(f"materialised enumeration is limited to {MAX_ENUMERATION_WORLDS} worlds",
                             {"requested": n})


@dataclass(frozen=True)
class Base:
    """``(O, ≤, R)`` with ``R`` stored as the product table ``T[u][v] = {w | R u v w}``."""

    poset: Poset
    O: int
    T: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.poset.n

    @property
    def R(self) -> frozenset[tuple[int, int, int]]:
        n = self.n
        return frozenset((u, v, w) for u in range(n) for v in range(n) for w in bits(self.T[u][v]))

    def set_product(self, X: int, Y: int) -> int:
        out = 0
        for x in bits(X):
            row = self.T[x]
            for y in bits(Y):
                out |= row[y]
        return out


def _associative(T: Sequence[Sequence[int]], n: int) -> bool:
    def sp(X: int, Y: int) -> int:
        out = 0
        for x in bits(X):
            for y in bits(Y):
                out |= T[x][y]
        return out

    for u in range(n):
        for w in range(n):
            left_first = T[u][w]
            for u2 in range(n):
                # ∃x (R u w x & R x u2 v) ⇔ ∃y (R w u2 y & R u y v)
                if sp(left_first, 1 << u2) != sp(1 << u, T[w][u2]):
                    return False
    return True


def _associative_so_far(T: Sequence[Sequence[int]], n: int) -> bool:
    """Associativity on every triple whose cells are all assigned (-1 marks a free cell)."""
    for a in range(n):
        for b in range(n):
            ab = T[a][b]
            if ab < 0:
                continue
            for c in range(n):
                bc = T[b][c]
                if bc < 0:
                    continue
                left = right = 0
                for x in bits(ab):
                    t = T[x][c]
                    if t < 0:
                        break
                    left |= t
                else:
                    for y in bits(bc):
                        t = T[a][y]
                        if t < 0:
                            break
                        right |= t
                    else:
                        if left != right:
                            return False
    return True


def _bases_for(P: Poset, O: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    n = P.n
    ups = P.upsets
    cells = [(u, v) for u in range(n) for v in range(n)]
    T = [[-1] * n for _ in range(n)]
    down = P.down
    Ow = bits(O)

    def fits(u: int, v: int, m: int) -> bool:
        # antitone in both arguments against assigned comparable cells
        for u2 in range(n):
            if u2 == u:
                continue
            t = T[u2][v]
            if t < 0:
                continue
            if down[u] >> u2 & 1 and m & ~t:      # u2 ≤ u needs T[u2][v] ⊇ T[u][v]
                return False
            if down[u2] >> u & 1 and t & ~m:      # u ≤ u2
                return False
        for v2 in range(n):
            if v2 == v:
                continue
            t = T[u][v2]
            if t < 0:
                continue
            if down[v] >> v2 & 1 and m & ~t:
                return False
            if down[v2] >> v & 1 and t & ~m:
                return False
        # condition 5 bounds R u o ⊆ ↑u; with condition 4 also R o v ⊆ ↑v
        if O >> v & 1 and m & ~P.up[u]:
            return False
        if O >> u & 1 and m & ~P.up[v]:
            return False
        # condition 4: units commute
        if (O >> u & 1 or O >> v & 1) and T[v][u] >= 0 and T[v][u] != m:
            return False
        return True

    def unit_row(u: int) -> bool:
        acc = 0
        for o in Ow:
            acc |= T[u][o]
        return acc == P.up[u]

    def rec(k: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if k == len(cells):
            if _associative(T, n):
                yield tuple(tuple(row) for row in T)
            return
        u, v = cells[k]
        for m in ups:
            if fits(u, v, m):
                T[u][v] = m
                # cells run row by row, so condition 5 for u is decided once its row is full
                if (v < n - 1 or unit_row(u)) and _associative_so_far(T, n):
                    yield from rec(k + 1)
                T[u][v] = -1

    yield from rec(0)


def iter_bases(n: int) -> Iterator[Base]:
    """Bases on ``n`` labeled worlds satisfying conditions 2 to 6, lazily."""
    for O in range(1, 1 << n):
        for P in posets(n):
            if not P.is_upset(O):
                continue
            for T in _bases_for(P, O):
                yield Base(P, O, T)


@lru_cache(maxsize=None)
def bases(n: int) -> tuple[Base, ...]:
    """All bases on ``n`` labeled worlds, materialised (``n`` ≤ 3)."""
    _check_worlds(n)
    return tuple(iter_bases(n))


# ---------------------------------------------------------------------------
# modal relations

def row_code(rows: Sequence[int], n: int) -> int:
    return sum(r << (n * w) for w, r in enumerate(rows))


def rows_of(code: int, n: int) -> tuple[int, ...]:
    full = (1 << n) - 1
    return tuple((code >> (n * w)) & full for w in range(n))


@lru_cache(maxsize=None)
def dia_relations(P: Poset) -> tuple[tuple[int, ...], ...]:
    """Dia relations with ``u ≤ v ⇒ R◇(u) ⊆ R◇(v)``, as row tuples."""
    n = P.n
    pairs = P.pairs()
    out = []
    for code in range(1 << (n * n)):
        rows = rows_of(code, n)
        if all(rows[a] & ~rows[b] == 0 for a, b in pairs):
            out.append(rows)
    return tuple(out)


@lru_cache(maxsize=None)
def _antitone_rows(P: Poset) -> tuple[tuple[int, ...], ...]:
    n = P.n
    pairs = P.pairs()
    out = []
    for code in range(1 << (n * n)):
        rows = rows_of(code, n)
        if all(rows[b] & ~rows[a] == 0 for a, b in pairs):
            out.append(rows)
    return tuple(out)


def box_admissible(base: Base, rows: Sequence[int]) -> bool:
    """Condition 1 for a box relation: ``R□(w) ⊆ R□(u)∘R□(v)`` whenever ``R u v w``."""
    n = base.n
    for u in range(n):
        for v in range(n):
            need = base.T[u][v]
            if not need:
                continue
            avail = base.set_product(rows[u], rows[v])
            for w in bits(need):
                if rows[w] & ~avail:
                    return False
    return True


@lru_cache(maxsize=None)
def box_relations(base: Base) -> tuple[tuple[int, ...], ...]:
    """Box relations satisfying conditions 1 and 7 over ``base``, as row tuples."""
    return tuple(rows for rows in _antitone_rows(base.poset) if box_admissible(base, rows))


# ---------------------------------------------------------------------------
# frames

def build_frame(base: Base, box: Sequence[int] | Sequence[Sequence[int]],
                dia: Sequence[int] | Sequence[Sequence[int]],
                modalities: Sequence[str] = (DEFAULT_INDEX,)) -> Frame:
    """Assemble a frame; with several modalities pass one row tuple per index."""
    n = base.n
    if len(modalities) == 1 and box and isinstance(box[0], int):
        box, dia = [box], [dia]

    def rel(rows: Sequence[int]) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for a in range(n) for b in bits(rows[a]))

    return Frame(tuple(f"w{i}" for i in range(n)), base.poset.leq, base.R, frozenset(bits(base.O)),
                 tuple((i, rel(b)) for i, b in zip(modalities, box)),
                 tuple((i, rel(d)) for i, d in zip(modalities, dia)))


@dataclass(frozen=True)
class SearchConfig:
    max_worlds: int = 3
    max_valuations: int = field(default_factory=default_budget)
    dedup_iso: bool = False
    formula_universe_depth: int = 2
    modalities: tuple[str, ...] = (DEFAULT_INDEX,)
    min_worlds: int = 1

    def __post_init__(self):
        if self.max_worlds < 1 or self.min_worlds < 1:
            raise ValueError("max_worlds must be at least 1")
        if self.max_valuations <= 0:
            raise ValueError("budgets must be positive")
        if self.formula_universe_depth < 0:
            raise ValueError("formula_universe_depth must be non-negative")
        if not self.modalities:
            raise ValueError("at least one modal index is required")


def count_frames(n: int, modalities: int = 1) -> int:
    """Number of labeled frames on exactly ``n`` worlds."""
    _check_worlds(n)
    return sum(len(box_relations(b)) ** modalities * len(dia_relations(b.poset)) ** modalities
               for b in bases(n))


def enumerate_frames(cfg: SearchConfig) -> Iterator[Frame]:
    """Every frame with at most ``cfg.max_worlds`` worlds passing the frame conditions.

    With ``dedup_iso`` only the first frame of each isomorphism class is
    yielded (classes are keyed by a canonical relabeling).
    """
    k = len(cfg.modalities)
    for n in range(cfg.min_worlds, cfg.max_worlds + 1):
        seen: set = set()
        for base in (bases(n) if n <= MAX_ENUMERATION_WORLDS else iter_bases(n)):
            bx = box_relations(base)
            dx = dia_relations(base.poset)
            for boxes in product(bx, repeat=k):
                for dias in product(dx, repeat=k):
                    if cfg.dedup_iso:
                        key = canonical_key(base, boxes, dias)
                        if key in seen:
                            continue
                        seen.add(key)
                    yield build_frame(base, list(boxes), list(dias), cfg.modalities)


def _encode(n: int, up: Sequence[int], O: int, T, boxes, dias) -> tuple:
    return (O, tuple(up), tuple(map(tuple, T)), tuple(map(tuple, boxes)), tuple(map(tuple, dias)))


def _permute_mask(m: int, perm: Sequence[int]) -> int:
    return mask_of(perm[i] for i in bits(m))


def permute_components(n: int, perm: Sequence[int], up, O, T, boxes, dias) -> tuple:
    """Relabel factored components along ``perm`` (old world -> new world)."""
    pm = lambda m: _permute_mask(m, perm)
    up2 = [0] * n
    T2 = [[0] * n for _ in range(n)]
    for a in range(n):
        up2[perm[a]] = pm(up[a])
        for b in range(n):
            T2[perm[a]][perm[b]] = pm(T[a][b])
    box2 = []
    for rows in boxes:
        r = [0] * n
        for a in range(n):
            r[perm[a]] = pm(rows[a])
        box2.append(tuple(r))
    dia2 = []
    for rows in dias:
        r = [0] * n
        for a in range(n):
            r[perm[a]] = pm(rows[a])
        dia2.append(tuple(r))
    return tuple(up2), pm(O), tuple(map(tuple, T2)), tuple(box2), tuple(dia2)


def canonical_key(base: Base, boxes, dias) -> tuple:
    n = base.n
    best = None
    for perm in permutations(range(n)):
        comp = permute_components(n, perm, base.poset.up, base.O, base.T, boxes, dias)
        key = _encode(n, *comp)
        if best is None or key < best:
            best = key
    return best


def base_key(base: Base) -> tuple:
    return (base.O, base.poset.up, base.T)


@lru_cache(maxsize=None)
def representative_bases(n: int) -> tuple[int, ...]:
    """Indices into ``bases(n)`` of one base per isomorphism class.

    Every frame is isomorphic to a frame whose base is one of these, so an
    isomorphism-invariant property holds on all frames iff it holds on all
    frames over representative bases.
    """
    index = {base_key(b): k for k, b in enumerate(bases(n))}
    reps = []
    seen = set()
    for k, b in enumerate(bases(n)):
        if k in seen:
            continue
        reps.append(k)
        for perm in permutations(range(n)):
            up2, O2, T2, _, _ = permute_components(n, perm, b.poset.up, b.O, b.T, (), ())
            seen.add(index[(O2, up2, T2)])
    return tuple(reps)


def base_automorphisms(base: Base) -> list[tuple[int, ...]]:
    n = base.n
    key = base_key(base)
    out = []
    for perm in permutations(range(n)):
        up2, O2, T2, _, _ = permute_components(n, perm, base.poset.up, base.O, base.T, (), ())
        if (O2, up2, T2) == key:
            out.append(perm)
    return out


# ---------------------------------------------------------------------------
# small lattices

def lattices(max_size: int, distributive_only: bool = True) -> list[tuple[int, tuple[int, ...]]]:
    """Bounded lattices with at most ``max_size`` elements, one per isomorphism class.

    Each is ``(k, up)`` with element 0 the bottom and ``k-1`` the top; the
    middle elements range over all partial orders.
    """
    from .algebra import check_lattice, make_algebra

    out = []
    for k in range(1, max_size + 1):
        seen = set()
        if k <= 2:
            mids = [Poset(0, ())]
        else:
            mids = list(posets(k - 2))
        for mid in mids:
            up = [0] * k
            up[0] = (1 << k) - 1
            if k > 1:
                up[k - 1] = 1 << (k - 1)
            for a in range(mid.n):
                up[a + 1] = (mid.up[a] << 1) | (1 << (k - 1))
            leq = [(a, b) for a in range(k) for b in bits(up[a])]
            A = make_algebra([str(i) for i in range(k)], leq, [[0] * k] * k, 0)
            rep = check_lattice(A)
            if not rep.passed and (distributive_only or rep.failed_conditions() - {"distributivity"}):
                continue
            key = min(tuple(sorted(_permute_mask(up[a], perm) for a in range(k)))
                      for perm in permutations(range(k)) if perm[0] == 0 and perm[k - 1] == k - 1) \
                if k > 1 else (1,)
            if key in seen:
                continue
            seen.add(key)
            out.append((k, tuple(up)))
    return out
