"""Finite bounded distributive residuated modal algebras.

Elements are stored as indices into ``Algebra.elements``; all "first
witness" contracts follow that order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

from .frames import Validity, bits, mask_of
from .report import BudgetExceeded, CheckReport, _Collector, default_budget
from .syntax import (DEFAULT_INDEX, And, Atom, Bot, Box, Dia, Formula, LDiv, Mul, Or, RDiv,
                     Sequent, Top, Unit, as_formula, as_sequent, atoms, subformulas)

Table1 = tuple[int, ...]
Table2 = tuple[tuple[int, ...], ...]


class NotResiduated(ValueError):
    def __init__(self, message: str, witness: tuple):
        super().__init__(f"{message}: {witness}")
        self.witness = witness


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Algebra:
    elements: tuple[str, ...]
    leq: frozenset[tuple[int, int]]
    mul: Table2
    eps: int
    box: tuple[tuple[str, Table1], ...] = ()
    dia: tuple[tuple[str, Table1], ...] = ()
    ldiv: Table2 | None = None
    rdiv: Table2 | None = None

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def modalities(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.box)

    def box_tab(self, index: str = DEFAULT_INDEX) -> Table1:
        for i, t in self.box:
            if i == index:
                return t
        raise KeyError(f"algebra has no box table for modal index {index!r}")

    def dia_tab(self, index: str = DEFAULT_INDEX) -> Table1:
        for i, t in self.dia:
            if i == index:
                return t
        raise KeyError(f"algebra has no dia table for modal index {index!r}")

    def index_of(self, e: str | int) -> int:
        if isinstance(e, int) and not isinstance(e, bool):
            if not 0 <= e < self.n:
                raise ValueError(f"element index {e} out of range")
            return e
        try:
            return self.elements.index(e)
        except ValueError:
            raise ValueError(f"unknown element {e!r}") from None

    # order views -----------------------------------------------------------
    @cached_property
    def up(self) -> tuple[int, ...]:
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

    def le(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)

    def _greatest(self, mask: int) -> int | None:
        for c in bits(mask):
            if self.down[c] & mask == mask:
                return c
        return None

    def _least(self, mask: int) -> int | None:
        for c in bits(mask):
            if self.up[c] & mask == mask:
                return c
        return None

    @cached_property
    def meet(self) -> Table2:
        t = [[self._greatest(self.down[a] & self.down[b]) for b in range(self.n)] for a in range(self.n)]
        if any(x is None for row in t for x in row):
            raise LatticeError("not a lattice: some meet does not exist")
        return tuple(tuple(row) for row in t)

    @cached_property
    def join(self) -> Table2:
        t = [[self._least(self.up[a] & self.up[b]) for b in range(self.n)] for a in range(self.n)]
        if any(x is None for row in t for x in row):
            raise LatticeError("not a lattice: some join does not exist")
        return tuple(tuple(row) for row in t)

    @cached_property
    def bottom(self) -> int:
        b = self._least((1 << self.n) - 1)
        if b is None:
            raise LatticeError("no least element")
        return b

    @cached_property
    def top(self) -> int:
        t = self._greatest((1 << self.n) - 1)
        if t is None:
            raise LatticeError("no greatest element")
        return t

    def join_of(self, mask: int) -> int:
        out = self.bottom
        for x in bits(mask):
            out = self.join[out][x]
        return out

    def meet_of(self, mask: int) -> int:
        out = self.top
        for x in bits(mask):
            out = self.meet[out][x]
        return out

    def up_closure(self, mask: int) -> int:
        out = 0
        for x in bits(mask):
            out |= self.up[x]
        return out

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.elements[i] for i in bits(mask))


def _table2(n: int, entries: Iterable[tuple[int, int, int]], what: str) -> Table2:
    t = [[-1] * n for _ in range(n)]
    for a, b, c in entries:
        if t[a][b] not in (-1, c):
            raise ValueError(f"{what} table gives two values for ({a}, {b})")
        t[a][b] = c
    if any(x == -1 for row in t for x in row):
        raise ValueError(f"{what} table is not total")
    return tuple(tuple(row) for row in t)


def make_algebra(elements: Sequence[str], leq: Iterable, mul: Iterable | Callable[[int, int], int],
                 eps, box: Mapping | Sequence | None = None, dia: Mapping | Sequence | None = None) -> Algebra:
    """Build an algebra from element names and tables over names or indices.

    ``mul`` may be a list of ``(a, b, c)`` triples meaning ``a·b = c``, a
    square table, or a callable on indices. ``box``/``dia`` may be a
    mapping from modal index to a unary table or pair list, or one such
    table for the default index. Missing modal tables default to the
    identity. Residuals are not derived here; see :func:`derive_residuals`.
    """
    names = tuple(map(str, elements))
    if len(set(names)) != len(names):
        raise ValueError("duplicate element names")
    n = len(names)
    lookup = {nm: i for i, nm in enumerate(names)}

    def idx(x) -> int:
        if isinstance(x, int) and not isinstance(x, bool):
            if not 0 <= x < n:
                raise ValueError(f"element index {x} out of range")
            return x
        if str(x) not in lookup:
            raise ValueError(f"unknown element {x!r}")
        return lookup[str(x)]

    order = frozenset((idx(a), idx(b)) for a, b in leq)
    if callable(mul):
        mt = tuple(tuple(idx(mul(a, b)) for b in range(n)) for a in range(n))
    else:
        rows = list(mul)
        # a square table has n rows of length n; a total triple list has n*n rows
        if len(rows) == n and all(isinstance(r, (list, tuple)) and len(r) == n for r in rows):
            mt = tuple(tuple(idx(x) for x in r) for r in rows)
        else:
            mt = _table2(n, ((idx(a), idx(b), idx(c)) for a, b, c in rows), "mul")

    def unary(arg) -> tuple[tuple[str, Table1], ...]:
        if arg is None:
            return ((DEFAULT_INDEX, tuple(range(n))),)
        if not isinstance(arg, Mapping):
            arg = {DEFAULT_INDEX: arg}
        out = []
        for i, tab in arg.items():
            tab = list(tab)
            if tab and isinstance(tab[0], (list, tuple)):
                t = [-1] * n
                for a, b in tab:
                    t[idx(a)] = idx(b)
                if -1 in t:
                    raise ValueError(f"modal table {i!r} is not total")
                out.append((str(i), tuple(t)))
            else:
                if len(tab) != n:
                    raise ValueError(f"modal table {i!r} has the wrong length")
                out.append((str(i), tuple(idx(x) for x in tab)))
        return tuple(out)

    bx, dx = unary(box), unary(dia)
    if box is None and dia is not None:
        bx = tuple((i, tuple(range(n))) for i, _ in dx)
    if dia is None and box is not None:
        dx = tuple((i, tuple(range(n))) for i, _ in bx)
    return Algebra(names, order, mt, idx(eps), bx, dx)


def with_modal(A: Algebra, box: Mapping[str, Sequence[int]] | None = None,
               dia: Mapping[str, Sequence[int]] | None = None) -> Algebra:
    bx = tuple((i, tuple(t)) for i, t in box.items()) if box is not None else A.box
    dx = tuple((i, tuple(t)) for i, t in dia.items()) if dia is not None else A.dia
    return replace(A, box=bx, dia=dx)


# ---------------------------------------------------------------------------
# lattice checks

def check_lattice(A: Algebra, limit: int | None = 20) -> CheckReport:
    """Order axioms, all binary meets and joins, bounds, and distributivity."""
    col = _Collector(limit)
    n = A.n
    for a in range(n):
        if (a, a) not in A.leq:
            col.add("order-reflexive", A.elements[a])
    for a, b in sorted(A.leq):
        if a < b and (b, a) in A.leq:
            col.add("order-antisymmetric", A.elements[a], A.elements[b])
        for c in range(n):
            if (b, c) in A.leq and (a, c) not in A.leq:
                col.add("order-transitive", A.elements[a], A.elements[b], A.elements[c])
    if col.items:
        return col.report("lattice")
    if n == 0:
        col.add("bounds", "empty carrier")
        return col.report("lattice")
    for a, b in product(range(n), repeat=2):
        if A._greatest(A.down[a] & A.down[b]) is None:
            col.add("meet-exists", A.elements[a], A.elements[b])
        if A._least(A.up[a] & A.up[b]) is None:
            col.add("join-exists", A.elements[a], A.elements[b])
    if col.items:
        return col.report("lattice")
    meet, join = A.meet, A.join
    for a, b, c in product(range(n), repeat=3):
        if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]]:
            col.add("distributivity", A.elements[a], A.elements[b], A.elements[c])
    return col.report("lattice")


def check_monoid(A: Algebra, limit: int | None = 20) -> CheckReport:
    """Associativity, two-sided identity and monotonicity of the product."""
    col = _Collector(limit)
    n, m, e = A.n, A.mul, A.elements
    for a, b, c in product(range(n), repeat=3):
        if m[m[a][b]][c] != m[a][m[b][c]]:
            col.add("mul-associative", e[a], e[b], e[c])
    for a in range(n):
        if m[A.eps][a] != a or m[a][A.eps] != a:
            col.add("mul-identity", e[a])
    for (a, a2) in sorted(A.leq):
        for b in range(n):
            if not A.le(m[a][b], m[a2][b]):
                col.add("mul-monotone", "left", e[a], e[a2], e[b])
            if not A.le(m[b][a], m[b][a2]):
                col.add("mul-monotone", "right", e[b], e[a], e[a2])
    return col.report("monoid")


def derive_residuals(A: Algebra) -> Algebra:
    """Compute ``a\\c = max{b | a·b ≤ c}`` and ``c/b = max{a | a·b ≤ c}``.

    Raises :class:`NotResiduated` with the failing pair when a maximum
    is missing or the three-way equivalence fails afterwards.
    """
    n, m = A.n, A.mul
    for (a, a2) in sorted(A.leq):
        for b in range(n):
            if not A.le(m[a][b], m[a2][b]):
                raise NotResiduated("product is not monotone in its first argument",
                                    (A.elements[a], A.elements[a2], A.elements[b]))
            if not A.le(m[b][a], m[b][a2]):
                raise NotResiduated("product is not monotone in its second argument",
                                    (A.elements[b], A.elements[a], A.elements[a2]))
    ldiv = [[0] * n for _ in range(n)]
    rdiv = [[0] * n for _ in range(n)]
    for a, c in product(range(n), repeat=2):
        cands = mask_of(b for b in range(n) if A.le(m[a][b], c))
        top = A._greatest(cands)
        if top is None:
            raise NotResiduated("no greatest b with a*b <= c", (A.elements[a], A.elements[c]))
        ldiv[a][c] = top
    for c, b in product(range(n), repeat=2):
        cands = mask_of(a for a in range(n) if A.le(m[a][b], c))
        top = A._greatest(cands)
        if top is None:
            raise NotResiduated("no greatest a with a*b <= c", (A.elements[c], A.elements[b]))
        rdiv[c][b] = top
    out = replace(A, ldiv=tuple(map(tuple, ldiv)), rdiv=tuple(map(tuple, rdiv)))
    rep = check_residuation(out)
    if not rep.passed:
        raise NotResiduated("residuation equivalence fails", rep.violations[0].witness)
    return out


def check_residuation(A: Algebra, limit: int | None = 20) -> CheckReport:
    """``b ≤ a\\c ⇔ a·b ≤ c ⇔ a ≤ c/b`` for all triples."""
    if A.ldiv is None or A.rdiv is None:
        raise ValueError("residuals not derived; call derive_residuals first")
    col = _Collector(limit)
    n, m, e = A.n, A.mul, A.elements
    for a, b, c in product(range(n), repeat=3):
        mid = A.le(m[a][b], c)
        if A.le(b, A.ldiv[a][c]) != mid:
            col.add("residuation-left", e[a], e[b], e[c])
        if A.le(a, A.rdiv[c][b]) != mid:
            col.add("residuation-right", e[a], e[b], e[c])
    return col.report("residuation")


def check_rdma(A: Algebra, limit: int | None = 20) -> CheckReport:
    """The five modal laws, per modal index."""
    col = _Collector(limit)
    n, e, m = A.n, A.elements, A.mul
    meet, join = A.meet, A.join
    if {i for i, _ in A.box} != {i for i, _ in A.dia}:
        col.add("modalities", A.modalities, tuple(i for i, _ in A.dia))
    for i, bx in A.box:
        if bx[A.top] != A.top:
            col.add("box-top", i)
        for a, b in product(range(n), repeat=2):
            if bx[meet[a][b]] != meet[bx[a]][bx[b]]:
                col.add("box-meet", i, e[a], e[b])
            if not A.le(m[bx[a]][bx[b]], bx[m[a][b]]):
                col.add("box-product", i, e[a], e[b])
    for i, dx in A.dia:
        if dx[A.bottom] != A.bottom:
            col.add("dia-bot", i)
        for a, b in product(range(n), repeat=2):
            if dx[join[a][b]] != join[dx[a]][dx[b]]:
                col.add("dia-join", i, e[a], e[b])
    return col.report("rdma")


def check_algebra(A: Algebra) -> CheckReport:
    """Lattice, monoid, residuation and modal laws; residuals derived if missing."""
    lat = check_lattice(A)
    if not lat.passed:
        return lat.merged(name="algebra")
    mon = check_monoid(A)
    try:
        B = A if A.ldiv is not None else derive_residuals(A)
        res = check_residuation(B)
    except NotResiduated as exc:
        res = CheckReport.build([("residuated", exc.witness)])
        B = None
    out = lat.merged(mon, res)
    if B is not None or mon.passed:
        out = out.merged(check_rdma(A))
    return out.merged(name="algebra")


def check_perfect(A: Algebra) -> CheckReport:
    """Every element is the join of join-irreducibles below it and the meet of
    meet-irreducibles above it. Always true for finite distributive lattices;
    kept as an explicit verifier."""
    col = _Collector()
    J, M = mask_of(join_irreducibles(A)), mask_of(meet_irreducibles(A))
    for a in range(A.n):
        if A.join_of(A.down[a] & J) != a:
            col.add("join-dense", A.elements[a])
        if A.meet_of(A.up[a] & M) != a:
            col.add("meet-dense", A.elements[a])
    col.note("finite lattice: completeness holds trivially")
    return col.report("perfect")


# ---------------------------------------------------------------------------
# irreducibles and kappa

def lower_covers(A: Algebra, a: int) -> list[int]:
    below = A.down[a] & ~(1 << a)
    return [b for b in bits(below) if not any(
        c != b and A.le(b, c) for c in bits(below))]


def upper_covers(A: Algebra, a: int) -> list[int]:
    above = A.up[a] & ~(1 << a)
    return [b for b in bits(above) if not any(
        c != b and A.le(c, b) for c in bits(above))]


def join_irreducibles(A: Algebra) -> list[int]:
    """Elements with exactly one lower cover, in carrier order."""
    return [a for a in range(A.n) if len(lower_covers(A, a)) == 1]


def meet_irreducibles(A: Algebra) -> list[int]:
    return [a for a in range(A.n) if len(upper_covers(A, a)) == 1]


def kappa(A: Algebra, j: int | str) -> int:
    """``κ(j) = ⋁{x | j ≰ x}``."""
    j = A.index_of(j)
    if j not in join_irreducibles(A):
        raise ValueError(f"{A.elements[j]!r} is not join-irreducible")
    full = (1 << A.n) - 1
    return A.join_of(full & ~A.up[j])


def check_kappa(A: Algebra) -> CheckReport:
    """κ is a bijection J∞ → M∞ preserving and reflecting the order."""
    col = _Collector()
    J, M = join_irreducibles(A), meet_irreducibles(A)
    k = {j: kappa(A, j) for j in J}
    e = A.elements
    for j, kj in k.items():
        if kj not in M:
            col.add("kappa-into-meet-irreducibles", e[j], e[kj])
    if sorted(set(k.values())) != sorted(M) or len(set(k.values())) != len(J):
        col.add("kappa-bijective", tuple(e[j] for j in J), tuple(e[x] for x in M))
    for a, b in product(J, repeat=2):
        if A.le(a, b) != A.le(k[a], k[b]):
            col.add("kappa-order", e[a], e[b])
    return col.report("kappa")


# ---------------------------------------------------------------------------
# filters

@dataclass(frozen=True, order=True)
class Filter:
    mask: int
    prime: bool = False

    def __contains__(self, a: int) -> bool:
        return bool(self.mask >> a & 1)

    @property
    def members(self) -> list[int]:
        return bits(self.mask)


def is_filter(A: Algebra, mask: int) -> bool:
    if mask == 0 or A.up_closure(mask) != mask:
        return False
    return all(mask >> A.meet[a][b] & 1 for a in bits(mask) for b in bits(mask))


def is_prime(A: Algebra, mask: int) -> bool:
    if not is_filter(A, mask) or mask >> A.bottom & 1:
        return False
    return all(mask >> a & 1 or mask >> b & 1
               for a in range(A.n) for b in range(A.n) if mask >> A.join[a][b] & 1)


def filters(A: Algebra) -> list[Filter]:
    """All filters (nonempty, up-closed, meet-closed), by increasing mask.

    Carriers up to 16 elements are searched subset by subset; larger ones
    use principal filters, which is exhaustive for finite lattices.
    """
    if A.n <= 16:
        masks = [m for m in range(1, 1 << A.n) if is_filter(A, m)]
    else:
        masks = sorted({A.up[a] for a in range(A.n)})
    return [Filter(m, is_prime(A, m)) for m in masks]


def prime_filters(A: Algebra) -> list[Filter]:
    return [F for F in filters(A) if F.prime]


def principal_filter(A: Algebra, a: int) -> Filter:
    return Filter(A.up[a], is_prime(A, A.up[a]))


def set_product(A: Algebra, X: int, Y: int) -> int:
    return mask_of(A.mul[x][y] for x in bits(X) for y in bits(Y))


def filter_product(A: Algebra, X: Filter | int, Y: Filter | int) -> Filter:
    """``X • Y = ↑{x·y | x∈X, y∈Y}``."""
    xm = X.mask if isinstance(X, Filter) else X
    ym = Y.mask if isinstance(Y, Filter) else Y
    out = A.up_closure(set_product(A, xm, ym))
    if not is_filter(A, out):
        raise ValueError("filter product is not a filter")
    return Filter(out, is_prime(A, out))


def check_filter_lemma(A: Algebra, limit: int | None = 20) -> CheckReport:
    """Items 1 to 3 of the filter lemma over all filters of ``A``."""
    col = _Collector(limit)
    fs = filters(A)
    ps = [F for F in fs if F.prime]
    e = A.elements

    def show(m: int) -> tuple[str, ...]:
        return tuple(e[i] for i in bits(m))

    prod = {}
    for X, Y in product(fs, repeat=2):
        plain = set_product(A, X.mask, Y.mask)
        bullet = A.up_closure(plain)
        prod[X.mask, Y.mask] = plain
        if not is_filter(A, bullet):
            col.add("filter-product-is-filter", show(X.mask), show(Y.mask))
        for Z in fs:
            if (plain & ~Z.mask == 0) != (bullet & ~Z.mask == 0):
                col.add("product-inclusion", show(X.mask), show(Y.mask), show(Z.mask))
    for X, Y in product(fs, repeat=2):
        for Z in ps:
            if prod[X.mask, Y.mask] & ~Z.mask:
                continue
            if not any(X.mask & ~X2.mask == 0 and Y.mask & ~Y2.mask == 0
                       and set_product(A, X2.mask, Y2.mask) & ~Z.mask == 0
                       for X2 in ps for Y2 in ps):
                col.add("prime-extension", show(X.mask), show(Y.mask), show(Z.mask))
    return col.report("filter-lemma")


# ---------------------------------------------------------------------------
# terms

def eval_index(A: Algebra, assignment: Mapping[str, int], f: Formula,
               memo: dict[Formula, int] | None = None) -> int:
    """Homomorphic evaluation of ``f`` returning an element index."""
    memo = {} if memo is None else memo
    for g in subformulas(f):
        if g in memo:
            continue
        if isinstance(g, Atom):
            if g.name not in assignment:
                raise KeyError(f"assignment misses atom {g.name!r}")
            val = assignment[g.name]
        elif isinstance(g, Top):
            val = A.top
        elif isinstance(g, Bot):
            val = A.bottom
        elif isinstance(g, Unit):
            val = A.eps
        elif isinstance(g, Mul):
            val = A.mul[memo[g.l]][memo[g.r]]
        elif isinstance(g, LDiv):
            val = _resid(A, "ldiv")[memo[g.l]][memo[g.r]]
        elif isinstance(g, RDiv):
            val = _resid(A, "rdiv")[memo[g.l]][memo[g.r]]
        elif isinstance(g, And):
            val = A.meet[memo[g.l]][memo[g.r]]
        elif isinstance(g, Or):
            val = A.join[memo[g.l]][memo[g.r]]
        elif isinstance(g, Box):
            val = A.box_tab(g.index)[memo[g.arg]]
        elif isinstance(g, Dia):
            val = A.dia_tab(g.index)[memo[g.arg]]
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = val
    return memo[f]


def _resid(A: Algebra, which: str) -> Table2:
    t = getattr(A, which)
    if t is None:
        raise ValueError("residuals not derived; call derive_residuals first")
    return t


def eval_term(A: Algebra, assignment: Mapping[str, str | int], f: Formula | str) -> str:
    """Evaluate ``f`` under an assignment of atoms to elements; returns the element name."""
    asg = {k: A.index_of(v) for k, v in assignment.items()}
    return A.elements[eval_index(A, asg, as_formula(f))]


def check_inequation(A: Algebra, s: Sequent | str, budget: int | None = None) -> Validity:
    """Check ``lhs ≤ rhs`` under every assignment of the sequent's atoms.

    Assignments range over the carrier in carrier order, over sorted atom
    names with the first varying slowest.
    """
    s = as_sequent(s)
    names = sorted(atoms(s))
    total = A.n ** len(names)
    budget = default_budget() if budget is None else budget
    if total > budget:
        raise BudgetExceeded(f"{total} assignments exceed the budget of {budget}",
                             {"assignments": total, "budget": budget})
    checked = 0
    for choice in product(range(A.n), repeat=len(names)):
        asg = dict(zip(names, choice))
        memo: dict[Formula, int] = {}
        lhs = eval_index(A, asg, s.lhs, memo)
        rhs = eval_index(A, asg, s.rhs, memo)
        checked += 1
        if not A.le(lhs, rhs):
            return Validity(False, tuple((k, A.elements[v]) for k, v in asg.items()), checked)
    return Validity(True, None, checked)


# ---------------------------------------------------------------------------
# small algebras used throughout

def chain(k: int, names: Sequence[str] | None = None) -> Algebra:
    """The k-element chain with mul = meet, eps = top, identity modalities."""
    names = list(names) if names is not None else [str(i) for i in range(k)]
    leq = [(a, b) for a in range(k) for b in range(k) if a <= b]
    return derive_residuals(make_algebra(names, leq, lambda a, b: min(a, b), k - 1))


def lattice_algebra(elements: Sequence[str], leq: Iterable, box=None, dia=None) -> Algebra:
    """A distributive lattice with mul = meet and eps = top (Heyting residuals)."""
    proto = make_algebra(elements, leq, [[0] * len(elements)] * len(elements), 0)
    A = make_algebra(elements, leq, lambda a, b: proto.meet[a][b], proto.top, box, dia)
    return derive_residuals(A)
