"""Formulas, sequents, signatures and the axiom library.

Concrete syntax (ASCII), tightest binding first::

    box[i] / dia[i]   prefix, index optional (default "0")
    *                 left associative
    \\  /              non associative, chains need parentheses
    &                 left associative
    |                 left associative

Constants are ``top``, ``bot`` and ``1``; sequents are written ``lhs |- rhs``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .report import CheckReport

DEFAULT_INDEX = "0"
KEYWORDS = frozenset({"top", "bot", "box", "dia"})


# ---------------------------------------------------------------------------
# abstract syntax

class Formula:
    """Base class of the formula tree. Subclasses are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)

    # convenience constructors, handy in tests and the axiom library
    def __mul__(self, other: "Formula") -> "Formula":
        return Mul(self, other)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Unit(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Mul(Formula):
    l: Formula
    r: Formula


@dataclass(frozen=True, slots=True)
class LDiv(Formula):
    """``l \\ r``"""
    l: Formula
    r: Formula


@dataclass(frozen=True, slots=True)
class RDiv(Formula):
    """``l / r``"""
    l: Formula
    r: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    l: Formula
    r: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    l: Formula
    r: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    index: str
    arg: Formula


@dataclass(frozen=True, slots=True)
class Dia(Formula):
    index: str
    arg: Formula


BINARY = (Mul, LDiv, RDiv, And, Or)
MODAL = (Box, Dia)
CONSTANTS = (Top, Bot, Unit)


@dataclass(frozen=True, slots=True)
class Sequent:
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return print_sequent(self)


def box(arg: Formula, index: str = DEFAULT_INDEX) -> Box:
    return Box(index, arg)


def dia(arg: Formula, index: str = DEFAULT_INDEX) -> Dia:
    return Dia(index, arg)


p, q, r = Atom("p"), Atom("q"), Atom("r")
TOP, BOT, ONE = Top(), Bot(), Unit()


# ---------------------------------------------------------------------------
# traversal helpers

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, BINARY):
        return (f.l, f.r)
    if isinstance(f, MODAL):
        return (f.arg,)
    return ()


def subformulas(f: Formula) -> list[Formula]:
    """All subformulas, children before parents, without repeats."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if g in seen:
            return
        for c in children(g):
            walk(c)
        seen[g] = None

    walk(f)
    return list(seen)


def atoms(f: Formula | Sequent) -> list[str]:
    """Atom names in order of first occurrence (left to right)."""
    found: dict[str, None] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            found.setdefault(g.name)
        for c in children(g):
            walk(c)

    if isinstance(f, Sequent):
        walk(f.lhs)
        walk(f.rhs)
    else:
        walk(f)
    return list(found)


def modal_indices(f: Formula | Sequent) -> set[str]:
    if isinstance(f, Sequent):
        return modal_indices(f.lhs) | modal_indices(f.rhs)
    out = {f.index} if isinstance(f, MODAL) else set()
    for c in children(f):
        out |= modal_indices(c)
    return out


def depth(f: Formula) -> int:
    cs = children(f)
    return 0 if not cs else 1 + max(depth(c) for c in cs)


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, MODAL):
        return type(f)(f.index, kids[0])
    return f


def substitute(f: Formula, var: str, g: Formula) -> Formula:
    """Replace every ``Atom(var)`` in ``f`` by ``g``."""
    return substitute_many(f, {var: g})


def substitute_many(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution of atoms."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    cs = children(f)
    if not cs:
        return f
    return rebuild(f, tuple(substitute_many(c, mapping) for c in cs))


def substitute_sequent(s: Sequent, mapping: Mapping[str, Formula]) -> Sequent:
    return Sequent(substitute_many(s.lhs, mapping), substitute_many(s.rhs, mapping))


# ---------------------------------------------------------------------------
# printing

_PREC = {Or: 1, And: 2, LDiv: 3, RDiv: 3, Mul: 4}
_UNARY_PREC = 5
_ATOM_PREC = 6
_SYMBOL = {Or: "|", And: "&", LDiv: "\\", RDiv: "/", Mul: "*"}


def _prec(f: Formula) -> int:
    if isinstance(f, MODAL):
        return _UNARY_PREC
    return _PREC.get(type(f), _ATOM_PREC)


def print_formula(f: Formula) -> str:
    """Render with the fewest parentheses that still parse back to ``f``."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Unit):
        return "1"
    if isinstance(f, MODAL):
        op = "box" if isinstance(f, Box) else "dia"
        if f.index != DEFAULT_INDEX:
            op = f"{op}[{f.index}]"
        return f"{op} {_wrap(f.arg, _UNARY_PREC)}"
    level = _PREC[type(f)]
    if isinstance(f, (LDiv, RDiv)):
        left_min, right_min = level + 1, level + 1
    else:
        left_min, right_min = level, level + 1
    return f"{_wrap(f.l, left_min)} {_SYMBOL[type(f)]} {_wrap(f.r, right_min)}"


def _wrap(f: Formula, minimum: int) -> str:
    text = print_formula(f)
    return text if _prec(f) >= minimum else f"({text})"


def print_sequent(s: Sequent) -> str:
    return f"{print_formula(s.lhs)} |- {print_formula(s.rhs)}"


# ---------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str]):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"{message} at line {line}, column {column}; expected one of: {exp}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<turnstile>\|-)
  | (?P<op>[|&*\\/()\[\]])
  | (?P<one>1(?![0-9A-Za-z_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*|[0-9]+)
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str   # 'name', 'kw', 'one', an operator symbol, '|-', or 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col,
                                     ["formula"])
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "ws":
            for i, ch in enumerate(lexeme):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "turnstile":
            toks.append(_Tok("|-", lexeme, line, col))
        elif kind == "op":
            toks.append(_Tok(lexeme, lexeme, line, col))
        elif kind == "one":
            toks.append(_Tok("one", lexeme, line, col))
        else:
            toks.append(_Tok("kw" if lexeme in KEYWORDS else "name", lexeme, line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


_PRIMARY_START = ("identifier", "top", "bot", "1", "(", "box", "dia")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected: Iterable[str]) -> None:
        t = self.cur
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise FormulaSyntaxError(f"unexpected {what}", t.line, t.col, expected)

    def take(self, kind: str) -> _Tok:
        if self.cur.kind != kind:
            self.fail([kind])
        t = self.cur
        self.i += 1
        return t

    def finish(self, expected: Iterable[str]) -> None:
        if self.cur.kind != "eof":
            self.fail(list(expected) + ["end of input"])

    # each level returns (formula, tokens that could have continued it)
    def disj(self) -> tuple[Formula, set[str]]:
        f, cont = self.conj()
        while self.cur.kind == "|":
            self.i += 1
            g, cont = self.conj()
            f = Or(f, g)
        return f, cont | {"|"}

    def conj(self) -> tuple[Formula, set[str]]:
        f, cont = self.resid()
        while self.cur.kind == "&":
            self.i += 1
            g, cont = self.resid()
            f = And(f, g)
        return f, cont | {"&"}

    def resid(self) -> tuple[Formula, set[str]]:
        f, cont = self.prod()
        if self.cur.kind in ("\\", "/"):
            op = self.cur.kind
            self.i += 1
            g, cont = self.prod()
            return (LDiv(f, g) if op == "\\" else RDiv(f, g)), cont
        return f, cont | {"\\", "/"}

    def prod(self) -> tuple[Formula, set[str]]:
        f = self.unary()
        while self.cur.kind == "*":
            self.i += 1
            f = Mul(f, self.unary())
        return f, {"*"}

    def unary(self) -> Formula:
        t = self.cur
        if t.kind == "kw" and t.text in ("box", "dia"):
            self.i += 1
            index = DEFAULT_INDEX
            if self.cur.kind == "[":
                self.i += 1
                if self.cur.kind not in ("name", "one"):
                    self.fail(["modal index"])
                index = self.cur.text
                self.i += 1
                self.take("]")
            arg = self.unary()
            return Box(index, arg) if t.text == "box" else Dia(index, arg)
        return self.primary()

    def primary(self) -> Formula:
        t = self.cur
        if t.kind == "name":
            if not (t.text[0].isalpha() or t.text[0] == "_"):
                self.fail(_PRIMARY_START)
            self.i += 1
            return Atom(t.text)
        if t.kind == "one":
            self.i += 1
            return ONE
        if t.kind == "kw" and t.text == "top":
            self.i += 1
            return TOP
        if t.kind == "kw" and t.text == "bot":
            self.i += 1
            return BOT
        if t.kind == "(":
            self.i += 1
            f, cont = self.disj()
            if self.cur.kind != ")":
                self.fail(cont | {")"})
            self.i += 1
            return f
        self.fail(_PRIMARY_START)
        raise AssertionError("unreachable")


def parse_formula(text: str) -> Formula:
    ps = _Parser(text)
    f, cont = ps.disj()
    ps.finish(cont)
    return f


def parse_sequent(text: str) -> Sequent:
    ps = _Parser(text)
    lhs, cont = ps.disj()
    if ps.cur.kind != "|-":
        ps.fail(cont | {"|-"})
    ps.i += 1
    rhs, cont = ps.disj()
    ps.finish(cont)
    return Sequent(lhs, rhs)


def as_sequent(s: Sequent | str) -> Sequent:
    return parse_sequent(s) if isinstance(s, str) else s


def as_formula(f: Formula | str) -> Formula:
    return parse_formula(f) if isinstance(f, str) else f


# ---------------------------------------------------------------------------
# signatures

@dataclass(frozen=True)
class Signature:
    """Subexponential signature: indices, a preorder on them, and W, C, E.

    ``preceq`` holds pairs ``(s, t)`` meaning s is below t. The constructor
    stores whatever it is given; use :func:`make_signature` to close the
    relation.
    """

    indices: tuple[str, ...]
    preceq: frozenset[tuple[str, str]]
    W: frozenset[str] = frozenset()
    C: frozenset[str] = frozenset()
    E: frozenset[str] = frozenset()

    def below(self, s: str, t: str) -> bool:
        return (s, t) in self.preceq

    def to_json(self) -> dict:
        return {
            "indices": list(self.indices),
            "preceq": sorted([a, b] for a, b in self.preceq),
            "W": sorted(self.W), "C": sorted(self.C), "E": sorted(self.E),
        }


def reflexive_transitive_closure(indices: Iterable[str],
                                 pairs: Iterable[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    idx = list(indices)
    rel = {(a, a) for a in idx} | {tuple(x) for x in pairs}
    for k in idx:
        for a in idx:
            if (a, k) in rel:
                for b in idx:
                    if (k, b) in rel:
                        rel.add((a, b))
    return frozenset(rel)


def make_signature(indices: Iterable[str], preceq: Iterable[tuple[str, str]] = (),
                   W: Iterable[str] = (), C: Iterable[str] = (), E: Iterable[str] = ()) -> Signature:
    idx = tuple(dict.fromkeys(str(i) for i in indices))
    pairs = [(str(a), str(b)) for a, b in preceq]
    return Signature(idx, reflexive_transitive_closure(idx, pairs),
                     frozenset(map(str, W)), frozenset(map(str, C)), frozenset(map(str, E)))


def default_signature() -> Signature:
    return make_signature([DEFAULT_INDEX])


def signature_from_json(doc: Mapping) -> Signature:
    try:
        return make_signature(doc["indices"], [tuple(x) for x in doc.get("preceq", [])],
                              doc.get("W", []), doc.get("C", []), doc.get("E", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed signature: {exc}") from exc


def load_signature(path: str | Path) -> Signature:
    return signature_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def validate_signature(sig: Signature) -> CheckReport:
    """Check the preorder, the upward closure of W, C, E, and W∩C ⊆ E."""
    out: list[tuple[str, tuple]] = []
    idx = set(sig.indices)
    for a, b in sorted(sig.preceq):
        if a not in idx or b not in idx:
            out.append(("preceq-domain", (a, b)))
    for name in ("W", "C", "E"):
        for s in sorted(getattr(sig, name) - idx):
            out.append((f"{name}-domain", (s,)))
    for s in sig.indices:
        if (s, s) not in sig.preceq:
            out.append(("preceq-reflexive", (s,)))
    for a, b, c in product(sig.indices, repeat=3):
        if (a, b) in sig.preceq and (b, c) in sig.preceq and (a, c) not in sig.preceq:
            out.append(("preceq-transitive", (a, b, c)))
    for name in ("W", "C", "E"):
        members = getattr(sig, name)
        for s, t in sorted(sig.preceq):
            if s in members and t not in members and t in idx:
                out.append((f"{name}-upward-closed", (s, t)))
    for s in sig.indices:
        if s in sig.W and s in sig.C and s not in sig.E:
            out.append(("W-C-within-E", (s,)))
    return CheckReport.build(out, name="signature")


def check_indices(f: Formula | Sequent, sig: Signature) -> None:
    extra = modal_indices(f) - set(sig.indices)
    if extra:
        raise ValueError(f"modal indices not in signature: {sorted(extra)}")


# ---------------------------------------------------------------------------
# axiom library

def _bi(a: Formula, b: Formula) -> tuple[Sequent, Sequent]:
    return (Sequent(a, b), Sequent(b, a))


def base_schemata(sig: Signature | None = None) -> list[tuple[str, tuple[Sequent, ...]]]:
    """The twelve axiom groups of the base calculus, modal ones once per index.

    Each entry is ``(name, sequents)``; groups such as the lattice bounds
    or the unit laws hold several sequents.
    """
    sig = sig or default_signature()
    groups: list[tuple[str, tuple[Sequent, ...]]] = [
        ("identity", (Sequent(p, p),)),
        ("bot", (Sequent(BOT, p),)),
        ("top", (Sequent(p, TOP),)),
        ("lattice", (Sequent(p, Or(p, q)), Sequent(q, Or(p, q)),
                     Sequent(And(p, q), p), Sequent(And(p, q), q))),
        ("distributivity", (Sequent(And(p, Or(q, r)), Or(And(p, q), And(p, r))),)),
        ("associativity", _bi(Mul(Mul(p, q), r), Mul(p, Mul(q, r)))),
        ("unit", _bi(Mul(p, ONE), p) + _bi(Mul(ONE, p), p)),
    ]
    modal: dict[str, list[Sequent]] = {k: [] for k in
                                       ("dia-join", "dia-bot", "box-meet", "box-top", "box-product")}
    for s in sig.indices:
        modal["dia-join"].append(Sequent(Dia(s, Or(p, q)), Or(Dia(s, p), Dia(s, q))))
        modal["dia-bot"].append(Sequent(Dia(s, BOT), BOT))
        modal["box-meet"].append(Sequent(And(Box(s, p), Box(s, q)), Box(s, And(p, q))))
        modal["box-top"].append(Sequent(TOP, Box(s, TOP)))
        modal["box-product"].append(Sequent(Mul(Box(s, p), Box(s, q)), Box(s, Mul(p, q))))
    groups.extend((k, tuple(v)) for k, v in modal.items())
    return groups


def base_axioms(sig: Signature | None = None) -> list[Sequent]:
    return [s for _, group in base_schemata(sig) for s in group]


STRUCTURAL_NAMES = ("exch", "contr", "weak-contr-l", "weak-contr-r", "weak", "mingle", "k4resid")


def structural_axioms(name: str, index: str = DEFAULT_INDEX) -> list[Sequent]:
    """Named structural schemata over the modality ``index``."""
    bp = Box(index, p)
    table = {
        "exch": list(_bi(Mul(bp, q), Mul(q, bp))),
        "contr": [Sequent(bp, Mul(bp, bp))],
        "weak-contr-l": [Sequent(Mul(bp, q), Mul(Mul(bp, q), bp))],
        "weak-contr-r": [Sequent(Mul(q, bp), Mul(Mul(bp, q), bp))],
        "weak": [Sequent(bp, ONE)],
        "mingle": list(_bi(Box(index, And(p, q)), Mul(bp, Box(index, q)))),
        "k4resid": [Sequent(Box(index, LDiv(p, q)), LDiv(Dia(index, p), Dia(index, q))),
                    Sequent(Box(index, RDiv(p, q)), RDiv(Dia(index, p), Dia(index, q)))],
    }
    if name not in table:
        raise ValueError(f"unknown structural schema {name!r}; choose from {', '.join(STRUCTURAL_NAMES)}")
    return table[name]


def all_structural_axioms(index: str = DEFAULT_INDEX) -> list[Sequent]:
    return [s for n in STRUCTURAL_NAMES for s in structural_axioms(n, index)]


def subexp_axioms(sig: Signature) -> list[Sequent]:
    """Axioms of the subexponential polymodal system for ``sig``, without repeats.

    Exchange for ``s`` in E is generated as ``box_s p * q -||- q * box_s p`` so
    that it coincides with the ``exch`` structural schema.
    """
    rep = validate_signature(sig)
    if not rep.passed:
        bad = "; ".join(f"{v.condition} {v.witness}" for v in rep.violations)
        raise ValueError(f"invalid signature: {bad}")
    out: dict[Sequent, None] = {}

    def emit(*seqs: Sequent) -> None:
        for s in seqs:
            out.setdefault(s)

    I = sig.indices
    for s in I:
        for s1 in I:
            for s2 in I:
                if sig.below(s, s1) and sig.below(s, s2):
                    emit(Sequent(Mul(Box(s1, p), Box(s2, q)), Box(s, Mul(p, q))))
    for s in I:
        bp = Box(s, p)
        emit(Sequent(bp, p), Sequent(bp, Box(s, bp)))
        if s in sig.C:
            emit(*structural_axioms("weak-contr-l", s), *structural_axioms("weak-contr-r", s))
        if s in sig.E:
            emit(*structural_axioms("exch", s))
        if s in sig.W:
            emit(*structural_axioms("weak", s))
        emit(*_bi(Box(s, And(p, q)), And(Box(s, p), Box(s, q))), *_bi(Box(s, TOP), TOP))
        emit(*_bi(Dia(s, Or(p, q)), Or(Dia(s, p), Dia(s, q))), *_bi(Dia(s, BOT), BOT))
        emit(Sequent(p, Dia(s, p)), Sequent(Dia(s, Dia(s, p)), Dia(s, p)))
    return list(out)


def instances(schemata: Iterable[Sequent], formulas: Iterable[Formula]) -> Iterator[Sequent]:
    """All simultaneous substitutions of ``formulas`` for the schema atoms."""
    pool = list(dict.fromkeys(formulas))
    for s in schemata:
        names = atoms(s)
        for choice in product(pool, repeat=len(names)):
            yield substitute_sequent(s, dict(zip(names, choice)))
