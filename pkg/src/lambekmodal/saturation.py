"""Forward-chaining derivability over a finite formula universe.

The universe holds the goal's subformulas and the subformulas of every axiom
instance whose atoms are the goal's atoms (the seed), plus one layer of
compositions: ``φ•ψ``, ``φ\ψ`` and ``φ/ψ`` for seed formulas whose result
has depth at most the configured bound. The least sequent set over that universe containing
reflexivity and the axiom instances is then closed under the rules. A goal
outside the closure is only "not derived at this depth", never refuted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .enumeration import SearchConfig
from .syntax import (And, Atom, Box, Dia, Formula, LDiv, Mul, Or, RDiv, Sequent, Signature, as_sequent,
                     atoms, default_signature, depth, print_sequent, subformulas, substitute_many)

MAX_UNIVERSE = 4000

DERIVABLE = "derivable"
NOT_DERIVED = "not derived at this depth"

SUBSTITUTION_NOTE = ("substitution is applied to axiom schemata inside the universe only; "
                     "closure under arbitrary substitution instances is not decided")


class UniverseTooLarge(RuntimeError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"formula universe reached {size} formulas (limit {limit})")
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class SequentSet:
    """Sequents over a fixed universe, stored as a boolean matrix."""

    universe: tuple[Formula, ...]
    matrix: np.ndarray          # matrix[i, j]: universe[i] |- universe[j]

    def __post_init__(self):
        n = len(self.universe)
        if self.matrix.shape != (n, n):
            raise ValueError("matrix shape does not match the universe")

    def index(self, f: Formula) -> int | None:
        try:
            return self._positions[f]
        except KeyError:
            return None

    @property
    def _positions(self) -> dict[Formula, int]:
        pos = self.__dict__.get("_pos")
        if pos is None:
            pos = {f: k for k, f in enumerate(self.universe)}
            object.__setattr__(self, "_pos", pos)
        return pos

    def __contains__(self, s: Sequent | str) -> bool:
        s = as_sequent(s)
        i, j = self.index(s.lhs), self.index(s.rhs)
        return i is not None and j is not None and bool(self.matrix[i, j])

    def __len__(self) -> int:
        return int(self.matrix.sum())

    def __iter__(self) -> Iterator[Sequent]:
        for i, j in zip(*np.nonzero(self.matrix)):
            yield Sequent(self.universe[i], self.universe[j])

    def generators(self) -> list[Sequent]:
        """A small subset whose reflexive-transitive closure is the whole set.

        Mutually derivable formulas are joined in a cycle; between classes
        only covering pairs are kept. Valid on any set closed under cut.
        """
        M = self.matrix
        n = len(self.universe)
        both = M & M.T
        cls = [-1] * n
        reps = []
        for i in range(n):
            if cls[i] < 0:
                members = np.nonzero(both[i])[0].tolist()
                for j in members:
                    cls[j] = len(reps)
                reps.append(members)
        out = []
        for members in reps:
            if len(members) > 1:
                for a, b in zip(members, members[1:] + members[:1]):
                    out.append(Sequent(self.universe[a], self.universe[b]))
        heads = [m[0] for m in reps]
        Q = M[np.ix_(heads, heads)].copy()
        np.fill_diagonal(Q, False)
        # a covers b when no class lies strictly between them
        between = (Q.astype(np.int32) @ Q.astype(np.int32)) > 0
        cover = Q & ~between
        for a, b in zip(*np.nonzero(cover)):
            out.append(Sequent(self.universe[heads[a]], self.universe[heads[b]]))
        return out


@dataclass(frozen=True)
class Saturation:
    goal: Sequent
    sequents: SequentSet
    verdict: str
    rounds: int
    axiom_instances: int

    @property
    def derivable(self) -> bool:
        return self.verdict == DERIVABLE

    def to_json(self) -> dict:
        return {"goal": print_sequent(self.goal), "verdict": self.verdict,
                "universe": len(self.sequents.universe), "derived": len(self.sequents),
                "rounds": self.rounds, "axiom_instances": self.axiom_instances,
                "note": SUBSTITUTION_NOTE}


# ---------------------------------------------------------------------------
# universe

def _match(pattern: Formula, f: Formula, env: dict[str, Formula]) -> bool:
    if isinstance(pattern, Atom):
        bound = env.get(pattern.name)
        if bound is None:
            env[pattern.name] = f
            return True
        return bound == f
    if type(pattern) is not type(f):
        return False
    if isinstance(pattern, (Box, Dia)):
        return pattern.index == f.index and _match(pattern.arg, f.arg, env)
    if isinstance(pattern, (Mul, LDiv, RDiv, And, Or)):
        return _match(pattern.l, f.l, env) and _match(pattern.r, f.r, env)
    return pattern == f


def matches(pattern: Formula, pool: Iterable[Formula]) -> list[dict[str, Formula]]:
    out = []
    for f in pool:
        env: dict[str, Formula] = {}
        if _match(pattern, f, env):
            out.append(env)
    return out


def _assignments(names: Sequence[str], pool: Sequence[Formula]) -> Iterator[dict[str, Formula]]:
    if not names:
        yield {}
        return
    for f in pool:
        for rest in _assignments(names[1:], pool):
            yield {names[0]: f, **rest}


def build_universe(goal: Sequent, schemata: Sequence[Sequent], max_depth: int,
                   limit: int = MAX_UNIVERSE) -> list[Formula]:
    base_atoms = [Atom(a) for a in atoms(goal)]
    seed: dict[Formula, None] = {}
    for f in subformulas(goal.lhs) + subformulas(goal.rhs):
        seed.setdefault(f)
    for s in schemata:
        names = atoms(s)
        for env in _assignments(names, base_atoms):
            for part in (s.lhs, s.rhs):
                for f in subformulas(substitute_many(part, env)):
                    seed.setdefault(f)
    U = dict(seed)
    small = [f for f in seed if depth(f) < max_depth]
    for x in small:
        for y in small:
            for g in (Mul(x, y), LDiv(x, y), RDiv(x, y)):
                if g not in U:
                    U[g] = None
                    if len(U) > limit:
                        raise UniverseTooLarge(len(U), limit)
    return list(U)


def axiom_pairs(schemata: Sequence[Sequent], U: Sequence[Formula]) -> list[tuple[int, int]]:
    """Positions of every instance of a schema with both sides in ``U``."""
    pos = {f: k for k, f in enumerate(U)}
    out = set()
    for s in schemata:
        left = matches(s.lhs, U)
        right = matches(s.rhs, U)
        shared = sorted(set(atoms(s.lhs)) & set(atoms(s.rhs)))
        by_key: dict[tuple, list[dict]] = {}
        for env in right:
            by_key.setdefault(tuple(env[v] for v in shared), []).append(env)
        for env in left:
            for env2 in by_key.get(tuple(env[v] for v in shared), ()):
                full = {**env, **env2}
                i = pos.get(substitute_many(s.lhs, full))
                j = pos.get(substitute_many(s.rhs, full))
                if i is not None and j is not None:
                    out.add((i, j))
    return sorted(out)


# ---------------------------------------------------------------------------
# closure

def _transitive(M: np.ndarray) -> np.ndarray:
    while True:
        A = M.astype(np.float32)
        N = M | ((A @ A) > 0)
        if (N == M).all():
            return M
        M = N


def saturate(goal: Sequent | str, axioms: Sequence[Sequent], cfg: SearchConfig | None = None,
             sig: Signature | None = None, limit: int = MAX_UNIVERSE) -> Saturation:
    """Close reflexivity and the axiom instances under the rules; decide the goal.

    Rules: cut, ∨ on the left, ∧ on the right, both residuation double lines
    (for ``\\`` and for ``/``), and monotonicity of the modalities in the
    indexed form ``∇ₛ₂φ ⊢ ∇ₛ₁ψ`` from ``φ ⊢ ψ`` when ``s₁ ⪯ s₂``.
    """
    goal = as_sequent(goal)
    cfg = cfg or SearchConfig()
    sig = sig or default_signature()
    U = build_universe(goal, axioms, cfg.formula_universe_depth, limit)
    pos = {f: k for k, f in enumerate(U)}
    n = len(U)
    M = np.eye(n, dtype=bool)
    inst = axiom_pairs(axioms, U)
    for i, j in inst:
        M[i, j] = True

    ors = np.array([(k, pos[f.l], pos[f.r]) for k, f in enumerate(U) if isinstance(f, Or)], dtype=np.int64).reshape(-1, 3)
    ands = np.array([(k, pos[f.l], pos[f.r]) for k, f in enumerate(U) if isinstance(f, And)], dtype=np.int64).reshape(-1, 3)
    # φ•θ ⊢ ψ  ⇔  θ ⊢ φ\ψ     and     φ•θ ⊢ ψ  ⇔  φ ⊢ ψ/θ
    muls_by_left: dict[Formula, list[int]] = {}
    muls_by_right: dict[Formula, list[int]] = {}
    for m, g in enumerate(U):
        if isinstance(g, Mul):
            muls_by_left.setdefault(g.l, []).append(m)
            muls_by_right.setdefault(g.r, []).append(m)
    left_res, right_res = [], []
    for k, f in enumerate(U):
        if isinstance(f, LDiv):
            left_res += [(m, pos[f.r], pos[U[m].r], k) for m in muls_by_left.get(f.l, ())]
        elif isinstance(f, RDiv):
            right_res += [(m, pos[f.l], pos[U[m].l], k) for m in muls_by_right.get(f.r, ())]
    left_res = np.array(left_res, dtype=np.int64).reshape(-1, 4)
    right_res = np.array(right_res, dtype=np.int64).reshape(-1, 4)
    modal = []
    for kind in (Box, Dia):
        items = [(k, pos[f.arg], f.index) for k, f in enumerate(U) if isinstance(f, kind)]
        for x, ax, s2 in items:
            for y, ay, s1 in items:
                known = s1 in sig.indices and s2 in sig.indices
                if (sig.below(s1, s2) if known else s1 == s2):
                    modal.append((x, y, ax, ay))
    modal = np.array(modal, dtype=np.int64).reshape(-1, 4)

    rounds = 0
    while True:
        rounds += 1
        before = M.copy()
        M = _transitive(M)
        if len(ors):
            M[ors[:, 0]] |= M[ors[:, 1]] & M[ors[:, 2]]
        if len(ands):
            M[:, ands[:, 0]] |= M[:, ands[:, 1]] & M[:, ands[:, 2]]
        if len(left_res):
            m, psi, th, d = left_res.T
            both = M[m, psi] | M[th, d]
            M[m, psi] = both
            M[th, d] = both
        if len(right_res):
            m, psi, ph, r = right_res.T
            both = M[m, psi] | M[ph, r]
            M[m, psi] = both
            M[ph, r] = both
        if len(modal):
            x, y, ax, ay = modal.T
            M[x, y] |= M[ax, ay]
        if (M == before).all():
            break
    S = SequentSet(tuple(U), M)
    verdict = DERIVABLE if goal in S else NOT_DERIVED
    return Saturation(goal, S, verdict, rounds, len(inst))
