"""Naive reference implementations used as independent test oracles.

Everything here works on Python sets and the raw relations of a frame,
straight from the satisfaction clauses, and shares no code with the
bitmask evaluators under test.
"""

from itertools import product

from lambekmodal.syntax import And, Atom, Bot, Box, Dia, LDiv, Mul, Or, RDiv, Top, Unit


def upsets(F):
    W = range(F.n)
    out = []
    for bits in product((0, 1), repeat=F.n):
        S = {w for w in W if bits[w]}
        if all(b in S for a, b in F.leq if a in S):
            out.append(frozenset(S))
    return out


def truth(F, val, f):
    W = set(range(F.n))
    if isinstance(f, Atom):
        return set(val.get(f.name, ()))
    if isinstance(f, Top):
        return W
    if isinstance(f, Bot):
        return set()
    if isinstance(f, Unit):
        return set(F.O)
    if isinstance(f, (And, Or, Mul, LDiv, RDiv)):
        A, B = truth(F, val, f.l), truth(F, val, f.r)
        if isinstance(f, And):
            return A & B
        if isinstance(f, Or):
            return A | B
        if isinstance(f, Mul):
            return {w for (u, v, w) in F.R if u in A and v in B}
        if isinstance(f, LDiv):
            return {w for w in W if all(v in B for (u, x, v) in F.R if x == w and u in A)}
        # l / r: for all u, v with R w u v and u in r, v in l
        return {w for w in W if all(v in A for (x, u, v) in F.R if x == w and u in B)}
    A = truth(F, val, f.arg)
    if isinstance(f, Box):
        rel = F.box_rel(f.index)
        return {w for w in W if all(v in A for (x, v) in rel if x == w)}
    if isinstance(f, Dia):
        rel = F.dia_rel(f.index)
        return {w for w in W if any(v in A for (x, v) in rel if x == w)}
    raise TypeError(f)


def valid(F, s, atoms):
    ups = upsets(F)
    for choice in product(ups, repeat=len(atoms)):
        val = dict(zip(atoms, choice))
        if not truth(F, val, s.lhs) <= truth(F, val, s.rhs):
            return False
    return True
