"""Slow, definitional re-implementations used as test oracles.

Nothing here shares code with the library beyond the data types: closure is
the intersection of all closed atom sets, the S5 closure is a naive rule
fixpoint, and the modal-relation conditions are literal nested loops.
"""
from __future__ import annotations

import itertools

from bes5.base import RuleUniverse
from bes5.formula import Atom, Bottom, Formula, Implies, Know


def rules_of(u: RuleUniverse, mask: int):
    return [r for j, r in enumerate(u.rules) if mask >> j & 1]


def closure_oracle(u: RuleUniverse, mask: int) -> frozenset[Atom]:
    """Intersection of every atom set closed under the base's rules."""
    rules = rules_of(u, mask)
    out = set(u.alphabet)
    for k in range(len(u.alphabet) + 1):
        for s in itertools.combinations(u.alphabet, k):
            s = set(s)
            if all(r.conclusion in s for r in rules if r.premises <= s):
                out &= s
    return frozenset(out)


def inconsistent_oracle(u: RuleUniverse, mask: int) -> bool:
    return closure_oracle(u, mask) == frozenset(u.alphabet)


def maximal_oracle(u: RuleUniverse, mask: int) -> bool:
    if inconsistent_oracle(u, mask):
        return False
    return all(
        inconsistent_oracle(u, mask | 1 << j) for j in range(u.n_rules) if not mask >> j & 1
    )


def s5_fixpoint(pairs, carrier) -> set[tuple[int, int]]:
    """Add loops, then apply transitivity and the Euclidean rule until stable."""
    r = set(pairs) | {(x, x) for x in carrier}
    while True:
        new = set()
        for x, y in r:
            for y2, z in r:
                if y == y2 and (x, z) not in r:
                    new.add((x, z))
            for x2, z in r:
                if x == x2 and (y, z) not in r:
                    new.add((y, z))
        if not new:
            return r
        r |= new


def sub(b: int, c: int) -> bool:
    return b & c == b


def modal_conditions_oracle(u: RuleUniverse, pairs: set[tuple[int, int]]) -> set[str]:
    """Names of the conditions the relation breaks, straight from the definitions."""
    n = u.n_bases
    inc = [inconsistent_oracle(u, b) for b in range(n)]
    succ = {b: {c for (x, c) in pairs if x == b} for b in range(n)}
    failed = set()
    for b in range(n):
        if inc[b] and (not any(inc[c] for c in succ[b]) or not all(inc[c] for c in succ[b])):
            failed.add("a")
        if not inc[b] and any(inc[c] for c in succ[b]):
            failed.add("b")
    for b, c in pairs:
        for d in range(n):
            if sub(b, d) and not inc[d]:
                if not any(sub(c, e) for e in succ[d]):
                    failed.add("c")
            if sub(d, b) and not inc[c]:
                if not any(sub(e, c) for e in succ[d]):
                    failed.add("d")
    if any((x, x) not in pairs for x in range(n)):
        failed.add("reflexive")
    for (x, y), (y2, z) in itertools.product(pairs, pairs):
        if y == y2 and (x, z) not in pairs:
            failed.add("transitive")
            break
    for (x, y), (x2, z) in itertools.product(pairs, pairs):
        if x == x2 and (y, z) not in pairs:
            failed.add("euclidean")
            break
    return failed


def truth_table(f: Formula, true_atoms: set[Atom]) -> bool:
    """Classical value of a modal-free formula."""
    if isinstance(f, Atom):
        return f in true_atoms
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Implies):
        return (not truth_table(f.left, true_atoms)) or truth_table(f.right, true_atoms)
    raise ValueError("modal formula")


def has_modality(f: Formula) -> bool:
    if isinstance(f, Know):
        return True
    if isinstance(f, Implies):
        return has_modality(f.left) or has_modality(f.right)
    return False
