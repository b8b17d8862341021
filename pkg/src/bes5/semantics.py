"""Validity at a base relative to a relation family, over a finite universe.

Truth of a formula is computed for every base of the universe at once as a
boolean vector indexed by base id:

* atom ``p``: ``p`` is in the base's closure;
* ``bot``: the base is inconsistent;
* ``f -> g``: every superset of the base in the universe that validates
  ``f`` validates ``g`` (an all-supersets fold);
* ``[a]f``: ``f`` holds at every base the agent's relation reaches.

:class:`EvalCache` memoises these vectors per family.  :func:`holds_direct`
is a plain recursive reading of the same clauses used as a test oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .base import Base, RuleUniverse, is_inconsistent, proves_atom
from .formula import Atom, Bottom, Formula, Implies, Know, agents_of, atoms_of
from .lattice import all_supersets
from .relation import (
    RelationFamily,
    canonical_families,
    enumerate_families,
    sample_families,
)


class AgentNotInFamily(KeyError):
    pass


class EvalCache:
    """Truth vectors of formulas under one relation family."""

    def __init__(self, fam: RelationFamily):
        self.fam = fam
        self.u = fam.universe
        self._vectors: dict[Formula, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, f: Formula) -> bool:
        return f in self._vectors

    def vector(self, f: Formula) -> np.ndarray:
        v = self._vectors.get(f)
        if v is None:
            v = self._compute(f)
            v.flags.writeable = False
            self._vectors[f] = v
        return v

    def _compute(self, f: Formula) -> np.ndarray:
        u = self.u
        if isinstance(f, Atom):
            if f not in u.atom_index:
                raise ValueError(f"atom {f} is not in the universe alphabet")
            return ((u.closures >> u.atom_index[f]) & 1).astype(bool)
        if isinstance(f, Bottom):
            return u.inconsistent.copy()
        if isinstance(f, Implies):
            local = ~self.vector(f.left) | self.vector(f.right)
            return all_supersets(local, u.n_rules)
        if isinstance(f, Know):
            if f.agent not in self.fam.per_agent:
                raise AgentNotInFamily(f"agent {f.agent!r} is not in the family")
            body = self.vector(f.body)
            return ~self.fam[f.agent][:, ~body].any(axis=1)
        raise TypeError(f"not a formula: {f!r}")

    def holds(self, f: Formula, b: int | Base) -> bool:
        return bool(self.vector(f)[_bid(b)])

    def consequence_vector(self, gamma: Sequence[Formula], f: Formula) -> np.ndarray:
        if not gamma:
            return self.vector(f)
        prem = np.logical_and.reduce([self.vector(g) for g in gamma])
        return all_supersets(~prem | self.vector(f), self.u.n_rules)


def _bid(b: int | Base) -> int:
    return b.id if isinstance(b, Base) else int(b)


def bes_holds(f: Formula, b: int | Base, fam: RelationFamily, cache: EvalCache | None = None) -> bool:
    if cache is None:
        cache = EvalCache(fam)
    elif cache.fam is not fam:
        raise ValueError("cache belongs to a different family")
    return cache.holds(f, b)


def bes_consequence(
    gamma: Sequence[Formula],
    f: Formula,
    b: int | Base,
    fam: RelationFamily,
    cache: EvalCache | None = None,
) -> bool:
    """Every superset of ``b`` validating all of ``gamma`` validates ``f``."""
    if cache is None:
        cache = EvalCache(fam)
    return bool(cache.consequence_vector(list(gamma), f)[_bid(b)])


def holds_direct(f: Formula, b: int, fam: RelationFamily) -> bool:
    """Definitional recursion with no vectorisation and no memo."""
    u = fam.universe
    base = Base(u, b)
    if isinstance(f, Atom):
        return proves_atom(base, f)
    if isinstance(f, Bottom):
        return is_inconsistent(base)
    if isinstance(f, Implies):
        for c in range(u.n_bases):
            if c & b == b and holds_direct(f.left, c, fam) and not holds_direct(f.right, c, fam):
                return False
        return True
    if isinstance(f, Know):
        r = fam[f.agent]
        return all(holds_direct(f.body, c, fam) for c in range(u.n_bases) if r[b, c])
    raise TypeError(f"not a formula: {f!r}")


# -- universe-level validity ---------------------------------------------------

@dataclass(frozen=True)
class Explicit:
    family: RelationFamily
    label: str = "explicit"


@dataclass(frozen=True)
class Canonical:
    pass


@dataclass(frozen=True)
class Sampled:
    n: int
    seed: int = 0


@dataclass(frozen=True)
class Exhaustive:
    max_slots: int = 20


Mode = Union[Explicit, Canonical, Sampled, Exhaustive]


@dataclass
class Verdict:
    valid: bool
    formula: Formula
    families_checked: int
    base: int | None = None
    family: RelationFamily | None = None
    family_label: str | None = None
    note: str = ""

    def line(self) -> str:
        if self.valid:
            return f"VERDICT valid families={self.families_checked}"
        agents = ",".join(self.family.agents) if self.family else ""
        return (
            f"VERDICT invalid base={self.base} family={self.family_label} agents={agents}"
        )


def mode_families(
    u: RuleUniverse, agents: Sequence[str], mode: Mode
) -> list[tuple[str, RelationFamily]]:
    if isinstance(mode, Explicit):
        return [(mode.label, mode.family)]
    if isinstance(mode, Canonical):
        ident, block = canonical_families(u, agents)
        return [("identity", ident), ("two_block", block)]
    if isinstance(mode, Sampled):
        res = sample_families(u, agents, mode.n, mode.seed)
        return [(f"sample{i}", f) for i, f in enumerate(res.families)]
    if isinstance(mode, Exhaustive):
        return [
            (f"enum{i}", f)
            for i, f in enumerate(enumerate_families(u, agents, mode.max_slots))
        ]
    raise TypeError(f"unknown mode {mode!r}")


def default_agents(formulas: Iterable[Formula]) -> tuple[str, ...]:
    found = set()
    for f in formulas:
        found |= agents_of(f)
    return tuple(sorted(found)) or ("a",)


def bes_valid(
    f: Formula,
    u: RuleUniverse,
    mode: Mode = Canonical(),
    agents: Sequence[str] | None = None,
) -> Verdict:
    """Check ``f`` at every base of ``u`` under every family the mode yields."""
    missing = atoms_of(f) - set(u.alphabet)
    if missing:
        raise ValueError(f"atoms {sorted(a.name for a in missing)} not in alphabet")
    if agents is None:
        agents = default_agents([f])
    fams = mode_families(u, agents, mode)
    note = ""
    if isinstance(mode, Sampled) and len(fams) < mode.n:
        note = f"sampling budget exhausted: {len(fams)} of {mode.n} families"
    for label, fam in fams:
        vec = EvalCache(fam).vector(f)
        if not vec.all():
            b = int(np.flatnonzero(~vec)[0])
            return Verdict(False, f, len(fams), b, fam, label, note)
    return Verdict(True, f, len(fams), note=note)
