"""Atomic base rules, bases, derivability closure and (maximal) consistency.

Everything is relative to a finite :class:`RuleUniverse`: an ordered
alphabet plus every rule whose premise set has at most ``premise_cap``
atoms.  A base is a subset of the universe's rules, stored as a bitmask
against the universe's rule order, so the base with id ``i`` has rule ``j``
iff bit ``j`` of ``i`` is set.

With a finite alphabet, a base is inconsistent when it derives every
alphabet atom.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .formula import Atom, IDENT
from .lattice import popcount

ENUMERATION_CAP = 24
# Dense per-base tables (closures, relation matrices) are only built up to this.
TABLE_CAP = 16


class UniverseTooLarge(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BaseRule:
    premises: frozenset[Atom]
    conclusion: Atom

    def __str__(self) -> str:
        prem = " ".join(a.name for a in sorted(self.premises))
        return f"{prem} => {self.conclusion.name}".lstrip()


def rule(text: str) -> BaseRule:
    """``rule("p q => r")``; ``rule("=> p")`` for an axiom."""
    if "=>" not in text:
        raise ValueError(f"not a rule: {text!r}")
    lhs, rhs = text.split("=>", 1)
    names = lhs.split()
    concl = rhs.strip()
    for n in names + [concl]:
        if not IDENT.fullmatch(n):
            raise ValueError(f"bad atom name {n!r} in rule {text!r}")
    return BaseRule(frozenset(Atom(n) for n in names), Atom(concl))


class RuleUniverse:
    """All rules over ``alphabet`` with at most ``premise_cap`` premises.

    Rules are ordered by conclusion (alphabet order), then by the premise
    set's bit pattern over the alphabet.
    """

    def __init__(self, alphabet: Iterable[Atom | str], premise_cap: int = 1):
        atoms = [a if isinstance(a, Atom) else Atom(a) for a in alphabet]
        if not atoms:
            raise ValueError("alphabet must be nonempty")
        if len(set(atoms)) != len(atoms):
            raise ValueError("alphabet has duplicates")
        if premise_cap < 0:
            raise ValueError("premise_cap must be >= 0")
        self.alphabet: tuple[Atom, ...] = tuple(atoms)
        self.premise_cap = premise_cap
        self.atom_index = {a: i for i, a in enumerate(self.alphabet)}
        k = len(atoms)
        masks = sorted(
            (m for m in range(1 << k) if popcount(m) <= premise_cap),
        )
        rules = []
        prem_bits = []
        concl_bits = []
        for ci, c in enumerate(self.alphabet):
            for m in masks:
                prem = frozenset(self.alphabet[i] for i in range(k) if m >> i & 1)
                rules.append(BaseRule(prem, c))
                prem_bits.append(m)
                concl_bits.append(1 << ci)
        self.rules: tuple[BaseRule, ...] = tuple(rules)
        self.rule_index = {r: i for i, r in enumerate(self.rules)}
        self._prem = prem_bits
        self._concl = concl_bits
        self.full_atoms = (1 << k) - 1

    def __repr__(self) -> str:
        names = ",".join(a.name for a in self.alphabet)
        return f"RuleUniverse([{names}], premise_cap={self.premise_cap})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RuleUniverse)
            and self.alphabet == other.alphabet
            and self.premise_cap == other.premise_cap
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.premise_cap))

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    @property
    def n_bases(self) -> int:
        return 1 << len(self.rules)

    def expected_rule_count(self) -> int:
        k = len(self.alphabet)
        return k * sum(comb(k, j) for j in range(self.premise_cap + 1))

    def base(self, rules: Iterable[BaseRule | str] = ()) -> "Base":
        mask = 0
        for r in rules:
            if isinstance(r, str):
                r = rule(r)
            try:
                mask |= 1 << self.rule_index[r]
            except KeyError:
                raise ValueError(f"rule {r} is not in {self!r}") from None
        return Base(self, mask)

    def base_by_id(self, index: int) -> "Base":
        if not 0 <= index < self.n_bases:
            raise ValueError(f"base id {index} out of range")
        return Base(self, index)

    def full_base(self) -> "Base":
        return Base(self, self.n_bases - 1)

    def atoms_mask(self, atoms: Iterable[Atom]) -> int:
        m = 0
        for a in atoms:
            m |= 1 << self.atom_index[a]
        return m

    def atoms_of_mask(self, mask: int) -> frozenset[Atom]:
        return frozenset(a for i, a in enumerate(self.alphabet) if mask >> i & 1)

    def closure_mask(self, base_mask: int) -> int:
        """Forward-chaining fixpoint of the rules in ``base_mask``."""
        active = [j for j in range(self.n_rules) if base_mask >> j & 1]
        derived = 0
        changed = True
        while changed:
            changed = False
            for j in active:
                c = self._concl[j]
                if not derived & c and self._prem[j] & derived == self._prem[j]:
                    derived |= c
                    changed = True
        return derived

    def check_table_size(self) -> None:
        if self.n_rules > TABLE_CAP:
            raise UniverseTooLarge(
                f"{self.n_rules} rules: dense tables need at most {TABLE_CAP}"
            )

    @cached_property
    def closures(self) -> np.ndarray:
        """Closure atom-mask of every base, indexed by base id."""
        self.check_table_size()
        ids = np.arange(self.n_bases, dtype=np.int64)
        derived = np.zeros(self.n_bases, dtype=np.int64)
        for _ in range(len(self.alphabet)):
            before = derived.copy()
            for j in range(self.n_rules):
                p = self._prem[j]
                fire = ((ids >> j) & 1).astype(bool) & ((derived & p) == p)
                derived[fire] |= self._concl[j]
            if np.array_equal(before, derived):
                break
        return derived

    @cached_property
    def inconsistent(self) -> np.ndarray:
        return self.closures == self.full_atoms

    @cached_property
    def consistent(self) -> np.ndarray:
        return ~self.inconsistent

    @cached_property
    def maximal(self) -> np.ndarray:
        """Maximally consistent flag for every base id."""
        ids = np.arange(self.n_bases, dtype=np.int64)
        ok = self.consistent.copy()
        for j in range(self.n_rules):
            missing = ((ids >> j) & 1) == 0
            ok &= ~missing | self.inconsistent[ids | (1 << j)]
        return ok

    @cached_property
    def maximal_ids(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.maximal))


@dataclass(frozen=True)
class Base:
    universe: RuleUniverse = field(compare=True, repr=False)
    mask: int = 0

    @property
    def id(self) -> int:
        return self.mask

    @property
    def members(self) -> frozenset[BaseRule]:
        u = self.universe
        return frozenset(u.rules[j] for j in range(u.n_rules) if self.mask >> j & 1)

    def sorted_rules(self) -> list[BaseRule]:
        u = self.universe
        return [u.rules[j] for j in range(u.n_rules) if self.mask >> j & 1]

    def __contains__(self, r: BaseRule) -> bool:
        j = self.universe.rule_index.get(r)
        return j is not None and bool(self.mask >> j & 1)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __or__(self, other: "Base") -> "Base":
        return Base(self.universe, self.mask | other.mask)

    def __and__(self, other: "Base") -> "Base":
        return Base(self.universe, self.mask & other.mask)

    def __le__(self, other: "Base") -> bool:
        return self.mask & ~other.mask == 0

    def __ge__(self, other: "Base") -> bool:
        return other <= self

    def add(self, r: BaseRule | str) -> "Base":
        return self | self.universe.base([r])

    def __repr__(self) -> str:
        return "Base{" + ", ".join(str(r) for r in self.sorted_rules()) + "}"


def closure(b: Base) -> frozenset[Atom]:
    return b.universe.atoms_of_mask(b.universe.closure_mask(b.mask))


def proves_atom(b: Base, p: Atom | str) -> bool:
    if isinstance(p, str):
        p = Atom(p)
    u = b.universe
    if p not in u.atom_index:
        raise ValueError(f"atom {p} is not in the alphabet")
    return bool(u.closure_mask(b.mask) >> u.atom_index[p] & 1)


def is_inconsistent(b: Base) -> bool:
    u = b.universe
    return u.closure_mask(b.mask) == u.full_atoms


def is_consistent(b: Base) -> bool:
    return not is_inconsistent(b)


def is_maximally_consistent(b: Base) -> bool:
    if is_inconsistent(b):
        return False
    u = b.universe
    for j in range(u.n_rules):
        if not b.mask >> j & 1 and u.closure_mask(b.mask | 1 << j) != u.full_atoms:
            return False
    return True


def enumerate_bases(u: RuleUniverse, cap: int = ENUMERATION_CAP) -> Iterator[Base]:
    """Every base of ``u`` in binary-counting order of rule bitmasks."""
    if u.n_rules > cap:
        raise UniverseTooLarge(f"{u.n_rules} rules exceed enumeration cap {cap}")
    for i in range(u.n_bases):
        yield Base(u, i)


def extend_preserving(b: Base, keep: Callable[[Base], bool]) -> Base:
    """Greedily add universe rules in order while ``keep`` stays true."""
    cur = b
    for j in range(b.universe.n_rules):
        if cur.mask >> j & 1:
            continue
        cand = Base(cur.universe, cur.mask | 1 << j)
        if keep(cand):
            cur = cand
    return cur


def maximal_extensions(b: Base, keep: Callable[[Base], bool]) -> Iterator[Base]:
    """Exhaustive search: maximally consistent supersets of ``b`` satisfying ``keep``."""
    u = b.universe
    free = [j for j in range(u.n_rules) if not b.mask >> j & 1]
    for bits in itertools.product((1, 0), repeat=len(free)):
        mask = b.mask
        for j, on in zip(free, bits):
            if on:
                mask |= 1 << j
        cand = Base(u, mask)
        if keep(cand) and is_maximally_consistent(cand):
            yield cand


# -- rule files ---------------------------------------------------------------

def read_rules(text: str) -> tuple[RuleUniverse, list[BaseRule]]:
    """Parse a rule file with ``atoms:`` and ``premise_cap:`` headers."""
    atoms: list[str] | None = None
    cap = 1
    rules: list[BaseRule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("atoms:"):
            atoms = line[len("atoms:"):].split()
        elif line.startswith("premise_cap:"):
            cap = int(line[len("premise_cap:"):])
        else:
            try:
                rules.append(rule(line))
            except ValueError as e:
                raise ValueError(f"line {lineno}: {e}") from None
    if atoms is None:
        seen = sorted({a.name for r in rules for a in (*r.premises, r.conclusion)})
        atoms = seen
    return RuleUniverse(atoms, cap), rules


def read_base(text: str) -> Base:
    u, rules = read_rules(text)
    return u.base(rules)


def write_rules(u: RuleUniverse, rules: Sequence[BaseRule], comment: str = "") -> str:
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append("atoms: " + " ".join(a.name for a in u.alphabet))
    lines.append(f"premise_cap: {u.premise_cap}")
    lines += [str(r) for r in rules]
    return "\n".join(lines) + "\n"


def write_base(b: Base, comment: str = "") -> str:
    return write_rules(b.universe, b.sorted_rules(), comment)
