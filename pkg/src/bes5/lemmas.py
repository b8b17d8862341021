"""Meta-theory checks over a finite universe and a list of relation families.

Each check is a universally quantified assertion over every base of the
universe, every family and every formula of a test pool:

``monotonicity``
    truth at a base persists to all its supersets.
``ex_falso``
    every formula holds at every inconsistent base.
``maximal_classical``
    at maximal bases ``bot`` fails and ``f -> g`` holds exactly when ``f``
    fails or ``g`` holds.
``excluded_middle``
    at maximal bases ``f`` or ``~f`` holds.
``maximal_witness``
    a formula failing at a base fails at some maximal superset.
``maximal_determines``
    a formula holding at every maximal base holds at every base.
``mp_local``
    ``f -> g`` and ``f`` at a base give ``g`` there.
``mp_rule``
    if ``f -> g`` and ``f`` hold everywhere, so does ``g``.
``axioms``
    every axiom instance in the pool holds everywhere.
``necessitation``
    a formula holding everywhere gives ``[a]f`` everywhere, for every agent.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .base import RuleUniverse
from .formula import BOT, Atom, Formula, Implies, Know, agents_of, neg, print_formula, subformulas
from .hilbert import instantiate
from .lattice import all_supersets, any_superset
from .parallel import ordered_map
from .relation import RelationFamily
from .semantics import EvalCache

CHECKS = (
    "monotonicity",
    "ex_falso",
    "maximal_classical",
    "excluded_middle",
    "maximal_witness",
    "maximal_determines",
    "mp_local",
    "mp_rule",
    "axioms",
    "necessitation",
)

SCHEMA_ARITY = {"Ax1": 2, "Ax2": 3, "Ax3": 2, "AxK": 2, "AxT": 1, "Ax4": 1, "Ax5": 1}


def pool_atoms(u: RuleUniverse) -> tuple[Atom, Atom]:
    """The two atoms the pool is written over; a one-atom alphabet reuses it."""
    p = u.alphabet[0]
    q = u.alphabet[1] if len(u.alphabet) > 1 else p
    return p, q


def pool_parts(u: RuleUniverse, agent: str = "a") -> list[Formula]:
    p, q = pool_atoms(u)
    parts = [p, q, Implies(p, q), Know(agent, p), BOT]
    return list(dict.fromkeys(parts))


def axiom_instances(u: RuleUniverse, agents: Sequence[str]) -> list[tuple[str, Formula]]:
    """All schema instances with metavariables drawn from the pool parts."""
    out: dict[Formula, str] = {}
    for a in agents:
        parts = pool_parts(u, a)
        for tag, arity in SCHEMA_ARITY.items():
            for args in itertools.product(parts, repeat=arity):
                f = instantiate(tag, *args, agent=a)
                out.setdefault(f, tag)
    return [(tag, f) for f, tag in out.items()]


def random_formula(rng: random.Random, atoms: Sequence[Atom], agents: Sequence[str], depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(list(atoms) + [BOT])
    kind = rng.choice(("imp", "imp", "know", "neg"))
    if kind == "imp":
        return Implies(
            random_formula(rng, atoms, agents, depth - 1),
            random_formula(rng, atoms, agents, depth - 1),
        )
    if kind == "know":
        return Know(rng.choice(list(agents)), random_formula(rng, atoms, agents, depth - 1))
    return neg(random_formula(rng, atoms, agents, depth - 1))


def random_pool(u: RuleUniverse, agents: Sequence[str], n: int = 100, seed: int = 0, depth: int = 3) -> list[Formula]:
    rng = random.Random(seed)
    atoms = list(dict.fromkeys(pool_atoms(u)))
    return [random_formula(rng, atoms, sorted(agents), depth) for _ in range(n)]


def formula_pool(
    u: RuleUniverse, agents: Sequence[str], n_random: int = 100, seed: int = 0
) -> list[Formula]:
    """Axiom instances, their parts and seeded random formulas, deduplicated."""
    out: list[Formula] = []
    for a in agents:
        out += pool_parts(u, a)
    out += [f for _, f in axiom_instances(u, agents)]
    out += random_pool(u, agents, n_random, seed)
    return list(dict.fromkeys(out))


@dataclass(frozen=True)
class Violation:
    check: str
    formula: Formula
    family: str
    bases: tuple[int, ...]

    def line(self) -> str:
        where = ",".join(map(str, self.bases))
        return f"VIOLATION {self.check} family={self.family} bases={where} formula={print_formula(self.formula)}"


@dataclass
class SuiteReport:
    checks: dict[str, int] = field(default_factory=lambda: {c: 0 for c in CHECKS})
    violations: list[Violation] = field(default_factory=list)
    n_formulas: int = 0
    n_families: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [f"check {c}: {n} assertions, {self.count(c)} violations" for c, n in self.checks.items()]
        out += [v.line() for v in self.violations]
        out.append(
            f"SUITE {'ok' if self.ok else 'violations'} violations={len(self.violations)} "
            f"formulas={self.n_formulas} families={self.n_families} "
            f"assertions={sum(self.checks.values())}"
        )
        return out

    def count(self, check: str) -> int:
        return sum(1 for v in self.violations if v.check == check)


def _first(mask: np.ndarray) -> int:
    return int(np.flatnonzero(mask)[0])


def _superset_where(u: RuleUniverse, b: int, mask: np.ndarray) -> int:
    """Smallest id ``c ⊇ b`` with ``mask[c]``."""
    for c in range(u.n_bases):
        if c & b == b and mask[c]:
            return c
    return -1


def check_family(
    u: RuleUniverse,
    fam: RelationFamily,
    label: str,
    pool: Sequence[Formula],
    axioms: Sequence[Formula],
    report: SuiteReport,
) -> None:
    cache = EvalCache(fam)
    nbits = u.n_rules
    inc = u.inconsistent
    mx = u.maximal
    vec = cache.vector

    def fail(check, f, *bases):
        report.violations.append(Violation(check, f, label, tuple(int(b) for b in bases)))

    implications: list[Implies] = []
    seen = set()
    for f in pool:
        for g in subformulas(f):
            if isinstance(g, Implies) and g not in seen:
                seen.add(g)
                implications.append(g)

    everywhere: dict[Formula, bool] = {}
    for f in pool:
        v = vec(f)
        everywhere[f] = bool(v.all())

        report.checks["monotonicity"] += 1
        up = all_supersets(v, nbits)
        if (v & ~up).any():
            b = _first(v & ~up)
            fail("monotonicity", f, b, _superset_where(u, b, ~v))

        report.checks["ex_falso"] += 1
        if (inc & ~v).any():
            fail("ex_falso", f, _first(inc & ~v))

        report.checks["excluded_middle"] += 1
        nv = vec(neg(f))
        if (mx & ~v & ~nv).any():
            fail("excluded_middle", f, _first(mx & ~v & ~nv))

        report.checks["maximal_witness"] += 1
        reach = any_superset(~v & mx, nbits)
        if (~v & ~reach).any():
            fail("maximal_witness", f, _first(~v & ~reach))

        report.checks["maximal_determines"] += 1
        if v[mx].all() and not v.all():
            fail("maximal_determines", f, _first(~v))

    report.checks["maximal_classical"] += 1
    if (vec(BOT) & mx).any():
        fail("maximal_classical", BOT, _first(vec(BOT) & mx))
    for g in implications:
        report.checks["maximal_classical"] += 1
        classical = ~vec(g.left) | vec(g.right)
        bad = mx & (vec(g) != classical)
        if bad.any():
            fail("maximal_classical", g, _first(bad))

        report.checks["mp_local"] += 1
        bad = vec(g) & vec(g.left) & ~vec(g.right)
        if bad.any():
            fail("mp_local", g, _first(bad))

        report.checks["mp_rule"] += 1
        if vec(g).all() and vec(g.left).all() and not vec(g.right).all():
            fail("mp_rule", g, _first(~vec(g.right)))

    for f in axioms:
        report.checks["axioms"] += 1
        if not vec(f).all():
            fail("axioms", f, _first(~vec(f)))

    for f in pool:
        if not everywhere[f]:
            continue
        for a in fam.agents:
            report.checks["necessitation"] += 1
            k = vec(Know(a, f))
            if not k.all():
                fail("necessitation", Know(a, f), _first(~k))


def run_lemma_suite(
    u: RuleUniverse,
    fams: Sequence[RelationFamily] | Sequence[tuple[str, RelationFamily]],
    n_random: int = 100,
    seed: int = 0,
    jobs: int = 1,
) -> SuiteReport:
    """Run every check over all bases of ``u`` and every family.

    ``fams`` may be bare families or ``(label, family)`` pairs.  With
    ``jobs > 1`` families are checked on a thread pool; per-family results
    are merged in input order, so the report does not depend on ``jobs``.
    """
    labelled = [
        f if isinstance(f, tuple) else (f"family{i}", f) for i, f in enumerate(fams)
    ]
    agents = sorted({a for _, fam in labelled for a in fam.agents}) or ["a"]
    pool = formula_pool(u, agents, n_random, seed)

    def one(item: tuple[str, RelationFamily]) -> SuiteReport:
        label, fam = item
        part = SuiteReport()
        fam_agents = list(fam.agents)
        fam_pool = [f for f in pool if _agents_ok(f, fam_agents)]
        axioms = [f for _, f in axiom_instances(u, fam_agents)]
        check_family(u, fam, label, fam_pool, axioms, part)
        return part

    u.maximal, u.inconsistent  # build shared tables before any worker touches them
    parts = ordered_map(one, labelled, jobs)
    report = SuiteReport(n_formulas=len(pool), n_families=len(labelled))
    for part in parts:
        for c, n in part.checks.items():
            report.checks[c] += n
        report.violations += part.violations
    return report


def _agents_ok(f: Formula, agents: Sequence[str]) -> bool:
    return agents_of(f) <= set(agents)
