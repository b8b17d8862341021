"""Agent-indexed relations over the bases of a rule universe.

Each agent's relation is a dense boolean matrix ``R[b, c]`` over base ids.
:func:`check_modal_relation` checks the four structural conditions a modal
relation on bases must satisfy, plus reflexivity, transitivity and the
Euclidean property; failures come back with a witness tuple.

Condition (c) and (d) are folded with the superset/subset reductions from
:mod:`bes5.lattice`, which keeps a 4096-base universe at a few hundred
milliseconds per agent.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .base import RuleUniverse, UniverseTooLarge
from .lattice import all_subsets, all_supersets, any_subset, any_superset

Pair = tuple[int, int]

CONDITIONS = ("a", "b", "c", "d", "reflexive", "transitive", "euclidean")


class RelationFamily:
    """One relation matrix per agent over the bases of ``universe``."""

    def __init__(self, universe: RuleUniverse, per_agent: Mapping[str, np.ndarray]):
        if not per_agent:
            raise ValueError("a relation family needs at least one agent")
        universe.check_table_size()
        n = universe.n_bases
        mats = {}
        for agent, m in per_agent.items():
            m = np.asarray(m, dtype=bool)
            if m.shape != (n, n):
                raise ValueError(f"agent {agent}: matrix shape {m.shape} != {(n, n)}")
            m = m.copy()
            m.flags.writeable = False
            mats[agent] = m
        self.universe = universe
        self.per_agent: dict[str, np.ndarray] = dict(sorted(mats.items()))

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(self.per_agent)

    def __getitem__(self, agent: str) -> np.ndarray:
        try:
            return self.per_agent[agent]
        except KeyError:
            raise KeyError(f"agent {agent!r} is not in the family") from None

    def pairs(self, agent: str) -> list[Pair]:
        rows, cols = np.nonzero(self[agent])
        return list(zip(rows.tolist(), cols.tolist()))

    def restrict(self, agents: Iterable[str]) -> "RelationFamily":
        return RelationFamily(self.universe, {a: self[a] for a in agents})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RelationFamily)
            and self.universe == other.universe
            and self.agents == other.agents
            and all(np.array_equal(self[a], other[a]) for a in self.agents)
        )

    def __hash__(self) -> int:
        return hash((self.universe, tuple((a, m.tobytes()) for a, m in self.per_agent.items())))

    def __repr__(self) -> str:
        sizes = ", ".join(f"{a}: {int(m.sum())} pairs" for a, m in self.per_agent.items())
        return f"RelationFamily({self.universe!r}, {sizes})"


def as_matrix(pairs: Iterable[Pair], n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=bool)
    for x, y in pairs:
        m[x, y] = True
    return m


# -- frame properties ----------------------------------------------------------

def _as_pairs(r) -> tuple[set[Pair], set[int]]:
    if isinstance(r, np.ndarray):
        rows, cols = np.nonzero(r)
        return set(zip(rows.tolist(), cols.tolist())), set(range(r.shape[0]))
    pairs = set(r)
    return pairs, {x for p in pairs for x in p}


def is_reflexive(r, carrier: Iterable[int] | None = None) -> bool:
    pairs, dom = _as_pairs(r)
    if carrier is not None:
        dom = set(carrier)
    return all((x, x) in pairs for x in dom)


def is_transitive(r) -> bool:
    pairs, _ = _as_pairs(r)
    succ: dict[int, set[int]] = {}
    for x, y in pairs:
        succ.setdefault(x, set()).add(y)
    return all(succ.get(y, set()) <= succ[x] for x, y in pairs)


def is_euclidean(r) -> bool:
    pairs, _ = _as_pairs(r)
    succ: dict[int, set[int]] = {}
    for x, y in pairs:
        succ.setdefault(x, set()).add(y)
    return all(succ[x] <= succ.get(y, set()) for x, y in pairs)


def _row_labels(m: np.ndarray) -> np.ndarray:
    packed = np.ascontiguousarray(np.packbits(m, axis=1))
    rows = packed.view(np.dtype((np.void, packed.shape[1]))).reshape(-1)
    _, labels = np.unique(rows, return_inverse=True)
    return labels.reshape(-1)


def _frame_witnesses(m: np.ndarray) -> dict[str, tuple | None]:
    """Reflexive/transitive/Euclidean checks with witnesses on a dense matrix.

    Transitivity is ``row(y) ⊆ row(x)`` for every pair ``(x, y)``; the
    Euclidean property is ``row(x) ⊆ row(y)``.  Pairs are grouped by the
    labels of their row patterns so each distinct comparison runs once.
    """
    out: dict[str, tuple | None] = {}
    diag = np.diagonal(m)
    out["reflexive"] = None if diag.all() else (int(np.flatnonzero(~diag)[0]),)
    labels = _row_labels(m)
    # rows sharing a label are identical, so one representative row per label suffices
    _, reps = np.unique(labels, return_index=True)
    rows, cols = np.nonzero(m[reps])
    rows = reps[rows]
    key = labels[rows].astype(np.int64) * (int(labels.max()) + 1) + labels[cols]
    _, first = np.unique(key, return_index=True)
    trans = eucl = None
    for k in first.tolist():
        x, y = int(rows[k]), int(cols[k])
        lx, ly = labels[x], labels[y]
        if lx == ly:
            continue
        rx, ry = m[x], m[y]
        if trans is None and (ry & ~rx).any():
            trans = (x, y, int(np.flatnonzero(ry & ~rx)[0]))
        if eucl is None and (rx & ~ry).any():
            eucl = (x, y, int(np.flatnonzero(rx & ~ry)[0]))
        if trans and eucl:
            break
    out["transitive"] = trans
    out["euclidean"] = eucl
    return out


# -- S5 closure ----------------------------------------------------------------

def s5_closure(seed: Iterable[Pair], u: RuleUniverse | int) -> np.ndarray:
    """Least reflexive, transitive, Euclidean relation containing ``seed``.

    With reflexivity the Euclidean rule yields symmetry, so the closure is the
    equivalence relation generated by ``seed``; it is built by union-find.
    """
    n = u if isinstance(u, int) else u.n_bases
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in seed:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
    roots = np.array([find(x) for x in range(n)])
    return roots[:, None] == roots[None, :]


def equivalence_from_labels(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    return labels[:, None] == labels[None, :]


# -- the modal-relation conditions ---------------------------------------------

@dataclass
class AgentReport:
    agent: str
    failures: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def passed(self, condition: str) -> bool:
        return condition not in self.failures


@dataclass
class ModalCheckReport:
    agents: dict[str, AgentReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.agents.values())

    def failed_conditions(self) -> dict[str, list[str]]:
        return {a: sorted(r.failures) for a, r in self.agents.items() if r.failures}

    def lines(self) -> list[str]:
        out = []
        for a, r in self.agents.items():
            for cond in CONDITIONS:
                if cond in r.failures:
                    out.append(f"agent {a}: condition {cond} FAIL witness={r.failures[cond]}")
                else:
                    out.append(f"agent {a}: condition {cond} pass")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def condition_violations(m: np.ndarray, u: RuleUniverse) -> dict[str, np.ndarray]:
    """Boolean masks of pairs ``(b, c)`` of ``m`` that break (c) or (d).

    (c): ``R b c`` and some consistent ``d ⊇ b`` has no ``e ⊇ c`` with ``R d e``.
    (d): ``R b c`` with ``c`` consistent and some ``d ⊆ b`` has no ``e ⊆ c``
    with ``R d e``.
    """
    nbits = u.n_rules
    cons = u.consistent
    up = any_superset(m, nbits, axis=1)          # up[d, c]: some e ⊇ c with R d e
    up = up | ~cons[:, None]                     # only consistent d count
    ok_c = all_supersets(up, nbits, axis=0)      # for every d ⊇ b
    down = any_subset(m, nbits, axis=1)          # down[d, c]: some e ⊆ c with R d e
    ok_d = all_subsets(down, nbits, axis=0)      # for every d ⊆ b
    return {
        "c": m & ~ok_c,
        "d": m & cons[None, :] & ~ok_d,
    }


def _witness_c(m, u, b, c):
    for d in range(u.n_bases):
        if d & b == b and u.consistent[d]:
            if not any(m[d, e] for e in range(u.n_bases) if e & c == c):
                return (b, c, d)
    return (b, c)


def _witness_d(m, u, b, c):
    for d in range(u.n_bases):
        if d & ~b == 0:
            if not any(m[d, e] for e in range(u.n_bases) if e & ~c == 0):
                return (b, c, d)
    return (b, c)


def check_agent(m: np.ndarray, u: RuleUniverse, agent: str = "a") -> AgentReport:
    u.check_table_size()
    rep = AgentReport(agent)
    inc = u.inconsistent
    # (a): an inconsistent base sees some inconsistent base and only those
    sees_inc = (m & inc[None, :]).any(axis=1)
    sees_cons = (m & ~inc[None, :]).any(axis=1)
    bad_a = inc & (~sees_inc | sees_cons)
    if bad_a.any():
        b = int(np.flatnonzero(bad_a)[0])
        if sees_cons[b]:
            rep.failures["a"] = (b, int(np.flatnonzero(m[b] & ~inc)[0]))
        else:
            rep.failures["a"] = (b,)
    # (b): consistent bases see only consistent bases
    bad_b = ~inc & sees_inc
    if bad_b.any():
        b = int(np.flatnonzero(bad_b)[0])
        rep.failures["b"] = (b, int(np.flatnonzero(m[b] & inc)[0]))
    viol = condition_violations(m, u)
    for cond, wit in (("c", _witness_c), ("d", _witness_d)):
        if viol[cond].any():
            b, c = (int(x) for x in np.argwhere(viol[cond])[0])
            rep.failures[cond] = wit(m, u, b, c)
    for cond, w in _frame_witnesses(m).items():
        if w is not None:
            rep.failures[cond] = w
    return rep


def check_modal_relation(fam: RelationFamily) -> ModalCheckReport:
    return ModalCheckReport(
        {a: check_agent(fam[a], fam.universe, a) for a in fam.agents}
    )


# -- canonical and sampled families ---------------------------------------------

def identity_family(u: RuleUniverse, agents: Sequence[str] = ("a",)) -> RelationFamily:
    eye = np.eye(u.n_bases, dtype=bool)
    return RelationFamily(u, {a: eye for a in agents})


def two_block_matrix(u: RuleUniverse) -> np.ndarray:
    cons = u.consistent
    return equivalence_from_labels(cons.astype(np.int8))


def two_block_family(u: RuleUniverse, agents: Sequence[str] = ("a",)) -> RelationFamily:
    """Consistent×consistent ∪ inconsistent×inconsistent for every agent.

    The base holding every universe rule contains ``=> p`` for each atom, so
    the inconsistent block is never empty.
    """
    m = two_block_matrix(u)
    return RelationFamily(u, {a: m for a in agents})


def canonical_families(u: RuleUniverse, agents: Sequence[str] = ("a",)) -> list[RelationFamily]:
    return [identity_family(u, agents), two_block_family(u, agents)]


@dataclass
class SampleResult:
    families: list[RelationFamily]
    requested: int
    attempts: int

    @property
    def exhausted(self) -> bool:
        return len(self.families) < self.requested


def _sample_agent_matrix(u: RuleUniverse, rng: random.Random) -> np.ndarray:
    cons_ids = np.flatnonzero(u.consistent).tolist()
    inc_ids = np.flatnonzero(u.inconsistent).tolist()
    if rng.random() < 0.5:
        # projection seed: bases agreeing on a random subset of rules
        keep = sum(1 << j for j in range(u.n_rules) if rng.random() < 0.5)
        groups: dict[int, list[int]] = {}
        for b in cons_ids:
            groups.setdefault(b & keep, []).append(b)
        seed = [(g[0], x) for g in groups.values() for x in g[1:]]
    else:
        k = rng.randint(1, 3)
        seed = [(rng.choice(cons_ids), rng.choice(cons_ids)) for _ in range(k)]
    seed += [(inc_ids[0], x) for x in inc_ids[1:]]
    return s5_closure(seed, u)


def sample_families(
    u: RuleUniverse,
    agents: Sequence[str],
    count: int,
    seed: int = 0,
    budget: int | None = None,
) -> SampleResult:
    """Rejection-sample S5-modal relation families, deterministic in ``seed``.

    Each agent's relation is the S5 closure of either a few random pairs of
    consistent bases or the "agrees on a random rule subset" equivalence,
    joined with the inconsistent block; candidates failing
    :func:`check_modal_relation` are discarded.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if budget is None:
        budget = 50 * max(count, 1)
    rng = random.Random(seed)
    accepted_by_agent: list[np.ndarray] = []
    found: list[RelationFamily] = []
    attempts = 0
    while len(found) < count and attempts < budget:
        attempts += 1
        m = _sample_agent_matrix(u, rng)
        if not check_agent(m, u).ok:
            continue
        accepted_by_agent.append(m)
        # one accepted matrix per agent slot; families draw without replacement
        if len(accepted_by_agent) >= len(agents):
            mats = accepted_by_agent[: len(agents)]
            accepted_by_agent = accepted_by_agent[len(agents):]
            found.append(RelationFamily(u, dict(zip(agents, mats))))
    return SampleResult(found, count, attempts)


def enumerate_agent_relations(u: RuleUniverse, max_slots: int = 20) -> Iterator[np.ndarray]:
    """Every single-agent relation on ``u`` that passes the full check."""
    n = u.n_bases
    if n * n > max_slots:
        raise UniverseTooLarge(f"{n * n} pair slots exceed {max_slots}")
    diag = sum(1 << (i * n + i) for i in range(n))
    for code in range(1 << (n * n)):
        if code & diag != diag:
            continue
        m = np.array([[code >> (i * n + j) & 1 for j in range(n)] for i in range(n)], dtype=bool)
        frame = _frame_witnesses(m)
        if frame["transitive"] or frame["euclidean"]:
            continue
        if check_agent(m, u).ok:
            yield m


def enumerate_families(
    u: RuleUniverse, agents: Sequence[str] = ("a",), max_slots: int = 20
) -> Iterator[RelationFamily]:
    """All families whose every agent relation passes the check.

    Relations are enumerated once over ``n_bases**2`` pair slots and then
    combined across agents.
    """
    if u.n_bases ** 2 > max_slots:
        raise UniverseTooLarge(f"{u.n_bases}^2 pair slots exceeds {max_slots}")
    per_agent = list(enumerate_agent_relations(u, max_slots))
    for combo in itertools.product(per_agent, repeat=len(agents)):
        yield RelationFamily(u, dict(zip(agents, combo)))


# -- relation files --------------------------------------------------------------

def write_relations(fam: RelationFamily) -> str:
    ids = [str(i) for i in range(fam.universe.n_bases)]
    chunks = []
    for a in fam.agents:
        m = fam[a]
        chunks.append(f"agent: {a}")
        for x in np.flatnonzero(m.any(axis=1)).tolist():
            head = ids[x] + " "
            chunks.append(head + ("\n" + head).join([ids[y] for y in np.flatnonzero(m[x]).tolist()]))
    return "\n".join(chunks) + "\n"


_HEADER = re.compile(r"^[ \t]*agent:(.*)$", re.MULTILINE)
_NOT_PAIR_TEXT = re.compile(r"[^\d \t\n]")


def read_relations(text: str, u: RuleUniverse) -> RelationFamily:
    """Parse a relation file; well-formed files take a vectorised path."""
    fam = _read_relations_fast(text, u)
    return fam if fam is not None else _read_relations_lines(text, u)


def _read_relations_fast(text: str, u: RuleUniverse) -> RelationFamily | None:
    """None whenever the text is not plainly well formed; the line parser then reports why."""
    n = u.n_bases
    parts = _HEADER.split(text)
    if parts[0].strip() or len(parts) < 3:
        return None
    per_agent: dict[str, np.ndarray] = {}
    for name, body in zip(parts[1::2], parts[2::2]):
        if _NOT_PAIR_TEXT.search(body):
            return None
        lines = body.split("\n")
        n_pairs = len(lines) - lines.count("")
        ids = np.fromstring(body, dtype=np.int64, sep=" ")
        if ids.size != 2 * n_pairs or (ids.size and ids.max() >= n):
            return None
        m = per_agent.setdefault(name.strip(), np.zeros((n, n), dtype=bool))
        m[ids[0::2], ids[1::2]] = True
    return RelationFamily(u, per_agent)


def _read_relations_lines(text: str, u: RuleUniverse) -> RelationFamily:
    n = u.n_bases
    per_agent: dict[str, np.ndarray] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("agent:"):
            current = line[len("agent:"):].strip()
            per_agent.setdefault(current, np.zeros((n, n), dtype=bool))
            continue
        if current is None:
            raise ValueError(f"line {lineno}: pair before any 'agent:' header")
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'i j'")
        x, y = int(parts[0]), int(parts[1])
        if not (0 <= x < n and 0 <= y < n):
            raise ValueError(f"line {lineno}: base id out of range")
        per_agent[current][x, y] = True
    return RelationFamily(u, per_agent)
