"""Multi-agent Kripke models: evaluation, frame checks, S5 model enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .formula import Atom, Bottom, Formula, Implies, Know, agents_of, atoms_of
from .relation import is_euclidean, is_reflexive, is_transitive


class UnknownWorld(KeyError):
    pass


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[str, ...]
    relations: Mapping[str, frozenset[tuple[str, str]]]
    valuation: Mapping[Atom, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.worlds:
            raise ValueError("a model needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("duplicate world names")
        ws = set(self.worlds)
        for a, pairs in self.relations.items():
            for x, y in pairs:
                if x not in ws or y not in ws:
                    raise UnknownWorld(f"agent {a}: pair ({x}, {y}) names an unknown world")
        for p, where in self.valuation.items():
            if not set(where) <= ws:
                raise UnknownWorld(f"valuation of {p} names an unknown world")

    @classmethod
    def build(cls, worlds, relations, valuation=None) -> "KripkeModel":
        rel = {a: frozenset((x, y) for x, y in pairs) for a, pairs in relations.items()}
        val = {}
        for p, where in (valuation or {}).items():
            val[p if isinstance(p, Atom) else Atom(p)] = frozenset(where)
        return cls(tuple(worlds), rel, val)

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(sorted(self.relations))

    def successors(self, agent: str, w: str) -> list[str]:
        pairs = self.relations[agent]
        return [v for v in self.worlds if (w, v) in pairs]

    def true_atoms(self, w: str) -> frozenset[Atom]:
        return frozenset(p for p, where in self.valuation.items() if w in where)


def kripke_eval(m: KripkeModel, w: str, f: Formula) -> bool:
    if w not in m.worlds:
        raise UnknownWorld(f"unknown world {w!r}")
    return _eval(m, w, f)


def _eval(m: KripkeModel, w: str, f: Formula) -> bool:
    if isinstance(f, Atom):
        return w in m.valuation.get(f, ())
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Implies):
        return not _eval(m, w, f.left) or _eval(m, w, f.right)
    if isinstance(f, Know):
        if f.agent not in m.relations:
            raise KeyError(f"unknown agent {f.agent!r}")
        return all(_eval(m, v, f.body) for v in m.successors(f.agent, w))
    raise TypeError(f"not a formula: {f!r}")


@dataclass
class FrameReport:
    per_agent: dict[str, dict[str, bool]]

    @property
    def is_s5(self) -> bool:
        return all(all(props.values()) for props in self.per_agent.values())

    def lines(self) -> list[str]:
        return [
            f"agent {a}: reflexive={p['reflexive']} transitive={p['transitive']} "
            f"euclidean={p['euclidean']}"
            for a, p in self.per_agent.items()
        ]


def check_frame(m: KripkeModel) -> FrameReport:
    out = {}
    for a in m.agents:
        pairs = m.relations[a]
        out[a] = {
            "reflexive": is_reflexive(pairs, m.worlds),
            "transitive": is_transitive(pairs),
            "euclidean": is_euclidean(pairs),
        }
    return FrameReport(out)


# -- S5 model enumeration -------------------------------------------------------

def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``n`` in lexicographic order."""
    if n == 0:
        yield ()
        return

    def grow(prefix: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            yield from grow(prefix + [b], max(top, b))

    yield from grow([0], 0)


def partition_relation(worlds: Sequence[str], blocks: Sequence[int]) -> frozenset[tuple[str, str]]:
    return frozenset(
        (worlds[i], worlds[j])
        for i in range(len(worlds))
        for j in range(len(worlds))
        if blocks[i] == blocks[j]
    )


def s5_models(
    n_worlds: int, agents: Sequence[str], atoms: Sequence[Atom]
) -> Iterator[KripkeModel]:
    """Every S5 model on worlds ``w0..w{n-1}`` in a fixed order.

    Agent relations run over set partitions, valuations over bitmasks of
    (atom, world) pairs.
    """
    worlds = tuple(f"w{i}" for i in range(n_worlds))
    parts = list(set_partitions(n_worlds))
    atoms = sorted(atoms)
    for combo in itertools.product(parts, repeat=len(agents)):
        rels = {a: partition_relation(worlds, blocks) for a, blocks in zip(agents, combo)}
        for code in range(1 << (n_worlds * len(atoms))):
            val = {}
            for k, p in enumerate(atoms):
                val[p] = frozenset(
                    worlds[i] for i in range(n_worlds) if code >> (k * n_worlds + i) & 1
                )
            yield KripkeModel(worlds, rels, val)


@dataclass
class CountermodelResult:
    model: KripkeModel | None
    world: str | None
    max_worlds: int

    @property
    def found(self) -> bool:
        return self.model is not None

    def line(self) -> str:
        if self.found:
            return f"COUNTERMODEL worlds={len(self.model.worlds)} world={self.world}"
        return f"NONE up to {self.max_worlds} worlds (not a validity proof)"


def kripke_countermodel_search(
    f: Formula, agents: Iterable[str] | None = None, max_worlds: int = 3
) -> CountermodelResult:
    """First S5 model (by world count, then enumeration order) refuting ``f``."""
    if max_worlds < 1:
        raise ValueError("max_worlds must be >= 1")
    agent_list = sorted(set(agents or ()) | agents_of(f)) or ["a"]
    atoms = sorted(atoms_of(f))
    for n in range(1, max_worlds + 1):
        for m in s5_models(n, agent_list, atoms):
            for w in m.worlds:
                if not _eval(m, w, f):
                    return CountermodelResult(m, w, max_worlds)
    return CountermodelResult(None, None, max_worlds)


# -- model files -----------------------------------------------------------------

def read_model(text: str) -> KripkeModel:
    """``worlds: w v`` / ``agent a: w v, v w`` / ``val p: w`` lines, ``#`` comments."""
    worlds: list[str] | None = None
    rels: dict[str, set[tuple[str, str]]] = {}
    val: dict[Atom, frozenset[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key: value'")
        head = head.strip()
        if head == "worlds":
            worlds = rest.split()
        elif head.startswith("agent "):
            agent = head[len("agent "):].strip()
            pairs = rels.setdefault(agent, set())
            for chunk in rest.split(","):
                chunk = chunk.split()
                if not chunk:
                    continue
                if len(chunk) != 2:
                    raise ValueError(f"line {lineno}: bad pair {' '.join(chunk)!r}")
                pairs.add((chunk[0], chunk[1]))
        elif head.startswith("val "):
            val[Atom(head[len("val "):].strip())] = frozenset(rest.split())
        else:
            raise ValueError(f"line {lineno}: unknown header {head!r}")
    if worlds is None:
        raise ValueError("missing 'worlds:' line")
    return KripkeModel.build(worlds, rels, val)


def write_model(m: KripkeModel, comment: str = "") -> str:
    lines = [f"# {c}" for c in comment.splitlines()] if comment else []
    lines.append("worlds: " + " ".join(m.worlds))
    for a in m.agents:
        order = {w: i for i, w in enumerate(m.worlds)}
        pairs = sorted(m.relations[a], key=lambda p: (order[p[0]], order[p[1]]))
        lines.append(f"agent {a}: " + ", ".join(f"{x} {y}" for x, y in pairs))
    for p in sorted(m.valuation):
        order = {w: i for i, w in enumerate(m.worlds)}
        lines.append(f"val {p.name}: " + " ".join(sorted(m.valuation[p], key=order.get)))
    return "\n".join(lines) + "\n"
