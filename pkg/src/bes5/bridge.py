"""Turn an S5 Kripke countermodel into a base-level countermodel.

Pipeline, for a model ``M`` refuting ``φ`` at world ``w``:

1. :func:`disambiguate_model` gives every world ``v`` a fresh atom ``q_v``
   false exactly at ``v``, so worlds have pairwise distinct valuations.
2. :func:`build_seed_base` writes the world's valuation as rules:
   ``=> p`` for true atoms, ``=> q_v`` for the other worlds' atoms and
   ``p => q_w``, ``q_w => p`` for false atoms.
3. :func:`build_world_base` extends the seed to a maximally consistent base
   that still does not derive ``q_w``.
4. :func:`build_relation_family` relates the bases per agent.
5. :func:`verify_bridge` checks the modal-relation conditions and that
   every subformula of ``φ`` holds at each world base exactly when it is
   true at the world.

Step 4 first runs the rule-based construction (world pairs, the
inconsistent block, the three cases for bases below maximal ones, then S5
closure).  When that relation fails the modal-relation check, the pipeline
falls back to the greatest S5-modal relation that keeps the world classes
apart (:func:`refine_family`) and records both outcomes in the report.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .base import (
    Base,
    BaseRule,
    RuleUniverse,
    closure,
    extend_preserving,
    is_maximally_consistent,
    maximal_extensions,
    proves_atom,
    write_base,
    write_rules,
)
from .formula import Atom, Formula, atoms_of, fresh_atoms, print_formula, subformulas
from .kripke import KripkeModel, check_frame, kripke_countermodel_search, kripke_eval, write_model
from .lattice import or_supersets
from .parallel import ordered_map
from .relation import (
    ModalCheckReport,
    RelationFamily,
    check_modal_relation,
    condition_violations,
    equivalence_from_labels,
    s5_closure,
    write_relations,
)
from .semantics import EvalCache


class BridgeError(RuntimeError):
    pass


# -- fresh atoms per world ---------------------------------------------------------

def disambiguate_model(m: KripkeModel, phi: Formula) -> tuple[KripkeModel, dict[str, Atom]]:
    """Add a fresh atom per world, false only at that world."""
    if not check_frame(m).is_s5:
        raise BridgeError("model is not S5")
    avoid = set(atoms_of(phi)) | set(m.valuation)
    qs = fresh_atoms(len(m.worlds), avoid)
    qmap = dict(zip(m.worlds, qs))
    val = dict(m.valuation)
    for v, q in qmap.items():
        val[q] = frozenset(x for x in m.worlds if x != v)
    return KripkeModel(m.worlds, m.relations, val), qmap


def bridge_universe(phi: Formula, qmap: Mapping[str, Atom]) -> RuleUniverse:
    alphabet = sorted(set(atoms_of(phi)) | set(qmap.values()))
    return RuleUniverse(alphabet, premise_cap=1)


# -- seed and world bases ----------------------------------------------------------

def seed_rules(w: str, mp: KripkeModel, qmap: Mapping[str, Atom], alphabet) -> list[BaseRule]:
    q_w = qmap[w]
    out: set[BaseRule] = set()
    for p in alphabet:
        if kripke_eval(mp, w, p):
            out.add(BaseRule(frozenset(), p))
    for v, q in qmap.items():
        if v != w:
            out.add(BaseRule(frozenset(), q))
    for p in alphabet:
        if not kripke_eval(mp, w, p):
            out.add(BaseRule(frozenset({p}), q_w))
            out.add(BaseRule(frozenset({q_w}), p))
    return sorted(out)


def build_seed_base(
    w: str, mp: KripkeModel, phi: Formula, u: RuleUniverse, qmap: Mapping[str, Atom]
) -> Base:
    rules = seed_rules(w, mp, qmap, u.alphabet)
    missing = [r for r in rules if r not in u.rule_index]
    if missing:
        raise BridgeError(f"universe lacks rules {', '.join(map(str, missing))}")
    return u.base(rules)


def build_world_base(aw: Base, q_w: Atom) -> Base:
    """Maximally consistent extension of ``aw`` that does not derive ``q_w``."""
    if proves_atom(aw, q_w):
        raise BridgeError(f"seed base already derives {q_w}")

    def keep(b: Base) -> bool:
        return not proves_atom(b, q_w)

    bw = extend_preserving(aw, keep)
    if is_maximally_consistent(bw):
        return bw
    for cand in maximal_extensions(aw, keep):
        return cand
    raise BridgeError(f"no maximally consistent extension avoids {q_w}")


# -- relating the bases ------------------------------------------------------------

@dataclass
class BaseCensus:
    """Which maximal bases sit above each base, and which of them are world bases."""
    u: RuleUniverse
    maximal_ids: tuple[int, ...]
    above: np.ndarray            # bitmask over maximal_ids, per base (⊇)
    world_of_maximal: dict[int, str]

    @classmethod
    def build(cls, u: RuleUniverse, world_bases: Mapping[str, int]) -> "BaseCensus":
        mx = u.maximal_ids
        if len(mx) > 62:
            raise BridgeError("too many maximal bases for the census bitmask")
        label = np.zeros(u.n_bases, dtype=np.int64)
        for k, b in enumerate(mx):
            label[b] = 1 << k
        above = or_supersets(label, u.n_rules)
        index = {b: k for k, b in enumerate(mx)}
        world_of = {index[b]: w for w, b in world_bases.items()}
        return cls(u, mx, above, world_of)

    def maximal_above(self, b: int, strict: bool = False) -> list[int]:
        bits = int(self.above[b])
        ks = [k for k in range(len(self.maximal_ids)) if bits >> k & 1]
        if strict:
            ks = [k for k in ks if self.maximal_ids[k] != b]
        return ks

    def worlds_above(self, b: int, strict: bool = False) -> list[str]:
        return [self.world_of_maximal[k] for k in self.maximal_above(b, strict) if k in self.world_of_maximal]


def agent_classes(m: KripkeModel, agent: str) -> dict[str, int]:
    """World -> index of its equivalence class under the agent's relation."""
    cls: dict[str, int] = {}
    for w in m.worlds:
        if w in cls:
            continue
        k = len(set(cls.values()))
        for v in m.successors(agent, w):
            cls.setdefault(v, k)
        cls.setdefault(w, k)
    return cls


def _chain(group: Sequence[int]) -> list[tuple[int, int]]:
    return [(group[0], x) for x in group[1:]]


def rule_seed_pairs(
    mp: KripkeModel,
    agent: str,
    world_bases: Mapping[str, int],
    census: BaseCensus,
    rule_3b: str = "corrected",
) -> dict[str, list[tuple[int, int]]]:
    """Seed pairs of the rule-based construction, keyed by rule name.

    Groups are emitted as spanning chains; the S5 closure that follows makes
    each group a complete block either way.

    * ``1``: world bases of agent-related worlds.
    * ``2``: all inconsistent bases.
    * ``3a``: bases whose only maximal strict superset is a world base, grouped
      by the agent class of that world.
    * ``3b``: bases with a world base and another maximal base strictly above;
      two such bases are related when their world sets meet a common agent
      class (``corrected``).  ``printed`` relates any ``b`` having two
      agent-related worlds above it to any ``c`` with some maximal strict
      superset other than one of those worlds' bases.
    * ``3c``: consistent bases with no world base above, all together.
    """
    u = census.u
    cls = agent_classes(mp, agent)
    n_cls = len(set(cls.values()))
    seeds: dict[str, list[tuple[int, int]]] = {k: [] for k in ("1", "2", "3a", "3b", "3c")}

    for k in range(n_cls):
        group = sorted(world_bases[w] for w in mp.worlds if cls[w] == k)
        seeds["1"] += _chain(group)
    seeds["2"] = _chain(np.flatnonzero(u.inconsistent).tolist())

    single: dict[int, list[int]] = {}
    multi: dict[int, list[int]] = {}
    none: list[int] = []
    printed_b: list[tuple[int, set[str]]] = []
    for b in np.flatnonzero(u.consistent).tolist():
        if u.maximal[b]:
            continue
        ks = census.maximal_above(b, strict=True)
        ws = census.worlds_above(b, strict=True)
        if not ws:
            none.append(b)
        elif len(ks) == 1:
            single.setdefault(cls[ws[0]], []).append(b)
        else:
            for c in {cls[w] for w in ws}:
                multi.setdefault(c, []).append(b)
            printed_b.append((b, set(ws)))
    for k in sorted(single):
        seeds["3a"] += _chain(single[k])
    if rule_3b == "corrected":
        for k in sorted(multi):
            seeds["3b"] += _chain(multi[k])
    elif rule_3b == "printed":
        # c-side: bases with some maximal strict superset other than the world base of v
        wb = {w: world_bases[w] for w in mp.worlds}
        c_side: dict[str, list[int]] = {}
        for v in mp.worlds:
            c_side[v] = [
                c for c in range(u.n_bases)
                if any(census.maximal_ids[k] != wb[v] for k in census.maximal_above(c, strict=True))
            ]
        used: set[str] = set()
        for b, ws in printed_b:
            for w in sorted(ws):
                for v in sorted(ws):
                    if cls[w] == cls[v] and c_side[v]:
                        seeds["3b"].append((b, c_side[v][0]))
                        used.add(v)
        for v in sorted(used):
            seeds["3b"] += _chain(c_side[v])
    else:
        raise ValueError(f"unknown rule_3b reading {rule_3b!r}")
    # also the maximal bases that are not world bases have no world above them
    none += [b for b in u.maximal_ids if b not in set(world_bases.values())]
    seeds["3c"] = _chain(sorted(none))
    return seeds


def rule_based_family(
    mp: KripkeModel,
    world_bases: Mapping[str, int],
    u: RuleUniverse,
    rule_3b: str = "corrected",
    jobs: int = 1,
) -> RelationFamily:
    census = BaseCensus.build(u, world_bases)

    def one(a: str) -> np.ndarray:
        seeds = rule_seed_pairs(mp, a, world_bases, census, rule_3b)
        return s5_closure([p for k in seeds for p in seeds[k]], u)

    return RelationFamily(u, dict(zip(mp.agents, ordered_map(one, mp.agents, jobs))))


def refine_family(
    mp: KripkeModel, world_bases: Mapping[str, int], u: RuleUniverse, jobs: int = 1
) -> RelationFamily:
    """Greatest S5-modal relation per agent that keeps world classes apart.

    Maximal bases are labelled by the agent class of their world; maximal
    bases that are no world's base share one extra label.  A consistent base
    gets the set of labels of the maximal bases above it.  Starting from
    "same label set" (plus the inconsistent block), pairs violating the
    superset or subset transfer conditions are deleted symmetrically until
    nothing changes.  The result is an equivalence relation.
    """
    census = BaseCensus.build(u, world_bases)
    return RelationFamily(
        u, dict(zip(mp.agents, ordered_map(lambda a: _refine_agent(mp, a, census), mp.agents, jobs)))
    )


def _refine_agent(mp: KripkeModel, agent: str, census: BaseCensus) -> np.ndarray:
    u = census.u
    cls = agent_classes(mp, agent)
    other = len(set(cls.values()))
    sig = np.zeros(u.n_bases, dtype=np.int64)
    for k in range(len(census.maximal_ids)):
        w = census.world_of_maximal.get(k)
        bit = 1 << (cls[w] if w is not None else other)
        sig |= np.where((census.above >> k) & 1 == 1, bit, 0)
    sig = np.where(u.inconsistent, -1, sig)
    r = equivalence_from_labels(sig)
    while True:
        viol = condition_violations(r, u)
        bad = viol["c"] | viol["d"]
        if not bad.any():
            return r
        r = r & ~bad & ~bad.T


# -- verification ------------------------------------------------------------------

@dataclass
class Mismatch:
    formula: Formula
    world: str
    bes: bool
    kripke: bool


@dataclass
class BridgeReport:
    modal_check: ModalCheckReport
    mismatches: list[Mismatch]
    construction: str
    rule_based_check: ModalCheckReport | None = None

    @property
    def ok(self) -> bool:
        return self.modal_check.ok and not self.mismatches


@dataclass
class BridgeArtifacts:
    original: KripkeModel
    model: KripkeModel
    world: str
    formula: Formula
    fresh: dict[str, Atom]
    universe: RuleUniverse
    seed_bases: dict[str, Base]
    world_bases: dict[str, Base]
    family: RelationFamily
    report: BridgeReport | None = None

    @property
    def counterbase(self) -> Base:
        return self.world_bases[self.world]


def build_relation_family(
    mp: KripkeModel,
    world_bases: Mapping[str, Base | int],
    u: RuleUniverse,
    method: str = "auto",
    rule_3b: str = "corrected",
    jobs: int = 1,
) -> tuple[RelationFamily, str, ModalCheckReport | None]:
    """Relation family for the world bases; returns (family, construction, rule check).

    ``method`` is ``rules`` (rule-based only), ``refine`` (greatest S5-modal
    relation only) or ``auto`` (rule-based, falling back to ``refine`` if the
    rule-based family fails the modal-relation check).
    """
    ids = {w: (b.id if isinstance(b, Base) else int(b)) for w, b in world_bases.items()}
    rule_check = None
    if method in ("rules", "auto"):
        fam = rule_based_family(mp, ids, u, rule_3b, jobs)
        rule_check = check_modal_relation(fam)
        if method == "rules" or rule_check.ok:
            return fam, "rules", rule_check
    elif method != "refine":
        raise ValueError(f"unknown method {method!r}")
    return refine_family(mp, ids, u, jobs), "refine", rule_check


def verify_bridge(art: BridgeArtifacts) -> list[Mismatch]:
    """Compare base truth at each world base with Kripke truth, per subformula."""
    cache = EvalCache(art.family)
    out = []
    for psi in subformulas(art.formula):
        for w in art.model.worlds:
            b = cache.holds(psi, art.world_bases[w])
            k = kripke_eval(art.model, w, psi)
            if b != k:
                out.append(Mismatch(psi, w, b, k))
    return out


def run_bridge(
    m: KripkeModel,
    w: str,
    phi: Formula,
    method: str = "auto",
    rule_3b: str = "corrected",
    jobs: int = 1,
) -> BridgeArtifacts:
    """Full pipeline on an explicit S5 model refuting ``phi`` at ``w``."""
    if kripke_eval(m, w, phi):
        raise BridgeError(f"{print_formula(phi)} is true at {w}; nothing to refute")
    mp, qmap = disambiguate_model(m, phi)
    u = bridge_universe(phi, qmap)
    u.check_table_size()
    seeds = {v: build_seed_base(v, mp, phi, u, qmap) for v in mp.worlds}
    bases = {v: build_world_base(seeds[v], qmap[v]) for v in mp.worlds}
    fam, construction, rule_check = build_relation_family(mp, bases, u, method, rule_3b, jobs)
    art = BridgeArtifacts(m, mp, w, phi, qmap, u, seeds, bases, fam)
    art.report = BridgeReport(check_modal_relation(fam), verify_bridge(art), construction, rule_check)
    return art


@dataclass
class BridgeOutcome:
    formula: Formula
    max_worlds: int
    artifacts: BridgeArtifacts | None = None
    confirmed: bool = False

    @property
    def refuted(self) -> bool:
        return self.artifacts is not None

    def line(self) -> str:
        if self.artifacts is None:
            return f"BRIDGE none: no countermodel up to {self.max_worlds} worlds"
        a = self.artifacts
        status = "ok" if a.report.ok else "FAILED"
        return (
            f"BRIDGE REFUTED at base {a.counterbase.id} world={a.world} "
            f"worlds={len(a.model.worlds)} construction={a.report.construction} "
            f"verify={status} confirmed={self.confirmed}"
        )


def countermodel_to_counterbase(
    phi: Formula,
    agents: Sequence[str] | None = None,
    max_worlds: int = 2,
    method: str = "auto",
    jobs: int = 1,
) -> BridgeOutcome:
    found = kripke_countermodel_search(phi, agents, max_worlds)
    if not found.found:
        return BridgeOutcome(phi, max_worlds)
    art = run_bridge(found.model, found.world, phi, method, jobs=jobs)
    confirmed = not EvalCache(art.family).holds(phi, art.counterbase)
    return BridgeOutcome(phi, max_worlds, art, confirmed)


# -- artifacts on disk -------------------------------------------------------------------

def report_text(art: BridgeArtifacts) -> str:
    rep = art.report
    lines = [
        f"formula: {print_formula(art.formula)}",
        f"world: {art.world}",
        "fresh atoms: " + ", ".join(f"{w}->{q.name}" for w, q in art.fresh.items()),
        f"universe: {len(art.universe.alphabet)} atoms, {art.universe.n_rules} rules, "
        f"{art.universe.n_bases} bases",
    ]
    for w in art.model.worlds:
        b = art.world_bases[w]
        atoms = " ".join(a.name for a in sorted(closure(b)))
        lines.append(f"world base {w}: id={b.id} closure={{{atoms}}}")
    lines.append("world bases avoid q_w (derivability of the fresh atom is excluded)")
    if rep.rule_based_check is not None:
        status = "pass" if rep.rule_based_check.ok else "FAIL"
        lines.append(f"rule-based relation: {status}")
        lines += ["  " + s for s in rep.rule_based_check.lines() if "FAIL" in s]
    lines.append(f"construction used: {rep.construction}")
    lines += rep.modal_check.lines()
    if rep.mismatches:
        for mm in rep.mismatches:
            lines.append(
                f"MISMATCH {print_formula(mm.formula)} at {mm.world}: bes={mm.bes} kripke={mm.kripke}"
            )
    else:
        lines.append("correspondence: all subformula/world pairs agree")
    refuted = not EvalCache(art.family).holds(art.formula, art.counterbase)
    lines.append(
        f"VERDICT {'refuted' if refuted else 'not-refuted'} base={art.counterbase.id} world={art.world}"
    )
    return "\n".join(lines) + "\n"


def write_artifacts(art: BridgeArtifacts, out: Path) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "model.orig").write_text(write_model(art.original))
    (out / "model.prime").write_text(write_model(art.model))
    (out / "universe.rules").write_text(write_rules(art.universe, art.universe.rules))
    for w, b in art.world_bases.items():
        (out / f"base_{w}.rules").write_text(write_base(b, f"world base for {w}, id {b.id}"))
    (out / "relations.txt").write_text(write_relations(art.family))
    (out / "report.txt").write_text(report_text(art))
