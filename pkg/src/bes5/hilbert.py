"""Axiom-schema matching and proof checking for the multi-agent S5 Hilbert system.

Axioms::

    Ax1  f -> (g -> f)
    Ax2  (f -> (g -> h)) -> ((f -> g) -> (f -> h))
    Ax3  (~f -> ~g) -> (g -> f)
    AxK  [a](f -> g) -> ([a]f -> [a]g)
    AxT  [a]f -> f
    Ax4  [a]f -> [a][a]f
    Ax5  ~[a]f -> [a]~[a]f

Rules are modus ponens and necessitation.  Necessitation is only accepted in
proofs without premises.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Union

from .formula import BOT, Bottom, Formula, Implies, Know, neg, parse_formula


@dataclass(frozen=True)
class Meta:
    """Schema metavariable over formulas."""
    name: str


@dataclass(frozen=True)
class MetaKnow:
    """``[agent-metavariable] body`` inside a schema."""
    agent: str
    body: "Schema"


Schema = Union[Meta, MetaKnow, Implies, Bottom]

_F, _G, _H = Meta("f"), Meta("g"), Meta("h")


def _k(body) -> MetaKnow:
    return MetaKnow("a", body)


SCHEMAS: dict[str, Schema] = {
    "Ax1": Implies(_F, Implies(_G, _F)),
    "Ax2": Implies(
        Implies(_F, Implies(_G, _H)),
        Implies(Implies(_F, _G), Implies(_F, _H)),
    ),
    "Ax3": Implies(Implies(neg(_F), neg(_G)), Implies(_G, _F)),
    "AxK": Implies(_k(Implies(_F, _G)), Implies(_k(_F), _k(_G))),
    "AxT": Implies(_k(_F), _F),
    "Ax4": Implies(_k(_F), _k(_k(_F))),
    "Ax5": Implies(neg(_k(_F)), _k(neg(_k(_F)))),
}
AXIOMS = tuple(SCHEMAS)


def unify(schema: Schema, f: Formula, env: dict | None = None) -> dict | None:
    """Match ``f`` against ``schema``; returns the metavariable binding or None."""
    env = dict(env or {})
    stack = [(schema, f)]
    while stack:
        s, g = stack.pop()
        if isinstance(s, Meta):
            bound = env.get(s)
            if bound is None:
                env[s] = g
            elif bound != g:
                return None
        elif isinstance(s, MetaKnow):
            if not isinstance(g, Know):
                return None
            key = ("agent", s.agent)
            if env.setdefault(key, g.agent) != g.agent:
                return None
            stack.append((s.body, g.body))
        elif isinstance(s, Implies):
            if not isinstance(g, Implies):
                return None
            stack.append((s.left, g.left))
            stack.append((s.right, g.right))
        elif isinstance(s, Bottom):
            if not isinstance(g, Bottom):
                return None
        else:
            raise TypeError(f"bad schema node {s!r}")
    return env


def match_axiom(f: Formula) -> frozenset[str]:
    return frozenset(tag for tag, s in SCHEMAS.items() if unify(s, f) is not None)


def instantiate(tag: str, f: Formula, g: Formula = BOT, h: Formula = BOT, agent: str = "a") -> Formula:
    """Instance of axiom ``tag`` with the metavariables set to ``f, g, h``."""
    env = {_F: f, _G: g, _H: h}

    def sub(s):
        if isinstance(s, Meta):
            return env[s]
        if isinstance(s, MetaKnow):
            return Know(agent, sub(s.body))
        if isinstance(s, Implies):
            return Implies(sub(s.left), sub(s.right))
        return s

    return sub(SCHEMAS[tag])


# -- proofs ---------------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    tag: str


@dataclass(frozen=True)
class MP:
    i: int
    j: int


@dataclass(frozen=True)
class Nec:
    i: int
    agent: str


@dataclass(frozen=True)
class Premise:
    pass


Justification = Union[Axiom, MP, Nec, Premise]


@dataclass
class Proof:
    premises: list[Formula]
    steps: list[tuple[Formula, Justification]]
    name: str = ""

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1][0]


@dataclass
class ProofCheck:
    ok: bool
    step: int | None = None
    reason: str = ""

    def line(self) -> str:
        if self.ok:
            return "PROOF ok"
        return f"PROOF error step={self.step} reason={self.reason}"


def check_proof(pf: Proof) -> ProofCheck:
    """Verify every step; steps are numbered from 1."""
    if not pf.steps:
        return ProofCheck(False, 0, "empty proof")
    done: list[Formula] = []
    for n, (f, just) in enumerate(pf.steps, 1):
        if isinstance(just, Axiom):
            if just.tag not in SCHEMAS:
                return ProofCheck(False, n, f"unknown axiom {just.tag}")
            if unify(SCHEMAS[just.tag], f) is None:
                return ProofCheck(False, n, f"not an instance of {just.tag}")
        elif isinstance(just, MP):
            for k in (just.i, just.j):
                if not 1 <= k < n:
                    return ProofCheck(False, n, f"bad step index {k}")
            minor, major = done[just.i - 1], done[just.j - 1]
            if major != Implies(minor, f):
                return ProofCheck(False, n, f"step {just.j} is not step {just.i} -> this step")
        elif isinstance(just, Nec):
            if not 1 <= just.i < n:
                return ProofCheck(False, n, f"bad step index {just.i}")
            if pf.premises:
                return ProofCheck(False, n, "necessitation in a proof with premises")
            if f != Know(just.agent, done[just.i - 1]):
                return ProofCheck(False, n, f"not [{just.agent}] of step {just.i}")
        elif isinstance(just, Premise):
            if f not in pf.premises:
                return ProofCheck(False, n, "not a premise")
        else:
            return ProofCheck(False, n, f"unknown justification {just!r}")
        done.append(f)
    return ProofCheck(True)


_STEP = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s*;\s*(.*?)\s*$")


def _justification(text: str, lineno: int) -> Justification:
    parts = text.split()
    if not parts:
        raise ValueError(f"line {lineno}: missing justification")
    head = parts[0]
    if head in SCHEMAS and len(parts) == 1:
        return Axiom(head)
    if head == "MP" and len(parts) == 3:
        return MP(int(parts[1]), int(parts[2]))
    if head == "Nec" and len(parts) == 3:
        return Nec(int(parts[1]), parts[2])
    if head == "Premise" and len(parts) == 1:
        return Premise()
    raise ValueError(f"line {lineno}: bad justification {text!r}")


def read_proof(text: str, name: str = "") -> Proof:
    """``premise: f`` lines then ``n. f ; Ax1`` / ``; MP i j`` / ``; Nec i a``."""
    premises: list[Formula] = []
    steps: list[tuple[Formula, Justification]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("premise:"):
            premises.append(parse_formula(line[len("premise:"):]))
            continue
        m = _STEP.match(line)
        if not m:
            raise ValueError(f"line {lineno}: expected 'n. formula ; justification'")
        num = int(m.group(1))
        if num != len(steps) + 1:
            raise ValueError(f"line {lineno}: step {num} out of sequence")
        steps.append((parse_formula(m.group(2)), _justification(m.group(3), lineno)))
    return Proof(premises, steps, name)


def _just_text(j: Justification) -> str:
    if isinstance(j, Axiom):
        return j.tag
    if isinstance(j, MP):
        return f"MP {j.i} {j.j}"
    if isinstance(j, Nec):
        return f"Nec {j.i} {j.agent}"
    return "Premise"


def write_proof(pf: Proof) -> str:
    from .formula import print_formula

    lines = [f"premise: {print_formula(p)}" for p in pf.premises]
    lines += [
        f"{n}. {print_formula(f)} ; {_just_text(j)}" for n, (f, j) in enumerate(pf.steps, 1)
    ]
    return "\n".join(lines) + "\n"


def bundled_proofs() -> list[Proof]:
    """The proof corpus shipped in ``bes5/proofs``."""
    root = resources.files("bes5") / "proofs"
    out = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".prf"):
            out.append(read_proof(entry.read_text(), entry.name[:-4]))
    return out
