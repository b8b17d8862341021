"""Command-line front end: ``bes5 <subcommand> ...``.

Exit codes: 0 success / valid / ok, 1 invalid / refuted / violation,
2 usage or I/O error.  Every command prints one machine-readable line
(``VERDICT``, ``PROOF``, ``KRIPKE``, ``FRAME``, ``SUITE``, ``BRIDGE``,
``UNIVERSE``, ``CHECK``) whose content depends only on the flags and seed.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .base import RuleUniverse, UniverseTooLarge, read_base, write_rules
from .bridge import BridgeError, countermodel_to_counterbase, report_text, run_bridge, write_artifacts
from .formula import FormulaSyntaxError, atoms_of, dump_ast, fresh_atoms, parse_formula, print_formula
from .hilbert import bundled_proofs, check_proof, read_proof
from .kripke import UnknownWorld, check_frame, kripke_eval, read_model
from .lemmas import run_lemma_suite
from .relation import (
    canonical_families,
    check_modal_relation,
    enumerate_families,
    read_relations,
    sample_families,
)
from .semantics import (
    Canonical,
    EvalCache,
    Exhaustive,
    Explicit,
    Sampled,
    bes_valid,
    default_agents,
)

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _split(text: str | None) -> list[str]:
    if not text:
        return []
    return [x for x in text.replace(",", " ").split() if x]


def _universe(args, formulas: Sequence = ()) -> RuleUniverse:
    atoms = _split(args.atoms)
    if not atoms:
        # formula atoms plus one spare, so consistent bases proving them exist
        found = set()
        for f in formulas:
            found |= atoms_of(f)
        atoms = sorted(a.name for a in found)
        atoms += [a.name for a in fresh_atoms(1, found)]
    return RuleUniverse(atoms, args.cap)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _formula(text: str):
    return parse_formula(text)


def _families(args, u: RuleUniverse, agents: Sequence[str]) -> list[tuple[str, object]]:
    mode = args.families
    if args.relations:
        return [(Path(args.relations).name, read_relations(_read(args.relations), u))]
    if mode == "canonical":
        ident, block = canonical_families(u, agents)
        return [("identity", ident), ("two_block", block)]
    if mode == "exhaustive":
        return [(f"enum{i}", f) for i, f in enumerate(enumerate_families(u, agents))]
    if mode == "sampled":
        res = sample_families(u, agents, args.samples, args.seed)
        return [(f"sample{i}", f) for i, f in enumerate(res.families)]
    raise UsageError(f"unknown family mode {mode!r}")


# -- subcommands -------------------------------------------------------------------

def cmd_parse(args) -> int:
    try:
        f = parse_formula(args.formula)
    except FormulaSyntaxError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        return 1
    print(print_formula(f))
    print(dump_ast(f))
    return 0


def cmd_universe(args) -> int:
    u = RuleUniverse(_split(args.atoms) or ["p", "q"], args.cap)
    text = write_rules(u, u.rules)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"UNIVERSE atoms={len(u.alphabet)} premise_cap={u.premise_cap} rules={u.n_rules} bases={u.n_bases}")
    return 0


def _mode(args, u: RuleUniverse, agents):
    if args.relations:
        return Explicit(read_relations(_read(args.relations), u), Path(args.relations).name)
    return {
        "canonical": lambda: Canonical(),
        "sampled": lambda: Sampled(args.samples, args.seed),
        "exhaustive": lambda: Exhaustive(),
    }[args.mode]()


def cmd_bes_valid(args) -> int:
    f = _formula(args.formula)
    u = _universe(args, [f])
    agents = _split(args.agents) or default_agents([f])
    verdict = bes_valid(f, u, _mode(args, u, agents), agents)
    print(f"formula: {print_formula(f)}")
    print(f"universe: atoms={' '.join(a.name for a in u.alphabet)} premise_cap={u.premise_cap} "
          f"bases={u.n_bases} seed={args.seed}")
    if verdict.note:
        print(f"note: {verdict.note}")
    if not verdict.valid:
        print(f"counterexample base {verdict.base}:")
        for r in u.base_by_id(verdict.base).sorted_rules():
            print(f"  {r}")
        if not u.base_by_id(verdict.base).mask:
            print("  (empty base)")
    print(verdict.line())
    return 0 if verdict.valid else 1


def cmd_bes_holds(args) -> int:
    f = _formula(args.formula)
    gamma = [_formula(g) for g in args.gamma or []]
    if args.base:
        b = read_base(_read(args.base))
        u = b.universe
    else:
        u = _universe(args, [f, *gamma])
        b = u.base_by_id(args.base_id)
    agents = _split(args.agents) or default_agents([f, *gamma])
    if args.relations:
        fam = read_relations(_read(args.relations), u)
        label = Path(args.relations).name
    else:
        ident, block = canonical_families(u, agents)
        fam, label = (ident, "identity") if args.family == "identity" else (block, "two_block")
    cache = EvalCache(fam)
    value = bool(cache.consequence_vector(gamma, f)[b.id])
    print(f"HOLDS {str(value).lower()} base={b.id} family={label}")
    return 0 if value else 1


def cmd_kripke(args) -> int:
    m = read_model(_read(args.model))
    f = _formula(args.formula)
    try:
        value = kripke_eval(m, args.world, f)
    except UnknownWorld as e:
        raise UsageError(str(e.args[0])) from None
    print(f"KRIPKE {str(value).lower()} world={args.world}")
    return 0 if value else 1


def cmd_frame(args) -> int:
    rep = check_frame(read_model(_read(args.model)))
    for line in rep.lines():
        print(line)
    print(f"FRAME s5={str(rep.is_s5).lower()}")
    return 0 if rep.is_s5 else 1


def cmd_hilbert(args) -> int:
    proofs = []
    if args.bundled:
        proofs = bundled_proofs()
    for path in args.proofs:
        proofs.append(read_proof(_read(path), Path(path).name))
    if not proofs:
        raise UsageError("give proof files or --bundled")
    status = 0
    for pf in proofs:
        res = check_proof(pf)
        prefix = f"{pf.name}: " if len(proofs) > 1 else ""
        print(f"{prefix}{res.line()}")
        if res.ok and not args.quiet:
            print(f"{prefix}conclusion: {print_formula(pf.conclusion)}")
        status = status or (0 if res.ok else 1)
    return status


def cmd_bridge(args) -> int:
    f = _formula(args.formula)
    agents = _split(args.agents) or None
    if args.model:
        if not args.world:
            raise UsageError("--model needs --world")
        m = read_model(_read(args.model))
        if kripke_eval(m, args.world, f):
            print(f"BRIDGE none: {print_formula(f)} is true at {args.world}")
            return 0
        art = run_bridge(m, args.world, f, args.method, jobs=args.jobs)
        refuted = not EvalCache(art.family).holds(f, art.counterbase)
        status = "ok" if art.report.ok else "FAILED"
        line = (
            f"BRIDGE REFUTED at base {art.counterbase.id} world={art.world} "
            f"worlds={len(art.model.worlds)} construction={art.report.construction} "
            f"verify={status} confirmed={refuted}"
        )
    else:
        out = countermodel_to_counterbase(f, agents, args.max_worlds, args.method, args.jobs)
        art = out.artifacts
        line = out.line()
        if art is None:
            print(line)
            return 0
    if args.out:
        write_artifacts(art, Path(args.out))
    if args.verbose:
        sys.stdout.write(report_text(art))
    print(line)
    return 1


def cmd_suite(args) -> int:
    u = RuleUniverse(_split(args.atoms) or ["p", "q"], args.cap)
    agents = _split(args.agents) or ["a"]
    fams = _families(args, u, agents)
    print(f"universe: atoms={' '.join(a.name for a in u.alphabet)} premise_cap={u.premise_cap} "
          f"bases={u.n_bases} families={len(fams)} seed={args.seed}")
    bad = False
    for label, fam in fams:
        rep = check_modal_relation(fam)
        if not rep.ok:
            bad = True
            for line in rep.lines():
                if "FAIL" in line:
                    print(f"{label}: {line}")
    if bad:
        print("CHECK failed: family is not an S5-modal relation; suite not run")
        return 1
    rep = run_lemma_suite(u, fams, n_random=args.random, seed=args.seed, jobs=args.jobs)
    for line in rep.lines():
        print(line)
    return 0 if rep.ok else 1


# -- argument parsing ----------------------------------------------------------------

def _universe_opts(p: argparse.ArgumentParser, default_atoms: str | None = None) -> None:
    p.add_argument("--atoms", default=default_atoms, help="alphabet, comma or space separated")
    p.add_argument("--cap", type=int, default=1, help="premise cap (default 1)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads; output does not depend on it")
    ap = argparse.ArgumentParser(prog="bes5", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    p = add("parse", help="print the canonical form and AST of a formula")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_parse)

    p = add("universe", help="dump a rule universe as a rule file")
    _universe_opts(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_universe)

    p = add("bes-valid", help="validity over all bases of a universe")
    p.add_argument("formula")
    _universe_opts(p)
    p.add_argument("--mode", choices=("canonical", "sampled", "exhaustive"), default="canonical")
    p.add_argument("--relations", help="relation file (explicit family)")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--agents")
    p.set_defaults(fn=cmd_bes_valid)

    p = add("bes-holds", help="truth (or consequence) at one base")
    p.add_argument("formula")
    _universe_opts(p)
    p.add_argument("--base", help="rule file of the base (its header fixes the universe)")
    p.add_argument("--base-id", type=int, default=0)
    p.add_argument("--gamma", action="append", help="premise formula; repeatable")
    p.add_argument("--relations")
    p.add_argument("--family", choices=("identity", "two_block"), default="identity")
    p.add_argument("--agents")
    p.set_defaults(fn=cmd_bes_holds)

    p = add("kripke", help="evaluate a formula at a world of a model file")
    p.add_argument("model")
    p.add_argument("world")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_kripke)

    p = add("frame", help="frame properties of a model file")
    p.add_argument("model")
    p.set_defaults(fn=cmd_frame)

    p = add("hilbert", help="check Hilbert proof files")
    p.add_argument("proofs", nargs="*")
    p.add_argument("--bundled", action="store_true", help="check the shipped proof corpus")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=cmd_hilbert)

    p = add("bridge", help="Kripke countermodel to base countermodel")
    p.add_argument("formula")
    p.add_argument("--agents")
    p.add_argument("--max-worlds", type=int, default=2)
    p.add_argument("--model", help="use this model instead of searching")
    p.add_argument("--world")
    p.add_argument("--method", choices=("auto", "rules", "refine"), default="auto")
    p.add_argument("--out", help="artifact directory")
    p.add_argument("--verbose", action="store_true", help="print the report")
    p.set_defaults(fn=cmd_bridge)

    p = add("suite", help="run the meta-theory checks")
    _universe_opts(p)
    p.add_argument("--families", choices=("canonical", "exhaustive", "sampled"), default="canonical")
    p.add_argument("--relations", help="relation file to check instead")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--random", type=int, default=100, help="random pool size")
    p.add_argument("--agents")
    p.set_defaults(fn=cmd_suite)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (UsageError, FormulaSyntaxError, UniverseTooLarge, BridgeError, ValueError, KeyError) as e:
        msg = e.args[0] if e.args else str(e)
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
