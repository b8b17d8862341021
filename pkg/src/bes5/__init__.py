"""Base-extension semantics workbench for multi-agent S5."""
from .base import (
    Base,
    BaseRule,
    RuleUniverse,
    UniverseTooLarge,
    closure,
    enumerate_bases,
    extend_preserving,
    is_consistent,
    is_inconsistent,
    is_maximally_consistent,
    proves_atom,
    rule,
)
from .bridge import (
    BridgeArtifacts,
    build_relation_family,
    build_seed_base,
    build_world_base,
    countermodel_to_counterbase,
    disambiguate_model,
    run_bridge,
    verify_bridge,
)
from .formula import (
    BOT,
    Atom,
    Bottom,
    Formula,
    FormulaSyntaxError,
    Implies,
    Know,
    atoms_of,
    fresh_atoms,
    neg,
    parse_formula,
    print_formula,
    subformulas,
)
from .hilbert import Proof, check_proof, match_axiom, read_proof
from .kripke import KripkeModel, check_frame, kripke_countermodel_search, kripke_eval
from .lemmas import run_lemma_suite
from .relation import (
    RelationFamily,
    check_modal_relation,
    enumerate_families,
    identity_family,
    is_euclidean,
    is_reflexive,
    is_transitive,
    s5_closure,
    sample_families,
    two_block_family,
)
from .semantics import (
    Canonical,
    EvalCache,
    Exhaustive,
    Explicit,
    Sampled,
    bes_consequence,
    bes_holds,
    bes_valid,
)
