import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from bes5.base import RuleUniverse
from bes5.formula import BOT, Know, parse_formula
from bes5.relation import enumerate_families, identity_family, sample_families, two_block_family
from bes5.semantics import (
    AgentNotInFamily,
    Canonical,
    EvalCache,
    Exhaustive,
    Explicit,
    Sampled,
    bes_consequence,
    bes_holds,
    bes_valid,
    holds_direct,
)

from conftest import P, Q, formulas
from oracles import has_modality, truth_table


def test_atom_clause(upq, canonical_pq):
    b = upq.base(["=> p"])
    for _, fam in canonical_pq:
        assert bes_holds(P, b, fam)
        assert not bes_holds(Q, b, fam)


def test_examples(upq):
    ident = identity_family(upq)
    block = two_block_family(upq)
    empty = upq.base()
    assert bes_holds(parse_formula("p -> p"), empty, ident)
    assert not bes_holds(parse_formula("[a]p"), empty, block)
    assert bes_holds(parse_formula("[a](p -> p)"), empty, block)


def test_consequence_examples(upq):
    ident = identity_family(upq)
    for b in range(upq.n_bases):
        assert bes_consequence([P], P, b, ident)
        assert bes_consequence([BOT], Q, b, ident)
    assert bes_consequence([Know("a", P)], P, 0, ident)
    assert not bes_consequence([Q], P, 0, ident)


def test_bot_is_inconsistency(upq):
    cache = EvalCache(identity_family(upq))
    assert list(cache.vector(BOT)) == list(upq.inconsistent)


def test_unknown_agent(upq):
    with pytest.raises(AgentNotInFamily):
        bes_holds(parse_formula("[b]p"), 0, identity_family(upq, ["a"]))


def test_atom_outside_alphabet(upq):
    with pytest.raises(ValueError):
        bes_holds(parse_formula("r"), 0, identity_family(upq))
    with pytest.raises(ValueError):
        bes_valid(parse_formula("r"), upq)


def test_cache_rejects_foreign_family(upq):
    cache = EvalCache(identity_family(upq))
    with pytest.raises(ValueError):
        bes_holds(P, 0, two_block_family(upq), cache)


def test_cache_memoises(upq):
    cache = EvalCache(identity_family(upq))
    f = parse_formula("[a]p -> p")
    v1 = cache.vector(f)
    assert f in cache and len(cache) == 3
    assert cache.vector(f) is v1
    assert not v1.flags.writeable


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(formulas(agents=("a",), max_leaves=5), st.integers(0, 63), st.booleans())
def test_cache_matches_direct_recursion(f, b, block):
    u = RuleUniverse(["p", "q"], 1)
    fam = two_block_family(u) if block else identity_family(u)
    assert EvalCache(fam).holds(f, b) == holds_direct(f, b, fam)


SMALL_FAMILIES = list(enumerate_families(RuleUniverse(["p"], 1), ["a"]))


@settings(max_examples=60, deadline=None)
@given(formulas(atoms=("p",), agents=("a",), max_leaves=6))
def test_cache_matches_direct_on_every_small_family(f):
    for fam in SMALL_FAMILIES:
        vec = EvalCache(fam).vector(f)
        assert [bool(x) for x in vec] == [holds_direct(f, b, fam) for b in range(4)]


@given(formulas(agents=("a",), max_leaves=8))
def test_maximal_bases_behave_classically(f):
    """At a maximal base, a modal-free formula takes its truth-table value."""
    if has_modality(f):
        return
    u = RuleUniverse(["p", "q", "r"], 1)
    cache = EvalCache(identity_family(u))
    for b in u.maximal_ids:
        true = u.atoms_of_mask(int(u.closures[b]))
        assert cache.holds(f, b) == truth_table(f, true)


def test_bes_valid_modes(upq, up):
    k = parse_formula("[a](p -> q) -> ([a]p -> [a]q)")
    assert bes_valid(k, upq, Canonical()).valid
    v = bes_valid(parse_formula("~[a]p -> [a]~[a]p"), up, Exhaustive())
    assert v.valid and v.families_checked == len(list(enumerate_families(up, ["a"])))
    v = bes_valid(P, upq, Canonical())
    assert not v.valid and v.base == 0 and v.family_label == "identity"
    assert v.line() == "VERDICT invalid base=0 family=identity agents=a"
    assert bes_valid(parse_formula("[a]p -> p"), upq, Sampled(3, seed=2)).valid
    fam = two_block_family(upq)
    assert bes_valid(parse_formula("p -> p"), upq, Explicit(fam, "mine")).line() == "VERDICT valid families=1"


def test_exhaustive_too_large(upq):
    from bes5.base import UniverseTooLarge

    with pytest.raises(UniverseTooLarge):
        bes_valid(P, upq, Exhaustive())


def test_sampled_budget_note(upq):
    v = bes_valid(parse_formula("p -> p"), upq, Sampled(40, seed=0))
    assert v.valid
    if v.families_checked < 40:
        assert "budget" in v.note


def test_sampled_families_validate_axioms(upq):
    fams = sample_families(upq, ["a", "b"], 3, seed=11).families
    for text in ["[a]p -> p", "[a]p -> [a][a]p", "~[b]q -> [b]~[b]q"]:
        f = parse_formula(text)
        for fam in fams:
            assert EvalCache(fam).vector(f).all()
