import pytest
from hypothesis import given, strategies as st

from bes5.base import (
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
    maximal_extensions,
    proves_atom,
    read_base,
    read_rules,
    rule,
    write_base,
    write_rules,
)
from bes5.formula import Atom

from conftest import P, Q
from oracles import closure_oracle, inconsistent_oracle, maximal_oracle


def test_rule_text_round_trip():
    r = rule("p q => r")
    assert r == BaseRule(frozenset({Atom("p"), Atom("q")}), Atom("r"))
    assert str(r) == "p q => r"
    assert str(rule("=> p")) == "=> p"
    with pytest.raises(ValueError):
        rule("p q")


@pytest.mark.parametrize(
    "atoms, cap, n",
    [(["p"], 1, 2), (["p", "q"], 1, 6), (["p", "q"], 0, 2), (["p", "q", "r"], 2, 21), (["p", "q", "r"], 1, 12)],
)
def test_rule_counts(atoms, cap, n):
    u = RuleUniverse(atoms, cap)
    assert u.n_rules == n == u.expected_rule_count()
    assert len(set(u.rules)) == n


def test_rule_order_is_conclusion_major(upq):
    assert [str(r) for r in upq.rules] == ["=> p", "p => p", "q => p", "=> q", "p => q", "q => q"]


def test_universe_validation():
    with pytest.raises(ValueError):
        RuleUniverse([], 1)
    with pytest.raises(ValueError):
        RuleUniverse(["p", "p"], 1)
    with pytest.raises(ValueError):
        RuleUniverse(["p"], 0).base(["p => p"])


def test_closure_examples(upq):
    assert closure(upq.base(["=> p", "p => q"])) == {P, Q}
    assert closure(upq.base(["p => q"])) == frozenset()
    assert closure(upq.base()) == frozenset()


def test_proves_atom_examples(upq):
    assert proves_atom(upq.base(["=> p"]), P)
    assert not proves_atom(upq.base(), P)
    assert proves_atom(upq.base(["q => p", "=> q"]), P)
    with pytest.raises(ValueError):
        proves_atom(upq.base(), Atom("r"))


def test_consistency_examples(upq):
    assert is_consistent(upq.base())
    assert is_inconsistent(upq.base(["=> p", "=> q"]))
    assert is_consistent(upq.base(["=> p"]))


def test_maximal_examples(upq):
    assert is_maximally_consistent(upq.base(["p => p", "p => q", "q => p", "q => q"]))
    assert not is_maximally_consistent(upq.base())
    assert not is_maximally_consistent(upq.full_base())
    assert upq.maximal_ids == (39, 54, 58)


def test_closure_matches_oracle_everywhere(upq):
    for b in enumerate_bases(upq):
        assert closure(b) == closure_oracle(upq, b.mask)


def test_vector_tables_match_scalar(upq):
    for b in range(upq.n_bases):
        base = Base(upq, b)
        assert upq.atoms_of_mask(int(upq.closures[b])) == closure(base)
        assert bool(upq.inconsistent[b]) == is_inconsistent(base) == inconsistent_oracle(upq, b)
        assert bool(upq.maximal[b]) == is_maximally_consistent(base) == maximal_oracle(upq, b)


def test_closure_monotone(upq):
    cl = [closure(b) for b in enumerate_bases(upq)]
    for b in range(upq.n_bases):
        for c in range(upq.n_bases):
            if b & c == b:
                assert cl[b] <= cl[c]


def test_closure_is_closed_and_least(upq):
    for b in enumerate_bases(upq):
        s = closure(b)
        assert all(r.conclusion in s for r in b.members if r.premises <= s)
        for a in s:
            smaller = s - {a}
            assert not all(r.conclusion in smaller for r in b.members if r.premises <= smaller)


def test_subsets_of_consistent_are_consistent(upq):
    for b in range(upq.n_bases):
        if upq.consistent[b]:
            for c in range(b + 1):
                if c & b == c:
                    assert upq.consistent[c]


def test_enumeration():
    assert len(list(enumerate_bases(RuleUniverse(["p"], 1)))) == 4
    assert len(list(enumerate_bases(RuleUniverse(["p", "q"], 1)))) == 64
    assert len(list(enumerate_bases(RuleUniverse(["p", "q"], 0)))) == 4
    ids = [b.id for b in enumerate_bases(RuleUniverse(["p", "q"], 1))]
    assert ids == list(range(64))
    with pytest.raises(UniverseTooLarge):
        next(enumerate_bases(RuleUniverse(["p", "q", "r", "s", "t"], 1)))


def test_table_cap():
    with pytest.raises(UniverseTooLarge):
        RuleUniverse(["p", "q", "r", "s"], 1).check_table_size()


def test_extend_preserving(upq):
    b = extend_preserving(upq.base(), is_consistent)
    assert is_maximally_consistent(b)
    assert extend_preserving(upq.base(), lambda _: True) == upq.full_base()
    keep = lambda c: not proves_atom(c, Q)
    b = extend_preserving(upq.base(["=> p"]), keep)
    assert keep(b) and is_maximally_consistent(b) and upq.base(["=> p"]) <= b


def test_maximal_extensions_exhaustive(upq):
    found = {b.id for b in maximal_extensions(upq.base(), is_consistent)}
    assert found == set(upq.maximal_ids)


def test_base_algebra(upq):
    a = upq.base(["=> p"])
    b = upq.base(["p => q"])
    assert (a | b).members == a.members | b.members
    assert (a & b) == upq.base()
    assert a <= a | b and (a | b) >= b
    assert a.add("p => q") == a | b
    assert rule("=> p") in a and len(a | b) == 2


def test_rule_file_round_trip(upq, fixtures):
    b = upq.base(["=> p", "q => p"])
    text = write_base(b, "demo")
    assert read_base(text) == b
    u2, rules = read_rules(write_rules(upq, upq.rules))
    assert u2 == upq and tuple(rules) == upq.rules
    assert read_base((fixtures / "base_p.rules").read_text()) == upq.base(["=> p"])


def test_rule_file_errors():
    with pytest.raises(ValueError, match="line 2"):
        read_rules("atoms: p\nnot a rule\n")


@given(st.integers(0, 63), st.integers(0, 63))
def test_union_closure_superset(b, c):
    u = RuleUniverse(["p", "q"], 1)
    assert closure(Base(u, b)) | closure(Base(u, c)) <= closure(Base(u, b | c))
