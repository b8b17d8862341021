import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bes5.base import RuleUniverse, UniverseTooLarge
from bes5.relation import (
    RelationFamily,
    as_matrix,
    canonical_families,
    check_agent,
    check_modal_relation,
    enumerate_families,
    identity_family,
    is_euclidean,
    is_reflexive,
    is_transitive,
    read_relations,
    s5_closure,
    sample_families,
    two_block_family,
    write_relations,
)

from oracles import modal_conditions_oracle, s5_fixpoint

pair_sets = st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=8)


def test_frame_examples():
    ident = {(i, i) for i in range(3)}
    assert is_reflexive(ident, range(3)) and is_transitive(ident) and is_euclidean(ident)
    assert not is_reflexive(set(), range(1))
    one = {(0, 1)}
    assert is_transitive(one) and not is_reflexive(one, range(2)) and not is_euclidean(one)
    assert is_euclidean(one | {(1, 1)})


def test_frame_checks_accept_matrices():
    m = as_matrix({(0, 1), (1, 1)}, 2)
    assert is_euclidean(m) and is_transitive(m) and not is_reflexive(m)


def test_s5_closure_examples():
    assert np.array_equal(s5_closure([], 3), np.eye(3, dtype=bool))
    m = s5_closure([(0, 1)], 2)
    assert m.all()
    eq = s5_closure([(0, 1), (2, 3)], 4)
    assert np.array_equal(s5_closure(list(zip(*np.nonzero(eq))), 4), eq)


@given(pair_sets)
def test_s5_closure_matches_naive_fixpoint(seed):
    m = s5_closure(seed, 6)
    oracle = s5_fixpoint(seed, range(6))
    assert {(int(x), int(y)) for x, y in zip(*np.nonzero(m))} == oracle


@given(pair_sets, pair_sets)
def test_s5_closure_idempotent_monotone_symmetric(a, b):
    ma = s5_closure(a, 6)
    assert np.array_equal(s5_closure(list(zip(*np.nonzero(ma))), 6), ma)
    assert not (ma & ~s5_closure(a | b, 6)).any()
    assert np.array_equal(ma, ma.T)
    assert is_reflexive(ma) and is_transitive(ma) and is_euclidean(ma)


def test_canonical_families_pass(upq):
    for fam in canonical_families(upq, ["a", "b"]):
        assert check_modal_relation(fam).ok
    assert check_modal_relation(identity_family(RuleUniverse(["p", "q", "r"], 1))).ok


def test_consistent_to_everything_fails_b(upq):
    m = np.zeros((64, 64), dtype=bool)
    m[upq.consistent, :] = True
    inc = np.flatnonzero(upq.inconsistent)
    m[np.ix_(inc, inc)] = True
    rep = check_agent(m, upq)
    assert "b" in rep.failures
    b, c = rep.failures["b"]
    assert upq.consistent[b] and upq.inconsistent[c] and m[b, c]


@pytest.mark.parametrize(
    "name, atoms, expected",
    [
        ("corrupt_b.rel", ["p"], {"b", "c", "euclidean"}),
        ("corrupt_c.rel", ["p", "q"], {"c"}),
        ("corrupt_d.rel", ["p", "q"], {"d"}),
        ("not_reflexive.rel", ["p"], {"c", "reflexive"}),
    ],
)
def test_corrupted_fixtures(fixtures, name, atoms, expected):
    u = RuleUniverse(atoms, 1)
    fam = read_relations((fixtures / name).read_text(), u)
    rep = check_modal_relation(fam)
    assert set(rep.agents["a"].failures) == expected
    assert set(rep.agents["a"].failures) == modal_conditions_oracle(u, set(fam.pairs("a")))


def test_witnesses_are_genuine(fixtures):
    u = RuleUniverse(["p", "q"], 1)
    fam = read_relations((fixtures / "corrupt_c.rel").read_text(), u)
    b, c, d = check_modal_relation(fam).agents["a"].failures["c"]
    m = fam["a"]
    assert m[b, c] and d & b == b and u.consistent[d]
    assert not any(m[d, e] for e in range(64) if e & c == c)
    fam = read_relations((fixtures / "corrupt_d.rel").read_text(), u)
    b, c, d = check_modal_relation(fam).agents["a"].failures["d"]
    assert fam["a"][b, c] and d & b == d and u.consistent[c]
    assert not any(fam["a"][d, e] for e in range(64) if e & c == e)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, (1 << 16) - 1))
def test_checker_matches_oracle_on_random_relations(code):
    u = RuleUniverse(["p"], 1)
    m = np.array([[code >> (4 * i + j) & 1 for j in range(4)] for i in range(4)], dtype=bool)
    pairs = {(i, j) for i in range(4) for j in range(4) if m[i, j]}
    assert set(check_agent(m, u).failures) == modal_conditions_oracle(u, pairs)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 63), st.integers(0, 63)), max_size=3))
def test_checker_matches_oracle_on_equivalences(seed):
    u = RuleUniverse(["p", "q"], 1)
    m = s5_closure(seed, u)
    pairs = {(int(x), int(y)) for x, y in zip(*np.nonzero(m))}
    assert set(check_agent(m, u).failures) == modal_conditions_oracle(u, pairs)


def test_enumerate_families_p(up):
    fams = list(enumerate_families(up, ["a"]))
    assert fams and all(check_modal_relation(f).ok for f in fams)
    assert identity_family(up) in fams
    assert all(f["a"].any() for f in fams)
    # same set as filtering every reflexive relation through the oracle
    expected = set()
    off = [(i, j) for i in range(4) for j in range(4) if i != j]
    for bits in itertools.product((0, 1), repeat=len(off)):
        pairs = {(i, i) for i in range(4)} | {p for p, on in zip(off, bits) if on}
        if not modal_conditions_oracle(up, pairs):
            expected.add(frozenset(pairs))
    assert {frozenset(f.pairs("a")) for f in fams} == expected


def test_enumerate_families_too_large(upq):
    with pytest.raises(UniverseTooLarge):
        next(enumerate_families(upq, ["a"]))


def test_sample_families(upq):
    assert sample_families(upq, ["a"], 0, seed=1).families == []
    res = sample_families(upq, ["a", "b"], 4, seed=7)
    assert len(res.families) == 4
    assert all(check_modal_relation(f).ok for f in res.families)
    again = sample_families(upq, ["a", "b"], 4, seed=7)
    assert res.families == again.families


def test_sampling_budget_reported(upq):
    res = sample_families(upq, ["a"], 5, seed=0, budget=1)
    assert res.exhausted and len(res.families) <= 1
    with pytest.raises(ValueError):
        sample_families(upq, ["a"], -1)


def test_relation_file_round_trip(upq):
    fam = two_block_family(upq, ["a", "b"])
    back = read_relations(write_relations(fam), upq)
    assert back == fam and back.agents == ("a", "b")


@pytest.mark.parametrize(
    "text, msg",
    [("0 1\n", "before any"), ("agent: a\n0\n", "expected"), ("agent: a\n0 99\n", "out of range")],
)
def test_relation_file_errors(up, text, msg):
    with pytest.raises(ValueError, match=msg):
        read_relations(text, up)


def test_family_validation(up):
    with pytest.raises(ValueError):
        RelationFamily(up, {})
    with pytest.raises(ValueError):
        RelationFamily(up, {"a": np.eye(3, dtype=bool)})
    fam = identity_family(up, ["b", "a"])
    assert fam.agents == ("a", "b")
    with pytest.raises(KeyError):
        fam["c"]
    with pytest.raises(ValueError):
        fam["a"][0, 0] = False
