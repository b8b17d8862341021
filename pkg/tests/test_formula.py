import pytest
from hypothesis import given, settings, strategies as st

from bes5.formula import (
    BOT,
    Atom,
    FormulaSyntaxError,
    Implies,
    Know,
    atoms_of,
    agents_of,
    dump_ast,
    fresh_atoms,
    iter_nodes,
    neg,
    node_count,
    parse_formula,
    print_formula,
    subformulas,
)

from conftest import P, Q, formulas

A = "a"


def test_identity_implication():
    assert parse_formula("p -> p") == Implies(P, P)


def test_k_axiom_shape():
    f = parse_formula("[a](p -> q) -> ([a]p -> [a]q)")
    assert f == Implies(Know(A, Implies(P, Q)), Implies(Know(A, P), Know(A, Q)))


def test_axiom5_desugars_negation():
    f = parse_formula("~[a]p -> [a]~[a]p")
    kp = Know(A, P)
    assert f == Implies(Implies(kp, BOT), Know(A, Implies(kp, BOT)))


def test_arrow_is_right_associative():
    assert parse_formula("p -> q -> p") == Implies(P, Implies(Q, P))
    assert print_formula(parse_formula("p->q->r")) == "p -> q -> r"


def test_k_brace_alias():
    assert parse_formula("K{a}p") == parse_formula("[a]p")


def test_negation_binds_tighter_than_arrow():
    assert parse_formula("~p -> q") == Implies(neg(P), Q)


@pytest.mark.parametrize(
    "f, text",
    [
        (Implies(P, P), "p -> p"),
        (Know(A, BOT), "[a]bot"),
        (Implies(Implies(P, BOT), BOT), "~~p"),
        (Implies(Implies(P, Q), P), "(p -> q) -> p"),
        (Know("b", Implies(P, Q)), "[b](p -> q)"),
    ],
)
def test_printer(f, text):
    assert print_formula(f) == text


@pytest.mark.parametrize(
    "text, col",
    [("p ->", 5), ("p q", 3), ("(p", 3), ("p & q", 3), ("[a p", 4), ("", 1)],
)
def test_syntax_errors_carry_position(text, col):
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula(text)
    assert e.value.line == 1
    assert e.value.column == col


def test_error_line_on_multiline_input():
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula("p ->\n  ->")
    assert (e.value.line, e.value.column) == (2, 3)


def test_bot_is_reserved():
    assert parse_formula("bot") == BOT
    with pytest.raises(FormulaSyntaxError):
        parse_formula("[bot]p")


def test_subformulas_post_order():
    assert subformulas(P) == [P]
    assert subformulas(Implies(P, Q)) == [P, Q, Implies(P, Q)]
    assert subformulas(Know(A, P)) == [P, Know(A, P)]
    assert subformulas(Implies(P, P)) == [P, Implies(P, P)]


def test_atoms_of():
    assert atoms_of(BOT) == frozenset()
    assert atoms_of(parse_formula("p -> q")) == {P, Q}
    assert atoms_of(parse_formula("[a]p -> [b]p")) == {P}
    assert agents_of(parse_formula("[a]p -> [b]p")) == {"a", "b"}


def test_fresh_atoms_examples():
    assert fresh_atoms(0, {P}) == []
    assert fresh_atoms(2, {P}) == [Atom("q0"), Atom("q1")]
    assert fresh_atoms(1, {Atom("q0")}) == [Atom("q1")]
    with pytest.raises(ValueError):
        fresh_atoms(-1, set())


def test_dump_ast():
    assert dump_ast(parse_formula("[a]bot")) == "Know(a, Bottom)"


@given(formulas())
def test_round_trip(f):
    assert parse_formula(print_formula(f)) == f


@given(formulas())
def test_subformulas_are_subtrees(f):
    subs = subformulas(f)
    nodes = set(iter_nodes(f))
    assert len(subs) <= node_count(f)
    assert len(set(subs)) == len(subs)
    assert set(subs) == nodes
    assert subs[-1] == f
    pos = {g: i for i, g in enumerate(subs)}
    for g in subs:
        for c in (getattr(g, "left", None), getattr(g, "right", None), getattr(g, "body", None)):
            if c is not None:
                assert pos[c] < pos[g]


@settings(max_examples=200)
@given(st.integers(0, 30), st.sets(st.sampled_from([f"q{i}" for i in range(20)] + ["p", "r"])))
def test_fresh_atoms_disjoint_and_distinct(n, avoid):
    avoid = {Atom(a) for a in avoid}
    out = fresh_atoms(n, avoid)
    assert len(out) == n == len(set(out))
    assert not set(out) & avoid
    assert out == fresh_atoms(n, avoid)
