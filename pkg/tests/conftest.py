from pathlib import Path

import pytest
from hypothesis import strategies as st

from bes5.base import RuleUniverse
from bes5.formula import BOT, Atom, Implies, Know
from bes5.relation import identity_family, two_block_family

FIXTURES = Path(__file__).parent / "fixtures"

P, Q = Atom("p"), Atom("q")

# pass/fail lines from test_acceptance.py, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


def formulas(atoms=("p", "q"), agents=("a", "b"), max_leaves=12):
    """Hypothesis strategy for formulas over the given atoms and agents."""
    leaves = st.sampled_from([Atom(a) for a in atoms] + [BOT])
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Implies, inner, inner),
            st.builds(Know, st.sampled_from(agents), inner),
        ),
        max_leaves=max_leaves,
    )


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def upq() -> RuleUniverse:
    return RuleUniverse(["p", "q"], 1)


@pytest.fixture(scope="session")
def up() -> RuleUniverse:
    return RuleUniverse(["p"], 1)


@pytest.fixture(scope="session")
def canonical_pq(upq):
    return [("identity", identity_family(upq, ["a", "b"])), ("two_block", two_block_family(upq, ["a", "b"]))]
