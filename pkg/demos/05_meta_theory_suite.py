"""
Structural checks over every base
=================================

Monotonicity, ex falso, classical behaviour at maximal bases, modus ponens,
necessitation and the axioms, checked over all bases and several families.
"""

import time

from bes5.base import RuleUniverse
from bes5.relation import enumerate_families, identity_family, two_block_family
from bes5.lemmas import run_lemma_suite

u = RuleUniverse(["p", "q"], 1)
fams = [("identity", identity_family(u, ["a", "b"])), ("two_block", two_block_family(u, ["a", "b"]))]

t0 = time.perf_counter()
rep = run_lemma_suite(u, fams, n_random=100, seed=0)
print("\n".join(rep.lines()))
print(f"{time.perf_counter() - t0:.2f}s")

# Every admissible family over the one-atom universe, two agents.
small = RuleUniverse(["p"], 1)
rep = run_lemma_suite(small, list(enumerate_families(small, ["a", "b"])), n_random=50)
print(rep.lines()[-1])
