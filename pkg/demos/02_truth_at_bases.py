"""
Truth at a base
===============

Evaluating formulas over all bases of a small universe, then validity.
"""

import numpy as np

from bes5.base import RuleUniverse
from bes5.formula import parse_formula
from bes5.relation import identity_family, two_block_family
from bes5.semantics import Canonical, EvalCache, Sampled, bes_holds, bes_valid

u = RuleUniverse(["p", "q"], 1)

# A relation family gives each agent a relation over base ids.  The identity
# family relates each base to itself; ``two_block`` lumps the consistent bases
# together and the inconsistent ones together.
ident = identity_family(u)
block = two_block_family(u)

kp = parse_formula("[a]p")
print("[a]p at the empty base:", bes_holds(kp, 0, ident), bes_holds(kp, 0, block))

# ``EvalCache`` computes whole truth vectors, one entry per base.
cache = EvalCache(block)
vec = cache.vector(parse_formula("p -> q"))
print("p -> q holds at", int(vec.sum()), "bases")
print("first few:", np.flatnonzero(vec)[:8])

# Validity runs over bases and over a set of families.
for text in ["[a]p -> p", "~[a]p -> [a]~[a]p", "p -> [a]p"]:
    print(text, "->", bes_valid(parse_formula(text), u, Canonical()).line())

# Sampling draws random S5-modal families; the seed makes it repeatable.
print(bes_valid(parse_formula("[a]p -> [a][a]p"), u, Sampled(5, seed=1)).line())
