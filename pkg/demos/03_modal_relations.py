"""
Checking relations between bases
================================

Which relations over bases are admissible, and what the checker reports when
one is not.
"""

import numpy as np

from bes5.base import RuleUniverse
from bes5.relation import (
    RelationFamily,
    check_modal_relation,
    enumerate_families,
    s5_closure,
    sample_families,
)

u = RuleUniverse(["p"], 1)
print([str(r) for r in u.rules], "inconsistent ids:", np.flatnonzero(u.inconsistent))

# On the one-atom universe every reflexive relation can be tried.  Only a
# handful pass.
fams = list(enumerate_families(u, ["a"]))
print(len(fams), "admissible relations")
for fam in fams:
    print(sorted(fam.pairs("a")))

# Relating the empty base to an inconsistent one breaks the rule that
# consistent bases only see consistent bases.
bad = RelationFamily(u, {"a": s5_closure([(0, 1)], u)})
for line in check_modal_relation(bad).lines():
    print(line)

# Sampling rejects candidates that fail, so whatever it returns passes.  When
# the attempt budget runs out first, the result says so.
big = RuleUniverse(["p", "q"], 1)
res = sample_families(big, ["a", "b"], 3, seed=4)
print(len(res.families), "sampled, budget exhausted:", res.exhausted)
print([check_modal_relation(f).ok for f in res.families])
