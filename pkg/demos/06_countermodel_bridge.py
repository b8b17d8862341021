"""
From a Kripke countermodel to a base countermodel
=================================================

A formula refuted at a world of an S5 model is turned into a base at which it
fails, together with the relation family that makes it fail.
"""

from bes5.base import closure
from bes5.bridge import countermodel_to_counterbase, report_text, run_bridge
from bes5.formula import parse_formula
from bes5.kripke import read_model

m = read_model("""
worlds: w v
agent a: w w, w v, v w, v v
val p: w
""")
art = run_bridge(m, "w", parse_formula("[a]p"))

# Each world gets a fresh atom, false only there, and a maximally consistent
# base built from its valuation.
for w, b in art.world_bases.items():
    print(w, art.fresh[w].name, b.id, sorted(a.name for a in closure(b)))
    print("   ", ", ".join(str(r) for r in sorted(b.members)))

# The report shows whether the rule-based relation passed the check, which
# construction was used, and the subformula-by-subformula comparison.
print(report_text(art))

# The one-call version searches for the countermodel first.
out = countermodel_to_counterbase(parse_formula("[a]p -> [b]p"), max_worlds=2)
print(out.line())
