"""
Kripke models and Hilbert proofs
================================

The classical side: S5 models, countermodel search and proof checking.
"""

from bes5.formula import parse_formula, print_formula
from bes5.hilbert import bundled_proofs, check_proof, match_axiom
from bes5.kripke import check_frame, kripke_countermodel_search, kripke_eval, read_model

m = read_model("""
worlds: w v
agent a: w w, w v, v w, v v
agent b: w w, v v
val p: w
""")
print(check_frame(m).lines())
for text in ["[a]p", "[b]p", "[a]p -> [b]p", "[b]p -> [a]p"]:
    f = parse_formula(text)
    print(text, [kripke_eval(m, w, f) for w in m.worlds])

# Countermodel search goes by number of worlds.
for text in ["[a]p -> [b]p", "p -> [a]p", "[a]p -> [a][a]p"]:
    print(text, "->", kripke_countermodel_search(parse_formula(text), max_worlds=2).line())

# Axiom matching works by schema unification.
print(sorted(match_axiom(parse_formula("~[b]q -> [b]~[b]q"))))

# The shipped proofs all check.
for pf in bundled_proofs():
    print(f"{pf.name:20s} {check_proof(pf).line():10s} {print_formula(pf.conclusion)}")
