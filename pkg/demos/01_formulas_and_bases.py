"""
Formulas, rules and bases
=========================

A tour of the syntax layer and of atomic derivability.
"""

# Formulas are built from atoms, ``bot``, implication and one box per agent.
# Negation is sugar for ``f -> bot``.
from bes5.formula import dump_ast, parse_formula, print_formula, subformulas

f = parse_formula("~[a]p -> [a]~[a]p")
print(print_formula(f))
print(dump_ast(f))

# Subformulas come out children-first, each one once.
for g in subformulas(f):
    print("  ", print_formula(g))

# A rule universe fixes an alphabet and a premise cap.  Every base is a subset
# of its rules, so bases are numbered by bitmask.
from bes5.base import RuleUniverse, closure, is_inconsistent

u = RuleUniverse(["p", "q"], premise_cap=1)
print([str(r) for r in u.rules])
print("bases:", u.n_bases, "maximally consistent:", u.maximal_ids)

# Closure is forward chaining to a fixpoint.
b = u.base(["=> p", "p => q"])
print(b.id, sorted(a.name for a in closure(b)))

# A base is inconsistent once it derives every atom of the alphabet.
print(is_inconsistent(b), is_inconsistent(u.base(["=> p"])))

# The vector tables cover every base at once.
print("inconsistent bases:", int(u.inconsistent.sum()), "of", u.n_bases)
