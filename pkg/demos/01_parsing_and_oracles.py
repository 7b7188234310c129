"""Parsing the TPTP-style surface syntax and querying the symbolic oracles.

Run: python3 demos/01_parsing_and_oracles.py
"""

from folvec.fol_core import depth, free_variables, node_count, pretty_print
from folvec.logic_oracles import (
    NotUnifiable, Unifiable, alpha_equivalent, is_subformula, mp_derivable,
    unify,
)
from folvec.tptp_parser import parse_formula, parse_term

# A formula with every construct: quantifiers, connectives, nested terms.
s = "![D]: ![F]: (disjoint(D,F) <=> ~intersect(D,F))"
f = parse_formula(s)
print("parsed:", s)
print("  printed back:", pretty_print(f))
print("  depth:", depth(f), " nodes:", node_count(f))
print("  free variables:", free_variables(parse_formula("p(X,Y) & q(Y)")))

# Subformula and alpha-equivalence oracles.
whole = parse_formula("![X]: (p(X) => q(X))")
print("\np(X) subformula of", pretty_print(whole), "->",
      is_subformula(parse_formula("p(X)"), whole))
print("![X]: p(X)  ~a~  ![Y]: p(Y) ->",
      alpha_equivalent(parse_formula("![X]: p(X)"),
                       parse_formula("![Y]: p(Y)")))

# Robinson unification with occurs check.
for a, b in [("f(g(X),Y)", "f(Z,h(c))"), ("X", "f(X)"), ("f(a)", "g(a)")]:
    r = unify(parse_term(a), parse_term(b))
    if isinstance(r, Unifiable):
        print(f"unify({a}, {b}) -> mgu {r.mgu}")
    else:
        print(f"unify({a}, {b}) -> not unifiable ({r.reason})")

# Bounded modus-ponens derivability (syntactic matching only).
prem = parse_formula("![X]: (p(X) & (p(X) => q(X)))")
goal = parse_formula("![Y]: q(Y)")
print("\nMP:", pretty_print(prem), "|-", pretty_print(goal), "->",
      mp_derivable(prem, goal, k=3))
