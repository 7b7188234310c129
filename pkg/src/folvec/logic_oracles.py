"""Exact symbolic deciders for the six logical properties.

These are the ground-truth labelers for dataset generation and the
independent checks for everything the neural models are later asked to do.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Set, Union

from .fol_core import (
    And, Application, Atom, Constant, Exists, Forall, Formula, Iff, Implies,
    Not, Or, Substitution, Term, Variable, apply_substitution,
    canonical_rename,
)
from .tptp_parser import ParseError, parse_formula


# ---------------------------------------------------------------------------
# Subformulas


def subformulas(f: Formula) -> Set[Formula]:
    """All subformulas of f, recursing through connectives and quantifiers
    but never into terms (atoms are base cases)."""
    if isinstance(f, Atom):
        return {f}
    if isinstance(f, Not):
        return subformulas(f.body) | {f}
    if isinstance(f, (And, Or, Implies, Iff)):
        return subformulas(f.left) | subformulas(f.right) | {f}
    if isinstance(f, (Forall, Exists)):
        return subformulas(f.body) | {f}
    raise TypeError(f"not a formula: {f!r}")


def is_subformula(candidate: Formula, whole: Formula) -> bool:
    return candidate in subformulas(whole)


# ---------------------------------------------------------------------------
# Alpha equivalence


def alpha_equivalent(a: Formula, b: Formula) -> bool:
    """Equality modulo renaming of bound variables."""
    return canonical_rename(a) == canonical_rename(b)


# ---------------------------------------------------------------------------
# Unification


@dataclass(frozen=True)
class Unifiable:
    mgu: Substitution


@dataclass(frozen=True)
class NotUnifiable:
    reason: str  # "clash" or "occurs_check"


UnifyResult = Union[Unifiable, NotUnifiable]


def _occurs(name: str, t: Term) -> bool:
    if isinstance(t, Variable):
        return t.name == name
    if isinstance(t, Constant):
        return False
    return any(_occurs(name, a) for a in t.args)


def unify(t1: Term, t2: Term) -> UnifyResult:
    """Robinson-style syntactic unification with occurs check.

    Returns the most general unifier as an idempotent substitution.
    """
    subst: dict = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = apply_substitution(a, Substitution(subst))
        b = apply_substitution(b, Substitution(subst))
        if isinstance(a, Variable) and isinstance(b, Variable) and a.name == b.name:
            continue
        if isinstance(a, Variable) or isinstance(b, Variable):
            if not isinstance(a, Variable):
                a, b = b, a
            if _occurs(a.name, b):
                return NotUnifiable("occurs_check")
            binding = Substitution({a.name: b})
            subst = {v: apply_substitution(t, binding) for v, t in subst.items()}
            subst[a.name] = b
            continue
        if isinstance(a, Constant) and isinstance(b, Constant):
            if a.name != b.name:
                return NotUnifiable("clash")
            continue
        if isinstance(a, Application) and isinstance(b, Application):
            if a.fn != b.fn or len(a.args) != len(b.args):
                return NotUnifiable("clash")
            stack.extend(zip(a.args, b.args))
            continue
        return NotUnifiable("clash")
    return Unifiable(Substitution(subst))


# ---------------------------------------------------------------------------
# Modus ponens closure


def _strip_shared_prefix(premise: Formula, goal: Formula):
    """Strip an identical leading universal prefix from both formulas.

    Both inputs must already be in canonical-renamed form, so matching
    prefixes carry identical bound names positionally.
    """
    while (
        isinstance(premise, Forall)
        and isinstance(goal, Forall)
        and premise.var == goal.var
    ):
        premise = premise.body
        goal = goal.body
    return premise, goal


def mp_derivable(premise: Formula, goal: Formula, k: int = 3) -> bool:
    """Is goal derivable from premise in at most k closure rounds of
    conjunction elimination and modus ponens (syntactic matching only)?

    A shared outermost universal prefix is stripped identically first;
    comparisons happen on canonical-renamed forms.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    p = canonical_rename(premise)
    g = canonical_rename(goal)
    p, g = _strip_shared_prefix(p, g)
    g = canonical_rename(g)
    derived = {canonical_rename(p)}
    if g in derived:
        return True
    for _ in range(k):
        new = set()
        for f in derived:
            if isinstance(f, And):
                new.add(canonical_rename(f.left))
                new.add(canonical_rename(f.right))
        for f in derived:
            if isinstance(f, Implies) and canonical_rename(f.left) in derived:
                new.add(canonical_rename(f.right))
        if new <= derived:
            return False
        derived |= new
        if g in derived:
            return True
    return g in derived


# ---------------------------------------------------------------------------
# Well-formedness


def is_well_formed(s: str) -> bool:
    try:
        parse_formula(s)
        return True
    except ParseError:
        return False
