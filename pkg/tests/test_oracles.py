import itertools
import random

from folvec.fol_core import (
    Application, Constant, Variable, apply_substitution, free_variables,
    pretty_print,
)
from folvec.logic_oracles import (
    NotUnifiable, Unifiable, alpha_equivalent, is_subformula,
    is_well_formed, mp_derivable, subformulas, unify,
)
from folvec.tptp_parser import parse_formula, parse_term


def test_subformulas_never_enter_terms():
    f = parse_formula("p(f(a)) & q(b)")
    subs = {pretty_print(s) for s in subformulas(f)}
    assert subs == {"(p(f(a)) & q(b))", "p(f(a))", "q(b)"}


def test_subformula_quantifier_body():
    whole = parse_formula("![X]: (p(X) => q(X))")
    assert is_subformula(parse_formula("p(X)"), whole)
    assert not is_subformula(parse_formula("p(Y)"), whole)


def test_alpha_equivalent():
    assert alpha_equivalent(parse_formula("![X]: ?[Y]: p(X,Y)"),
                            parse_formula("![U]: ?[V]: p(U,V)"))
    # free variables must match exactly
    assert not alpha_equivalent(parse_formula("p(X)"), parse_formula("p(Y)"))
    # collapsing two binders is not alpha equivalence
    assert not alpha_equivalent(parse_formula("![X]: ![Y]: p(X,Y)"),
                                parse_formula("![X]: ![X]: p(X,X)"))


def test_unify_examples():
    r = unify(parse_term("f(g(X),Y)"), parse_term("f(Z,h(c))"))
    assert isinstance(r, Unifiable)
    a = apply_substitution(parse_term("f(g(X),Y)"), r.mgu)
    b = apply_substitution(parse_term("f(Z,h(c))"), r.mgu)
    assert a == b

    r = unify(parse_term("X"), parse_term("f(X)"))
    assert isinstance(r, NotUnifiable) and r.reason == "occurs_check"

    r = unify(parse_term("f(a)"), parse_term("g(a)"))
    assert isinstance(r, NotUnifiable) and r.reason == "clash"

    r = unify(parse_term("X"), parse_term("X"))
    assert isinstance(r, Unifiable) and not r.mgu.bindings


def test_mgu_idempotent_random():
    rng = random.Random(0)

    def rand_term(depth):
        if depth == 0 or rng.random() < 0.4:
            return rng.choice([Variable("X"), Variable("Y"), Variable("Z"),
                               Constant("a"), Constant("b")])
        if rng.random() < 0.5:
            return Application("g", (rand_term(depth - 1),))
        return Application("f", (rand_term(depth - 1), rand_term(depth - 1)))

    for _ in range(300):
        t1, t2 = rand_term(3), rand_term(3)
        r = unify(t1, t2)
        if isinstance(r, Unifiable):
            s = r.mgu
            assert apply_substitution(t1, s) == apply_substitution(t2, s)
            for v, t in s.bindings.items():
                assert apply_substitution(t, s) == t  # idempotent


def _ground_instances(t, consts, depth):
    """All ground instantiations of t's variables by ground terms of
    bounded depth (tiny enumeration used to cross-check unify)."""
    def ground_terms(d):
        out = list(consts)
        if d > 0:
            for s in ground_terms(d - 1):
                out.append(Application("g", (s,)))
        return out

    vs = sorted(v.name for v in free_variables_term(t))
    pool = ground_terms(depth)
    for combo in itertools.product(pool, repeat=len(vs)):
        from folvec.fol_core import Substitution
        yield apply_substitution(t, Substitution(dict(zip(vs, combo))))


def free_variables_term(t):
    if isinstance(t, Variable):
        return {t}
    if isinstance(t, Application):
        out = set()
        for a in t.args:
            out |= free_variables_term(a)
        return out
    return set()


def test_unify_agrees_with_ground_enumeration():
    rng = random.Random(1)
    consts = [Constant("a"), Constant("b")]

    def rand_term(depth):
        if depth == 0 or rng.random() < 0.4:
            return rng.choice([Variable("X"), Variable("Y"),
                               Constant("a"), Constant("b")])
        if rng.random() < 0.5:
            return Application("g", (rand_term(depth - 1),))
        return Application("f", (rand_term(depth - 1), rand_term(depth - 1)))

    for _ in range(60):
        t1, t2 = rand_term(2), rand_term(2)
        r = unify(t1, t2)
        grounds1 = set(_ground_instances(t1, consts, 2))
        grounds2 = set(_ground_instances(t2, consts, 2))
        ground_match = bool(grounds1 & grounds2)
        if ground_match:
            # a common ground instance implies unifiability
            assert isinstance(r, Unifiable)


def test_mp_derivable():
    yes = [("p(a) & (p(a) => q(b))", "q(b)"),
           ("(p(a) => q(b)) & p(a)", "q(b)"),
           ("![X]: (p(X) & (p(X) => q(X)))", "![X]: q(X)"),
           ("![X]: (p(X) & (p(X) => q(X)))", "![Y]: q(Y)"),
           ("p(a)", "p(a)")]
    no = [("p(a) & (p(b) => q(b))", "q(b)"),
          ("p(a) & (p(a) => q(b))", "q(c)"),
          ("q(b) => p(a)", "p(a)"),
          # no instantiation: ![X]:p(X) does not syntactically match p(a)
          ("![X]: p(X) & (p(a) => q(a))", "q(a)")]
    for p, g in yes:
        assert mp_derivable(parse_formula(p), parse_formula(g)), (p, g)
    for p, g in no:
        assert not mp_derivable(parse_formula(p), parse_formula(g)), (p, g)


def test_mp_budget():
    # a two-step chain resolves in 4 closure rounds, not 3
    f = parse_formula("p(a) & (p(a) => q(b)) & (q(b) => r(c))")
    goal = parse_formula("r(c)")
    assert not mp_derivable(f, goal, k=3)
    assert mp_derivable(f, goal, k=4)
    # a four-step chain needs 6 rounds
    chain = ("p0(a) & (p0(a) => p1(a)) & (p1(a) => p2(a)) "
             "& (p2(a) => p3(a)) & (p3(a) => p4(a))")
    assert not mp_derivable(parse_formula(chain), parse_formula("p4(a)"), k=5)
    assert mp_derivable(parse_formula(chain), parse_formula("p4(a)"), k=6)


def test_is_well_formed():
    assert is_well_formed("![X]: (p(X) => q(X,a))")
    assert not is_well_formed("p(a")
    # function/predicate symbols share lexical space: a bare
    # application string parses as an atomic formula
    assert is_well_formed("f(a)")
    assert not is_well_formed("!]D[: p(D)")
