import pytest
from hypothesis import given, settings, strategies as st

from folvec import fol_core as fc
from folvec.fol_core import (
    And, Application, Atom, Constant, Exists, Forall, Implies, Not, Or,
    Substitution, Variable, apply_substitution, canonical_rename,
    free_variables, pretty_print,
)
from folvec.tptp_parser import parse_formula, parse_term


def test_name_validation():
    with pytest.raises(ValueError):
        Variable("x")  # variables start uppercase
    with pytest.raises(ValueError):
        Constant("A")  # symbols start lowercase
    with pytest.raises(ValueError):
        Application("F", (Constant("a"),))
    Variable("X1")
    Constant("a_b")


def test_children_tree_view():
    f = Forall("X", Atom("p", (Variable("X"),)))
    kids = fc.children(f)
    assert kids == (Variable("X"), Atom("p", (Variable("X"),)))
    assert fc.children(Atom("p", (Constant("a"),))) == (Constant("a"),)
    assert fc.children(Variable("X")) == ()


def test_depth_and_node_count():
    f = parse_formula("![X]: (p(X) => q(X,a))")
    # Forall -> (X, Implies) -> atoms -> leaves
    assert fc.depth(f) == 4
    assert fc.node_count(f) == 8


def test_free_variables():
    f = parse_formula("![X]: p(X,Y) & q(Z)")
    assert free_variables(f) == {"Y", "Z"}


def test_substitution_apply_simultaneous():
    # X -> Y and Y -> a applied simultaneously, not sequentially
    s = Substitution({"X": Variable("Y"), "Y": Constant("a")})
    t = parse_term("f(X,Y)")
    assert pretty_print(apply_substitution(t, s)) == "f(Y,a)"


def test_substitution_compose():
    s = Substitution({"X": parse_term("f(Y)")})
    t = Substitution({"Y": Constant("a")})
    c = s.compose(t)
    assert c.apply(Variable("X")) == parse_term("f(a)")
    assert c.apply(Variable("Y")) == Constant("a")


def test_compose_drops_self_binding():
    s = Substitution({"X": Variable("Y")})
    t = Substitution({"Y": Variable("X")})
    c = s.compose(t)
    assert c.apply(Variable("X")) == Variable("X")


def test_canonical_rename_basic():
    a = canonical_rename(parse_formula("![X]: p(X)"))
    b = canonical_rename(parse_formula("![Y]: p(Y)"))
    assert a == b
    assert pretty_print(a) == "![V1]: p(V1)"


def test_canonical_rename_avoids_free_capture():
    f = parse_formula("![X]: p(X,V1)")
    g = canonical_rename(f)
    # the free variable V1 must not be captured by the new binder name
    assert free_variables(g) == {"V1"}
    assert g != parse_formula("![V1]: p(V1,V1)")


def test_signature_table_roundtrip():
    sig = fc.SignatureTable()
    i = sig.register("p", 1, "predicate")
    j = sig.register("p", 2, "predicate")  # same name, two arities
    assert i != j
    assert sig.lookup("p", 1, "predicate") == i
    assert sig.label(j) == ("p", 2, "predicate")
    sig.build_char_vocab(["p(a)"])
    assert sig.char_id("p") >= 2  # PAD=0, UNK=1 reserved
    assert sig.char_id("☃") == fc.UNK_ID
    sig2 = fc.SignatureTable.from_dict(sig.to_dict())
    assert sig2.to_dict() == sig.to_dict()


# -- property-based round trips ---------------------------------------------

terms = st.recursive(
    st.sampled_from([Variable("X"), Variable("Y"), Constant("a"),
                     Constant("b")]),
    lambda kids: st.builds(
        lambda args: Application("f", tuple(args)),
        st.lists(kids, min_size=1, max_size=2)),
    max_leaves=6)

atoms = st.builds(lambda args: Atom("p", tuple(args)),
                  st.lists(terms, min_size=1, max_size=2))

formulas = st.recursive(
    atoms,
    lambda kids: st.one_of(
        st.builds(Not, kids),
        st.builds(And, kids, kids),
        st.builds(Or, kids, kids),
        st.builds(Implies, kids, kids),
        st.builds(Iff := fc.Iff, kids, kids),
        st.builds(lambda b: Forall("X", b), kids),
        st.builds(lambda b: Exists("Y", b), kids)),
    max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_pretty_print_parse_roundtrip(f):
    assert parse_formula(pretty_print(f)) == f


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_canonical_rename_idempotent(f):
    g = canonical_rename(f)
    assert canonical_rename(g) == g
    assert free_variables(g) == free_variables(f)
