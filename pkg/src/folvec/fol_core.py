"""Abstract syntax for first-order logic terms and formulas.

Terms and formulas are immutable trees.  Variables are uppercase-initial,
function/constant/predicate names are lowercase-initial (TPTP convention).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

VARIABLE_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
SYMBOL_RE = re.compile(r"[a-z0-9][A-Za-z0-9_]*\Z")


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not VARIABLE_RE.match(self.name):
            raise ValueError(f"bad variable name: {self.name!r}")


@dataclass(frozen=True)
class Constant:
    name: str

    def __post_init__(self):
        if not SYMBOL_RE.match(self.name):
            raise ValueError(f"bad constant name: {self.name!r}")


@dataclass(frozen=True)
class Application:
    fn: str
    args: tuple

    def __post_init__(self):
        if not SYMBOL_RE.match(self.fn):
            raise ValueError(f"bad function name: {self.fn!r}")
        if len(self.args) < 1:
            raise ValueError("Application needs at least one argument")
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Variable, Constant, Application]


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __post_init__(self):
        if not SYMBOL_RE.match(self.pred):
            raise ValueError(f"bad predicate name: {self.pred!r}")
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __post_init__(self):
        if not VARIABLE_RE.match(self.var):
            raise ValueError(f"bad bound variable: {self.var!r}")


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __post_init__(self):
        if not VARIABLE_RE.match(self.var):
            raise ValueError(f"bad bound variable: {self.var!r}")


Formula = Union[Atom, Not, And, Or, Implies, Iff, Forall, Exists]

BINARY_OPS = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}
QUANTIFIERS = {Forall: "!", Exists: "?"}

Expr = Union[Term, Formula]


def is_term(e: Expr) -> bool:
    return isinstance(e, (Variable, Constant, Application))


def is_formula(e: Expr) -> bool:
    return not is_term(e)


# ---------------------------------------------------------------------------
# Pretty printing


def _ends_in_quantifier(e: Expr) -> bool:
    """Does e's unparenthesized right spine end in a quantifier?"""
    while isinstance(e, Not):
        e = e.body
    return isinstance(e, (Forall, Exists))


def pretty_print(e: Expr) -> str:
    """Render a tree in the TPTP-like surface syntax.

    Binary connectives are always fully parenthesized, so the output
    re-parses to a structurally identical tree.
    """
    if isinstance(e, (Variable, Constant)):
        return e.name
    if isinstance(e, Application):
        return f"{e.fn}({','.join(pretty_print(a) for a in e.args)})"
    if isinstance(e, Atom):
        if not e.args:
            return e.pred
        return f"{e.pred}({','.join(pretty_print(a) for a in e.args)})"
    if isinstance(e, Not):
        return f"~{pretty_print(e.body)}"
    if isinstance(e, (And, Or, Implies, Iff)):
        op = BINARY_OPS[type(e)]
        left = pretty_print(e.left)
        if _ends_in_quantifier(e.left):
            # a bare quantifier on the left's right spine would absorb
            # the operator on re-parse (bodies extend maximally right)
            left = f"({left})"
        return f"({left} {op} {pretty_print(e.right)})"
    if isinstance(e, (Forall, Exists)):
        q = QUANTIFIERS[type(e)]
        return f"{q}[{e.var}]: {pretty_print(e.body)}"
    raise TypeError(f"not a term or formula: {e!r}")


# ---------------------------------------------------------------------------
# Structural measures


def children(e: Expr) -> tuple:
    """Ordered children in the labeled-tree view.

    Quantifiers contribute their bound variable as a leaf child followed by
    the body; atoms and applications contribute their term arguments.
    """
    if isinstance(e, (Variable, Constant)):
        return ()
    if isinstance(e, Application):
        return e.args
    if isinstance(e, Atom):
        return e.args
    if isinstance(e, Not):
        return (e.body,)
    if isinstance(e, (And, Or, Implies, Iff)):
        return (e.left, e.right)
    if isinstance(e, (Forall, Exists)):
        return (Variable(e.var), e.body)
    raise TypeError(f"not a term or formula: {e!r}")


def depth(e: Expr) -> int:
    kids = children(e)
    if not kids:
        return 1
    return 1 + max(depth(c) for c in kids)


def node_count(e: Expr) -> int:
    return 1 + sum(node_count(c) for c in children(e))


# ---------------------------------------------------------------------------
# Free variables


def free_variables(e: Expr) -> set:
    """Names of variables occurring free in a term or formula."""
    if isinstance(e, Variable):
        return {e.name}
    if isinstance(e, Constant):
        return set()
    if isinstance(e, (Application, Atom)):
        out = set()
        for a in e.args:
            out |= free_variables(a)
        return out
    if isinstance(e, Not):
        return free_variables(e.body)
    if isinstance(e, (And, Or, Implies, Iff)):
        return free_variables(e.left) | free_variables(e.right)
    if isinstance(e, (Forall, Exists)):
        return free_variables(e.body) - {e.var}
    raise TypeError(f"not a term or formula: {e!r}")


# ---------------------------------------------------------------------------
# Substitution


class Substitution:
    """Finite map from variable names to terms.

    Bindings of a variable to itself are dropped at construction.
    """

    def __init__(self, bindings: Optional[dict] = None):
        b = dict(bindings or {})
        self.bindings = {
            v: t for v, t in b.items()
            if not (isinstance(t, Variable) and t.name == v)
        }

    def __eq__(self, other):
        return isinstance(other, Substitution) and self.bindings == other.bindings

    def __repr__(self):
        inner = ", ".join(
            f"{v} -> {pretty_print(t)}" for v, t in sorted(self.bindings.items())
        )
        return "{" + inner + "}"

    def __bool__(self):
        return bool(self.bindings)

    def apply(self, t: Term) -> Term:
        return apply_substitution(t, self)

    def compose(self, other: "Substitution") -> "Substitution":
        """sigma.compose(tau): applying the result equals applying sigma
        then tau."""
        out = {v: apply_substitution(t, other) for v, t in self.bindings.items()}
        for v, t in other.bindings.items():
            if v not in out:
                out[v] = t
        return Substitution(out)


def apply_substitution(t: Term, s: Substitution) -> Term:
    """Simultaneously replace variables; no re-substitution into inserted
    terms within one application."""
    if isinstance(t, Variable):
        return s.bindings.get(t.name, t)
    if isinstance(t, Constant):
        return t
    if isinstance(t, Application):
        return Application(t.fn, tuple(apply_substitution(a, s) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Canonical renaming (alpha-normal form)


def canonical_rename(f: Formula) -> Formula:
    """Rename bound variables to V1, V2, ... in pre-order binder position.

    Free variables are left unchanged; canonical names colliding with a
    free variable of the whole formula are skipped to avoid capture.
    """
    free = free_variables(f)
    counter = [0]

    def fresh() -> str:
        while True:
            counter[0] += 1
            name = f"V{counter[0]}"
            if name not in free:
                return name

    def rename_term(t: Term, env: dict) -> Term:
        if isinstance(t, Variable):
            return Variable(env.get(t.name, t.name))
        if isinstance(t, Constant):
            return t
        return Application(t.fn, tuple(rename_term(a, env) for a in t.args))

    def rename(g: Formula, env: dict) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(rename_term(a, env) for a in g.args))
        if isinstance(g, Not):
            return Not(rename(g.body, env))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(rename(g.left, env), rename(g.right, env))
        if isinstance(g, (Forall, Exists)):
            name = fresh()
            inner = dict(env)
            inner[g.var] = name
            return type(g)(name, rename(g.body, inner))
        raise TypeError(f"not a formula: {g!r}")

    return rename(f, {})


# ---------------------------------------------------------------------------
# Signature


KINDS = ("connective", "quantifier", "predicate", "function", "constant", "variable")

PAD_ID = 0
UNK_ID = 1


class SignatureTable:
    """Bijection between (name, arity, kind) labels and dense integer ids,
    plus a character vocabulary with reserved PAD=0 and UNK=1.

    A name occurring with two arities yields two distinct labels.
    """

    def __init__(self):
        self.label_to_id: dict = {}
        self.id_to_label: list = []
        self.char_to_id: dict = {}
        self.id_to_char: list = []
        self.max_arity = 0

    # -- labels

    def register(self, name: str, arity: int, kind: str) -> int:
        if kind not in KINDS:
            raise ValueError(f"unknown kind: {kind!r}")
        key = (name, arity, kind)
        if key not in self.label_to_id:
            self.label_to_id[key] = len(self.id_to_label)
            self.id_to_label.append(key)
            self.max_arity = max(self.max_arity, arity)
        return self.label_to_id[key]

    def lookup(self, name: str, arity: int, kind: str) -> int:
        return self.label_to_id[(name, arity, kind)]

    def label(self, label_id: int):
        return self.id_to_label[label_id]

    def arity(self, label_id: int) -> int:
        return self.id_to_label[label_id][1]

    def kind_of_name(self, name: str):
        """Kinds under which a name is registered (any arity)."""
        return {k for (n, a, k) in self.label_to_id if n == name}

    def num_labels(self) -> int:
        return len(self.id_to_label)

    # -- characters

    def build_char_vocab(self, corpus) -> None:
        chars = sorted({c for line in corpus for c in line})
        self.char_to_id = {}
        self.id_to_char = ["\x00", "\x01"]  # PAD, UNK placeholders
        for c in chars:
            self.char_to_id[c] = len(self.id_to_char)
            self.id_to_char.append(c)

    def char_id(self, c: str) -> int:
        return self.char_to_id.get(c, UNK_ID)

    def char_vocab_size(self) -> int:
        return max(len(self.id_to_char), 2)

    # -- serialization

    def to_dict(self) -> dict:
        return {
            "labels": [list(k) for k in self.id_to_label],
            "chars": self.id_to_char[2:],
            "max_arity": self.max_arity,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SignatureTable":
        sig = cls()
        for name, arity, kind in d["labels"]:
            sig.register(name, int(arity), kind)
        sig.max_arity = int(d["max_arity"])
        sig.char_to_id = {}
        sig.id_to_char = ["\x00", "\x01"]
        for c in d["chars"]:
            sig.char_to_id[c] = len(sig.id_to_char)
            sig.id_to_char.append(c)
        return sig
