"""Tokenizer and recursive-descent parser for the TPTP-subset syntax.

Accepted grammar (normative for this package):

    formula   := iff
    iff       := disj (("=>" | "<=>") iff)?          right-associative
    disj      := conj ("|" disj)?                    right-associative
    conj      := unary ("&" conj)?                   right-associative
    unary     := "~" unary
               | ("!" | "?") "[" VAR ("," VAR)* "]" ":" unary
               | "(" formula ")"
               | atom
    atom      := NAME ("(" term ("," term)* ")")?
    term      := VAR | NAME ("(" term ("," term)* ")")?

Quantifier bodies extend maximally to the right; `![X,Y]:` is sugar for
`![X]: ![Y]:`.  Input files may wrap formulas as `fof(name, role, F).`;
the wrapper is stripped, lines starting with `%` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Union

from .fol_core import (
    And, Application, Atom, Constant, Exists, Forall, Formula, Iff, Implies,
    Not, Or, SignatureTable, Term, Variable,
)


class ParseError(Exception):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"at offset {position}: expected {expected}")


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    position: int


_TOKEN_SPEC = [
    ("IFF", r"<=>"),
    ("IMPLIES", r"=>"),
    ("AND", r"&"),
    ("OR", r"\|"),
    ("NOT", r"~"),
    ("FORALL", r"!"),
    ("EXISTS", r"\?"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("LBRACK", r"\["),
    ("RBRACK", r"\]"),
    ("COMMA", r","),
    ("COLON", r":"),
    ("VAR", r"[A-Z][A-Za-z0-9_]*"),
    ("NAME", r"[a-z0-9][A-Za-z0-9_]*"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _TOKEN_SPEC))
_WS_RE = re.compile(r"\s*")


def tokenize(s: str) -> List[Token]:
    """Lex a formula string; raises ParseError on an illegal character."""
    tokens = []
    pos = 0
    n = len(s)
    while pos < n:
        pos = _WS_RE.match(s, pos).end()
        if pos >= n:
            break
        m = _TOKEN_RE.match(s, pos)
        if m is None:
            raise ParseError(pos, "a token")
        tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token], length: int):
        self.tokens = tokens
        self.i = 0
        self.length = length

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        t = self.peek()
        return t.position if t else self.length

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t is None or t.kind != kind:
            raise ParseError(self.pos(), kind)
        self.i += 1
        return t

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    # -- formula grammar

    def formula(self) -> Formula:
        left = self.disj()
        t = self.peek()
        if t and t.kind in ("IMPLIES", "IFF"):
            self.i += 1
            right = self.formula()
            return Implies(left, right) if t.kind == "IMPLIES" else Iff(left, right)
        return left

    def disj(self) -> Formula:
        left = self.conj()
        t = self.peek()
        if t and t.kind == "OR":
            self.i += 1
            return Or(left, self.disj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        t = self.peek()
        if t and t.kind == "AND":
            self.i += 1
            return And(left, self.conj())
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t is None:
            raise ParseError(self.pos(), "a formula")
        if t.kind == "NOT":
            self.i += 1
            return Not(self.unary())
        if t.kind in ("FORALL", "EXISTS"):
            self.i += 1
            self.expect("LBRACK")
            names = [self.expect("VAR").lexeme]
            while self.peek() and self.peek().kind == "COMMA":
                self.i += 1
                names.append(self.expect("VAR").lexeme)
            self.expect("RBRACK")
            self.expect("COLON")
            # quantifier bodies extend maximally to the right
            body = self.formula()
            ctor = Forall if t.kind == "FORALL" else Exists
            for name in reversed(names):
                body = ctor(name, body)
            return body
        if t.kind == "LPAREN":
            self.i += 1
            f = self.formula()
            self.expect("RPAREN")
            return f
        if t.kind == "NAME":
            return self.atom()
        raise ParseError(t.position, "a formula")

    def atom(self) -> Atom:
        name = self.expect("NAME")
        args = self.maybe_args()
        return Atom(name.lexeme, args)

    def maybe_args(self) -> tuple:
        t = self.peek()
        if t is None or t.kind != "LPAREN":
            return ()
        self.i += 1
        args = [self.term()]
        while self.peek() and self.peek().kind == "COMMA":
            self.i += 1
            args.append(self.term())
        self.expect("RPAREN")
        return tuple(args)

    # -- term grammar

    def term(self) -> Term:
        t = self.peek()
        if t is None:
            raise ParseError(self.pos(), "a term")
        if t.kind == "VAR":
            self.i += 1
            return Variable(t.lexeme)
        if t.kind == "NAME":
            self.i += 1
            args = self.maybe_args()
            if args:
                return Application(t.lexeme, args)
            return Constant(t.lexeme)
        raise ParseError(t.position, "a term")


_FOF_RE = re.compile(r"\s*fof\s*\(\s*[\w$]+\s*,\s*[\w$]+\s*,(.*)\)\s*\.\s*\Z", re.S)


def strip_fof_wrapper(line: str) -> str:
    """Unwrap `fof(name, role, F).` to F when present."""
    m = _FOF_RE.match(line)
    return m.group(1).strip() if m else line


def parse_formula(s: str) -> Formula:
    p = _Parser(tokenize(s), len(s))
    f = p.formula()
    if not p.at_end():
        raise ParseError(p.pos(), "end of input")
    return f


def parse_term(s: str) -> Term:
    p = _Parser(tokenize(s), len(s))
    t = p.term()
    if not p.at_end():
        raise ParseError(p.pos(), "end of input")
    return t


def classify_string(s: str, signature: Optional[SignatureTable] = None) -> str:
    """Classify a string as "term", "formula" or "neither".

    Strings like `p(X)` are ambiguous; the registered kind of the root
    symbol breaks the tie, with unseen symbols preferring "term".
    """
    term = None
    formula = None
    try:
        term = parse_term(s)
    except ParseError:
        pass
    try:
        formula = parse_formula(s)
    except ParseError:
        pass
    if term is None and formula is None:
        return "neither"
    if term is None:
        return "formula"
    if formula is None:
        return "term"
    # both parse: root is NAME(...) or bare NAME
    if isinstance(formula, Atom) and signature is not None:
        kinds = signature.kind_of_name(formula.pred)
        if "predicate" in kinds and not ({"function", "constant"} & kinds):
            return "formula"
    return "term"


def load_corpus(path) -> List[str]:
    """Read one formula per line, skipping blanks and `%` comments and
    stripping fof wrappers."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            out.append(strip_fof_wrapper(line))
    return out
